"""
Benchmark harness: random MCT-dense circuits decomposed by each strategy,
one CSV row per (cell, seed, strategy) attempt, folded into a per-cell report.
"""
from __future__ import annotations

import csv
import json
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from itertools import product
from pathlib import Path

import numpy as np
import yaml

from .circuits import Circuit, Gate, mct_target_wires, random_mct_dense, to_diagram
from .conf import engine_setting
from .exceptions import DecompositionTimeout, FixtureFormatError
from .strategy import STRATEGY_GREEDY, STRATEGY_WEIGHTED, decompose

logger = logging.getLogger(__name__)

CSV_NAME = 'bench.csv'
AGGREGATE_NAME = 'aggregate.json'

# (minimum finished samples, class, marker), checked top to bottom
RELEVANCE_CLASSES = (
    (40, 'high', 'cube'),
    (20, 'medium', 'big_circle'),
    (1, 'low', 'small_circle'),
    (0, 'none', 'cross'),
)


@dataclass(frozen=True)
class BenchConfig:
    qubits: tuple
    nots: tuple
    cnots: tuple
    mcts: tuple
    samples: int = 50
    timeout: float = 180.0
    seed_base: int = 0
    strategies: tuple = (STRATEGY_WEIGHTED, STRATEGY_GREEDY)
    scalar_mode: bool = True

    def cells(self):
        return list(product(self.qubits, self.nots, self.cnots, self.mcts))

    def seeds(self):
        return range(self.seed_base, self.seed_base + self.samples)

    def attempts(self):
        """Every (cell, seed, strategy) attempt in a fixed order."""
        return [(*cell, seed, strategy, self.timeout, self.scalar_mode)
                for cell in self.cells() for seed in self.seeds() for strategy in self.strategies]


@dataclass(frozen=True)
class BenchRow:
    qubits: int
    nots: int
    cnots: int
    mcts: int
    seed: int
    strategy: str
    terminal_terms: int | None
    timed_out: bool
    wall_ms: float

    @property
    def cell(self):
        return (self.qubits, self.nots, self.cnots, self.mcts)

    @classmethod
    def from_csv(cls, record):
        terms = record['terminal_terms']
        return cls(
            qubits=int(record['qubits']),
            nots=int(record['nots']),
            cnots=int(record['cnots']),
            mcts=int(record['mcts']),
            seed=int(record['seed']),
            strategy=record['strategy'],
            terminal_terms=int(terms) if terms not in ('', None) else None,
            timed_out=record['timed_out'] in ('1', 'True', 'true'),
            wall_ms=float(record['wall_ms']),
        )

    def to_csv(self):
        row = asdict(self)
        row['terminal_terms'] = '' if self.terminal_terms is None else self.terminal_terms
        row['timed_out'] = int(self.timed_out)
        row['wall_ms'] = f"{self.wall_ms:.3f}"
        return row


CSV_FIELDS = [f.name for f in fields(BenchRow)]


def load_bench_config(path):
    """Read and validate a YAML bench config."""
    from .serializers import BenchConfigSerializer

    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        raise FixtureFormatError(f"Malformed YAML: {exc}", line=mark.line + 1 if mark else None) from None
    serializer = BenchConfigSerializer(data=data or {})
    if not serializer.is_valid():
        field_name, messages = next(iter(serializer.errors.items()))
        raise FixtureFormatError(f"Invalid bench config: {messages}", field=field_name)
    return serializer.save()


def _query_layer(c):
    """Hadamards on every wire outside the MCT target region."""
    targets = set(mct_target_wires(c.qubits))
    return [Gate.h(q) for q in range(c.qubits) if q not in targets]


def scalar_diagram(c):
    """
    Close ``c`` into a scalar: target-region wires run from |0⟩ to ⟨0|, every
    other wire from |+⟩ to ⟨+|. A computational-basis closure would collapse a
    classical circuit to one path and leave no star to decompose.
    """
    layer = _query_layer(c)
    d = to_diagram(Circuit(c.qubits, layer + list(c.gates) + layer, name=c.name))
    d.plug_inputs([0] * c.qubits)
    d.plug_outputs([0] * c.qubits)
    return d


def state_diagram(c):
    """The query state: |+⟩ outside the target region, |0⟩ inside, outputs left open."""
    d = to_diagram(Circuit(c.qubits, _query_layer(c) + list(c.gates), name=c.name))
    d.plug_inputs([0] * c.qubits)
    return d


def run_attempt(attempt):
    """One benchmark attempt; a timeout ends only this attempt."""
    qubits, nots, cnots, mcts, seed, strategy, timeout, scalar_mode = attempt
    circuit = random_mct_dense(qubits, nots, cnots, mcts, seed)
    d = scalar_diagram(circuit) if scalar_mode else state_diagram(circuit)
    started = time.monotonic()
    try:
        terms, timed_out = len(decompose(d, strategy, deadline=started + timeout, jobs=1)), False
    except DecompositionTimeout:
        terms, timed_out = None, True
        logger.warning(f"{circuit.name} timed out after {timeout}s with the {strategy} strategy")
    wall_ms = (time.monotonic() - started) * 1000
    return BenchRow(qubits, nots, cnots, mcts, seed, strategy, terms, timed_out, wall_ms)


def bench_run(cfg, jobs=None):
    """Run every attempt of ``cfg``; rows come back in attempt order."""
    jobs = jobs or engine_setting('BENCH_JOBS')
    attempts = cfg.attempts()
    logger.info(f"Benchmark: {len(cfg.cells())} cells, {cfg.samples} seeds, {len(attempts)} attempts, {jobs} jobs")
    if jobs == 1:
        rows = [run_attempt(a) for a in attempts]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(run_attempt, attempts))
    for cell, summary in _by_cell(rows).items():
        logger.info(f"Cell {cell} finished: {sum(1 for r in summary if not r.timed_out)}/{len(summary)} attempts")
    return rows


def _by_cell(rows):
    cells = defaultdict(list)
    for row in rows:
        cells[row.cell].append(row)
    return dict(cells)


def relevance_class(finished):
    for minimum, label, marker in RELEVANCE_CLASSES:
        if finished >= minimum:
            return label, marker
    raise ValueError(f"Finished sample count must be non-negative, got {finished}")


def aggregate(rows, baseline=STRATEGY_GREEDY, ours=STRATEGY_WEIGHTED):
    """
    Per-cell report. The ratio is baseline terms over ours, averaged over the
    seeds where both finished with a nonzero value; the improvement share is
    the fraction of those seeds where ours needed strictly fewer terms. Seeds
    whose closed diagram is zero (no terms left for either strategy) are
    counted under ``zero_valued`` and kept out of the ratio.
    """
    report = []
    for cell, cell_rows in sorted(_by_cell(rows).items()):
        terms = defaultdict(dict)
        for row in cell_rows:
            if not row.timed_out:
                terms[row.seed][row.strategy] = row.terminal_terms
        both = sorted(seed for seed, found in terms.items() if baseline in found and ours in found)
        zero_valued = [s for s in both if not terms[s][baseline] or not terms[s][ours]]
        comparable = [s for s in both if s not in zero_valued]
        ratios = [terms[s][baseline] / terms[s][ours] for s in comparable]
        improved = sum(1 for s in comparable if terms[s][ours] < terms[s][baseline])
        label, marker = relevance_class(len(comparable))
        qubits, nots, cnots, mcts = cell
        report.append({
            'qubits': qubits,
            'nots': nots,
            'cnots': cnots,
            'mcts': mcts,
            'attempts': len(cell_rows),
            'timeouts': sum(1 for r in cell_rows if r.timed_out),
            'finished': len(comparable),
            'zero_valued': len(zero_valued),
            'mean_ratio': float(np.mean(ratios)) if ratios else None,
            'improvement_share': improved / len(comparable) if comparable else None,
            'relevance': label,
            'marker': marker,
            'baseline': baseline,
        })
    return report


def write_rows(rows, path):
    """Append rows to a CSV file, writing the header only into a new or empty file."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open('a', newline='') as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerows(row.to_csv() for row in rows)


def read_rows(path):
    with Path(path).open(newline='') as handle:
        return [BenchRow.from_csv(record) for record in csv.DictReader(handle)]


def write_aggregate(report, path):
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + '\n')


def record_rows(rows):
    """Persist rows as BenchRecord objects."""
    from django.db import transaction

    from .models import BenchRecord

    with transaction.atomic():
        for row in rows:
            BenchRecord.objects.create(**asdict(row))
    logger.info(f"Recorded {len(rows)} bench rows")
