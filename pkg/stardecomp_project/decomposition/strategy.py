"""
Decomposition drivers.

A driver preprocesses a diagram, then expands a tree of terms: each
non-terminal term is split by one decomposition action, its children are
simplified and zero terms are pruned. A term is terminal once it is star-free
and Clifford. The drivers differ only in how they pick the action:

* weighted - dynamic decomposition at the highest-weight master spider,
  linked stack pairs decomposed together;
* greedy   - whichever applicable rule has the smallest scaling;
* cut      - elementary decomposition at the spider with most stars.
"""
from __future__ import annotations

import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from contextlib import ExitStack
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .catalog import (
    MAX_STAR_EDGES,
    Term,
    apply_rule,
    dynamic_decompose,
    dynamic_scaling,
    elementary_decompose,
    find_rule_sites,
    free_star_edges,
    star_edge_rule,
    star_state_rules,
)
from .circuits import diffusion_circuit, to_diagram
from .conf import engine_setting
from .diagram import EdgeType, VertexType
from .exceptions import (
    DecompositionError,
    DepthGuardError,
    DiagramError,
    OracleLimitError,
)
from .oracle import DenseTensor, statevector
from .rewrite import check_deadline, partial_simplify, push_nots_to_boundary, to_stack_form
from .scalar import ExactScalar

logger = logging.getLogger(__name__)

STRATEGY_WEIGHTED = 'weighted'
STRATEGY_GREEDY = 'greedy'
STRATEGY_CUT = 'cut'
DIFFUSION_MODES = ('auto', 'none')


@dataclass(frozen=True)
class MasterCandidate:
    vertex: int
    star_degree: int
    weight: int
    linked_pair: int | None = None


@dataclass
class TermSum:
    """Surviving terms of a decomposition plus expansion statistics."""

    terms: list = field(default_factory=list)
    raw: int = 0
    pruned: int = 0
    actions: Counter = field(default_factory=Counter)
    initial_stars: int = 0

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def absorb(self, other, factor):
        """Append ``other``'s terms scaled by ``factor`` and merge its statistics."""
        self.terms += [Term(factor * t.coefficient, t.diagram) for t in other.terms]
        self.raw += other.raw
        self.pruned += other.pruned
        self.actions.update(other.actions)

    @property
    def effective_scaling(self):
        if not self.initial_stars or not self.terms:
            return 0.0
        return math.log2(len(self.terms)) / self.initial_stars

    def stats(self):
        return {
            'terms': len(self.terms),
            'raw': self.raw,
            'pruned': self.pruned,
            'actions': dict(sorted(self.actions.items())),
            'initial_stars': self.initial_stars,
            'effective_scaling': round(self.effective_scaling, 6),
        }


@dataclass
class RunResult:
    terminal_terms: int
    statevector: DenseTensor
    probabilities: np.ndarray
    peaks: list
    threshold: float
    timings: dict
    stats: dict
    strategy: str = STRATEGY_WEIGHTED

    @property
    def peak_count(self):
        return len(self.peaks)


# -- master selection ---------------------------------------------------------

def master_weight(d, v, extra_weight=None):
    """
    Score a Z spider as a decomposition master.

    Each star edge counts 1. Behind a star edge into a Z spider w, each further
    star of w counts 1, and each degree-2 spider on a plain edge of w that
    leads on into a star counts 1, or ``extra_weight`` for a NOT.
    """
    if not d.is_spider(v) or d.type(v) != VertexType.Z:
        raise DiagramError(f"Vertex {v} is not a Z spider")
    if extra_weight is None:
        extra_weight = engine_setting('EXTRA_WEIGHT')
    weight = 0
    for e, w in d.neighbors(v):
        if d.edge_type(e) != EdgeType.STAR or w == v:
            continue
        weight += 1
        if not d.is_spider(w) or d.type(w) != VertexType.Z:
            continue
        for f, u in d.neighbors(w):
            if f == e or u == w:
                continue
            kind = d.edge_type(f)
            if kind == EdgeType.STAR:
                weight += 1
            elif kind == EdgeType.PLAIN and d.is_spider(u) and d.degree(u) == 2 and not d.self_loops(u):
                onward = d.incident_edges(u)
                further = onward[1] if onward[0] == f else onward[0]
                if d.edge_type(further) == EdgeType.STAR:
                    is_not = d.type(u) == VertexType.X and d.phase(u) == 4
                    weight += extra_weight if is_not else 1
    return weight


def _master_candidates(d):
    return [v for v in d.vertices()
            if d.is_spider(v) and d.type(v) == VertexType.Z
            and d.star_degree(v) >= 1 and not d.self_loops(v)]


def _select_master(d, extra_weight=None):
    candidates = _master_candidates(d)
    if not candidates:
        return None
    weights = {v: master_weight(d, v, extra_weight) for v in candidates}
    best_key, best = None, None
    for v in candidates:
        weight, linked = weights[v], None
        partner = d.partner(v)
        if (partner is not None and d.has_vertex(partner) and d.type(partner) == VertexType.Z
                and not d.self_loops(partner)):
            linked = partner
            weight += weights[partner] if partner in weights else master_weight(d, partner, extra_weight)
        key = (-weight, -d.star_degree(v), v)
        if best_key is None or key < best_key:
            best_key = key
            best = MasterCandidate(v, d.star_degree(v), weight, linked)
    return best


def select_master(term, extra_weight=None):
    """The highest-weight master spider of ``term``, or None when it is star-free."""
    return _select_master(term.diagram, extra_weight)


# -- actions ------------------------------------------------------------------

def _joint_dynamic(d, v, partner):
    """Dynamic decomposition of a linked stack pair, without simplifying in between."""
    terms = []
    for first in dynamic_decompose(d, v):
        child = first.diagram
        if child.has_vertex(partner) and child.star_degree(partner) and not child.self_loops(partner):
            terms += [Term(first.coefficient * second.coefficient, second.diagram)
                      for second in dynamic_decompose(child, partner)]
        else:
            terms.append(first)
    return terms


def _split_star_loop(d):
    """Open a star self-loop through an identity spider so the star-edge rules can reach it."""
    for e in d.star_edges():
        u, v, _ = d.edge(e)
        if u == v:
            result = d.copy()
            result.remove_edge(e)
            middle = result.add_vertex(VertexType.Z, 0, result.row(u))
            result.add_edge(u, middle)
            result.add_edge(middle, u, EdgeType.STAR)
            return result
    return d


def _fallback_action(d):
    """Actions for leftovers the main choosers do not cover."""
    if d.is_clifford():
        return None
    if d.star_count():
        opened = _split_star_loop(d)
        stars = free_star_edges(opened)
        rule = star_edge_rule(min(MAX_STAR_EDGES, len(stars)))
        site = find_rule_sites(opened, rule, limit=1)[0]
        return rule.rule_id, partial(apply_rule, opened, rule, site)
    v = d.non_clifford_spiders()[0]
    return 'elementary', partial(elementary_decompose, d, v)


def _weighted_action(d, extra_weight=None):
    if d.is_clifford():
        return None
    master = _select_master(d, extra_weight)
    if master is None:
        return _fallback_action(d)
    logger.debug(f"Master {master.vertex} weight {master.weight} partner {master.linked_pair}")
    if master.linked_pair is not None:
        return 'joint_dynamic', partial(_joint_dynamic, d, master.vertex, master.linked_pair)
    return 'dynamic', partial(dynamic_decompose, d, master.vertex)


def _busiest_spider(d):
    candidates = _master_candidates(d)
    if not candidates:
        return None
    return max(candidates, key=lambda v: (d.star_degree(v), -v))


def _greedy_action(d):
    if d.is_clifford():
        return None
    options = []
    v = _busiest_spider(d)
    if v is not None:
        options.append((dynamic_scaling(d.star_degree(v)), 1, 'dynamic', partial(dynamic_decompose, d, v)))
    stars = free_star_edges(d)
    if stars:
        rule = star_edge_rule(min(MAX_STAR_EDGES, len(stars)))
        site = find_rule_sites(d, rule, limit=1)[0]
        options.append((rule.scaling, 2, rule.rule_id, partial(apply_rule, d, rule, site)))
    for rule in star_state_rules():
        sites = find_rule_sites(d, rule, limit=1)
        if sites:
            options.append((rule.scaling, 0, rule.rule_id, partial(apply_rule, d, rule, sites[0])))
    if not options:
        return _fallback_action(d)
    _, _, label, expand = min(options, key=lambda option: option[:3])
    return label, expand


def _cut_action(d):
    if d.is_clifford():
        return None
    v = _busiest_spider(d)
    if v is None:
        return _fallback_action(d)
    return 'elementary', partial(elementary_decompose, d, v)


# -- expansion ----------------------------------------------------------------

def prepare(d, deadline=None):
    """Preprocessing shared by every driver."""
    return partial_simplify(to_stack_form(push_nots_to_boundary(d)), deadline=deadline)


def _split(chooser, term, depth, guard, label, deadline=None):
    """
    One expansion of ``term``: None when it is terminal, else the action name
    and one entry per raw child, None for a child pruned as zero.
    """
    check_deadline(deadline)
    action = chooser(term.diagram)
    if action is None:
        return None
    if depth >= guard:
        raise DepthGuardError(f"Term tree exceeded depth {guard} in the {label} driver")
    name, expand = action
    children = []
    for child in expand():
        coefficient = term.coefficient * child.coefficient
        if coefficient.is_zero:
            children.append(None)
            continue
        diagram = partial_simplify(child.diagram, deadline=deadline)
        children.append(None if diagram.scalar.is_zero else Term(coefficient, diagram))
    return name, children


def _expand(d, chooser, label, deadline=None, jobs=None):
    """
    Expand the term tree one level at a time. With ``jobs`` > 1 the terms of a
    level are split by a process pool; results are merged in level order, so
    every ``jobs`` value gives the same terms in the same order.
    """
    jobs = jobs or engine_setting('EXPAND_JOBS')
    start = prepare(d, deadline)
    check_deadline(deadline)
    guard = start.star_count() + len(start.non_clifford_spiders())
    result = TermSum(initial_stars=start.star_count())
    if start.scalar.is_zero:
        result.pruned += 1
        return result
    level = [Term(ExactScalar.one(), start)]
    depth = 0
    with ExitStack() as stack:
        executor = stack.enter_context(ProcessPoolExecutor(max_workers=jobs)) if jobs > 1 else None
        while level:
            check_deadline(deadline)
            split = partial(_split, chooser, depth=depth, guard=guard, label=label, deadline=deadline)
            if executor is None or len(level) == 1:
                outcomes = [split(term) for term in level]
            else:
                outcomes = list(executor.map(split, level, chunksize=max(1, len(level) // (4 * jobs))))
            following = []
            for term, outcome in zip(level, outcomes):
                if outcome is None:
                    result.terms.append(term)
                    continue
                name, children = outcome
                result.raw += len(children)
                result.actions[name] += 1
                result.pruned += sum(1 for child in children if child is None)
                following += [child for child in children if child is not None]
            level = following
            depth += 1
    logger.debug(f"{label} driver: {len(result)} terms, {result.raw} raw, {result.pruned} pruned")
    return result


def decompose_weighted(d, deadline=None, extra_weight=None, jobs=None):
    return _expand(d, partial(_weighted_action, extra_weight=extra_weight), STRATEGY_WEIGHTED, deadline, jobs)


def decompose_greedy(d, deadline=None, jobs=None):
    return _expand(d, _greedy_action, STRATEGY_GREEDY, deadline, jobs)


def decompose_cut(d, deadline=None, jobs=None):
    return _expand(d, _cut_action, STRATEGY_CUT, deadline, jobs)


DRIVERS = {
    STRATEGY_WEIGHTED: decompose_weighted,
    STRATEGY_GREEDY: decompose_greedy,
    STRATEGY_CUT: decompose_cut,
}


def decompose(d, strategy=STRATEGY_WEIGHTED, deadline=None, jobs=None):
    if strategy not in DRIVERS:
        raise DecompositionError(f"Unknown strategy {strategy!r}; choose from {sorted(DRIVERS)}")
    return DRIVERS[strategy](d, deadline=deadline, jobs=jobs)


# -- amplitudes and peaks -----------------------------------------------------

def amplitude_sum(terms, outputs):
    """Σ coefficient · statevector over the terms, exactly."""
    total = DenseTensor.zeros((2 ** outputs,))
    for term in terms:
        total = total + statevector(term.diagram).scale(term.coefficient)
    return total


def probabilities_of(vector):
    weights = np.abs(vector.to_complex()) ** 2
    norm = weights.sum()
    if norm == 0:
        raise DecompositionError("The amplitude vector is zero")
    return weights / norm


def count_peaks(probabilities):
    """Threshold (max+min)/2 and the indices strictly above it."""
    values = np.asarray(probabilities, dtype=float)
    if values.size == 0:
        raise ValueError("count_peaks needs a non-empty vector")
    threshold = float((values.max() + values.min()) / 2)
    return threshold, [int(i) for i in np.flatnonzero(values > threshold)]


def run_pipeline(c, strategy=STRATEGY_WEIGHTED, diffusion='auto', deadline=None, jobs=None):
    """
    Decompose a circuit fed with |0…0⟩, optionally followed by the diffusion
    stage, and reduce the terms to amplitudes, probabilities and peaks.
    """
    if diffusion not in DIFFUSION_MODES:
        raise DecompositionError(f"Unknown diffusion mode {diffusion!r}")
    limit = engine_setting('ORACLE_WIRE_LIMIT')
    if c.qubits > limit:
        raise OracleLimitError(f"Circuit has {c.qubits} qubits, oracle limit is {limit}")
    timings = {}
    started = time.perf_counter()
    main = to_diagram(c)
    main.plug_inputs([0] * c.qubits)
    stage = decompose(main, strategy, deadline, jobs)
    timings['stage1'] = time.perf_counter() - started
    logger.info(f"Stage 1 of {c}: {len(stage)} terms ({strategy})")

    if diffusion == 'auto':
        mark = time.perf_counter()
        diffuser = to_diagram(diffusion_circuit(c.qubits, c.register))
        combined = TermSum(raw=stage.raw, pruned=stage.pruned, actions=Counter(stage.actions),
                           initial_stars=stage.initial_stars)
        for term in stage.terms:
            combined.absorb(decompose(term.diagram.compose(diffuser), strategy, deadline, jobs), term.coefficient)
        stage = combined
        timings['stage2'] = time.perf_counter() - mark
        logger.info(f"Stage 2 of {c}: {len(stage)} terms after diffusion")

    mark = time.perf_counter()
    vector = amplitude_sum(stage.terms, c.qubits)
    probabilities = probabilities_of(vector)
    threshold, peaks = count_peaks(probabilities)
    timings['amplitudes'] = time.perf_counter() - mark
    timings['total'] = time.perf_counter() - started
    logger.info(f"{c}: {len(stage)} terminal terms, {len(peaks)} peaks above {threshold:.6g}")
    return RunResult(
        terminal_terms=len(stage),
        statevector=vector,
        probabilities=probabilities,
        peaks=peaks,
        threshold=threshold,
        timings=timings,
        stats=stage.stats(),
        strategy=strategy,
    )
