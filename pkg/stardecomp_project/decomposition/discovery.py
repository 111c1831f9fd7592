"""
Search for new stabilizer decompositions of star states.

The stabilizer library is enumerated exactly by closing |0…0⟩ under H, S and
CNOT. Simulated annealing walks over k-subsets of the library with
single-element swaps, random or greedy, restarting when it stalls, and scores
each subset by its least-squares residual against the target. A subset with
zero residual is snapped onto the exact ring and re-checked before it is
returned.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache, partial
from pathlib import Path

import numpy as np
import yaml

from .catalog import STAR_STATE_FAMILY, star_state_lhs
from .circuits import DiagramBuilder
from .conf import engine_setting
from .exceptions import DecompositionError, FixtureFormatError, RuleError
from .oracle import statevector, verify_rule
from .scalar import ExactScalar
from .serialization import dump_rule

logger = logging.getLogger(__name__)

MAX_LIBRARY_QUBITS = 3

_HALF = ExactScalar.sqrt2_power(-1)
_I = ExactScalar.i()


@dataclass
class StabilizerLibrary:
    """Stabilizer states on ``n`` qubits with the Clifford word that prepares each one."""

    n: int
    states: list
    words: list
    real_only: bool = False

    def __len__(self):
        return len(self.states)

    @cached_property
    def matrix(self):
        """States as complex columns."""
        return np.array([[complex(x) for x in state] for state in self.states]).T

    def diagram(self, index):
        """A state diagram whose tensor is exactly ``states[index]``."""
        builder = DiagramBuilder(self.n)
        for gate, *qubits in self.words[index]:
            getattr(builder, gate)(*qubits)
        d = builder.finish()
        d.plug_inputs([0] * self.n)
        return d


@dataclass(frozen=True)
class AnnealSchedule:
    """
    Temperature ``initial_temperature · cooling_factor^t``, where t counts the
    steps since the last restart. A share of the moves are greedy best swaps;
    ``patience`` steps without a new best energy restart the chain from a fresh
    random subset at full temperature.
    """

    initial_temperature: float = 0.05
    cooling_factor: float = 0.99
    steps: int = 4000
    moves_per_step: int = 1
    seed: int = 0
    greedy_share: float = 0.5
    patience: int = 150

    def __post_init__(self):
        if not 0 < self.cooling_factor < 1:
            raise DecompositionError(f"Cooling factor must lie in (0, 1), got {self.cooling_factor}")
        if self.initial_temperature <= 0:
            raise DecompositionError("Initial temperature must be positive")
        if not 0 <= self.greedy_share <= 1:
            raise DecompositionError(f"Greedy share must lie in [0, 1], got {self.greedy_share}")
        if self.patience < 1:
            raise DecompositionError("Patience must be at least one step")

    def temperature(self, step):
        return self.initial_temperature * self.cooling_factor ** step

    def with_seed(self, seed):
        return replace(self, seed=seed)


@dataclass
class Candidate:
    """A certified decomposition: library indices with exact coefficients."""

    indices: tuple
    coefficients: list
    seed: int = 0
    trace: list = field(default_factory=list, repr=False)

    @property
    def terms(self):
        return len(self.indices)


# -- library ------------------------------------------------------------------

def _apply(v, gate, *qubits):
    if gate == 'h':
        w = np.moveaxis(v, qubits[0], 0)
        out = np.empty_like(w)
        out[0] = (w[0] + w[1]) * _HALF
        out[1] = (w[0] - w[1]) * _HALF
        return np.moveaxis(out, 0, qubits[0])
    if gate == 's':
        w = np.moveaxis(v, qubits[0], 0)
        out = w.copy()
        out[1] = w[1] * _I
        return np.moveaxis(out, 0, qubits[0])
    control, target = qubits
    w = np.moveaxis(v, (control, target), (0, 1))
    out = w.copy()
    out[1, 0], out[1, 1] = w[1, 1], w[1, 0]
    return np.moveaxis(out, (0, 1), (control, target))


def _generators(n):
    gates = [('h', q) for q in range(n)] + [('s', q) for q in range(n)]
    gates += [('cx', c, t) for c in range(n) for t in range(n) if c != t]
    return gates


def _phase_free_key(flat):
    """The state with its global phase fixed by the first nonzero amplitude."""
    pivot = next(x for x in flat if not x.is_zero).conjugate()
    return tuple(x * pivot for x in flat)


@lru_cache(maxsize=8)
def enumerate_stabilizers(n, real_only=False):
    """Every n-qubit stabilizer state up to global phase, found by breadth-first closure."""
    if not 1 <= n <= MAX_LIBRARY_QUBITS:
        raise DecompositionError(f"Library enumeration supports 1..{MAX_LIBRARY_QUBITS} qubits, got {n}")
    start = np.full((2,) * n, ExactScalar.zero(), dtype=object)
    start[(0,) * n] = ExactScalar.one()
    generators = _generators(n)
    seen = {_phase_free_key(start.reshape(-1)): 0}
    states, words = [start.reshape(-1)], [()]
    pending = deque([(start, ())])
    while pending:
        v, word = pending.popleft()
        for gate in generators:
            w = _apply(v, *gate)
            key = _phase_free_key(w.reshape(-1))
            if key in seen:
                continue
            seen[key] = len(states)
            states.append(w.reshape(-1))
            words.append(word + (gate,))
            pending.append((w, word + (gate,)))
    if real_only:
        keep = [i for i, key in enumerate(seen) if all(x.b == 0 and x.d == 0 for x in key)]
        states = [states[i] for i in keep]
        words = [words[i] for i in keep]
    logger.info(f"Enumerated {len(states)} {'real ' if real_only else ''}stabilizer states on {n} qubits")
    return StabilizerLibrary(n, states, words, real_only)


def star_state_target(legs, phase):
    """Exact amplitudes of the ``legs``-leg star state with the given phase in eighths."""
    return np.array(statevector(star_state_lhs(legs, phase)).scalars(), dtype=object)


# -- coefficients -------------------------------------------------------------

def _residual(matrix, target):
    solution, *_ = np.linalg.lstsq(matrix, target, rcond=None)
    return float(np.linalg.norm(matrix @ solution - target)), solution


def exact_sum(states, coefficients):
    total = np.full(len(states[0]), ExactScalar.zero(), dtype=object)
    for state, coefficient in zip(states, coefficients):
        total = total + state * coefficient
    return total


def solve_coefficients(states, target, max_k=None, tol=None):
    """
    Exact coefficients expressing ``target`` in ``states``, or None.

    The float least-squares fit must leave a residual below ``tol``; each
    coefficient is then snapped onto the ring and the sum is checked exactly.
    """
    max_k = engine_setting('DISCOVERY_SNAP_MAX_K') if max_k is None else max_k
    tol = engine_setting('DISCOVERY_RESIDUAL_TOL') if tol is None else tol
    dim = len(target)
    if not states or len(states) > 2 * dim:
        raise DecompositionError(f"Need between 1 and {2 * dim} states, got {len(states)}")
    matrix = np.array([[complex(x) for x in s] for s in states]).T
    vector = np.array([complex(x) for x in target])
    residual, solution = _residual(matrix, vector)
    if residual >= tol:
        return None
    coefficients = [ExactScalar.from_complex(x, max_k=max_k) for x in solution]
    if any(c is None for c in coefficients):
        logger.warning(f"Could not snap coefficients {np.round(solution, 6).tolist()} onto the ring")
        return None
    total = exact_sum(states, coefficients)
    if not all(x == y for x, y in zip(total, target)):
        logger.warning("Snapped coefficients do not reproduce the target exactly")
        return None
    return coefficients


# -- annealing ----------------------------------------------------------------

def _energy(matrix, vector, subset):
    residual, _ = _residual(matrix[:, list(subset)], vector)
    return residual / max(float(np.linalg.norm(vector)), 1.0)


def _best_swap(matrix, vector, subset):
    """
    The (slot, replacement) pair removing the most residual: for each slot the
    other members are projected out, and each outside state is scored by how
    much of the remaining target it reaches.
    """
    best = (-1.0, 0, None)
    outside = np.ones(matrix.shape[1], dtype=bool)
    outside[list(subset)] = False
    for slot in range(len(subset)):
        rest = matrix[:, [i for j, i in enumerate(subset) if j != slot]]
        u, s, _ = np.linalg.svd(rest, full_matrices=False)
        span = u[:, s > 1e-10]
        remainder = vector - span @ (span.conj().T @ vector)
        projected = matrix - span @ (span.conj().T @ matrix)
        norms = np.einsum('ij,ij->j', projected.conj(), projected).real
        gains = np.abs(projected.conj().T @ remainder) ** 2 / np.where(norms > 1e-12, norms, np.inf)
        gains[~outside] = -1.0
        pick = int(np.argmax(gains))
        if gains[pick] > best[0]:
            best = (float(gains[pick]), slot, pick)
    return best[1], best[2]


def _random_swap(rng, subset, size):
    slot = int(rng.integers(len(subset)))
    replacement = int(rng.integers(size))
    while replacement in subset:
        replacement = int(rng.integers(size))
    return slot, replacement


def anneal(target, k, schedule, library, trace=None):
    """
    Anneal over k-subsets of ``library`` towards ``target``.

    Each move swaps one member: the best available swap with probability
    ``schedule.greedy_share``, a random one otherwise, accepted by the
    Metropolis rule. After ``schedule.patience`` steps without a new best
    energy the chain restarts from a fresh random subset and reheats.

    Returns the first subset whose fit is exact as a Candidate, or None once
    the schedule is exhausted. ``trace`` collects (step, energy, accepted) per
    move; equal schedules and seeds give equal traces.
    """
    if not 1 <= k < len(library):
        raise DecompositionError(f"Term count {k} outside 1..{len(library) - 1}")
    tol = engine_setting('DISCOVERY_RESIDUAL_TOL')
    rng = np.random.default_rng(schedule.seed)
    matrix = library.matrix
    vector = np.array([complex(x) for x in target])
    size = len(library)
    moves = [] if trace is None else trace

    def certify(subset):
        coefficients = solve_coefficients([library.states[i] for i in subset], target)
        if coefficients is None:
            return None
        order = sorted(range(k), key=lambda j: subset[j])
        logger.info(f"Annealing hit with seed {schedule.seed}: {k} terms from library of {size}")
        return Candidate(tuple(subset[j] for j in order), [coefficients[j] for j in order], schedule.seed, moves)

    def fresh():
        subset = [int(i) for i in rng.choice(size, size=k, replace=False)]
        return subset, _energy(matrix, vector, subset)

    current, energy = fresh()
    if energy < tol and (found := certify(current)) is not None:
        return found
    best, last_gain, restarted = energy, 0, 0
    for step in range(schedule.steps):
        if step - last_gain >= schedule.patience:
            current, energy = fresh()
            best, last_gain, restarted = energy, step, step
            logger.debug(f"Seed {schedule.seed} restarted at step {step}")
            if energy < tol and (found := certify(current)) is not None:
                return found
        temperature = schedule.temperature(step - restarted)
        for _ in range(schedule.moves_per_step):
            if rng.random() < schedule.greedy_share:
                slot, replacement = _best_swap(matrix, vector, current)
            else:
                slot, replacement = _random_swap(rng, current, size)
            proposal = list(current)
            proposal[slot] = replacement
            proposed = _energy(matrix, vector, proposal)
            delta = proposed - energy
            accepted = delta <= 0 or (temperature > 0 and rng.random() < math.exp(-delta / temperature))
            moves.append((step, round(proposed, 12), accepted))
            if not accepted:
                continue
            current, energy = proposal, proposed
            if energy < best - tol:
                best, last_gain = energy, step
            if energy < tol and (found := certify(current)) is not None:
                return found
    logger.info(f"Annealing with seed {schedule.seed} found no {k}-term decomposition")
    return None


def run_chains(target, k, schedule, library, chains=1, jobs=1):
    """Independent chains with seeds schedule.seed, schedule.seed+1, …; the lowest-seed hit wins."""
    schedules = [schedule.with_seed(schedule.seed + i) for i in range(chains)]
    search = partial(anneal, target, k, library=library)
    if jobs == 1:
        for s in schedules:
            found = search(s)
            if found is not None:
                return found
        return None
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        results = list(executor.map(search, schedules))
    return next((r for r in results if r is not None), None)


# -- certificates -------------------------------------------------------------

def certificate(rule_id, legs, phase, library, candidate):
    """
    Render a rule fixture for the star state decomposed by ``candidate``.

    Raises RuleError when the rendered rule does not verify exactly.
    """
    if library.n != legs:
        raise RuleError(f"Library acts on {library.n} qubits, star state has {legs} legs")
    lhs = star_state_lhs(legs, phase)
    branches = [(c, library.diagram(i)) for i, c in zip(candidate.indices, candidate.coefficients)]
    if not verify_rule(lhs, branches):
        raise RuleError(f"Candidate for {rule_id} does not reproduce the star state")
    header = {
        'RULE': rule_id,
        'FAMILY': STAR_STATE_FAMILY,
        'LEGS': legs,
        'PHASE': phase % 8,
        'TERMS': candidate.terms,
        'REDUCTION': legs,
    }
    return dump_rule(header, lhs, branches)


def load_schedule(path):
    """Read and validate a YAML annealing schedule."""
    from .serializers import AnnealScheduleSerializer

    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        raise FixtureFormatError(f"Malformed YAML: {exc}", line=mark.line + 1 if mark else None) from None
    serializer = AnnealScheduleSerializer(data=data or {})
    if not serializer.is_valid():
        field_name, messages = next(iter(serializer.errors.items()))
        raise FixtureFormatError(f"Invalid annealing schedule: {messages}", field=field_name)
    return serializer.save()
