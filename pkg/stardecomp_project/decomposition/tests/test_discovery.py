"""
Tests for stabilizer enumeration and decomposition search of the decomposition app.
"""
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from ..discovery import (
    AnnealSchedule,
    StabilizerLibrary,
    _best_swap,
    anneal,
    certificate,
    enumerate_stabilizers,
    exact_sum,
    load_schedule,
    run_chains,
    solve_coefficients,
    star_state_target,
)
from ..exceptions import DecompositionError, FixtureFormatError, RuleError
from ..oracle import statevector
from ..scalar import ExactScalar
from ..serialization import parse_rule

ONE, ZERO = ExactScalar.one(), ExactScalar.zero()
CORNER = ExactScalar.sqrt2_power(-3)


def basis(index, n=3):
    state = np.full(2 ** n, ZERO, dtype=object)
    state[index] = ONE
    return state


def uniform(sign_by_parity=False):
    return np.array([
        -CORNER if sign_by_parity and bin(x).count('1') % 2 else CORNER
        for x in range(8)
    ], dtype=object)


def flip(q):
    return (('h', q), ('s', q), ('s', q), ('h', q))


def small_library():
    """Six 3-qubit states: |000⟩, |111⟩, |+++⟩, |−−−⟩, |001⟩ and |010⟩."""
    states = [basis(0), basis(7), uniform(), uniform(True), basis(1), basis(2)]
    words = [
        (),
        flip(0) + flip(1) + flip(2),
        (('h', 0), ('h', 1), ('h', 2)),
        tuple(g for q in range(3) for g in (('h', q), ('s', q), ('s', q))),
        flip(2),
        flip(1),
    ]
    return StabilizerLibrary(3, states, words)


class LibraryTests(SimpleTestCase):
    """Test cases for the stabilizer library."""

    def test_library_sizes(self):
        """Test the 6 one-qubit and 60 two-qubit states, and the 4 real one-qubit states."""
        self.assertEqual(len(enumerate_stabilizers(1)), 6)
        self.assertEqual(len(enumerate_stabilizers(2)), 60)
        self.assertEqual(len(enumerate_stabilizers(1, real_only=True)), 4)

    @tag('slow')
    def test_three_qubit_library(self):
        """Test that the 3-qubit library holds 1080 states."""
        self.assertEqual(len(enumerate_stabilizers(3)), 1080)

    def test_unsupported_width(self):
        """Test that only 1..3 qubits are enumerated."""
        with self.assertRaises(DecompositionError):
            enumerate_stabilizers(4)

    def test_two_qubit_overlaps(self):
        """Test that squared overlaps of 2-qubit stabilizer states are 0, 1/4, 1/2 or 1."""
        library = enumerate_stabilizers(2)
        overlaps = np.abs(library.matrix.conj().T @ library.matrix) ** 2
        allowed = np.array([0.0, 0.25, 0.5, 1.0])
        distance = np.min(np.abs(overlaps[..., None] - allowed), axis=-1)
        self.assertLess(float(distance.max()), 1e-9)
        self.assertTrue(np.allclose(np.diag(overlaps), 1.0))

    def test_words_prepare_their_states(self):
        """Test that each library word builds a diagram with exactly its state."""
        library = enumerate_stabilizers(2)
        for index in (0, 1, 7, 23, 59):
            with self.subTest(index=index):
                self.assertEqual(statevector(library.diagram(index)).scalars(), list(library.states[index]))
        hand_built = small_library()
        for index in range(len(hand_built)):
            with self.subTest(hand_built=index):
                self.assertEqual(statevector(hand_built.diagram(index)).scalars(), list(hand_built.states[index]))


class CoefficientTests(SimpleTestCase):
    """Test cases for targets and exact coefficient recovery."""

    def test_star_state_targets(self):
        """Test the one- and three-leg phase-free star states."""
        self.assertEqual(list(star_state_target(1, 0)), [ExactScalar(2), ONE])
        expected = [8, 4, 4, 2, 4, 2, 2, 1]
        self.assertEqual(list(star_state_target(3, 0)), [ExactScalar(x) for x in expected])

    def test_three_leg_coefficients(self):
        """Test recovery of the 4-term 3-leg decomposition."""
        states = [basis(0), basis(7), uniform(), uniform(True)]
        target = star_state_target(3, 0)
        coefficients = solve_coefficients(states, target)
        self.assertEqual(coefficients, [
            ExactScalar(6),
            ExactScalar(-3),
            ExactScalar(0, 0, 6),
            ExactScalar(0, 0, -2),
        ])
        self.assertTrue(all(x == y for x, y in zip(exact_sum(states, coefficients), target)))

    def test_inexact_span(self):
        """Test that a target outside the span gives None."""
        self.assertIsNone(solve_coefficients([basis(0), basis(7)], star_state_target(3, 0)))

    def test_state_count_bounds(self):
        """Test the guard on the number of states."""
        with self.assertRaises(DecompositionError):
            solve_coefficients([], star_state_target(1, 0))
        with self.assertRaises(DecompositionError):
            solve_coefficients([basis(0, 1)] * 5, star_state_target(1, 0))


class AnnealTests(SimpleTestCase):
    """Test cases for the annealing search."""

    def test_immediate_hit(self):
        """Test that any two distinct one-qubit states decompose the one-leg star state."""
        library = enumerate_stabilizers(1)
        candidate = anneal(star_state_target(1, 0), 2, AnnealSchedule(steps=10), library)
        self.assertIsNotNone(candidate)
        self.assertEqual(candidate.terms, 2)
        self.assertEqual(candidate.trace, [])
        text = certificate('star_state_1_0', 1, 0, library, candidate)
        header, _, branches = parse_rule(text)
        self.assertEqual(header['TERMS'], 2)
        self.assertEqual(len(branches), 2)

    def test_rediscovers_three_leg_rule(self):
        """Test that annealing over a small library finds the 4-term 3-leg decomposition."""
        library = small_library()
        schedule = AnnealSchedule(steps=500, seed=3)
        candidate = anneal(star_state_target(3, 0), 4, schedule, library)
        self.assertIsNotNone(candidate)
        self.assertEqual(candidate.indices, (0, 1, 2, 3))
        self.assertEqual(candidate.coefficients[0], ExactScalar(6))
        text = certificate('star_state_3_0', 3, 0, library, candidate)
        self.assertIn('TERMS 4', text)

    def test_best_swap_completes_the_rule(self):
        """Test that the greedy move replaces the stray member of a subset one state short."""
        library = small_library()
        vector = np.array([complex(x) for x in star_state_target(3, 0)])
        self.assertEqual(_best_swap(library.matrix, vector, [0, 1, 2, 4]), (3, 3))
        self.assertEqual(_best_swap(library.matrix, vector, [5, 1, 2, 3]), (0, 0))

    def test_greedy_only_schedule(self):
        """Test that a purely greedy chain on the small library finds the rule."""
        schedule = AnnealSchedule(steps=200, seed=1, greedy_share=1.0, patience=10)
        candidate = anneal(star_state_target(3, 0), 4, schedule, small_library())
        self.assertIsNotNone(candidate)
        self.assertEqual(candidate.indices, (0, 1, 2, 3))

    def test_restarts_keep_the_trace_deterministic(self):
        """Test that runs with restarts still repeat exactly."""
        library = enumerate_stabilizers(2)
        target = star_state_target(2, 1)
        schedule = AnnealSchedule(steps=60, seed=2, patience=5)
        first, second = [], []
        anneal(target, 2, schedule, library, trace=first)
        anneal(target, 2, schedule, library, trace=second)
        self.assertEqual(first, second)

    @tag('slow')
    def test_full_library_rediscovers_three_leg_rule(self):
        """Test that the default schedule finds a 4-term 3-leg decomposition among all 1080 states."""
        library = enumerate_stabilizers(3)
        target = star_state_target(3, 0)
        for seed in range(10):
            with self.subTest(seed=seed):
                candidate = anneal(target, 4, AnnealSchedule(seed=seed), library)
                self.assertIsNotNone(candidate)
                self.assertEqual(candidate.terms, 4)
                self.assertIn('TERMS 4', certificate('star_state_3_0', 3, 0, library, candidate))

    def test_trace_is_deterministic(self):
        """Test that equal schedules give equal traces and results."""
        library = enumerate_stabilizers(2)
        target = star_state_target(2, 1)
        schedule = AnnealSchedule(steps=30, seed=11)
        first, second = [], []
        a = anneal(target, 2, schedule, library, trace=first)
        b = anneal(target, 2, schedule, library, trace=second)
        self.assertEqual(first, second)
        self.assertEqual(a is None, b is None)
        if a is not None:
            self.assertEqual(a.indices, b.indices)

    def test_term_count_bounds(self):
        """Test that k must lie in 1..len(library) - 1."""
        library = enumerate_stabilizers(1)
        for k in (0, 6):
            with self.subTest(k=k), self.assertRaises(DecompositionError):
                anneal(star_state_target(1, 0), k, AnnealSchedule(), library)

    def test_chains_use_consecutive_seeds(self):
        """Test that the first chain to hit returns its seed."""
        library = enumerate_stabilizers(1)
        found = run_chains(star_state_target(1, 0), 2, AnnealSchedule(steps=5, seed=4), library, chains=3)
        self.assertEqual(found.seed, 4)

    def test_certificate_checks(self):
        """Test the width and verification guards of certificate."""
        library = enumerate_stabilizers(1)
        candidate = anneal(star_state_target(1, 0), 2, AnnealSchedule(steps=10), library)
        with self.assertRaises(RuleError):
            certificate('wrong_width', 2, 0, library, candidate)
        candidate.coefficients = [c * 2 for c in candidate.coefficients]
        with self.assertRaises(RuleError):
            certificate('doubled', 1, 0, library, candidate)


class ScheduleTests(SimpleTestCase):
    """Test cases for annealing schedules."""

    def test_schedule_validation(self):
        """Test the cooling and temperature guards."""
        for kwargs in ({'cooling_factor': 1.0}, {'cooling_factor': 0.0}, {'initial_temperature': 0.0}):
            with self.subTest(**kwargs), self.assertRaises(DecompositionError):
                AnnealSchedule(**kwargs)
        schedule = AnnealSchedule(initial_temperature=2.0, cooling_factor=0.5)
        self.assertAlmostEqual(schedule.temperature(3), 0.25)
        self.assertEqual(schedule.with_seed(9).seed, 9)
        self.assertEqual(schedule.with_seed(9).cooling_factor, 0.5)
        for kwargs in ({'greedy_share': 1.5}, {'patience': 0}):
            with self.subTest(**kwargs), self.assertRaises(DecompositionError):
                AnnealSchedule(**kwargs)

    def _load(self, text):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'schedule.yaml'
            path.write_text(text)
            return load_schedule(path)

    def test_load_schedule(self):
        """Test a valid YAML schedule."""
        schedule = self._load('initial_temperature: 2.0\ncooling_factor: 0.9\nsteps: 40\nseed: 5\n')
        self.assertEqual(schedule, AnnealSchedule(2.0, 0.9, 40, 1, 5))

    def test_invalid_cooling(self):
        """Test that an out-of-range cooling factor names its field."""
        with self.assertRaises(FixtureFormatError) as ctx:
            self._load('initial_temperature: 1.0\ncooling_factor: 1.5\nsteps: 10\n')
        self.assertEqual(ctx.exception.field, 'cooling_factor')

    def test_malformed_yaml(self):
        """Test that broken YAML is reported with a line number."""
        with self.assertRaises(FixtureFormatError) as ctx:
            self._load('initial_temperature: 1.0\nsteps: [1, 2\n')
        self.assertIsNotNone(ctx.exception.line)
