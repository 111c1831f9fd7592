"""
Tests for the local rewrites of the decomposition app.
"""
import time
from itertools import chain, repeat
from unittest import mock

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from .. import rewrite
from ..circuits import Circuit, Gate, random_mct_dense, to_diagram
from ..diagram import Diagram, EdgeType, VertexType
from ..exceptions import DecompositionTimeout, StaleMatchError
from ..oracle import contract, statevector
from ..rewrite import (
    RewriteKind,
    apply_rewrite,
    find_matches,
    partial_simplify,
    push_nots_to_boundary,
    to_stack_form,
)
from ..scalar import ExactScalar

B, Z, X = VertexType.BOUNDARY, VertexType.Z, VertexType.X
P, H, S = EdgeType.PLAIN, EdgeType.HADAMARD, EdgeType.STAR


def build(vertices, edges, inputs=(), outputs=()):
    """Diagram from (type, phase) vertices and (u, v, kind) edges over list positions."""
    d = Diagram()
    ids = [d.add_vertex(t, p, row=r) for r, (t, p) in enumerate(vertices)]
    for u, v, kind in edges:
        d.add_edge(ids[u], ids[v], kind)
    d.inputs = [ids[i] for i in inputs]
    d.outputs = [ids[o] for o in outputs]
    return d


# one small diagram per rewrite, each holding at least one site
SITES = {
    RewriteKind.SPIDER_FUSION: build(
        [(B, 0), (Z, 1), (Z, 1), (B, 0)], [(0, 1, P), (1, 2, P), (2, 3, P)], [0], [3]),
    RewriteKind.COLOR_CHANGE: build(
        [(B, 0), (Z, 1), (B, 0), (B, 0)], [(0, 1, P), (1, 2, H), (1, 3, P)], [0], [2, 3]),
    RewriteKind.PI_COMMUTATION: build(
        [(B, 0), (X, 4), (Z, 1), (B, 0), (B, 0)], [(0, 1, P), (1, 2, P), (2, 3, P), (2, 4, H)], [0], [3, 4]),
    RewriteKind.STATE_COPY: build(
        [(X, 4), (Z, 3), (B, 0), (B, 0)], [(0, 1, P), (1, 2, P), (1, 3, S)], [], [2, 3]),
    RewriteKind.BIALGEBRA: build(
        [(B, 0), (B, 0), (Z, 0), (X, 0), (B, 0), (B, 0)],
        [(0, 2, P), (1, 2, P), (2, 3, P), (3, 4, P), (3, 5, P)], [0, 1], [4, 5]),
    RewriteKind.HH_CANCEL: build(
        [(B, 0), (Z, 0), (B, 0)], [(0, 1, H), (1, 2, H)], [0], [2]),
    RewriteKind.HOPF: build(
        [(B, 0), (Z, 0), (X, 0), (B, 0)], [(0, 1, P), (1, 2, P), (1, 2, P), (2, 3, P)], [0], [3]),
    RewriteKind.IDENTITY_REMOVAL: build(
        [(B, 0), (Z, 0), (B, 0)], [(0, 1, P), (1, 2, H)], [0], [2]),
    RewriteKind.EULER_DECOMPOSITION: build(
        [(B, 0), (Z, 1), (B, 0)], [(0, 1, P), (1, 2, H)], [0], [2]),
    RewriteKind.STAR_STATE_X_PI: build([(X, 4), (B, 0)], [(0, 1, S)], [], [1]),
    RewriteKind.STAR_STATE_X0: build([(X, 0), (B, 0)], [(0, 1, S)], [], [1]),
    RewriteKind.STAR_STATE_Z_PI: build([(Z, 4), (B, 0)], [(0, 1, S)], [], [1]),
}


def not_guarded_stars(m):
    """A Z(0) spider with m stars to outputs and one star behind a NOT."""
    d = Diagram()
    c = d.add_vertex(Z, 0, row=1)
    outputs = []
    for _ in range(m):
        o = d.add_vertex(B, row=3)
        d.add_edge(c, o, S)
        outputs.append(o)
    n = d.add_vertex(X, 4, row=2)
    o = d.add_vertex(B, row=3)
    d.add_edge(c, n)
    d.add_edge(n, o, S)
    d.outputs = outputs + [o]
    return d


small_circuits = st.builds(
    random_mct_dense,
    st.integers(min_value=3, max_value=4),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=0, max_value=10 ** 6),
)


class RewriteSoundnessTests(SimpleTestCase):
    """Test cases for individual rewrites."""

    def test_every_rewrite_keeps_the_tensor(self):
        """Test that each rewrite kind preserves the tensor exactly at every site."""
        for kind, d in SITES.items():
            matches = find_matches(d, kind)
            with self.subTest(kind=kind.value):
                self.assertTrue(matches)
                for match in matches:
                    self.assertEqual(contract(apply_rewrite(d, match)), contract(d))

    def test_fusion_adds_phases(self):
        """Test that fusing Z(π/4) with Z(π/4) gives Z(π/2)."""
        d = SITES[RewriteKind.SPIDER_FUSION]
        match, = find_matches(d, RewriteKind.SPIDER_FUSION)
        fused = apply_rewrite(d, match)
        spiders = [v for v in fused.vertices() if fused.is_spider(v)]
        self.assertEqual([fused.phase(v) for v in spiders], [2])

    def test_fusion_site_count(self):
        """Test that a Z-Z-Z chain has two fusion sites and a bare wire none."""
        chain = build([(B, 0), (Z, 0), (Z, 0), (Z, 0), (B, 0)],
                      [(0, 1, P), (1, 2, P), (2, 3, P), (3, 4, P)], [0], [4])
        self.assertEqual(len(find_matches(chain, RewriteKind.SPIDER_FUSION)), 2)
        self.assertEqual(find_matches(Diagram.identity(1), RewriteKind.SPIDER_FUSION), [])

    def test_star_state_scalars(self):
        """Test the far-end states and scalars of the three star-state rewrites."""
        expected = {
            RewriteKind.STAR_STATE_X_PI: (X, 0, ExactScalar.one()),
            RewriteKind.STAR_STATE_X0: (Z, 0, ExactScalar.sqrt2_power(1)),
            RewriteKind.STAR_STATE_Z_PI: (X, 4, ExactScalar.sqrt2_power(-1)),
        }
        for kind, (vertex_type, phase, scalar) in expected.items():
            with self.subTest(kind=kind.value):
                d = SITES[kind]
                result = apply_rewrite(d, find_matches(d, kind)[0])
                leaf, = [v for v in result.vertices() if result.is_spider(v)]
                self.assertEqual((result.type(leaf), result.phase(leaf)), (vertex_type, phase))
                self.assertEqual(result.star_count(), 0)
                self.assertEqual(result.scalar, scalar)

    def test_input_is_not_modified(self):
        """Test that apply_rewrite works on a copy."""
        d = SITES[RewriteKind.BIALGEBRA]
        before = d.structure_key()
        apply_rewrite(d, find_matches(d, RewriteKind.BIALGEBRA)[0])
        self.assertEqual(d.structure_key(), before)

    def test_stale_match(self):
        """Test that a consumed site raises StaleMatchError."""
        d = SITES[RewriteKind.HH_CANCEL]
        match, = find_matches(d, RewriteKind.HH_CANCEL)
        result = apply_rewrite(d, match)
        with self.assertRaises(StaleMatchError):
            apply_rewrite(result, match)


class SimplificationTests(SimpleTestCase):
    """Test cases for partial simplification and preprocessing."""

    def test_identity_spider_is_removed(self):
        """Test that a phase-free degree-2 spider on a wire disappears."""
        d = build([(B, 0), (Z, 0), (B, 0)], [(0, 1, P), (1, 2, P)], [0], [2])
        simplified = partial_simplify(d)
        self.assertEqual(simplified.num_vertices(), 2)
        self.assertEqual(contract(simplified), contract(d))

    def test_mct_collapses_on_basis_input(self):
        """Test that a Toffoli fed |110⟩ simplifies to a star-free diagram."""
        d = to_diagram(Circuit(3, [Gate.mct([0, 1], 2)]))
        d.plug_inputs([1, 1, 0])
        simplified = partial_simplify(d)
        self.assertEqual(simplified.star_count(), 0)
        expected = [ExactScalar.zero()] * 7 + [ExactScalar.one()]
        self.assertEqual(statevector(simplified).scalars(), expected)

    def test_not_absorbed_by_basis_state(self):
        """Test that a NOT after |0⟩ is absorbed into the state."""
        d = to_diagram(Circuit(1, [Gate.x(0)]))
        d.plug_inputs([0])
        pushed = push_nots_to_boundary(d)
        nots = [v for v in pushed.vertices()
                if pushed.is_spider(v) and pushed.phase(v) == 4 and pushed.degree(v) == 2]
        self.assertEqual(nots, [])
        self.assertEqual(contract(pushed), contract(d))

    def test_push_without_nots_is_unchanged(self):
        """Test that a circuit without NOTs is left alone."""
        d = to_diagram(Circuit(2, [Gate.h(0), Gate.cx(0, 1)]))
        self.assertEqual(push_nots_to_boundary(d).structure_key(), d.structure_key())

    def test_not_moves_through_z(self):
        """Test that a NOT before a Z spider ends up after it."""
        d = build([(B, 0), (X, 4), (Z, 1), (B, 0)], [(0, 1, P), (1, 2, P), (2, 3, P)], [0], [3])
        pushed = push_nots_to_boundary(d)
        self.assertEqual(contract(pushed), contract(d))
        z, = [v for v in pushed.vertices() if pushed.is_spider(v) and pushed.type(v) == Z]
        self.assertEqual(pushed.phase(z), 7)

    def test_stack_form(self):
        """Test that mixed star legs are split into a linked pair."""
        for m in (1, 2, 3):
            with self.subTest(m=m):
                d = not_guarded_stars(m)
                stacked = to_stack_form(d)
                self.assertEqual(len(stacked.links), 2)
                c = d.vertices()[0]
                bottom = stacked.partner(c)
                self.assertEqual(stacked.star_degree(c), m)
                self.assertEqual(stacked.star_degree(bottom), 1)
                self.assertEqual(contract(stacked), contract(d))

    def test_stack_form_without_interposers(self):
        """Test that rows without NOT interposers get no stacks."""
        d = to_diagram(Circuit(3, [Gate.cx(0, 1)]))
        self.assertEqual(to_stack_form(d).links, {})

    @settings(max_examples=15, deadline=None)
    @given(small_circuits)
    def test_preprocessing_keeps_the_tensor(self, circuit):
        """Test that NOT pushing, stack form and simplification preserve circuits."""
        d = to_diagram(circuit)
        reference = contract(d)
        pushed = push_nots_to_boundary(d)
        self.assertEqual(contract(pushed), reference)
        stacked = to_stack_form(pushed)
        self.assertEqual(contract(stacked), reference)
        self.assertEqual(contract(partial_simplify(stacked)), reference)

    def test_full_simplify_flag(self):
        """Test that the full hook keeps the tensor."""
        d = SITES[RewriteKind.HOPF]
        self.assertEqual(contract(partial_simplify(d, full=True)), contract(d))

    def test_passed_deadline(self):
        """Test that simplification refuses to start after its deadline."""
        d = to_diagram(Circuit(3, [Gate.mct([0, 1], 2)]))
        with self.assertRaises(DecompositionTimeout):
            partial_simplify(d, deadline=time.monotonic() - 1)

    def test_deadline_between_passes(self):
        """Test that a deadline passing mid-simplification stops the next pass."""
        d = to_diagram(Circuit(3, [Gate.mct([0, 1], 2)]))
        d.plug_inputs([1, 1, 0])
        with mock.patch.object(rewrite, 'time') as clock:
            clock.monotonic.side_effect = chain([0.0, 0.0], repeat(100.0))
            with self.assertRaises(DecompositionTimeout):
                partial_simplify(d, deadline=50.0)
        self.assertEqual(clock.monotonic.call_count, 3)
