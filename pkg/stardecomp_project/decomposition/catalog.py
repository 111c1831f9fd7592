"""
Decomposition rules: a diagram (or a pattern inside one) rewritten as an exact
weighted sum of diagrams with fewer star edges.

Fixture rules (star edges, star states) are loaded from ``.zxr`` files; the
elementary and dynamic decompositions are generated on the fly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .conf import engine_setting
from .diagram import Diagram, EdgeType, VertexType
from .exceptions import CliffordStarStateError, DiagramError, NoStarEdgeError, RuleError
from .oracle import verify_rule
from .scalar import ExactScalar
from .serialization import parse_rule

logger = logging.getLogger(__name__)

STAR_EDGE_FAMILY = 'star_edge'
STAR_STATE_FAMILY = 'star_state'
ELEMENTARY_FAMILY = 'elementary'
DYNAMIC_FAMILY = 'dynamic'

MAX_STAR_EDGES = 3
STAR_STATE_LEGS = (3, 4, 5)
STAR_STATE_PHASES = (0, 2, 6)
DYNAMIC_MAX_STARS = 5


@dataclass(frozen=True)
class Term:
    """One summand of a decomposition: an exact coefficient times a diagram."""

    coefficient: ExactScalar
    diagram: Diagram

    @property
    def is_zero(self):
        return self.coefficient.is_zero or self.diagram.scalar.is_zero


@dataclass
class DecompositionRule:
    rule_id: str
    family: str
    legs: int
    phase: int
    terms: int
    reduction: int
    lhs: Diagram
    branches: list = field(default_factory=list)

    @property
    def scaling(self):
        """β = log2(terms) / reduction."""
        return math.log2(self.terms) / self.reduction

    def __str__(self):
        return f"{self.rule_id} ({self.terms} terms, β={self.scaling:.3f})"


@dataclass
class RuleReport:
    rule_id: str
    passed: bool
    branches: int
    scaling: float
    message: str = ''


def default_rule_dir():
    configured = engine_setting('RULE_FIXTURE_DIR')
    return Path(configured) if configured else Path(__file__).resolve().parent / 'fixtures' / 'rules'


def _normalize_phase(eighths):
    return eighths % 8


# -- left-hand sides --------------------------------------------------------

def star_edge_lhs(k):
    """k disjoint star edges between output pairs (2i, 2i+1)."""
    d = Diagram()
    for _ in range(k):
        u = d.add_vertex(VertexType.BOUNDARY)
        v = d.add_vertex(VertexType.BOUNDARY)
        d.add_edge(u, v, EdgeType.STAR)
        d.outputs += [u, v]
    return d


def star_state_lhs(legs, phase):
    """``legs`` copies of Z(phase) -star- output."""
    d = Diagram()
    outputs = [d.add_vertex(VertexType.BOUNDARY) for _ in range(legs)]
    for o in outputs:
        leaf = d.add_vertex(VertexType.Z, phase)
        d.add_edge(leaf, o, EdgeType.STAR)
    d.outputs = outputs
    return d


# -- fixture rules ----------------------------------------------------------

def load_rule(path):
    path = Path(path)
    header, lhs, branches = parse_rule(path.read_text())
    rule = DecompositionRule(
        rule_id=header['RULE'],
        family=header['FAMILY'],
        legs=header['LEGS'],
        phase=_normalize_phase(header['PHASE']),
        terms=header['TERMS'],
        reduction=header['REDUCTION'],
        lhs=lhs,
        branches=branches,
    )
    if len(branches) != rule.terms:
        raise RuleError(f"Rule {rule.rule_id} declares {rule.terms} terms but lists {len(branches)}")
    return rule


@lru_cache(maxsize=8)
def _load_catalog(directory):
    rules = {}
    for path in sorted(Path(directory).glob('*.zxr')):
        rule = load_rule(path)
        rules[rule.rule_id] = rule
    logger.info(f"Loaded {len(rules)} decomposition rules from {directory}")
    return rules


def load_catalog(directory=None):
    """All fixture rules keyed by id."""
    return _load_catalog(str(directory or default_rule_dir()))


def star_edge_rule(k):
    if not 1 <= k <= MAX_STAR_EDGES:
        raise RuleError(f"No star-edge rule for k={k}; supported k is 1..{MAX_STAR_EDGES}")
    return load_catalog()[f"star_edge_{k}"]


def star_state_rule(legs, phase):
    """Rule for ``legs`` Z(phase) leaves hanging off star edges."""
    phase = _normalize_phase(phase)
    if legs == 3 and phase == 4:
        raise CliffordStarStateError("The 3-leg star state with phase π is Clifford")
    if legs not in STAR_STATE_LEGS or phase not in STAR_STATE_PHASES:
        raise RuleError(f"No star-state rule for {legs} legs at phase {phase}π/4")
    rule_id = f"star_state_{legs}_{phase}"
    catalog = load_catalog()
    if rule_id not in catalog:
        raise RuleError(f"No star-state rule for {legs} legs at phase {phase}π/4")
    return catalog[rule_id]


def catalog_verify_all(rules=None):
    """
    Check every rule against the oracle; returns one report per rule. By
    default the shipped fixtures are followed by the generated rules.
    """
    rules = [*load_catalog().values(), *generated_rules()] if rules is None else rules
    reports = []
    for rule in rules:
        try:
            passed = verify_rule(rule.lhs, rule.branches)
            message = '' if passed else 'branch sum differs from left-hand side'
        except DiagramError as exc:
            passed, message = False, str(exc)
        if passed:
            logger.info(f"Rule {rule.rule_id} verified")
        else:
            logger.error(f"Rule {rule.rule_id} failed verification: {message}")
        reports.append(RuleReport(rule.rule_id, passed, len(rule.branches), rule.scaling, message))
    return reports


# -- pattern sites ----------------------------------------------------------

def _star_leaves(d, phase):
    """Z(phase) leaves hanging off a star edge, with their attachment vertex."""
    found = []
    for v in d.vertices():
        if not d.is_leaf(v) or d.type(v) != VertexType.Z or d.phase(v) != phase:
            continue
        (e, w), = d.neighbors(v)
        if d.edge_type(e) == EdgeType.STAR and w != v and not d.is_leaf(w):
            found.append(v)
    return found


def free_star_edges(d):
    return [e for e in d.star_edges() if d.edge(e)[0] != d.edge(e)[1]]


def find_rule_sites(d, rule, limit=None):
    """
    Candidate sites for ``rule`` in ``d``.

    Star-edge sites are tuples of k star-edge ids taken in id order, star-state
    sites tuples of leaf ids. Sites are disjoint and at most ``limit`` are returned.
    """
    if rule.family == STAR_EDGE_FAMILY:
        pool = free_star_edges(d)
        width = rule.legs
    elif rule.family == STAR_STATE_FAMILY:
        pool = _star_leaves(d, rule.phase)
        width = rule.legs
    else:
        raise RuleError(f"Rule family {rule.family!r} has no pattern sites")
    sites = [tuple(pool[i:i + width]) for i in range(0, len(pool) - width + 1, width)]
    return sites if limit is None else sites[:limit]


def _attachments(d, rule, site):
    """Detach the pattern at ``site`` from ``d``; return the vertex each rule output glues to."""
    if len(site) != rule.legs:
        raise RuleError(f"Rule {rule.rule_id} needs {rule.legs} site elements, got {len(site)}")
    anchors = []
    if rule.family == STAR_EDGE_FAMILY:
        for e in site:
            u, v, kind = d.edge(e)
            if kind != EdgeType.STAR or u == v:
                raise RuleError(f"Edge {e} is not a star edge between distinct vertices")
            d.remove_edge(e)
            anchors += [u, v]
    else:
        for leaf in site:
            if not d.is_leaf(leaf) or d.phase(leaf) != rule.phase or d.type(leaf) != VertexType.Z:
                raise RuleError(f"Vertex {leaf} is not a Z leaf with phase {rule.phase}π/4")
            (e, w), = d.neighbors(leaf)
            if d.edge_type(e) != EdgeType.STAR:
                raise RuleError(f"Leaf {leaf} is not attached by a star edge")
            d.remove_vertex(leaf)
            anchors.append(w)
    return anchors


def _plant(d, branch, anchors):
    """Copy ``branch`` into ``d`` and glue its outputs onto ``anchors``."""
    row = sum(d.row(a) for a in anchors) / len(anchors)
    mapping = d.merge(branch, row_shift=row)
    for o, anchor in zip(branch.outputs, anchors):
        boundary = mapping[o]
        (e, x), = d.neighbors(boundary)
        kind = d.edge_type(e)
        d.remove_vertex(boundary)
        d.add_edge(x, anchor, kind)


def apply_rule(d, rule, site):
    """Replace the pattern at ``site`` by each branch; returns one Term per branch."""
    detached = d.copy()
    anchors = _attachments(detached, rule, site)
    terms = []
    for coefficient, branch in rule.branches:
        result = detached.copy()
        _plant(result, branch, anchors)
        terms.append(Term(coefficient, result))
    return terms


# -- generated rules --------------------------------------------------------

def elementary_decompose(d, v):
    """
    Unfuse the phase of spider ``v`` into a leaf and split the leaf into its
    two basis states. Returns two Terms.
    """
    if not d.is_spider(v):
        raise DiagramError(f"Vertex {v} is not a spider")
    leaf_type = VertexType.X if d.type(v) == VertexType.Z else VertexType.Z
    alpha = d.phase(v)
    half = ExactScalar.sqrt2_power(-1)
    terms = []
    for bit, coefficient in ((0, half), (1, half * ExactScalar.omega(alpha))):
        result = d.copy()
        result.set_phase(v, 0)
        leaf = result.add_vertex(leaf_type, 4 * bit, result.row(v))
        result.add_edge(v, leaf)
        terms.append(Term(coefficient, result))
    return terms


def dynamic_decompose(d, v):
    """
    Split Z spider ``v`` on its two values.

    Each term removes ``v``: its ordinary legs get basis states, its star
    neighbours get the state the star edge projects that value onto.
    """
    if not d.is_spider(v) or d.type(v) != VertexType.Z:
        raise DiagramError(f"Vertex {v} is not a Z spider")
    if d.self_loops(v):
        raise DiagramError(f"Vertex {v} carries self-loops")
    legs = [(z, d.edge_type(e)) for e, z in d.neighbors(v)]
    stars = [z for z, kind in legs if kind == EdgeType.STAR]
    if not stars:
        raise NoStarEdgeError(f"Vertex {v} has no star edges")
    plain = [(z, kind) for z, kind in legs if kind != EdgeType.STAR]
    n, m = len(plain), len(stars)
    alpha = d.phase(v)
    terms = []
    for bit in (0, 1):
        result = d.copy()
        row = result.row(v)
        result.remove_vertex(v)
        for z, kind in plain:
            leaf_type = VertexType.Z if kind == EdgeType.HADAMARD else VertexType.X
            leaf = result.add_vertex(leaf_type, 4 * bit, row)
            result.add_edge(leaf, z)
        for w in stars:
            # star row 0 is all-ones, row 1 is |0>
            leaf = result.add_vertex(VertexType.X if bit else VertexType.Z, 0, row)
            result.add_edge(leaf, w)
        if bit:
            coefficient = ExactScalar.omega(alpha) * ExactScalar.sqrt2_power(-(n + m))
        else:
            coefficient = ExactScalar.sqrt2_power(-n)
        terms.append(Term(coefficient, result))
    return terms


def dynamic_scaling(star_degree):
    """β of a dynamic decomposition that removes ``star_degree`` stars in two terms."""
    return 1.0 / star_degree


def _elementary_rule(rule_id, vertex_type, phase, degree):
    lhs = Diagram()
    v = lhs.add_vertex(vertex_type, phase, row=1)
    for _ in range(degree):
        o = lhs.add_vertex(VertexType.BOUNDARY, row=2)
        lhs.add_edge(v, o)
        lhs.outputs.append(o)
    branches = [(t.coefficient, t.diagram) for t in elementary_decompose(lhs, v)]
    return DecompositionRule(rule_id, ELEMENTARY_FAMILY, degree, phase, len(branches), 1, lhs, branches)


def _dynamic_rule(m, phase=1):
    """Z(phase) master with ``m`` stars and one ordinary leg, all to outputs."""
    lhs = Diagram()
    v = lhs.add_vertex(VertexType.Z, phase, row=1)
    for kind in [EdgeType.STAR] * m + [EdgeType.PLAIN]:
        o = lhs.add_vertex(VertexType.BOUNDARY, row=2)
        lhs.add_edge(v, o, kind)
        lhs.outputs.append(o)
    branches = [(t.coefficient, t.diagram) for t in dynamic_decompose(lhs, v)]
    return DecompositionRule(f"dynamic_{m}", DYNAMIC_FAMILY, m, phase, len(branches), m, lhs, branches)


def generated_rules():
    """Instances of the elementary and dynamic decompositions, in report order."""
    rules = [
        _elementary_rule('elementary_z', VertexType.Z, 1, 1),
        _elementary_rule('elementary_x', VertexType.X, 3, 2),
    ]
    return rules + [_dynamic_rule(m) for m in range(1, DYNAMIC_MAX_STARS + 1)]


def star_state_rules():
    """Every shipped star-state rule, in id order."""
    return [rule for _, rule in sorted(load_catalog().items()) if rule.family == STAR_STATE_FAMILY]
