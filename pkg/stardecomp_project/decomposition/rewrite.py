"""
Sound local rewrites on star-edge ZX diagrams.

Every rewrite keeps the diagram's tensor equal, including the global scalar.
Public entry points copy their input; the private ``_apply_*`` helpers work in
place and assume the match was produced by the matching ``_iter_*`` generator
on the same diagram.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum

from .conf import engine_setting
from .diagram import EdgeType, VertexType, toggle_hadamard
from .exceptions import DecompositionTimeout, StaleMatchError
from .scalar import ExactScalar

logger = logging.getLogger(__name__)

PI = 4
HALF_PI = 2


class RewriteKind(Enum):
    SPIDER_FUSION = 'spider_fusion'
    COLOR_CHANGE = 'color_change'
    PI_COMMUTATION = 'pi_commutation'
    STATE_COPY = 'state_copy'
    BIALGEBRA = 'bialgebra'
    HH_CANCEL = 'hh_cancel'
    HOPF = 'hopf'
    IDENTITY_REMOVAL = 'identity_removal'
    EULER_DECOMPOSITION = 'euler_decomposition'
    STAR_STATE_X_PI = 'star_state_x_pi'
    STAR_STATE_X0 = 'star_state_x0'
    STAR_STATE_Z_PI = 'star_state_z_pi'


@dataclass(frozen=True)
class Match:
    """A located rewrite site: the vertex and edge ids the rewrite consumes."""

    kind: RewriteKind
    vertices: tuple
    edges: tuple = ()


def _opposite(vertex_type):
    return VertexType.X if vertex_type == VertexType.Z else VertexType.Z


def _other_edge(d, v, e):
    """For a degree-2 vertex, the incident edge that is not e."""
    first, second = d.incident_edges(v)
    return second if first == e else first


def _plain_pair(d, v):
    """Distinct edges and far ends of a degree-2 vertex without self-loops, else None."""
    if d.degree(v) != 2 or d.self_loops(v):
        return None
    (e1, x), (e2, y) = d.neighbors(v)
    return e1, x, e2, y


# -- matchers ---------------------------------------------------------------

def _iter_spider_fusion(d, colors=(VertexType.Z, VertexType.X)):
    for e in d.edges():
        u, v, kind = d.edge(e)
        if kind != EdgeType.PLAIN or u == v:
            continue
        if not (d.is_spider(u) and d.is_spider(v)):
            continue
        if d.type(u) == d.type(v) and d.type(u) in colors:
            yield Match(RewriteKind.SPIDER_FUSION, (min(u, v), max(u, v)), (e,))


def _iter_color_change(d):
    for v in d.vertices():
        if not d.is_spider(v) or d.self_loops(v):
            continue
        if d.star_degree(v) == 0:
            yield Match(RewriteKind.COLOR_CHANGE, (v,))


def _iter_pi_commutation(d):
    for p in d.vertices():
        if not d.is_spider(p) or d.phase(p) != PI:
            continue
        pair = _plain_pair(d, p)
        if pair is None:
            continue
        e1, x, e2, y = pair
        for e, v, f, far in ((e1, x, e2, y), (e2, y, e1, x)):
            if d.edge_type(e) != EdgeType.PLAIN or v == far:
                continue
            if d.is_spider(v) and d.type(v) == _opposite(d.type(p)) and not d.self_loops(v):
                yield Match(RewriteKind.PI_COMMUTATION, (p, v), (e, f))


def _iter_state_copy(d):
    for s in d.vertices():
        if not d.is_leaf(s) or d.phase(s) not in (0, PI) or d.self_loops(s):
            continue
        (e, v), = d.neighbors(s)
        if d.edge_type(e) != EdgeType.PLAIN or not d.is_spider(v):
            continue
        if d.type(v) == _opposite(d.type(s)) and not d.self_loops(v):
            yield Match(RewriteKind.STATE_COPY, (s, v), (e,))


def _iter_bialgebra(d):
    for e in d.edges():
        u, v, kind = d.edge(e)
        if kind != EdgeType.PLAIN or u == v or not (d.is_spider(u) and d.is_spider(v)):
            continue
        if d.type(u) == VertexType.X:
            u, v = v, u
        if d.type(u) != VertexType.Z or d.type(v) != VertexType.X:
            continue
        if d.phase(u) or d.phase(v) or d.self_loops(u) or d.self_loops(v):
            continue
        if len(d.edges_between(u, v)) != 1 or d.degree(u) < 2 or d.degree(v) < 2:
            continue
        yield Match(RewriteKind.BIALGEBRA, (u, v), (e,))


def _iter_hh_cancel(d):
    for v in d.vertices():
        if not d.is_spider(v) or d.phase(v):
            continue
        pair = _plain_pair(d, v)
        if pair is None:
            continue
        e1, x, e2, y = pair
        if d.edge_type(e1) == d.edge_type(e2) == EdgeType.HADAMARD:
            yield Match(RewriteKind.HH_CANCEL, (v,), (e1, e2))


def _iter_hopf(d):
    for u in d.vertices():
        if not d.is_spider(u) or d.type(u) != VertexType.Z:
            continue
        seen = set()
        for e, v in d.neighbors(u):
            if v in seen or v == u or not d.is_spider(v) or d.type(v) != VertexType.X:
                continue
            seen.add(v)
            plain = [f for f in d.edges_between(u, v) if d.edge_type(f) == EdgeType.PLAIN]
            if len(plain) >= 2:
                yield Match(RewriteKind.HOPF, (u, v), tuple(plain[:2]))


def _iter_identity_removal(d):
    for v in d.vertices():
        if not d.is_spider(v) or d.phase(v) or d.partner(v) is not None:
            continue
        pair = _plain_pair(d, v)
        if pair is None:
            continue
        e1, x, e2, y = pair
        kinds = (d.edge_type(e1), d.edge_type(e2))
        # a Z(0) carrying a star leg stays as a decomposition master
        if EdgeType.PLAIN in kinds and EdgeType.STAR not in kinds:
            yield Match(RewriteKind.IDENTITY_REMOVAL, (v,), (e1, e2))


def _iter_euler(d):
    for e in d.edges():
        u, v, kind = d.edge(e)
        if kind == EdgeType.HADAMARD and u != v:
            yield Match(RewriteKind.EULER_DECOMPOSITION, (u, v), (e,))


_STAR_STATES = {
    RewriteKind.STAR_STATE_X_PI: (VertexType.X, PI),
    RewriteKind.STAR_STATE_X0: (VertexType.X, 0),
    RewriteKind.STAR_STATE_Z_PI: (VertexType.Z, PI),
}


def _iter_star_state(d, kind):
    leaf_type, leaf_phase = _STAR_STATES[kind]
    for v in d.vertices():
        if not d.is_leaf(v) or d.type(v) != leaf_type or d.phase(v) != leaf_phase:
            continue
        (e, w), = d.neighbors(v)
        if w != v and d.edge_type(e) == EdgeType.STAR:
            yield Match(kind, (v, w), (e,))


_MATCHERS = {
    RewriteKind.SPIDER_FUSION: _iter_spider_fusion,
    RewriteKind.COLOR_CHANGE: _iter_color_change,
    RewriteKind.PI_COMMUTATION: _iter_pi_commutation,
    RewriteKind.STATE_COPY: _iter_state_copy,
    RewriteKind.BIALGEBRA: _iter_bialgebra,
    RewriteKind.HH_CANCEL: _iter_hh_cancel,
    RewriteKind.HOPF: _iter_hopf,
    RewriteKind.IDENTITY_REMOVAL: _iter_identity_removal,
    RewriteKind.EULER_DECOMPOSITION: _iter_euler,
}


def _iter_matches(d, kind):
    if kind in _STAR_STATES:
        return _iter_star_state(d, kind)
    return _MATCHERS[kind](d)


def find_matches(d, kind):
    """All sites for the rewrite, in deterministic id order."""
    return list(_iter_matches(d, RewriteKind(kind)))


# -- appliers (in place) ----------------------------------------------------

def _resolve_self_loops(d, v):
    for e in d.self_loops(v):
        kind = d.edge_type(e)
        if kind == EdgeType.PLAIN:
            d.remove_edge(e)
        elif kind == EdgeType.HADAMARD:
            d.remove_edge(e)
            d.add_to_phase(v, PI)
            d.mult_scalar(ExactScalar.sqrt2_power(-1))
        elif d.type(v) == VertexType.Z:
            # a star loop forces every remaining leg of v to |0>
            d.remove_edge(e)
            d.set_phase(v, 0)
            leaf = d.add_vertex(VertexType.X, 0, d.row(v))
            d.add_edge(v, leaf)
            d.mult_scalar(ExactScalar.sqrt2_power(-1))


def _fuse(d, e):
    u, v, _ = d.edge(e)
    keep, gone = min(u, v), max(u, v)
    d.remove_edge(e)
    d.add_to_phase(keep, d.phase(gone))
    for f, w in d.neighbors(gone):
        kind = d.edge_type(f)
        d.remove_edge(f)
        d.add_edge(keep, keep if w == gone else w, kind)
    partner = d.partner(gone)
    d.remove_vertex(gone)
    if partner is not None and partner != keep and d.partner(keep) is None:
        d.link(keep, partner)
    _resolve_self_loops(d, keep)
    return keep


def _apply_spider_fusion(d, m):
    _fuse(d, m.edges[0])


def _apply_color_change(d, m):
    v, = m.vertices
    d.set_type(v, _opposite(d.type(v)))
    for e in d.incident_edges(v):
        d.set_edge_type(e, toggle_hadamard(d.edge_type(e)))


def _apply_pi_commutation(d, m):
    p, v = m.vertices
    e, f = m.edges
    far = d.other_end(f, p)
    far_kind = d.edge_type(f)
    not_type = d.type(p)
    alpha = d.phase(v)
    d.remove_vertex(p)
    legs = [(h, z, d.edge_type(h)) for h, z in d.neighbors(v)]
    d.add_edge(v, far, far_kind)
    for h, z, kind in legs:
        d.remove_edge(h)
        n = d.add_vertex(not_type, PI, (d.row(v) + d.row(z)) / 2)
        d.add_edge(v, n)
        d.add_edge(n, z, kind)
    d.set_phase(v, -alpha)
    d.mult_scalar(ExactScalar.omega(alpha))
    return v


def _apply_state_copy(d, m):
    s, v = m.vertices
    bit = 1 if d.phase(s) == PI else 0
    leaf_type = d.type(s)
    alpha = d.phase(v)
    d.remove_vertex(s)
    legs = [(h, z, d.edge_type(h)) for h, z in d.neighbors(v)]
    row = d.row(v)
    d.remove_vertex(v)
    for _, z, kind in legs:
        if kind == EdgeType.HADAMARD:
            leaf = d.add_vertex(_opposite(leaf_type), bit * PI, row)
            d.add_edge(leaf, z)
        else:
            leaf = d.add_vertex(leaf_type, bit * PI, row)
            d.add_edge(leaf, z, kind)
    d.mult_scalar(ExactScalar.sqrt2_power(1 - len(legs)) * ExactScalar.omega(bit * alpha))


def _apply_bialgebra(d, m):
    u, v = m.vertices
    e, = m.edges
    u_legs = [(z, d.edge_type(h)) for h, z in d.neighbors(u) if h != e]
    v_legs = [(z, d.edge_type(h)) for h, z in d.neighbors(v) if h != e]
    row = (d.row(u) + d.row(v)) / 2
    d.remove_vertex(u)
    d.remove_vertex(v)
    xs = []
    for z, kind in u_legs:
        x = d.add_vertex(VertexType.X, 0, row)
        d.add_edge(x, z, kind)
        xs.append(x)
    zs = []
    for z, kind in v_legs:
        w = d.add_vertex(VertexType.Z, 0, row)
        d.add_edge(w, z, kind)
        zs.append(w)
    for x in xs:
        for w in zs:
            d.add_edge(x, w)
    d.mult_scalar(ExactScalar.sqrt2_power((len(xs) - 1) * (len(zs) - 1)))


def _bridge(d, v, kind):
    """Remove degree-2 vertex v and join its two neighbours with an edge of the given kind."""
    (_, x), (_, y) = d.neighbors(v)
    d.remove_vertex(v)
    d.add_edge(x, y, kind)
    if x == y:
        _resolve_self_loops(d, x)


def _apply_hh_cancel(d, m):
    _bridge(d, m.vertices[0], EdgeType.PLAIN)


def _apply_hopf(d, m):
    for e in m.edges:
        d.remove_edge(e)
    d.mult_scalar(ExactScalar.one().halve())


def _apply_identity_removal(d, m):
    v, = m.vertices
    e1, e2 = m.edges
    k1, k2 = d.edge_type(e1), d.edge_type(e2)
    _bridge(d, v, k2 if k1 == EdgeType.PLAIN else k1)


def _apply_euler(d, m):
    u, v = m.vertices
    e, = m.edges
    d.remove_edge(e)
    step = (d.row(v) - d.row(u)) / 4
    a = d.add_vertex(VertexType.Z, HALF_PI, d.row(u) + step)
    b = d.add_vertex(VertexType.X, HALF_PI, d.row(u) + 2 * step)
    c = d.add_vertex(VertexType.Z, HALF_PI, d.row(u) + 3 * step)
    d.add_edge(u, a)
    d.add_edge(a, b)
    d.add_edge(b, c)
    d.add_edge(c, v)
    d.mult_scalar(ExactScalar.omega(-1))


_STAR_STATE_RESULTS = {
    RewriteKind.STAR_STATE_X_PI: (VertexType.X, 0, 0),
    RewriteKind.STAR_STATE_X0: (VertexType.Z, 0, 1),
    RewriteKind.STAR_STATE_Z_PI: (VertexType.X, PI, -1),
}


def _apply_star_state(d, m):
    leaf, w = m.vertices
    new_type, new_phase, sqrt2_exponent = _STAR_STATE_RESULTS[m.kind]
    row = d.row(leaf)
    d.remove_vertex(leaf)
    replacement = d.add_vertex(new_type, new_phase, row)
    d.add_edge(replacement, w)
    d.mult_scalar(ExactScalar.sqrt2_power(sqrt2_exponent))


_APPLIERS = {
    RewriteKind.SPIDER_FUSION: _apply_spider_fusion,
    RewriteKind.COLOR_CHANGE: _apply_color_change,
    RewriteKind.PI_COMMUTATION: _apply_pi_commutation,
    RewriteKind.STATE_COPY: _apply_state_copy,
    RewriteKind.BIALGEBRA: _apply_bialgebra,
    RewriteKind.HH_CANCEL: _apply_hh_cancel,
    RewriteKind.HOPF: _apply_hopf,
    RewriteKind.IDENTITY_REMOVAL: _apply_identity_removal,
    RewriteKind.EULER_DECOMPOSITION: _apply_euler,
    RewriteKind.STAR_STATE_X_PI: _apply_star_state,
    RewriteKind.STAR_STATE_X0: _apply_star_state,
    RewriteKind.STAR_STATE_Z_PI: _apply_star_state,
}


def apply_rewrite(d, match):
    """
    Return a new diagram with the rewrite applied at ``match``.

    Raises StaleMatchError when the site no longer exists in ``d``.
    """
    if match not in _iter_matches(d, match.kind):
        raise StaleMatchError(f"{match.kind.value} site {match.vertices} is not present")
    result = d.copy()
    _APPLIERS[match.kind](result, match)
    return result


# -- simplification ---------------------------------------------------------

def _remove_isolated(d):
    for v in d.vertices():
        if d.is_spider(v) and d.degree(v) == 0:
            d.mult_scalar(ExactScalar.one() + ExactScalar.omega(d.phase(v)))
            d.remove_vertex(v)
            return True
    return False


def _step(d, kinds):
    for kind in kinds:
        match = next(_iter_matches(d, kind), None)
        if match is not None:
            _APPLIERS[kind](d, match)
            return kind
    return None


_PARTIAL_ORDER = (
    RewriteKind.STATE_COPY,
    RewriteKind.SPIDER_FUSION,
    RewriteKind.STAR_STATE_X_PI,
    RewriteKind.STAR_STATE_X0,
    RewriteKind.STAR_STATE_Z_PI,
    RewriteKind.IDENTITY_REMOVAL,
)

_FULL_EXTRA = (RewriteKind.HOPF, RewriteKind.HH_CANCEL)


def check_deadline(deadline):
    """Raise DecompositionTimeout once the monotonic clock passes ``deadline``."""
    if deadline is not None and time.monotonic() > deadline:
        raise DecompositionTimeout("Decomposition deadline passed")


def partial_simplify(d, full=None, deadline=None):
    """
    Apply state copy, fusion, star-state and identity rewrites to a fixpoint.

    Isolated spiders are absorbed into the scalar. With ``full`` (default from
    the FULL_SIMPLIFY setting) Hopf and H-H cancellation join the loop. The
    deadline is checked before every pass.
    """
    if full is None:
        full = engine_setting('FULL_SIMPLIFY')
    kinds = _PARTIAL_ORDER + (_FULL_EXTRA if full else ())
    result = d.copy()
    steps = 0
    check_deadline(deadline)
    while _step(result, kinds) is not None or _remove_isolated(result):
        steps += 1
        check_deadline(deadline)
    logger.debug(f"partial_simplify applied {steps} rewrites, measure {result.measure()}")
    return result


def _is_wire_not(d, p):
    if not d.is_spider(p) or d.type(p) != VertexType.X or d.phase(p) != PI:
        return False
    pair = _plain_pair(d, p)
    return pair is not None and d.edge_type(pair[0]) == d.edge_type(pair[2]) == EdgeType.PLAIN


def _move_not(d, p):
    (e1, x), (e2, y) = d.neighbors(p)
    for e, v in ((e1, x), (e2, y)):
        if d.is_spider(v) and d.type(v) == VertexType.X:
            _fuse(d, e)
            return True
    e, v, f = (e1, x, e2) if d.row(x) >= d.row(y) else (e2, y, e1)
    if d.row(v) <= d.row(p) or v == d.other_end(f, p):
        return False
    if d.is_spider(v) and d.type(v) == VertexType.Z and not d.self_loops(v):
        _apply_pi_commutation(d, Match(RewriteKind.PI_COMMUTATION, (p, v), (e, f)))
        return True
    return False


def push_nots_to_boundary(d):
    """
    Move every wire NOT rightwards through Z spiders until it reaches an output
    or is absorbed by an X spider.
    """
    result = d.copy()
    budget = 4 * (result.num_vertices() + result.num_edges()) + 16
    moves = 0
    while moves < budget:
        moved = False
        for p in result.vertices():
            if _is_wire_not(result, p) and _move_not(result, p):
                moved = True
                break
        if not moved:
            break
        moves += 1
    logger.debug(f"push_nots_to_boundary made {moves} moves")
    return result


def _interposed(d, c):
    """(NOT vertex, star neighbour) pairs for legs c -plain- X(pi) -star- w."""
    found = []
    for e, x in d.neighbors(c):
        if x == c or d.edge_type(e) != EdgeType.PLAIN or not d.is_spider(x):
            continue
        if d.type(x) != VertexType.X or d.phase(x) != PI or d.degree(x) != 2 or d.self_loops(x):
            continue
        f = _other_edge(d, x, e)
        w = d.other_end(f, x)
        if d.edge_type(f) == EdgeType.STAR and w not in (c, x):
            found.append((x, w))
    return found


def to_stack_form(d):
    """
    Split each Z spider whose star legs are partly direct and partly behind a
    NOT into a linked pair c -plain- NOT -plain- c_B, moving the NOT-guarded
    stars onto c_B.
    """
    result = d.copy()
    while _step(result, (RewriteKind.IDENTITY_REMOVAL,)) or _step_zz_fusion(result):
        pass
    stacks = 0
    for c in result.vertices():
        if not result.has_vertex(c) or not result.is_spider(c) or result.type(c) != VertexType.Z:
            continue
        if result.partner(c) is not None or result.self_loops(c):
            continue
        direct = [e for e in result.incident_edges(c)
                  if result.edge_type(e) == EdgeType.STAR and result.other_end(e, c) != c]
        guarded = _interposed(result, c)
        if not direct or not guarded:
            continue
        row = result.row(c)
        bottom = result.add_vertex(VertexType.Z, 0, row)
        flip = result.add_vertex(VertexType.X, PI, row)
        result.add_edge(c, flip)
        result.add_edge(flip, bottom)
        for x, w in guarded:
            result.remove_vertex(x)
            result.add_edge(bottom, w, EdgeType.STAR)
        result.link(c, bottom)
        stacks += 1
    logger.debug(f"to_stack_form built {stacks} stacks")
    return result


def _step_zz_fusion(d):
    match = next(_iter_spider_fusion(d, colors=(VertexType.Z,)), None)
    if match is None:
        return False
    _fuse(d, match.edges[0])
    return True
