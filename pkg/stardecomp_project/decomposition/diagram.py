"""
ZX-diagram data model with typed edges.

A diagram is an open multigraph of boundary vertices and Z/X spiders. Edges
are plain wires, Hadamard edges or star edges ([[1,1],[1,0]]). Phases are
stored as integer eighths of π. Vertex and edge ids come from monotone
allocators and never change once assigned.
"""
from __future__ import annotations

import logging
from enum import IntEnum

from .exceptions import DiagramError
from .scalar import ExactScalar

logger = logging.getLogger(__name__)


class VertexType(IntEnum):
    BOUNDARY = 0
    Z = 1
    X = 2


class EdgeType(IntEnum):
    PLAIN = 1
    HADAMARD = 2
    STAR = 3


def toggle_hadamard(kind):
    """Swap PLAIN and HADAMARD; STAR is returned unchanged."""
    if kind == EdgeType.PLAIN:
        return EdgeType.HADAMARD
    if kind == EdgeType.HADAMARD:
        return EdgeType.PLAIN
    return kind


def is_clifford_phase(eighths):
    return eighths % 2 == 0


class Diagram:
    """Open ZX multigraph carrying an exact global scalar."""

    def __init__(self):
        self._types = {}
        self._phases = {}
        self._rows = {}
        self._edges = {}
        self._incident = {}
        self.inputs = []
        self.outputs = []
        self.scalar = ExactScalar.one()
        self.links = {}
        self._next_vertex = 0
        self._next_edge = 0

    @classmethod
    def identity(cls, n):
        """n bare wires from input to output."""
        d = cls()
        for _ in range(n):
            i = d.add_vertex(VertexType.BOUNDARY, row=0.0)
            o = d.add_vertex(VertexType.BOUNDARY, row=1.0)
            d.add_edge(i, o)
            d.inputs.append(i)
            d.outputs.append(o)
        return d

    # -- vertices -----------------------------------------------------------

    def add_vertex(self, vertex_type, phase=0, row=0.0):
        v = self._next_vertex
        self._next_vertex += 1
        self._types[v] = VertexType(vertex_type)
        self._phases[v] = 0 if vertex_type == VertexType.BOUNDARY else phase % 8
        self._rows[v] = float(row)
        self._incident[v] = []
        return v

    def remove_vertex(self, v):
        self._require_vertex(v)
        if v in self.inputs or v in self.outputs:
            raise DiagramError(f"Vertex {v} is a listed boundary and cannot be removed directly")
        for e in self.incident_edges(v):
            self.remove_edge(e)
        del self._types[v]
        del self._phases[v]
        del self._rows[v]
        del self._incident[v]
        self.unlink(v)

    def has_vertex(self, v):
        return v in self._types

    def vertices(self):
        return sorted(self._types)

    def num_vertices(self):
        return len(self._types)

    def type(self, v):
        self._require_vertex(v)
        return self._types[v]

    def set_type(self, v, vertex_type):
        self._require_vertex(v)
        self._types[v] = VertexType(vertex_type)

    def is_spider(self, v):
        return self.type(v) != VertexType.BOUNDARY

    def phase(self, v):
        self._require_vertex(v)
        return self._phases[v]

    def set_phase(self, v, eighths):
        self._require_vertex(v)
        self._phases[v] = eighths % 8

    def add_to_phase(self, v, eighths):
        self.set_phase(v, self._phases[v] + eighths)

    def row(self, v):
        self._require_vertex(v)
        return self._rows[v]

    def set_row(self, v, row):
        self._require_vertex(v)
        self._rows[v] = float(row)

    def max_row(self):
        return max(self._rows.values(), default=0.0)

    # -- edges --------------------------------------------------------------

    def add_edge(self, u, v, edge_type=EdgeType.PLAIN):
        self._require_vertex(u)
        self._require_vertex(v)
        for end in {u, v}:
            if self._types[end] == VertexType.BOUNDARY and self._incident[end]:
                raise DiagramError(f"Boundary vertex {end} already has an edge")
        if u == v and self._types[u] == VertexType.BOUNDARY:
            raise DiagramError(f"Boundary vertex {u} cannot carry a self-loop")
        e = self._next_edge
        self._next_edge += 1
        self._edges[e] = (u, v, EdgeType(edge_type))
        self._incident[u].append(e)
        self._incident[v].append(e)
        return e

    def remove_edge(self, e):
        if e not in self._edges:
            raise DiagramError(f"Unknown edge id {e}")
        u, v, _ = self._edges.pop(e)
        self._incident[u].remove(e)
        self._incident[v].remove(e)

    def has_edge(self, e):
        return e in self._edges

    def edges(self):
        return sorted(self._edges)

    def num_edges(self):
        return len(self._edges)

    def edge(self, e):
        if e not in self._edges:
            raise DiagramError(f"Unknown edge id {e}")
        return self._edges[e]

    def edge_type(self, e):
        return self.edge(e)[2]

    def set_edge_type(self, e, edge_type):
        u, v, _ = self.edge(e)
        self._edges[e] = (u, v, EdgeType(edge_type))

    def other_end(self, e, v):
        a, b, _ = self.edge(e)
        if a == v:
            return b
        if b == v:
            return a
        raise DiagramError(f"Edge {e} is not incident to vertex {v}")

    def incident_edges(self, v):
        self._require_vertex(v)
        return sorted(set(self._incident[v]))

    def neighbors(self, v):
        """(edge id, far end) pairs in edge-id order; self-loops appear once with far end v."""
        return [(e, self.other_end(e, v)) for e in self.incident_edges(v)]

    def degree(self, v):
        self._require_vertex(v)
        return len(self._incident[v])

    def edges_between(self, u, v):
        return [e for e in self.incident_edges(u) if self.other_end(e, u) == v]

    def self_loops(self, v):
        return [e for e in self.incident_edges(v) if self._edges[e][0] == self._edges[e][1]]

    def is_leaf(self, v):
        return self.is_spider(v) and self.degree(v) == 1

    def star_edges(self):
        return [e for e in self.edges() if self._edges[e][2] == EdgeType.STAR]

    def star_count(self):
        return sum(1 for u, v, kind in self._edges.values() if kind == EdgeType.STAR)

    def star_degree(self, v):
        return sum(1 for e in self._incident[v] if self._edges[e][2] == EdgeType.STAR)

    # -- stack links --------------------------------------------------------

    def link(self, u, v):
        self._require_vertex(u)
        self._require_vertex(v)
        self.links[u] = v
        self.links[v] = u

    def unlink(self, v):
        partner = self.links.pop(v, None)
        if partner is not None and self.links.get(partner) == v:
            del self.links[partner]
        return partner

    def partner(self, v):
        return self.links.get(v)

    # -- whole-diagram queries ----------------------------------------------

    def mult_scalar(self, factor):
        self.scalar = self.scalar * factor

    def non_clifford_spiders(self):
        return [v for v in self.vertices()
                if self.is_spider(v) and not is_clifford_phase(self._phases[v])]

    def is_clifford(self):
        """Star-free with every spider phase a multiple of π/2."""
        return self.star_count() == 0 and not self.non_clifford_spiders()

    def measure(self):
        """Lexicographic size used to argue that simplification terminates."""
        inner = sum(1 for v in self._types
                    if self._types[v] != VertexType.BOUNDARY and len(self._incident[v]) >= 2)
        return (inner, self.star_count(), len(self._types), len(self._edges))

    def structure_key(self):
        vertices = tuple((v, int(self._types[v]), self._phases[v]) for v in self.vertices())
        edges = tuple(sorted((min(u, v), max(u, v), int(kind)) for u, v, kind in self._edges.values()))
        return (vertices, edges, tuple(self.inputs), tuple(self.outputs), self.scalar.to_tuple())

    def copy(self):
        other = Diagram.__new__(Diagram)
        other._types = dict(self._types)
        other._phases = dict(self._phases)
        other._rows = dict(self._rows)
        other._edges = dict(self._edges)
        other._incident = {v: list(es) for v, es in self._incident.items()}
        other.inputs = list(self.inputs)
        other.outputs = list(self.outputs)
        other.scalar = self.scalar
        other.links = dict(self.links)
        other._next_vertex = self._next_vertex
        other._next_edge = self._next_edge
        return other

    # -- composition --------------------------------------------------------

    def merge(self, other, row_shift=0.0):
        """Copy other's vertices and edges into self; return the vertex id map."""
        mapping = {}
        for v in other.vertices():
            mapping[v] = self.add_vertex(other.type(v), other.phase(v), other.row(v) + row_shift)
        for e in other.edges():
            u, v, kind = other.edge(e)
            self.add_edge(mapping[u], mapping[v], kind)
        for u, v in other.links.items():
            self.links[mapping[u]] = mapping[v]
        self.scalar = self.scalar * other.scalar
        return mapping

    def tensor(self, other):
        """Side-by-side composition; inputs and outputs are concatenated."""
        result = self.copy()
        mapping = result.merge(other)
        result.inputs += [mapping[v] for v in other.inputs]
        result.outputs += [mapping[v] for v in other.outputs]
        return result

    def compose(self, other):
        """Sequential composition: self's outputs are glued to other's inputs."""
        if len(self.outputs) != len(other.inputs):
            raise DiagramError(
                f"Cannot compose {len(self.outputs)} outputs with {len(other.inputs)} inputs"
            )
        result = self.copy()
        mapping = result.merge(other, row_shift=self.max_row())
        glued_inputs = [mapping[v] for v in other.inputs]
        outputs = [mapping[v] for v in other.outputs]
        left = list(result.outputs)
        result.outputs = []
        for o, i in zip(left, glued_inputs):
            result._glue(o, i)
        result.outputs = outputs
        return result

    def _glue(self, o, i):
        if len(self._incident[o]) != 1 or len(self._incident[i]) != 1:
            raise DiagramError(f"Boundaries {o} and {i} must each carry exactly one edge")
        eo, ei = self._incident[o][0], self._incident[i][0]
        x, kx = self.other_end(eo, o), self.edge_type(eo)
        y, ky = self.other_end(ei, i), self.edge_type(ei)
        self.remove_edge(eo)
        self.remove_edge(ei)
        for boundary in (o, i):
            del self._types[boundary]
            del self._phases[boundary]
            del self._rows[boundary]
            del self._incident[boundary]
        if kx == EdgeType.PLAIN:
            self.add_edge(x, y, ky)
        elif ky == EdgeType.PLAIN:
            self.add_edge(x, y, kx)
        elif kx == ky == EdgeType.HADAMARD:
            self.add_edge(x, y, EdgeType.PLAIN)
        else:
            w = self.add_vertex(VertexType.Z, 0, (self.row(x) + self.row(y)) / 2)
            self.add_edge(x, w, kx)
            self.add_edge(w, y, ky)

    def plug_inputs(self, bits):
        """Close every input with the computational basis state |bit⟩."""
        self.inputs = self._plug(self.inputs, bits)

    def plug_outputs(self, bits):
        """Close every output with the computational basis effect ⟨bit|."""
        self.outputs = self._plug(self.outputs, bits)

    def _plug(self, boundaries, bits):
        if len(bits) != len(boundaries):
            raise DiagramError(f"Expected {len(boundaries)} bits, got {len(bits)}")
        for v, bit in zip(boundaries, bits):
            # X(bit·π) leaf is √2|bit⟩
            self._types[v] = VertexType.X
            self._phases[v] = 4 if bit else 0
            self.mult_scalar(ExactScalar.sqrt2_power(-1))
        return []

    def _require_vertex(self, v):
        if v not in self._types:
            raise DiagramError(f"Unknown vertex id {v}")

    def __repr__(self):
        return (f"<Diagram vertices={self.num_vertices()} edges={self.num_edges()} "
                f"stars={self.star_count()} in={len(self.inputs)} out={len(self.outputs)} "
                f"scalar={self.scalar}>")
