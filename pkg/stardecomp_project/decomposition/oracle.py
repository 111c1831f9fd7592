"""
Exact tensor contraction of diagrams.

The oracle is the ground truth of the engine: every rewrite, every catalog
rule and every final amplitude is checked against it. Tensors are stored as
four integer arrays (a, b, c, d) over a shared power of two, so that each
entry is the ring element (a + b·i + (c + d·i)·√2) / 2^k.
"""
from __future__ import annotations

import logging
from itertools import count

import numpy as np

from .conf import engine_setting
from .diagram import EdgeType, VertexType
from .exceptions import DiagramError, OracleLimitError
from .scalar import ExactScalar

logger = logging.getLogger(__name__)


def _zeros(shape):
    return np.zeros(shape, dtype=object) if shape else np.array(0, dtype=object)


class DenseTensor:
    """Exact multi-dimensional array over the ExactScalar ring."""

    __slots__ = ('a', 'b', 'c', 'd', 'k')

    def __init__(self, a, b, c, d, k=0):
        self.a, self.b, self.c, self.d = (np.asarray(p, dtype=object) for p in (a, b, c, d))
        self.k = k

    @classmethod
    def from_scalars(cls, entries, shape=None):
        flat = list(np.asarray(entries, dtype=object).reshape(-1))
        if shape is None:
            shape = np.asarray(entries, dtype=object).shape
        k = max((s.k for s in flat), default=0)
        parts = [[], [], [], []]
        for s in flat:
            scale = 1 << (k - s.k)
            for part, value in zip(parts, (s.a, s.b, s.c, s.d)):
                part.append(value * scale)
        arrays = [np.array(part, dtype=object).reshape(shape) for part in parts]
        return cls(*arrays, k=k).canonical()

    @classmethod
    def scalar(cls, value):
        return cls.from_scalars([value], shape=())

    @classmethod
    def zeros(cls, shape):
        return cls(_zeros(shape), _zeros(shape), _zeros(shape), _zeros(shape), 0)

    @property
    def shape(self):
        return self.a.shape

    @property
    def ndim(self):
        return self.a.ndim

    def __len__(self):
        return self.a.shape[0]

    def __getitem__(self, index):
        return ExactScalar(self.a[index], self.b[index], self.c[index], self.d[index], self.k)

    def scalars(self):
        return [self[idx] for idx in np.ndindex(*self.shape)]

    def canonical(self):
        k = self.k
        parts = [self.a, self.b, self.c, self.d]
        if not any(np.any(p) for p in parts):
            return DenseTensor(*parts, k=0)
        while k > 0 and all(not np.any(p % 2) for p in parts):
            parts = [np.asarray(p // 2, dtype=object) for p in parts]
            k -= 1
        return DenseTensor(*parts, k=k)

    def _aligned(self, other):
        k = max(self.k, other.k)
        s, t = 1 << (k - self.k), 1 << (k - other.k)
        mine = [p * s for p in (self.a, self.b, self.c, self.d)]
        theirs = [p * t for p in (other.a, other.b, other.c, other.d)]
        return mine, theirs, k

    def __add__(self, other):
        if self.shape != other.shape:
            raise DiagramError(f"Shape mismatch {self.shape} vs {other.shape}")
        mine, theirs, k = self._aligned(other)
        return DenseTensor(*(x + y for x, y in zip(mine, theirs)), k=k).canonical()

    def __neg__(self):
        return DenseTensor(-self.a, -self.b, -self.c, -self.d, self.k)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if self.shape != other.shape:
            return False
        mine, theirs, _ = self._aligned(other)
        return all(np.array_equal(x, y) for x, y in zip(mine, theirs))

    __hash__ = None

    def scale(self, factor):
        """Multiply every entry by an ExactScalar."""
        return self._product(DenseTensor.scalar(factor), lambda x, y: x * y)

    def tensordot(self, other, axes):
        return self._product(other, lambda x, y: np.tensordot(x, y, axes=axes))

    def outer(self, other):
        return self.tensordot(other, 0)

    def __matmul__(self, other):
        return self.tensordot(other, ([self.ndim - 1], [0]))

    def kron(self, other):
        """Kronecker product of two matrices (first operand most significant)."""
        r1, c1 = self.shape
        r2, c2 = other.shape
        return self.outer(other).transpose((0, 2, 1, 3)).reshape((r1 * r2, c1 * c2))

    def transpose(self, axes):
        return DenseTensor(*(np.transpose(p, axes) for p in (self.a, self.b, self.c, self.d)), k=self.k)

    def reshape(self, shape):
        return DenseTensor(*(np.reshape(p, shape) for p in (self.a, self.b, self.c, self.d)), k=self.k)

    def _product(self, other, op):
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        live = {id(p): bool(np.any(p)) for p in (a1, b1, c1, d1, a2, b2, c2, d2)}
        shape = np.shape(op(np.zeros(a1.shape, dtype=np.int8), np.zeros(a2.shape, dtype=np.int8)))

        def term(x, y):
            if live[id(x)] and live[id(y)]:
                return op(x, y)
            return None

        def total(*pairs):
            out = None
            for sign, x, y in pairs:
                value = term(x, y)
                if value is None:
                    continue
                value = value if sign > 0 else -value
                out = value if out is None else out + value
            return out if out is not None else _zeros(shape)

        # (P1 + Q1√2)(P2 + Q2√2) with P = a + bi, Q = c + di
        real = total((1, a1, a2), (-1, b1, b2)) + 2 * total((1, c1, c2), (-1, d1, d2))
        imag = total((1, a1, b2), (1, b1, a2)) + 2 * total((1, c1, d2), (1, d1, c2))
        sqrt_real = total((1, a1, c2), (-1, b1, d2), (1, c1, a2), (-1, d1, b2))
        sqrt_imag = total((1, a1, d2), (1, b1, c2), (1, c1, b2), (1, d1, a2))
        return DenseTensor(real, imag, sqrt_real, sqrt_imag, k=self.k + other.k).canonical()

    def to_complex(self):
        denominator = float(2 ** self.k)
        root2 = np.sqrt(2.0)
        real = (self.a.astype(float) + self.c.astype(float) * root2) / denominator
        imag = (self.b.astype(float) + self.d.astype(float) * root2) / denominator
        return real + 1j * imag

    def __repr__(self):
        return f"<DenseTensor shape={self.shape} k={self.k}>"


# -- generator tensors --------------------------------------------------------

_HADAMARD = None
_STAR = None
_IDENTITY = None


def _edge_matrix(kind):
    global _HADAMARD, _STAR, _IDENTITY
    if _IDENTITY is None:
        one, zero = ExactScalar.one(), ExactScalar.zero()
        h = ExactScalar.sqrt2_power(-1)
        _IDENTITY = DenseTensor.from_scalars([[one, zero], [zero, one]])
        _HADAMARD = DenseTensor.from_scalars([[h, h], [h, -h]])
        _STAR = DenseTensor.from_scalars([[one, one], [one, zero]])
    if kind == EdgeType.HADAMARD:
        return _HADAMARD
    if kind == EdgeType.STAR:
        return _STAR
    return _IDENTITY


def spider_tensor(vertex_type, phase, degree):
    """Dense tensor of a Z or X spider with the given number of legs."""
    omega = ExactScalar.omega(phase)
    shape = (2,) * degree
    if degree == 0:
        return DenseTensor.scalar(ExactScalar.one() + omega)
    if vertex_type == VertexType.Z:
        entries = np.full(shape, ExactScalar.zero(), dtype=object)
        entries[(0,) * degree] = ExactScalar.one()
        entries[(1,) * degree] = omega
        return DenseTensor.from_scalars(entries)
    norm = ExactScalar.sqrt2_power(-degree)
    even = norm * (ExactScalar.one() + omega)
    odd = norm * (ExactScalar.one() - omega)
    parity = np.indices(shape).sum(axis=0) % 2
    entries = np.where(parity == 0, even, odd).astype(object)
    return DenseTensor.from_scalars(entries)


# -- contraction ----------------------------------------------------------------

class _Network:
    """Labelled factors of a diagram awaiting contraction."""

    def __init__(self):
        self.factors = {}
        self.where = {}
        self._ids = count()
        self.labels = count()

    def add(self, tensor, labels):
        fid = next(self._ids)
        self.factors[fid] = (tensor, list(labels))
        for label in labels:
            self.where.setdefault(label, set()).add(fid)
        return fid

    def _pop(self, fid):
        tensor, labels = self.factors.pop(fid)
        for label in labels:
            self.where[label].discard(fid)
        return tensor, labels

    def contract_pair(self, i, j):
        ti, li = self._pop(i)
        tj, lj = self._pop(j)
        shared = [label for label in li if label in lj]
        axes = ([li.index(x) for x in shared], [lj.index(x) for x in shared])
        tensor = ti.tensordot(tj, axes)
        labels = [x for x in li if x not in shared] + [x for x in lj if x not in shared]
        for label in shared:
            del self.where[label]
        return self.add(tensor, labels)

    def best_pair(self):
        best = None
        for label, fids in self.where.items():
            if len(fids) != 2:
                continue
            i, j = sorted(fids)
            li, lj = self.factors[i][1], self.factors[j][1]
            shared = sum(1 for x in li if x in lj)
            rank = len(li) + len(lj) - 2 * shared
            key = (rank, i, j)
            if best is None or key < best:
                best = key
        return best

    def contract_all(self):
        while len(self.factors) > 1:
            best = self.best_pair()
            if best is None:
                i, j = sorted(self.factors, key=lambda f: (len(self.factors[f][1]), f))[:2]
            else:
                _, i, j = best
            self.contract_pair(i, j)
        ((tensor, labels),) = self.factors.values()
        return tensor, labels


def _add_spider(network, vertex_type, phase, legs):
    """Add a spider, unfusing it into a chain of three-legged pieces when large."""
    if len(legs) <= 3:
        network.add(spider_tensor(vertex_type, phase, len(legs)), legs)
        return
    link = next(network.labels)
    network.add(spider_tensor(vertex_type, phase, 3), [legs[0], legs[1], link])
    _add_spider(network, vertex_type, 0, [link] + legs[2:])


def contract(d, wire_limit=None):
    """
    Contract a diagram to its exact matrix.

    Rows index the outputs and columns the inputs; the first wire of each list
    is the most significant bit.
    """
    limit = wire_limit if wire_limit is not None else engine_setting('ORACLE_WIRE_LIMIT')
    wires = len(d.inputs) + len(d.outputs)
    if wires > limit:
        raise OracleLimitError(f"Diagram has {wires} boundary wires, limit is {limit}")

    network = _Network()
    half = {v: [] for v in d.vertices()}
    for e in d.edges():
        u, v, kind = d.edge(e)
        if kind == EdgeType.PLAIN and u != v:
            label = next(network.labels)
            half[u].append(label)
            half[v].append(label)
        else:
            lu, lv = next(network.labels), next(network.labels)
            half[u].append(lu)
            half[v].append(lv)
            network.add(_edge_matrix(kind), [lu, lv])

    open_labels = {}
    for v in d.vertices():
        if d.type(v) == VertexType.BOUNDARY:
            if len(half[v]) != 1:
                raise DiagramError(f"Boundary vertex {v} has degree {len(half[v])}")
            open_labels[v] = next(network.labels)
            network.add(_edge_matrix(EdgeType.PLAIN), [open_labels[v], half[v][0]])
        else:
            _add_spider(network, d.type(v), d.phase(v), half[v])

    network.add(DenseTensor.scalar(d.scalar), [])
    tensor, labels = network.contract_all()
    order = [open_labels[v] for v in d.outputs] + [open_labels[v] for v in d.inputs]
    if sorted(order) != sorted(labels):
        raise DiagramError("Boundary vertices missing from the input/output lists")
    tensor = tensor.transpose([labels.index(x) for x in order]) if order else tensor
    return tensor.reshape((2 ** len(d.outputs), 2 ** len(d.inputs)))


def statevector(d, wire_limit=None):
    """Exact amplitudes of a diagram without inputs."""
    if d.inputs:
        raise DiagramError(f"Statevector requires a state diagram, found {len(d.inputs)} inputs")
    return contract(d, wire_limit).reshape((2 ** len(d.outputs),))


def scalar_value(d):
    """Value of a diagram with no boundary wires."""
    if d.inputs or d.outputs:
        raise DiagramError("Scalar value requires a closed diagram")
    return contract(d)[0, 0]


def verify_rule(lhs, branches):
    """True when lhs equals the coefficient-weighted sum of the branch diagrams exactly."""
    for _, branch in branches:
        if len(branch.inputs) != len(lhs.inputs) or len(branch.outputs) != len(lhs.outputs):
            raise DiagramError("Rule branches must share the arity of the left-hand side")
    target = contract(lhs)
    total = DenseTensor.zeros(target.shape)
    for coefficient, branch in branches:
        total = total + contract(branch).scale(coefficient)
    return total == target
