"""
Gate-level circuits over X, H, CNOT and multi-control Toffoli gates, their
translation to star-edge diagrams, the Grover diffusion stage and the random
MCT-dense generator.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conf import engine_setting
from .diagram import Diagram, EdgeType, VertexType, toggle_hadamard
from .exceptions import CircuitError, FixtureFormatError
from .oracle import DenseTensor
from .scalar import ExactScalar

logger = logging.getLogger(__name__)

GATE_KINDS = ('x', 'h', 'cx', 'mct')

# control-wire NOTs sit this far from the control spider
_NOT_OFFSET = 0.2


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple = ()

    @classmethod
    def x(cls, target):
        return cls('x', target)

    @classmethod
    def h(cls, target):
        return cls('h', target)

    @classmethod
    def cx(cls, control, target):
        return cls('cx', target, (control,))

    @classmethod
    def mct(cls, controls, target):
        return cls('mct', target, tuple(sorted(controls)))

    def qubits(self):
        return (*self.controls, self.target)

    def to_dict(self):
        if self.kind in ('x', 'h'):
            return {'type': self.kind, 'target': self.target}
        if self.kind == 'cx':
            return {'type': 'cx', 'control': self.controls[0], 'target': self.target}
        return {'type': 'mct', 'controls': list(self.controls), 'target': self.target}


@dataclass
class Circuit:
    """An ordered gate list on ``qubits`` wires."""

    qubits: int
    gates: list = field(default_factory=list)
    name: str = ''
    search_register: tuple | None = None
    verified: bool = False
    expected_peaks: int | None = None
    expected_terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.qubits < 1:
            raise CircuitError(f"A circuit needs at least one qubit, got {self.qubits}")
        for index, gate in enumerate(self.gates):
            if gate.kind not in GATE_KINDS:
                raise CircuitError(f"Gate {index}: unknown type {gate.kind!r}")
            for q in gate.qubits():
                if not 0 <= q < self.qubits:
                    raise CircuitError(f"Gate {index}: qubit {q} out of range 0..{self.qubits - 1}")
            if gate.kind in ('cx', 'mct'):
                if not gate.controls:
                    raise CircuitError(f"Gate {index}: controls must be non-empty")
                if gate.target in gate.controls:
                    raise CircuitError(f"Gate {index}: control and target coincide on qubit {gate.target}")
                if len(set(gate.controls)) != len(gate.controls):
                    raise CircuitError(f"Gate {index}: repeated control qubit")
        if self.search_register is not None:
            register = tuple(self.search_register)
            if not register or any(not 0 <= q < self.qubits for q in register):
                raise CircuitError(f"Search register {register} does not fit {self.qubits} qubits")
            self.search_register = register

    @property
    def register(self):
        return self.search_register if self.search_register is not None else tuple(range(self.qubits))

    def count(self, kind):
        return sum(1 for g in self.gates if g.kind == kind)

    def to_dict(self):
        data = {'qubits': self.qubits, 'gates': [g.to_dict() for g in self.gates]}
        if self.name:
            data['name'] = self.name
        if self.search_register is not None:
            data['search_register'] = list(self.search_register)
        return data

    def __str__(self):
        label = self.name or 'circuit'
        return f"{label} ({self.qubits} qubits, {len(self.gates)} gates, {self.count('mct')} MCT)"


class DiagramBuilder:
    """
    Appends gates to a growing diagram, tracking per wire the last vertex and
    the edge kind the next attachment must use.
    """

    def __init__(self, qubits):
        self.diagram = Diagram()
        self.frontier = []
        self.column = 0
        for _ in range(qubits):
            b = self.diagram.add_vertex(VertexType.BOUNDARY, row=0.0)
            self.diagram.inputs.append(b)
            self.frontier.append((b, EdgeType.PLAIN))

    def _attach(self, q, vertex_type, phase, row):
        d = self.diagram
        last, kind = self.frontier[q]
        v = d.add_vertex(vertex_type, phase, row)
        d.add_edge(last, v, kind)
        self.frontier[q] = (v, EdgeType.PLAIN)
        return v

    def x(self, q):
        self.column += 1
        self._attach(q, VertexType.X, 4, self.column)

    def h(self, q):
        self.column += 1
        last, kind = self.frontier[q]
        self.frontier[q] = (last, toggle_hadamard(kind))

    def s(self, q):
        self.column += 1
        self._attach(q, VertexType.Z, 2, self.column)

    def cx(self, control, target):
        self.column += 1
        d = self.diagram
        z = self._attach(control, VertexType.Z, 0, self.column)
        x = self._attach(target, VertexType.X, 0, self.column)
        d.add_edge(z, x)
        d.mult_scalar(ExactScalar.sqrt2_power(1))

    def mct(self, controls, target):
        """
        Controls are Z spiders between two NOTs, star-joined to a Z(π) hub;
        the hub drives the target X spider through NOT -star- Z(π).
        """
        self.column += 1
        col = self.column
        d = self.diagram
        hub = d.add_vertex(VertexType.Z, 4, col)
        for q in controls:
            self._attach(q, VertexType.X, 4, col - _NOT_OFFSET)
            c = self._attach(q, VertexType.Z, 0, col)
            self._attach(q, VertexType.X, 4, col + _NOT_OFFSET)
            d.add_edge(hub, c, EdgeType.STAR)
        flip = d.add_vertex(VertexType.X, 4, col)
        gate = d.add_vertex(VertexType.Z, 4, col)
        xt = self._attach(target, VertexType.X, 0, col)
        d.add_edge(hub, flip)
        d.add_edge(flip, gate, EdgeType.STAR)
        d.add_edge(gate, xt)
        d.mult_scalar(ExactScalar.sqrt2_power(1))

    def apply(self, gate):
        if gate.kind == 'x':
            self.x(gate.target)
        elif gate.kind == 'h':
            self.h(gate.target)
        elif gate.kind == 'cx':
            self.cx(gate.controls[0], gate.target)
        else:
            self.mct(gate.controls, gate.target)

    def finish(self):
        d = self.diagram
        row = self.column + 1
        for last, kind in self.frontier:
            o = d.add_vertex(VertexType.BOUNDARY, row=row)
            d.add_edge(last, o, kind)
            d.outputs.append(o)
        return d


def to_diagram(c):
    """Translate a circuit into a diagram whose tensor is the circuit's unitary."""
    builder = DiagramBuilder(c.qubits)
    for gate in c.gates:
        builder.apply(gate)
    d = builder.finish()
    logger.debug(f"Translated {c} into {d!r}")
    return d


def diffusion_circuit(qubits, register=None):
    """
    The Grover diffusion on ``register`` (default: every wire) built from H, X
    and one MCT whose target is conjugated by H; equals I − 2|s⟩⟨s| there.
    """
    register = tuple(range(qubits)) if register is None else tuple(register)
    if len(register) < 2:
        raise CircuitError(f"Diffusion needs at least 2 register qubits, got {len(register)}")
    *rest, last = register
    gates = [Gate.h(q) for q in register] + [Gate.x(q) for q in register]
    gates += [Gate.h(last), Gate.mct(rest, last), Gate.h(last)]
    gates += [Gate.x(q) for q in register] + [Gate.h(q) for q in register]
    return Circuit(qubits, gates, name='diffusion', search_register=register)


def diffusion_diagram(n, register=None, qubits=None):
    return to_diagram(diffusion_circuit(qubits or n, register))


def circuit_matrix(c):
    """Exact unitary of ``c`` built gate by gate, rows indexed by outputs (qubit 0 most significant)."""
    n = c.qubits
    dim = 2 ** n
    m = np.eye(dim, dtype=object).reshape((2,) * n + (dim,))
    hadamards = 0
    for gate in c.gates:
        t = gate.target
        if gate.kind == 'x':
            m = np.flip(m, axis=t)
        elif gate.kind == 'h':
            zero, one = np.take(m, 0, axis=t), np.take(m, 1, axis=t)
            m = np.stack([zero + one, zero - one], axis=t)
            hadamards += 1
        else:
            m = m.copy()
            select = tuple(1 if q in gate.controls else slice(None) for q in range(n)) + (slice(None),)
            axis = t - sum(1 for q in gate.controls if q < t)
            m[select] = np.flip(m[select], axis=axis).copy()
    m = m.reshape((dim, dim))
    zeros = np.zeros((dim, dim), dtype=object)
    return DenseTensor(m, zeros, zeros, zeros).scale(ExactScalar.sqrt2_power(-hadamards))


def mct_target_wires(qubits):
    """The bottom ⌈qubits/4⌉ wires, where random MCT gates put their targets."""
    return tuple(range(qubits - max(1, math.ceil(qubits / 4)), qubits))


def random_mct_dense(qubits, n_not, n_cnot, n_mct, seed):
    """
    A seeded random circuit with exactly the requested gate counts.

    MCT targets come from the bottom ⌈qubits/4⌉ wires; the control count is
    uniform in [2, available wires].
    """
    if min(n_not, n_cnot, n_mct) < 0:
        raise CircuitError("Gate counts must be non-negative")
    if qubits < 3:
        raise CircuitError(f"An MCT-dense circuit needs at least 3 qubits, got {qubits}")
    rng = np.random.default_rng(seed)
    kinds = ['x'] * n_not + ['cx'] * n_cnot + ['mct'] * n_mct
    rng.shuffle(kinds)
    targets = mct_target_wires(qubits)
    gates = []
    for kind in kinds:
        if kind == 'x':
            gates.append(Gate.x(int(rng.integers(qubits))))
        elif kind == 'cx':
            control, target = rng.choice(qubits, size=2, replace=False)
            gates.append(Gate.cx(int(control), int(target)))
        else:
            target = int(rng.integers(targets[0], qubits))
            others = [q for q in range(qubits) if q != target]
            size = int(rng.integers(2, len(others) + 1))
            controls = rng.choice(others, size=size, replace=False)
            gates.append(Gate.mct([int(q) for q in controls], target))
    name = f"random_q{qubits}_n{n_not}_c{n_cnot}_m{n_mct}_s{seed}"
    return Circuit(qubits, gates, name=name)


# -- JSON -------------------------------------------------------------------

def circuit_from_data(data):
    """Validate a decoded circuit document and build the Circuit."""
    from .serializers import CircuitSerializer

    serializer = CircuitSerializer(data=data)
    if not serializer.is_valid():
        field_name, messages = next(iter(serializer.errors.items()))
        raise FixtureFormatError(f"Invalid circuit: {_flatten(messages)}", field=field_name)
    return serializer.save()


def _flatten(messages):
    if isinstance(messages, dict):
        return '; '.join(f"{k}: {_flatten(v)}" for k, v in messages.items())
    if isinstance(messages, list):
        return '; '.join(_flatten(m) for m in messages if m)
    return str(messages)


def parse_circuit(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureFormatError(f"Malformed JSON: {exc.msg}", line=exc.lineno) from None
    return circuit_from_data(data)


def read_circuit(path):
    return parse_circuit(Path(path).read_text())


def write_circuit(c, path):
    Path(path).write_text(json.dumps(c.to_dict(), indent=2, sort_keys=True) + '\n')


def default_circuit_dir():
    configured = engine_setting('CIRCUIT_FIXTURE_DIR')
    return Path(configured) if configured else Path(__file__).resolve().parent / 'fixtures' / 'circuits'


def fixture_names():
    return sorted(p.stem for p in default_circuit_dir().glob('*.json'))


def load_fixture(name):
    """Load a named circuit fixture, or a path to a circuit file."""
    path = Path(name)
    if not path.suffix:
        path = default_circuit_dir() / f"{name}.json"
    if not path.exists():
        raise FixtureFormatError(f"No circuit fixture named {name!r}")
    circuit = read_circuit(path)
    if not circuit.verified and (circuit.expected_peaks is not None or circuit.expected_terms):
        logger.warning(f"Fixture {circuit.name or name} carries expected values but is not verified")
    return circuit
