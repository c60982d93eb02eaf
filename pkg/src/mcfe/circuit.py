"""Layered circuit representation.

Circuits are lists of layers applied first-to-last (list order is time order),
with qubits indexed from 0. Supported gates are parameterized single-qubit
gates ``u`` in Z-X90-Z-X90-Z form, the 24 single-qubit Cliffords ``c1``, and
CNOT.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import cliffords
from .gates1q import phase_distance, zxzxz_angles, zxzxz_unitary

ORACLE_LIMIT = 8

_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    clifford: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind == "u":
            if len(self.qubits) != 1 or len(self.params) != 3:
                raise ValueError("u gate needs one qubit and three angles")
            object.__setattr__(self, "params", tuple(float(a) for a in self.params))
        elif self.kind == "c1":
            if len(self.qubits) != 1:
                raise ValueError("c1 gate needs one qubit")
            object.__setattr__(self, "clifford", cliffords.validate_clifford_id(self.clifford))
        elif self.kind == "cnot":
            if len(self.qubits) != 2:
                raise ValueError("cnot needs two qubits")
            if self.qubits[0] == self.qubits[1]:
                raise ValueError(f"overlapping qubits in cnot{self.qubits}")
        else:
            raise ValueError(f"unsupported gate kind {self.kind!r}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be nonnegative")

    @classmethod
    def u(cls, qubit, psi, phi, theta):
        return cls("u", (qubit,), (psi, phi, theta))

    @classmethod
    def c1(cls, qubit, clifford):
        return cls("c1", (qubit,), clifford=clifford)

    @classmethod
    def cnot(cls, control, target):
        return cls("cnot", (control, target))

    @property
    def is_single_qubit(self):
        return self.kind != "cnot"

    def inverse(self):
        if self.kind == "cnot":
            return self
        if self.kind == "c1":
            return Gate.c1(self.qubits[0], int(cliffords.INVERSE[self.clifford]))
        psi, phi, theta = self.params
        # Z(t)X90Z(f)X90Z(p) inverted exactly: Z(pi-p) X90 Z(-f) X90 Z(-pi-t)
        return Gate.u(self.qubits[0], -np.pi - theta, -phi, np.pi - psi)

    def physical_angles(self):
        """(psi, phi, theta) actually executed for a single-qubit gate."""
        if self.kind == "u":
            return self.params
        if self.kind == "c1":
            return tuple(float(a) for a in cliffords.CLIFFORD_ANGLES[self.clifford])
        raise ValueError("cnot has no single-qubit angles")

    def matrix(self):
        if self.kind == "cnot":
            return _CNOT.copy()
        if self.kind == "c1":
            return cliffords.CLIFFORD_MATRICES[self.clifford].copy()
        return zxzxz_unitary(*self.params)


def _infer_kind(gates):
    singles = sum(g.is_single_qubit for g in gates)
    if singles == len(gates):
        return "l"
    if singles == 0:
        return "e"
    return "mixed"


@dataclass(frozen=True)
class Layer:
    """Gates on pairwise-disjoint qubits. ``kind`` is 'l', 'e' or 'mixed'."""

    n: int
    gates: Tuple[Gate, ...] = ()
    kind: Optional[str] = None

    def __post_init__(self):
        gates = tuple(sorted(self.gates, key=lambda g: g.qubits))
        object.__setattr__(self, "gates", gates)
        used = set()
        for g in gates:
            for q in g.qubits:
                if q >= self.n:
                    raise ValueError(f"qubit {q} out of range for width {self.n}")
                if q in used:
                    raise ValueError(f"overlapping qubits in layer: qubit {q} used twice")
                used.add(q)
        inferred = _infer_kind(gates)
        kind = self.kind or inferred
        if kind not in ("l", "e", "mixed"):
            raise ValueError(f"unknown layer kind {kind!r}")
        if gates and kind != inferred and kind != "mixed":
            raise ValueError(f"layer declared {kind!r} but contains {inferred!r} gates")
        object.__setattr__(self, "kind", kind)

    def gate_on(self, qubit):
        for g in self.gates:
            if qubit in g.qubits:
                return g
        return None

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True)
class Circuit:
    n: int
    layers: Tuple[Layer, ...] = field(default_factory=tuple)

    def __post_init__(self):
        layers = tuple(self.layers)
        for layer in layers:
            if layer.n != self.n:
                raise ValueError(f"layer width {layer.n} does not match circuit width {self.n}")
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self):
        return len(self.layers)

    def __add__(self, other):
        """Concatenate in time: ``self`` then ``other``."""
        if other.n != self.n:
            raise ValueError("width mismatch")
        return Circuit(self.n, self.layers + other.layers)

    def count(self, kind):
        return sum(1 for layer in self.layers for g in layer.gates if g.kind == kind)


class AlternatingCircuit(Circuit):
    """Circuit of the form l_1 e_1 l_2 ... e_{d-1} l_d (in time order)."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.layers) % 2 != 1:
            raise ValueError("alternating circuit needs an odd number of layers")
        for i, layer in enumerate(self.layers):
            expected = "l" if i % 2 == 0 else "e"
            if layer.kind != expected:
                raise ValueError(f"layer {i} is {layer.kind!r}, expected {expected!r}")

    @property
    def num_l_layers(self):
        return (len(self.layers) + 1) // 2

    @classmethod
    def from_circuit(cls, c):
        return cls(c.n, c.layers)


def is_alternating(c):
    try:
        AlternatingCircuit.from_circuit(c)
    except ValueError:
        return False
    return True


def reverse_layer(layer):
    """Layer whose gates are the inverses of ``layer``'s gates."""
    return Layer(layer.n, tuple(g.inverse() for g in layer.gates), layer.kind)


def motion_reverse(c):
    """Circuit implementing ``U(c)^dagger``: reversed layer order, each layer reversed."""
    rev = tuple(reverse_layer(layer) for layer in reversed(c.layers))
    return type(c)(c.n, rev) if isinstance(c, AlternatingCircuit) else Circuit(c.n, rev)


def merge_single_qubit_gates(first, second):
    """One gate equal (up to phase) to ``first`` followed by ``second``; either may be None."""
    if first is None:
        return second
    if second is None:
        return first
    q = first.qubits[0]
    if first.kind == "c1" and second.kind == "c1":
        return Gate.c1(q, int(cliffords.PRODUCT[second.clifford, first.clifford]))
    angles = zxzxz_angles(second.matrix() @ first.matrix())
    return Gate.u(q, *angles)


def merge_l_layers(first, second):
    n = first.n
    gates = []
    for q in range(n):
        g = merge_single_qubit_gates(first.gate_on(q), second.gate_on(q))
        if g is not None:
            gates.append(g)
    return Layer(n, tuple(gates), "l")


def empty_layer(n, kind):
    return Layer(n, (), kind)


def to_alternating_form(c):
    """Logically equivalent circuit that strictly alternates l and e layers.

    Adjacent single-qubit layers are merged gate-by-gate, empty l layers are
    inserted between adjacent CNOT layers and at the ends, and mixed layers are
    split into their single-qubit and CNOT parts.
    """
    out = []
    for layer in c.layers:
        for g in layer.gates:
            if g.kind not in ("u", "c1", "cnot"):
                raise ValueError(f"unsupported gate kind {g.kind!r}")
        if layer.kind == "mixed":
            parts = [
                Layer(c.n, tuple(g for g in layer.gates if g.is_single_qubit), "l"),
                Layer(c.n, tuple(g for g in layer.gates if not g.is_single_qubit), "e"),
            ]
        else:
            parts = [layer]
        for part in parts:
            if part.kind == "e":
                if not out or out[-1].kind == "e":
                    out.append(empty_layer(c.n, "l"))
                out.append(part)
            elif out and out[-1].kind == "l":
                out[-1] = merge_l_layers(out[-1], part)
            else:
                out.append(part)
    if not out or out[-1].kind == "e":
        out.append(empty_layer(c.n, "l"))
    return AlternatingCircuit(c.n, tuple(out))


# ---------------------------------------------------------------------------
# Dense unitaries (small n oracle)
# ---------------------------------------------------------------------------


def _apply_gate_to_matrix(m, gate, n):
    k = len(gate.qubits)
    dim = 2**n
    t = m.reshape((2,) * n + (dim,))
    g = gate.matrix().reshape((2,) * (2 * k))
    axes = list(gate.qubits)
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(dim, dim)


def unitary_of(c, limit=ORACLE_LIMIT):
    """Dense ``2**n x 2**n`` unitary of a circuit (qubit 0 most significant)."""
    if c.n > limit:
        raise ValueError(f"width {c.n} exceeds oracle limit {limit}")
    m = np.eye(2**c.n, dtype=complex)
    for layer in c.layers:
        for gate in layer.gates:
            m = _apply_gate_to_matrix(m, gate, c.n)
    return m


def layer_unitary(layer, limit=ORACLE_LIMIT):
    return unitary_of(Circuit(layer.n, (layer,)), limit)


def equal_up_to_phase(u, v, atol=1e-10):
    return phase_distance(u, v) < atol
