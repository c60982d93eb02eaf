"""Exact n-qubit Pauli arithmetic in symplectic form, plus stochastic Pauli channels.

A ``PauliOperator`` is ``i**phase * P_0 (x) P_1 (x) ... (x) P_{n-1}`` where each
factor is the Hermitian Pauli selected by its ``(x, z)`` bits: (0,0)=I,
(1,0)=X, (1,1)=Y, (0,1)=Z. Qubit 0 is the leftmost tensor factor and the most
significant bit of matrix indices.

Single-qubit Paulis are also referred to by index 0..3 = I, X, Y, Z.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import cliffords
from .gates1q import PAULI_MATRICES

_LETTERS = "IXYZ"
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}

# index -> (x, z) and back
PAULI_X = np.array([0, 1, 1, 0], dtype=np.uint8)
PAULI_Z = np.array([0, 0, 1, 1], dtype=np.uint8)
XZ_TO_INDEX = np.array([[0, 3], [1, 2]], dtype=np.int64)  # [x, z]

# P_a @ P_b = i**MUL_PHASE[a, b] * P_{a^b}  (Hermitian Pauli convention)
MUL_PHASE = np.zeros((4, 4), dtype=np.int64)
for _a in range(4):
    for _b in range(4):
        _prod = PAULI_MATRICES[_a] @ PAULI_MATRICES[_b]
        _c = XZ_TO_INDEX[PAULI_X[_a] ^ PAULI_X[_b], PAULI_Z[_a] ^ PAULI_Z[_b]]
        _ratio = np.trace(PAULI_MATRICES[_c].conj().T @ _prod) / 2
        MUL_PHASE[_a, _b] = int(round(np.angle(_ratio) / (np.pi / 2))) % 4
del _a, _b, _prod, _c, _ratio


@dataclass(frozen=True)
class PauliOperator:
    """n-qubit Pauli operator with an exact phase in {+1, +i, -1, -i}."""

    x_bits: tuple
    z_bits: tuple
    phase: int = 0

    def __post_init__(self):
        x = tuple(int(b) for b in self.x_bits)
        z = tuple(int(b) for b in self.z_bits)
        if len(x) != len(z):
            raise ValueError("x_bits and z_bits must have the same length")
        if any(b not in (0, 1) for b in x + z):
            raise ValueError("Pauli bits must be 0 or 1")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @property
    def n(self):
        return len(self.x_bits)

    @classmethod
    def identity(cls, n):
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_indices(cls, indices, phase=0):
        """Build from per-qubit indices 0..3 (I, X, Y, Z)."""
        idx = np.asarray(indices, dtype=np.int64)
        return cls(tuple(PAULI_X[idx]), tuple(PAULI_Z[idx]), phase)

    @classmethod
    def from_label(cls, label):
        """Parse text such as ``"XIZY"``, ``"+XIZY"``, ``"-iZZ"``."""
        text = label.strip()
        phase = 0
        for prefix, value in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if text.startswith(prefix) and text[len(prefix):] and text[len(prefix)] in _LETTERS:
                phase, text = value, text[len(prefix):]
                break
        if not text or any(ch not in _LETTERS for ch in text):
            raise ValueError(f"malformed Pauli label {label!r}")
        return cls.from_indices([_LETTERS.index(ch) for ch in text], phase)

    def indices(self):
        return tuple(int(XZ_TO_INDEX[x, z]) for x, z in zip(self.x_bits, self.z_bits))

    def label(self, with_phase=True):
        body = "".join(_LETTERS[i] for i in self.indices())
        return (_PHASE_PREFIX[self.phase] + body) if with_phase else body

    def __str__(self):
        return self.label()

    def weight(self):
        return sum(1 for x, z in zip(self.x_bits, self.z_bits) if x or z)

    def is_identity(self, ignore_phase=False):
        return not any(self.x_bits) and not any(self.z_bits) and (ignore_phase or self.phase == 0)

    def without_phase(self):
        return PauliOperator(self.x_bits, self.z_bits, 0)

    def matrix(self):
        """Dense ``2**n x 2**n`` matrix (for small n checks)."""
        mats = [PAULI_MATRICES[i] for i in self.indices()]
        return (1j**self.phase) * reduce(np.kron, mats, np.eye(1, dtype=complex))

    def __matmul__(self, other):
        return compose(self, other)


def _check_same_width(a, b):
    if a.n != b.n:
        raise ValueError(f"Pauli width mismatch: {a.n} vs {b.n}")


def compose(a, b):
    """Return the operator product ``a @ b`` with the phase tracked exactly."""
    _check_same_width(a, b)
    phase = a.phase + b.phase
    for ia, ib in zip(a.indices(), b.indices()):
        phase += MUL_PHASE[ia, ib]
    x = tuple(xa ^ xb for xa, xb in zip(a.x_bits, b.x_bits))
    z = tuple(za ^ zb for za, zb in zip(a.z_bits, b.z_bits))
    return PauliOperator(x, z, phase)


def commutes(a, b):
    _check_same_width(a, b)
    sym = sum(xa * zb + za * xb for xa, za, xb, zb in zip(a.x_bits, a.z_bits, b.x_bits, b.z_bits))
    return sym % 2 == 0


def _check_qubit(p, q):
    if not (isinstance(q, (int, np.integer)) and 0 <= q < p.n):
        raise IndexError(f"qubit index {q} out of range for {p.n}-qubit Pauli")


def conjugate_by_cnot(p, control, target):
    """Return ``CNOT p CNOT`` for the CNOT with the given control and target."""
    _check_qubit(p, control)
    _check_qubit(p, target)
    if control == target:
        raise ValueError("CNOT control and target must differ")
    x, z = list(p.x_bits), list(p.z_bits)
    xc, zc, xt, zt = x[control], z[control], x[target], z[target]
    flip = xc & zt & (xt ^ zc ^ 1)
    x[target] ^= xc
    z[control] ^= zt
    return PauliOperator(x, z, p.phase + 2 * flip)


def conjugate_by_single_qubit_clifford(p, qubit, clifford):
    """Return ``C p C^dagger`` with Clifford ``clifford`` (id 0..23) acting on ``qubit``."""
    _check_qubit(p, qubit)
    clifford = cliffords.validate_clifford_id(clifford)
    idx = list(p.indices())
    new_index, sign = cliffords.CONJUGATION[clifford, idx[qubit]]
    idx[qubit] = int(new_index)
    return PauliOperator.from_indices(idx, p.phase + (2 if sign < 0 else 0))


def sample_uniform_pauli(n, rng):
    """Uniformly random phase-free n-qubit Pauli drawn from a numpy Generator."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return PauliOperator.from_indices(rng.integers(0, 4, size=n))


def x_mask(p):
    """Bit-flip pattern the Pauli induces on computational basis states."""
    return tuple(p.x_bits)


def apply_mask(bits, mask):
    """XOR a bitstring (str of '0'/'1') with a mask."""
    if len(bits) != len(mask):
        raise ValueError("bitstring and mask widths differ")
    return "".join(str(int(b) ^ int(m)) for b, m in zip(bits, mask))


# ---------------------------------------------------------------------------
# Stochastic Pauli channels
# ---------------------------------------------------------------------------

DENSE_CHANNEL_LIMIT = 6


def pauli_index_digits(n):
    """``(4**n, n)`` array of per-qubit Pauli indices for each flat index (qubit 0 most significant)."""
    flat = np.arange(4**n)
    return np.stack([(flat // 4 ** (n - 1 - q)) % 4 for q in range(n)], axis=1)


def symplectic_signs(n):
    """``(4**n, 4**n)`` matrix of (-1)**<P, Q>: +1 when P and Q commute."""
    one = np.array(
        [[1 if commutes(PauliOperator.from_indices([a]), PauliOperator.from_indices([b])) else -1
          for b in range(4)] for a in range(4)],
        dtype=np.int8,
    )
    return reduce(np.kron, [one] * n, np.ones((1, 1), dtype=np.int8))


class PauliChannel:
    """Stochastic Pauli channel: applies Pauli P with probability ``rates[P]``.

    Rates are indexed by the flat Pauli index (base 4, qubit 0 most significant).
    For n <= 6 a dense vector is kept; wider channels keep a sparse dict.
    """

    def __init__(self, n, rates):
        self.n = int(n)
        if isinstance(rates, dict):
            items = {int(k): float(v) for k, v in rates.items()}
        else:
            arr = np.asarray(rates, dtype=float)
            if arr.shape != (4**self.n,):
                raise ValueError(f"expected {4**self.n} rates, got shape {arr.shape}")
            items = None
        if items is not None:
            if any(not 0 <= k < 4**self.n for k in items):
                raise ValueError("Pauli index out of range")
            values = np.array(list(items.values()))
        else:
            values = arr
        if np.any(values < 0):
            raise ValueError("Pauli rates must be nonnegative")
        if abs(values.sum() - 1) > 1e-12:
            raise ValueError(f"Pauli rates must sum to 1 (got {values.sum()!r})")
        if self.n <= DENSE_CHANNEL_LIMIT:
            dense = np.zeros(4**self.n)
            if items is not None:
                for k, v in items.items():
                    dense[k] = v
            else:
                dense[:] = arr
            self._dense, self._sparse = dense, None
        else:
            self._dense = None
            self._sparse = items if items is not None else {int(k): float(v) for k, v in enumerate(arr) if v}

    @classmethod
    def from_labels(cls, rates):
        """Build from ``{"XI": 0.01, "II": 0.99, ...}``."""
        rates = dict(rates)
        n = len(next(iter(rates)))
        sparse = {}
        for label, value in rates.items():
            idx = PauliOperator.from_label(label).indices()
            sparse[int(sum(i * 4 ** (n - 1 - q) for q, i in enumerate(idx)))] = value
        return cls(n, sparse)

    @classmethod
    def depolarizing(cls, n, fidelity):
        """Uniform errors: identity with probability ``fidelity``, rest spread evenly."""
        rates = np.full(4**n, (1 - fidelity) / (4**n - 1))
        rates[0] = fidelity
        return cls(n, rates)

    @property
    def rates(self):
        if self._dense is not None:
            return self._dense.copy()
        return dict(self._sparse)

    def fidelity(self):
        """Entanglement fidelity, equal to the identity-Pauli rate."""
        if self._dense is not None:
            return float(self._dense[0])
        return float(self._sparse.get(0, 0.0))

    def ptm_diagonal(self):
        """Diagonal of the Pauli transfer matrix (dense channels only)."""
        if self._dense is None:
            raise ValueError("PTM only available for dense channels (n <= 6)")
        return symplectic_signs(self.n) @ self._dense

    def ptm(self):
        return np.diag(self.ptm_diagonal())
