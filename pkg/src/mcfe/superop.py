"""Superoperators in the normalized Pauli basis (Pauli transfer matrices).

The basis element for Pauli string ``P`` is ``P / sqrt(2**n)`` and its flat
index is base-4 with qubit 0 most significant (I, X, Y, Z = 0..3). A channel
``E`` has PTM ``R[i, j] = Tr(s_i E(s_j))``; composition ``E2 after E1`` is
``R2 @ R1``.
"""

from dataclasses import dataclass
from functools import lru_cache, reduce
from math import comb

import numpy as np

from . import cliffords
from .gates1q import PAULI_MATRICES

BASIS_LIMIT = 4
TWIRL_LIMIT = 3


@lru_cache(maxsize=None)
def pauli_basis(n):
    """Normalized Pauli matrices, shape ``(4**n, 2**n, 2**n)``; read-only."""
    if n > BASIS_LIMIT:
        raise ValueError(f"explicit Pauli basis limited to n <= {BASIS_LIMIT}")
    mats = np.ones((1, 1, 1), dtype=complex)
    for _ in range(n):
        mats = np.einsum("aij,bkl->abikjl", mats, PAULI_MATRICES).reshape(
            mats.shape[0] * 4, mats.shape[1] * 2, mats.shape[2] * 2
        )
    mats = mats / np.sqrt(2**n)
    mats.setflags(write=False)
    return mats


def _n_from_dim(dim, base):
    n = int(round(np.log(dim) / np.log(base)))
    if base**n != dim:
        raise ValueError(f"dimension {dim} is not a power of {base}")
    return n


def ptm_from_kraus(kraus):
    kraus = np.asarray(kraus, dtype=complex)
    if kraus.ndim == 2:
        kraus = kraus[None]
    n = _n_from_dim(kraus.shape[-1], 2)
    basis = pauli_basis(n)
    # images[k, j] = K_k s_j K_k^dagger
    images = np.einsum("kab,jbc,kdc->jad", kraus, basis, kraus.conj())
    return np.real(np.einsum("iab,jba->ij", basis, images))


def ptm_from_unitary(u):
    return ptm_from_kraus(np.asarray(u)[None])


def apply_channel_to_operator(ptm, rho):
    """Apply a PTM to a density matrix (n <= BASIS_LIMIT)."""
    n = _n_from_dim(rho.shape[0], 2)
    basis = pauli_basis(n)
    vec = np.einsum("iab,ba->i", basis, rho)
    out = ptm @ vec
    return np.einsum("i,iab->ab", out, basis)


def choi_matrix(ptm):
    """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)`` (trace ``2**n``)."""
    n = _n_from_dim(ptm.shape[0], 4)
    d = 2**n
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1
            choi += np.kron(unit, apply_channel_to_operator(ptm, unit))
    return choi


def ptm_from_choi(choi):
    d = _n_from_dim(choi.shape[0], 2)
    d = 2 ** (d // 2)
    blocks = choi.reshape(d, d, d, d)  # (i, a, j, b) -> <i a| J |j b>
    n = _n_from_dim(d, 2)
    basis = pauli_basis(n)
    # E(s_k) = sum_ij (s_k)_ij E(|i><j|) ; E(|i><j|)_ab = blocks[i, a, j, b]
    images = np.einsum("kij,iajb->kab", basis, blocks)
    return np.real(np.einsum("lab,kba->lk", basis, images))


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(n, rng, rank=None):
    """Kraus operators of a random CPTP map built from a random Choi state."""
    d = 2**n
    rank = rank or d * d
    g = rng.standard_normal((rank, d, d)) + 1j * rng.standard_normal((rank, d, d))
    s = np.einsum("kba,kbc->ac", g.conj(), g)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return g @ inv_sqrt


@dataclass(frozen=True)
class Superoperator:
    """Channel on n qubits stored as its Pauli transfer matrix."""

    n: int
    ptm: np.ndarray

    def __post_init__(self):
        ptm = np.array(self.ptm, dtype=float)
        if ptm.shape != (4**self.n, 4**self.n):
            raise ValueError(f"PTM for n={self.n} must be {4**self.n}x{4**self.n}")
        ptm.setflags(write=False)
        object.__setattr__(self, "ptm", ptm)

    @classmethod
    def identity(cls, n):
        return cls(n, np.eye(4**n))

    @classmethod
    def from_unitary(cls, u):
        return cls(_n_from_dim(np.shape(u)[0], 2), ptm_from_unitary(u))

    @classmethod
    def from_kraus(cls, kraus):
        return cls(_n_from_dim(np.shape(kraus)[-1], 2), ptm_from_kraus(kraus))

    @classmethod
    def depolarizing(cls, n, polarization):
        ptm = np.full(4**n, float(polarization))
        ptm[0] = 1.0
        return cls(n, np.diag(ptm))

    def __matmul__(self, other):
        """``self @ other`` applies ``other`` first."""
        if self.n != other.n:
            raise ValueError("width mismatch")
        return Superoperator(self.n, self.ptm @ other.ptm)

    def is_trace_preserving(self, atol=1e-10):
        row = np.zeros(4**self.n)
        row[0] = 1
        return np.allclose(self.ptm[0], row, atol=atol)

    def is_orthogonal(self, atol=1e-10):
        return np.allclose(self.ptm.T @ self.ptm, np.eye(4**self.n), atol=atol)

    def choi(self):
        return choi_matrix(self.ptm)

    def is_cptp(self, atol=1e-10):
        if not self.is_trace_preserving(atol):
            return False
        return np.linalg.eigvalsh(self.choi()).min() >= -atol


def _as_ptm(e):
    return e.ptm if isinstance(e, Superoperator) else np.asarray(e, dtype=float)


def entanglement_fidelity(e):
    """``<phi| (I (x) E)(|phi><phi|) |phi>`` for the maximally entangled ``phi``; equals ``Tr(R)/4**n``."""
    ptm = _as_ptm(e)
    return float(np.trace(ptm) / ptm.shape[0])


def entanglement_fidelity_choi(e):
    """Same quantity evaluated from the Choi matrix (independent check; small n)."""
    choi = choi_matrix(_as_ptm(e))
    d = int(round(np.sqrt(choi.shape[0])))
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    return float(np.real(phi.conj() @ choi @ phi) / d)


def average_gate_fidelity(e=None, n=None, fidelity=None):
    """``(2**n F + 1) / (2**n + 1)`` from a channel or from ``(n, fidelity)``."""
    if e is not None:
        ptm = _as_ptm(e)
        n = _n_from_dim(ptm.shape[0], 4)
        fidelity = entanglement_fidelity(ptm)
    d = 2**n
    return (d * fidelity + 1) / (d + 1)


def polarization(e, method="fidelity"):
    """Polarization of a channel.

    ``method="fidelity"`` uses ``(4**n F - 1) / (4**n - 1)``; ``method="unital"``
    uses the normalized trace of the unital block of the PTM.
    """
    ptm = _as_ptm(e)
    dim = ptm.shape[0]
    if method == "fidelity":
        return (dim * entanglement_fidelity(ptm) - 1) / (dim - 1)
    if method == "unital":
        return float(np.trace(ptm[1:, 1:]) / (dim - 1))
    raise ValueError(f"unknown method {method!r}")


def fidelity_from_polarization(lam, n):
    return lam + (1 - lam) / 4**n


# ---------------------------------------------------------------------------
# Exact local twirl
# ---------------------------------------------------------------------------

CLIFFORD_PTMS = np.array([ptm_from_unitary(u) for u in cliffords.CLIFFORD_MATRICES])
CLIFFORD_PTMS.setflags(write=False)


def _conjugate_on_qubit(ptm, n, q, r):
    """``(1 (x) r (x) 1)^T ptm (1 (x) r (x) 1)`` for a 4x4 ``r`` on qubit ``q``."""
    shape = (4,) * (2 * n)
    t = ptm.reshape(shape)
    t = np.moveaxis(np.tensordot(r, t, axes=([0], [q])), 0, q)  # r^T on output leg
    t = np.moveaxis(np.tensordot(t, r, axes=([n + q], [0])), -1, n + q)
    return t.reshape(4**n, 4**n)


def local_twirl(e):
    """PTM of ``E_L[L^dagger E L]`` over independent single-qubit Cliffords."""
    ptm = _as_ptm(e)
    n = _n_from_dim(ptm.shape[0], 4)
    if n > TWIRL_LIMIT:
        raise ValueError(f"exact local twirl limited to n <= {TWIRL_LIMIT}")
    for q in range(n):
        ptm = sum(_conjugate_on_qubit(ptm, n, q, r) for r in CLIFFORD_PTMS) / len(CLIFFORD_PTMS)
    return ptm


def basis_state_vector(bits):
    """Pauli-basis vector of ``|bits><bits|``."""
    vec = np.ones(1)
    for b in bits:
        vec = np.kron(vec, np.array([1.0, 0.0, 0.0, -1.0 if int(b) else 1.0]) / np.sqrt(2))
    return vec


def measure_vector(vec, n):
    """Computational-basis probabilities of a Pauli-basis state vector."""
    t = np.asarray(vec).reshape((4,) * n)
    for q in range(n):
        t = np.take(t, [0, 3], axis=q)
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    for q in range(n):
        t = np.moveaxis(np.tensordot(h, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def hamming_weights(n):
    x = np.arange(2**n)
    return np.array([bin(v).count("1") for v in x])


def local_twirl_fidelity_from_ptm(twirled, bits):
    n = len(bits)
    probs = measure_vector(twirled @ basis_state_vector(bits), n)
    y = int("".join(str(int(b)) for b in bits), 2) if n else 0
    weights = (-0.5) ** hamming_weights(n)[np.arange(2**n) ^ y]
    return float(weights @ probs)


def exact_local_twirl_fidelity(e, y):
    """``sum_x (-1/2)**h(x, y) <x| E_L[L^dagger E L](|y><y|) |x>``, exact over all 24**n twirls."""
    ptm = _as_ptm(e)
    n = _n_from_dim(ptm.shape[0], 4)
    bits = [int(b) for b in y]
    if len(bits) != n:
        raise ValueError("bitstring width does not match channel width")
    return local_twirl_fidelity_from_ptm(local_twirl(ptm), bits)


# ---------------------------------------------------------------------------
# Bit-flip matrix
# ---------------------------------------------------------------------------


def bitflip_matrix(n):
    """``A[k, w] = C(w, k) 2**k / 3**w`` and its numerically inverted first row."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.array([[comb(w, k) * 2.0**k / 3.0**w for w in range(n + 1)] for k in range(n + 1)])
    return a, np.linalg.inv(a)[0]


def kron_all(mats):
    return reduce(np.kron, mats, np.eye(1))
