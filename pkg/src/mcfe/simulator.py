"""Batched noisy simulation in the Pauli-transfer-matrix picture.

States are real vectors in the normalized Pauli basis held as arrays of shape
``(B, 4, ..., 4)`` (one axis per qubit, qubit 0 first). A batch either shares
one circuit (dense PTM oracle: the batch is the identity basis) or holds one
circuit per member (mirror ensembles as a ``CircuitBatch``).
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .batch import CircuitBatch, LayerBatch
from .noise import ErrorModel
from .superop import Superoperator

DENSE_LIMIT = 6
CHUNK_ELEMENTS = 1 << 22


class WidthLimitError(ValueError):
    pass


def _check_width(n, limit):
    if n > limit:
        raise WidthLimitError(f"width {n} exceeds simulator dense limit {limit}")


def zrot_ptms(angles):
    """PTMs of ``exp(-i a Z / 2)`` for an array of angles, shape ``angles.shape + (4, 4)``."""
    angles = np.asarray(angles, dtype=float)
    c, s = np.cos(angles), np.sin(angles)
    out = np.zeros(angles.shape + (4, 4))
    out[..., 0, 0] = 1
    out[..., 3, 3] = 1
    out[..., 1, 1] = c
    out[..., 2, 2] = c
    out[..., 1, 2] = -s
    out[..., 2, 1] = s
    return out


def single_qubit_ptms(angles, x90):
    """Noisy PTMs of ZXZXZ gates: ``angles`` (..., 3) as (psi, phi, theta); ``x90`` (4, 4) or broadcastable."""
    zs = zrot_ptms(angles)
    return zs[..., 2, :, :] @ x90 @ zs[..., 1, :, :] @ x90 @ zs[..., 0, :, :]


def _apply_single(state, q, op):
    """Apply a 4x4 op (shared, or one per batch member) to qubit ``q``."""
    b, n = state.shape[0], state.ndim - 1
    view = state.reshape(b, 4**q, 4, 4 ** (n - q - 1))
    if op.ndim == 3:
        op = op[:, None]
    return (op @ view).reshape(state.shape)


def _apply_pair(state, control, target, op):
    s = np.moveaxis(state, (1 + control, 1 + target), (1, 2))
    shape = s.shape
    s = (op @ s.reshape(shape[0], 16, -1)).reshape(shape)
    return np.moveaxis(s, (1, 2), (1 + control, 1 + target))


def _depolarize(state, lam):
    flat = state.reshape(state.shape[0], -1).copy()
    flat[:, 1:] *= lam
    return flat.reshape(state.shape)


def apply_layer(state, lb: LayerBatch, model: ErrorModel):
    """Propagate a batch of states through one layer batch (``lb.size`` is 1 or the batch size)."""
    if lb.qubits:
        x90 = model.x90_ptms()
        for j, q in enumerate(lb.qubits):
            ops = single_qubit_ptms(lb.angles[:, j], x90[q])
            state = _apply_single(state, q, ops if lb.size > 1 else ops[0])
    for c, t in lb.pairs:
        state = _apply_pair(state, c, t, model.cnot_ptm(c, t))
    if model.is_depolarizing and (lb.qubits or lb.pairs):
        state = _depolarize(state, model.layer_polarization[1 if lb.pairs else 0])
    return state


def propagate(state, batch: CircuitBatch, model: ErrorModel):
    for lb in batch.layers:
        state = apply_layer(state, lb, model)
    return state


def zero_state(n, size=1):
    one = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    vec = one
    for _ in range(n - 1):
        vec = np.multiply.outer(vec, one)
    return np.broadcast_to(vec, (size,) + (4,) * n).copy()


def measure(state, model: Optional[ErrorModel] = None):
    """Readout noise then computational-basis probabilities, shape ``(B, 2**n)``."""
    n = state.ndim - 1
    t = state
    for q in range(n):
        t = np.take(t, [0, 3], axis=1 + q)
    if model is not None:
        if model.is_depolarizing:
            t = _depolarize(t, model.readout_polarization)
        factors = model.readout_factors()
        for q in range(n):
            scale = np.array([1.0, factors[q]])
            t = t * scale.reshape((1,) + (1,) * q + (2,) + (1,) * (n - q - 1))
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    for q in range(n):
        t = np.moveaxis(np.tensordot(h, t, axes=([1], [1 + q])), 0, 1 + q)
    return t.reshape(t.shape[0], -1)


def batch_output_probabilities(batch: CircuitBatch, model: ErrorModel, limit=DENSE_LIMIT):
    """Exact outcome probabilities of every member of a circuit batch, shape ``(B, 2**n)``."""
    n = batch.n
    _check_width(n, limit)
    size = batch.size
    chunk = max(1, CHUNK_ELEMENTS // 4**n)
    out = np.empty((size, 2**n))
    for start in range(0, size, chunk):
        stop = min(size, start + chunk)
        part = batch.take(slice(start, stop)) if size > 1 else batch
        state = propagate(zero_state(n, stop - start), part, model)
        out[start:stop] = measure(state, model)
    return np.clip(out, 0.0, None)


# ---------------------------------------------------------------------------
# Single-circuit API
# ---------------------------------------------------------------------------


@dataclass
class OutcomeDistribution:
    n: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} probabilities")
        if p.min() < -1e-12 or abs(p.sum() - 1) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        self.probabilities = np.clip(p, 0.0, None)

    def bitstring(self, index):
        return format(index, f"0{self.n}b")

    def probability(self, bits):
        return float(self.probabilities[int(bits, 2)])

    def as_dict(self, atol=0.0):
        return {self.bitstring(i): float(p) for i, p in enumerate(self.probabilities) if p > atol}


@dataclass
class ShotRecord:
    circuit_id: str
    counts: Dict[str, int] = field(default_factory=dict)
    shots: int = 0

    def __post_init__(self):
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("counts must be nonnegative")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts must sum to the number of shots")


def output_distribution(c, model: ErrorModel, limit=DENSE_LIMIT):
    probs = batch_output_probabilities(CircuitBatch.from_circuit(c), model, limit)[0]
    return OutcomeDistribution(c.n, probs / probs.sum())


def sample_shots(dist: OutcomeDistribution, shots, rng, circuit_id=""):
    if shots < 1:
        raise ValueError("number of shots must be >= 1")
    p = dist.probabilities / dist.probabilities.sum()
    draws = rng.multinomial(shots, p)
    counts = {dist.bitstring(i): int(k) for i, k in enumerate(draws) if k}
    return ShotRecord(circuit_id, counts, int(shots))


def noisy_ptm(c, model: ErrorModel, limit=DENSE_LIMIT):
    """Full PTM of a circuit under ``model`` (gate noise only; readout excluded)."""
    _check_width(c.n, limit)
    n = c.n
    state = np.eye(4**n).reshape((4**n,) + (4,) * n)
    state = propagate(state, CircuitBatch.from_circuit(c), model)
    return Superoperator(n, state.reshape(4**n, 4**n).T)


def ideal_ptm(c, limit=DENSE_LIMIT):
    return noisy_ptm(c, ErrorModel.zero(c.n), limit)


def circuit_fidelity_oracle(c, model: ErrorModel, limit=DENSE_LIMIT):
    """Process fidelity ``F(c)`` of the error map ``U(c)^dagger phi(c)``."""
    ideal = ideal_ptm(c, limit).ptm
    noisy = noisy_ptm(c, model, limit).ptm
    # Tr(ideal^T noisy) without forming the product
    return float(np.sum(ideal * noisy) / ideal.shape[0])
