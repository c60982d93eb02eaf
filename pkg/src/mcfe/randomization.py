"""Local twirl layers, randomized compilation and the three mirror-circuit ensembles.

Given a target circuit ``c`` and a logically equivalent alternating circuit
``c_alt``, the mirror circuits are (in time order, ``L`` a random layer of
single-qubit Cliffords and ``rc(...)`` a randomized compilation):

* kind 1: ``L``, then ``c`` verbatim, then ``rc(c_alt reversed, L^-1)``
* kind 2: ``rc(L, c_alt, c_alt reversed, L^-1)``
* kind 3: ``rc(L, L^-1)``

Adjacent single-qubit layers inside a compiled block are separated by empty
CNOT layers rather than merged, so every mirror kind runs the same physical
layers for ``L``, ``L^-1`` and the reversed circuit. Every single-qubit layer
inside a compiled block carries a gate on every qubit.

Seeds: each sample owns a 64-bit seed. Sample ``j`` of kind ``k`` under master
seed ``m`` gets ``SeedSequence(m, spawn_key=(SEED_DOMAIN, k, j))`` reduced to
one uint64 (``child_seed``). A sample's generator draws, in order, the ``L``
Clifford ids (one per qubit) and then the frame Paulis (``rows x n`` indices
0..3), so any sample can be regenerated on its own.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import cliffords
from .batch import CircuitBatch, LayerBatch, clifford_layer_batch, layer_batch_from_layer
from .circuit import AlternatingCircuit, Circuit, Gate, Layer, equal_up_to_phase, motion_reverse, unitary_of
from .gates1q import PAULI_MATRICES, zxzxz_angles
from .pauli import PAULI_X, PAULI_Z, XZ_TO_INDEX, PauliOperator

SEED_DOMAIN = 0x4D434645


def child_seed(master_seed, *key):
    """Counter-based 64-bit child seed; independent of generation order."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(SEED_DOMAIN,) + tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_seed(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return int(seed_or_rng.integers(0, 2**63))
    return int(seed_or_rng)


@dataclass(frozen=True)
class LocalTwirlLayer:
    n: int
    clifford_ids: Tuple[int, ...]

    def __post_init__(self):
        ids = tuple(cliffords.validate_clifford_id(int(i)) for i in self.clifford_ids)
        if len(ids) != self.n:
            raise ValueError("need exactly one Clifford id per qubit")
        object.__setattr__(self, "clifford_ids", ids)

    def layer(self):
        return Layer(self.n, tuple(Gate.c1(q, i) for q, i in enumerate(self.clifford_ids)), "l")

    def inverse(self):
        return LocalTwirlLayer(self.n, tuple(int(cliffords.INVERSE[i]) for i in self.clifford_ids))


def sample_local_layer(n, rng):
    if n < 1:
        raise ValueError("n must be >= 1")
    return LocalTwirlLayer(n, tuple(rng.integers(0, cliffords.NUM_CLIFFORDS, size=n)))


# ---------------------------------------------------------------------------
# Randomized compilation (vectorized over a batch of frame choices)
# ---------------------------------------------------------------------------


def propagate_through_cnots(indices, pairs):
    """Conjugate a batch of Pauli index arrays (..., n) by a layer of CNOTs (phases dropped)."""
    x = PAULI_X[indices].copy()
    z = PAULI_Z[indices].copy()
    for c, t in pairs:
        x[..., t] ^= x[..., c]
        z[..., c] ^= z[..., t]
    return XZ_TO_INDEX[x, z]


def _dress_layer(n, item, before, after):
    """Full-width layer batch for ``after . item . before`` per batch member."""
    size = before.shape[0]
    angles = np.empty((size, n, 3))
    ids = np.full((size, n), -1, dtype=np.int64)
    for q in range(n):
        pre = cliffords.PAULI_TO_CLIFFORD[before[:, q]]
        post = cliffords.PAULI_TO_CLIFFORD[after[:, q]]
        if isinstance(item, np.ndarray):
            gate_ids = item[:, q]
            gate = None
        else:
            gate = item.gate_on(q)
            gate_ids = np.zeros(size, dtype=np.int64) if gate is None else None
            if gate is not None and gate.kind == "c1":
                gate_ids = np.full(size, gate.clifford, dtype=np.int64)
        if gate_ids is not None:
            cid = cliffords.PRODUCT[post, cliffords.PRODUCT[gate_ids, pre]]
            ids[:, q] = cid
            angles[:, q] = cliffords.CLIFFORD_ANGLES[cid]
        else:
            m = PAULI_MATRICES[after[:, q]] @ gate.matrix() @ PAULI_MATRICES[before[:, q]]
            angles[:, q] = zxzxz_angles(m)
    return LayerBatch("l", tuple(range(n)), angles, ids)


def compile_frames(n, items, paulis):
    """Randomly compile an alternating sequence for a batch of frame-Pauli draws.

    Args:
        n: width.
        items: alternating list starting and ending with a single-qubit item.
            Single-qubit items are ``Layer`` objects or ``(B, n)`` arrays of
            Clifford ids (a per-member random Clifford layer); the others are
            CNOT ``Layer`` objects.
        paulis: ``(B, d, n)`` frame Pauli indices, one row per single-qubit item.

    Returns:
        ``(layers, final)``: list of LayerBatch and the ``(B, n)`` final Pauli.
    """
    size, rows, _ = paulis.shape
    if len(items) != 2 * rows - 1:
        raise ValueError("frame Pauli rows do not match the number of single-qubit layers")
    before = np.zeros((size, n), dtype=np.int64)
    out = []
    for i in range(rows):
        item = items[2 * i]
        if isinstance(item, Layer) and item.kind != "l":
            raise ValueError("compiled sequence must alternate single-qubit and CNOT layers")
        out.append(_dress_layer(n, item, before, paulis[:, i, :]))
        if i < rows - 1:
            e = items[2 * i + 1]
            if not isinstance(e, Layer) or e.kind != "e":
                raise ValueError("compiled sequence must alternate single-qubit and CNOT layers")
            out.append(layer_batch_from_layer(e, size))
            pairs = tuple(g.qubits for g in e.gates)
            before = propagate_through_cnots(paulis[:, i, :], pairs)
    return out, paulis[:, -1, :]


@dataclass
class RandomCompilation:
    source: AlternatingCircuit
    frame_paulis: Tuple[PauliOperator, ...]
    final_pauli: PauliOperator
    realized: Circuit


def randomized_compile(c_alt, rng=None, paulis=None):
    """Randomly compile an alternating circuit.

    The realized circuit implements ``final_pauli * U(c_alt)``. Frame Paulis are
    drawn from ``rng`` unless given explicitly as a ``(d, n)`` index array.
    """
    if not isinstance(c_alt, AlternatingCircuit):
        try:
            c_alt = AlternatingCircuit.from_circuit(c_alt)
        except ValueError as exc:
            raise ValueError(f"randomized compilation needs an alternating circuit: {exc}") from None
    n, d = c_alt.n, c_alt.num_l_layers
    if paulis is None:
        paulis = rng.integers(0, 4, size=(d, n))
    paulis = np.asarray(paulis, dtype=np.int64).reshape(1, d, n)
    layers, final = compile_frames(n, list(c_alt.layers), paulis)
    realized = CircuitBatch(n, layers).circuit(0)
    frames = tuple(PauliOperator.from_indices(row) for row in paulis[0])
    return RandomCompilation(c_alt, frames, PauliOperator.from_indices(final[0]), realized)


# ---------------------------------------------------------------------------
# Mirror circuits
# ---------------------------------------------------------------------------

def _frame_rows(kind, c_alt):
    d = c_alt.num_l_layers
    return {1: d + 1, 2: 2 * d + 2, 3: 2}[kind]


def _draw(seed, n, rows):
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, cliffords.NUM_CLIFFORDS, size=n)
    paulis = rng.integers(0, 4, size=(rows, n))
    return ids, paulis


@dataclass
class MirrorSample:
    kind: int
    seed: int
    circuit: Circuit
    target: str

    def metadata_line(self):
        return f"kind={self.kind} seed={self.seed} target={self.target}"


@dataclass
class MirrorBatch:
    """A batch of mirror circuits of one kind sharing layer structure."""

    kind: int
    seeds: np.ndarray
    circuits: CircuitBatch
    targets: np.ndarray  # (B, n) of 0/1

    def __len__(self):
        return len(self.seeds)

    def target_strings(self):
        return ["".join(str(int(b)) for b in row) for row in self.targets]

    def sample(self, b):
        return MirrorSample(self.kind, int(self.seeds[b]), self.circuits.circuit(b),
                            "".join(str(int(v)) for v in self.targets[b]))

    def samples(self):
        return [self.sample(b) for b in range(len(self))]


def _check_kind(kind):
    if kind not in (1, 2, 3):
        raise ValueError(f"mirror kind must be 1, 2 or 3, got {kind!r}")


def build_mirror_batch(kind, c, c_alt, seeds):
    """Build the mirror circuits of one kind for each seed in ``seeds``."""
    _check_kind(kind)
    if c.n != c_alt.n:
        raise ValueError(f"width mismatch between c ({c.n}) and c_alt ({c_alt.n})")
    if not isinstance(c_alt, AlternatingCircuit):
        c_alt = AlternatingCircuit.from_circuit(c_alt)
    n = c.n
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    rows = _frame_rows(kind, c_alt)
    draws = [_draw(int(s), n, rows) for s in seeds]
    twirl = np.array([d[0] for d in draws], dtype=np.int64).reshape(len(seeds), n)
    paulis = np.array([d[1] for d in draws], dtype=np.int64).reshape(len(seeds), rows, n)
    untwirl = cliffords.INVERSE[twirl]
    empty_e = Layer(n, (), "e")
    rev = motion_reverse(c_alt)

    if kind == 1:
        items = list(rev.layers) + [empty_e, untwirl]
        compiled, final = compile_frames(n, items, paulis)
        head = [clifford_layer_batch(range(n), twirl)]
        body = CircuitBatch.from_circuit(c, len(seeds)).layers
        layers = head + body + compiled
    elif kind == 2:
        items = [twirl, empty_e, *c_alt.layers, empty_e, *rev.layers, empty_e, untwirl]
        layers, final = compile_frames(n, items, paulis)
    else:
        items = [twirl, empty_e, untwirl]
        layers, final = compile_frames(n, items, paulis)
    targets = PAULI_X[final].astype(np.uint8)
    return MirrorBatch(kind, seeds, CircuitBatch(n, layers), targets)


def build_mirror(kind, c, c_alt, rng, verify=False):
    """Build one mirror circuit; ``rng`` is a seed or a Generator used to draw one."""
    if verify and c.n == c_alt.n and not equal_up_to_phase(unitary_of(c), unitary_of(c_alt), 1e-8):
        raise ValueError("c and c_alt are not logically equivalent")
    return build_mirror_batch(kind, c, c_alt, [_as_seed(rng)]).sample(0)


def ensemble_seeds(kind, count, master_seed):
    return np.array([child_seed(master_seed, kind, j) for j in range(count)], dtype=np.uint64)


def sample_ensemble_batch(kind, c, c_alt, count, master_seed):
    if count < 1:
        raise ValueError("ensemble size must be >= 1")
    _check_kind(kind)
    return build_mirror_batch(kind, c, c_alt, ensemble_seeds(kind, count, _as_seed(master_seed)))


def sample_ensemble(kind, c, c_alt, count, rng):
    """``count`` independent mirror samples; ``rng`` is a master seed or Generator."""
    return sample_ensemble_batch(kind, c, c_alt, count, _as_seed(rng)).samples()
