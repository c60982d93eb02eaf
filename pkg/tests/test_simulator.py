from functools import reduce

import numpy as np
import pytest

from helpers import random_alternating, random_circuit
from mcfe import cliffords
from mcfe.circuit import Circuit, Gate, Layer, unitary_of
from mcfe.gates1q import PAULI_MATRICES, zrot
from mcfe.noise import FAMILY_CAPS, ErrorModel, overrotated_cnot, overrotated_x90, pauli_letters_2q, pauli_rates
from mcfe.simulator import (
    OutcomeDistribution, ShotRecord, WidthLimitError, batch_output_probabilities, circuit_fidelity_oracle,
    ideal_ptm, noisy_ptm, output_distribution, sample_shots,
)
from mcfe.batch import CircuitBatch
from mcfe.superop import Superoperator

X_ID = int(cliffords.PAULI_TO_CLIFFORD[1])


def test_noiseless_x_gate():
    c = Circuit(2, (Layer(2, (Gate.c1(1, X_ID),)),))
    dist = output_distribution(c, ErrorModel.zero(2))
    assert dist.probability("01") == pytest.approx(1.0, abs=1e-12)
    assert dist.as_dict(1e-12) == {"01": pytest.approx(1.0)}


def test_ideal_ptm_matches_unitary(rng):
    c = random_circuit(2, 4, rng)
    assert np.allclose(ideal_ptm(c).ptm, Superoperator.from_unitary(unitary_of(c)).ptm, atol=1e-10)


def test_readout_flip_probability():
    # X and Y readout errors flip the bit, so P(1 | prepared 0) = 2r/3
    caps = dict(FAMILY_CAPS["S"])
    model = ErrorModel(2, "S", caps, readout=[0.009, 0.003])
    dist = output_distribution(Circuit(2), model)
    p0, p1 = 2 * 0.009 / 3, 2 * 0.003 / 3
    expected = np.array([(1 - p0) * (1 - p1), (1 - p0) * p1, p0 * (1 - p1), p0 * p1])
    assert np.allclose(dist.probabilities, expected, atol=1e-15)


def test_readout_after_x():
    model = ErrorModel(1, "S", dict(FAMILY_CAPS["S"]), readout=[0.006])
    c = Circuit(1, (Layer(1, (Gate.c1(0, X_ID),)),))
    assert output_distribution(c, model).probability("0") == pytest.approx(0.004, abs=1e-15)


def test_shots_within_four_sigma(rng):
    c = random_circuit(3, 4, rng)
    dist = output_distribution(c, ErrorModel.sample("S+H", 3, rng))
    shots = 20000
    rec = sample_shots(dist, shots, rng, "c0")
    assert rec.shots == shots and sum(rec.counts.values()) == shots
    for bits, p in dist.as_dict().items():
        sigma = np.sqrt(shots * p * (1 - p))
        assert abs(rec.counts.get(bits, 0) - shots * p) <= 4 * sigma + 1e-9


def test_uniform_shots(rng):
    shots = 100_000
    rec = sample_shots(OutcomeDistribution(2, np.full(4, 0.25)), shots, rng)
    sigma = np.sqrt(shots * 0.25 * 0.75)
    assert all(abs(rec.counts[b] - shots / 4) <= 4 * sigma for b in ("00", "01", "10", "11"))


def test_single_shot(rng):
    dist = OutcomeDistribution(1, np.array([0.25, 0.75]))
    rec = sample_shots(dist, 1, rng)
    assert rec.shots == 1 and sum(rec.counts.values()) == 1
    with pytest.raises(ValueError):
        sample_shots(dist, 0, rng)
    with pytest.raises(ValueError):
        ShotRecord("x", {"0": 2}, 3)


def test_batch_matches_single(rng):
    model = ErrorModel.sample("S+H", 3, rng)
    circuits = [random_circuit(3, 3, rng) for _ in range(3)]
    shared = [CircuitBatch.from_circuit(c) for c in circuits]
    for c, b in zip(circuits, shared):
        single = output_distribution(c, model).probabilities
        assert np.allclose(batch_output_probabilities(b, model)[0], single, atol=1e-13)


# -- independent Kraus-operator oracle --------------------------------------


def _embed(op, qubits, n):
    """Dense operator acting as ``op`` on ``qubits`` (in order) and identity elsewhere."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(op, np.eye(2 ** (n - k)))
    perm = list(qubits) + rest
    t = full.reshape((2,) * (2 * n))
    inv = np.argsort(perm)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(2**n, 2**n)


def _liouville(kraus):
    """Column-stacking superoperator ``sum_k conj(K) (x) K``."""
    return sum(np.kron(k.conj(), k) for k in kraus)


def _pauli_channel(rates, labels, qubits, n):
    ops = []
    for p, label in zip(rates, labels):
        mats = [PAULI_MATRICES["IXYZ".index(ch)] for ch in label]
        ops.append(np.sqrt(p) * _embed(reduce(np.kron, mats), qubits, n))
    return _liouville(ops)


def _unitary_channel(u, qubits, n):
    return _liouville([_embed(u, qubits, n)])


def _superop_of_circuit(c, model):
    n = c.n
    total = np.eye(4**n, dtype=complex)
    for layer in c.layers:
        for g in layer.gates:
            if g.is_single_qubit:
                q = g.qubits[0]
                psi, phi, theta = g.physical_angles()
                pulse = _pauli_channel(pauli_rates(model.x90_eps[q], model.x90_split[q]), "IXYZ", [q], n) @ \
                    _unitary_channel(overrotated_x90(model.x90_theta[q]), [q], n)
                op = _unitary_channel(zrot(theta), [q], n) @ pulse @ _unitary_channel(zrot(phi), [q], n) @ \
                    pulse @ _unitary_channel(zrot(psi), [q], n)
            else:
                ctrl, tgt = g.qubits
                pair = tuple(sorted(g.qubits))
                rates = pauli_rates(model.cnot_eps[pair], model.cnot_split[pair])
                op = _pauli_channel(rates, ["II"] + pauli_letters_2q(), list(pair), n) @ \
                    _unitary_channel(overrotated_cnot(model.cnot_theta[pair]), [ctrl, tgt], n)
            total = op @ total
    return total


@pytest.mark.parametrize("family", ["S", "H", "S+H"])
def test_fidelity_oracle_against_liouville(family, rng):
    n = 2
    c = random_circuit(n, 3, rng)
    c = Circuit(n, c.layers + (Layer(n, (Gate.cnot(1, 0),)),))
    model = ErrorModel.sample(family, n, rng)
    noisy = _superop_of_circuit(c, model)
    ideal = _liouville([unitary_of(c)])
    expected = np.real(np.trace(ideal.conj().T @ noisy)) / 4**n
    assert circuit_fidelity_oracle(c, model) == pytest.approx(expected, abs=1e-12)


def test_depolarizing_closed_form(rng):
    n = 3
    model = ErrorModel.sample("depolarizing", n, rng)
    lam1, lam2 = model.layer_polarization
    c = random_alternating(n, 4, rng)
    num1 = sum(1 for layer in c.layers if layer.kind == "l" and len(layer))
    num2 = sum(1 for layer in c.layers if layer.kind == "e" and len(layer))
    lam = lam1**num1 * lam2**num2
    assert circuit_fidelity_oracle(c, model) == pytest.approx(lam + (1 - lam) / 4**n, abs=1e-12)


def test_zero_family_is_perfect(rng):
    c = random_circuit(3, 5, rng)
    assert circuit_fidelity_oracle(c, ErrorModel.zero(3)) == pytest.approx(1.0, abs=1e-12)


def test_width_limit():
    with pytest.raises(WidthLimitError):
        output_distribution(Circuit(7), ErrorModel.zero(7))
    with pytest.raises(WidthLimitError):
        circuit_fidelity_oracle(Circuit(7), ErrorModel.zero(7))
