import numpy as np
import pytest
from scipy.linalg import expm

from mcfe.gates1q import PAULI_MATRICES, X90
from mcfe.noise import (
    DEPOLARIZING_CAPS, FAMILY_CAPS, ErrorModel, overrotated_cnot, overrotated_x90, pauli_letters_2q, pauli_rates,
)
from mcfe.superop import Superoperator, ptm_from_kraus, ptm_from_unitary

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
LETTERS = "IXYZ"


def test_family_caps():
    assert FAMILY_CAPS["S"] == {"theta1": 0.0, "theta2": 0.0, "eps1": 1e-2, "eps2": 2e-2, "readout": 1e-2}
    assert FAMILY_CAPS["H"]["theta1"] == 0.125 and FAMILY_CAPS["H"]["theta2"] == 0.25
    assert FAMILY_CAPS["S+H"] == {"theta1": 0.075, "theta2": 0.125, "eps1": 5e-3, "eps2": 1e-2, "readout": 1e-2}
    assert FAMILY_CAPS["H-2Q"]["theta1"] == 0.0 and FAMILY_CAPS["H-2Q"]["theta2"] == 0.25


@pytest.mark.parametrize("family", ["S", "H", "S+H", "H-2Q"])
def test_samples_respect_caps(family, rng):
    caps = FAMILY_CAPS[family]
    for _ in range(50):
        m = ErrorModel.sample(family, 4, rng)
        assert np.all((0 <= m.x90_theta) & (m.x90_theta <= caps["theta1"]))
        assert np.all((0 <= m.x90_eps) & (m.x90_eps <= caps["eps1"]))
        assert all(0 <= v <= caps["theta2"] for v in m.cnot_theta.values())
        assert all(0 <= v <= caps["eps2"] for v in m.cnot_eps.values())
        assert np.all((0 <= m.readout) & (m.readout <= caps["readout"]))
        assert len(m.cnot_theta) == 6


def test_caps_are_enforced():
    with pytest.raises(ValueError, match="eps1"):
        ErrorModel(1, "S", dict(FAMILY_CAPS["S"]), x90_eps=[0.02])
    with pytest.raises(ValueError, match="family"):
        ErrorModel(1, "bogus", {})
    with pytest.raises(ValueError):
        ErrorModel(2, "depolarizing", DEPOLARIZING_CAPS, layer_polarization=(1.2, 1.0))


def test_sampling_is_reproducible():
    a = ErrorModel.sample("S+H", 3, np.random.default_rng(5))
    b = ErrorModel.sample("S+H", 3, np.random.default_rng(5))
    assert a.to_text() == b.to_text()


@pytest.mark.parametrize("family", ["S", "H", "S+H", "H-2Q", "zero", "depolarizing"])
def test_serialization_round_trip(family, rng):
    m = ErrorModel.sample(family, 3, rng) if family != "zero" else ErrorModel.zero(3)
    back = ErrorModel.from_text(m.to_text())
    assert back.to_text() == m.to_text()
    assert np.array_equal(back.x90_ptms(), m.x90_ptms())
    assert np.array_equal(back.cnot_ptm(2, 0), m.cnot_ptm(2, 0))


def test_overrotated_x90():
    assert np.allclose(overrotated_x90(0.0), X90)
    theta = 0.1
    expected = expm(-0.5j * (np.pi / 2 + theta) * PAULI_MATRICES[1])
    assert np.allclose(overrotated_x90(theta), expected)


def test_overrotated_cnot():
    assert np.allclose(overrotated_cnot(0.0), CNOT)
    theta = 0.2
    gen = np.kron(np.eye(2) - PAULI_MATRICES[3], np.eye(2) - PAULI_MATRICES[1]) / 2
    assert np.allclose(overrotated_cnot(theta), expm(-1j * (np.pi / 2 + theta) * gen))
    assert np.allclose(overrotated_cnot(theta), CNOT @ expm(-1j * theta * gen))


def test_hamiltonian_family_is_unitary(rng):
    m = ErrorModel.sample("H", 3, rng)
    for q in range(3):
        assert Superoperator(1, m.x90_ptms()[q]).is_orthogonal()
    assert Superoperator(2, m.cnot_ptm(0, 2)).is_orthogonal()


def test_stochastic_family_is_pauli_after_ideal(rng):
    m = ErrorModel.sample("S", 2, rng)
    ideal1 = ptm_from_unitary(X90)
    for q in range(2):
        noise = m.x90_ptms()[q] @ ideal1.T
        assert np.allclose(noise, np.diag(np.diag(noise)), atol=1e-14)
        p = pauli_rates(m.x90_eps[q], m.x90_split[q])
        # diagonal of a Pauli channel: +1 for commuting, -1 for anticommuting
        signs = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])
        assert np.allclose(np.diag(noise), signs @ p)


def test_pauli_rates():
    r = pauli_rates(0.03, [0.5, 0.25, 0.25])
    assert np.allclose(r, [0.97, 0.015, 0.0075, 0.0075])


def test_cnot_ptm_against_kraus(rng):
    m = ErrorModel.sample("S+H", 2, rng)
    pair = (0, 1)
    u = overrotated_cnot(m.cnot_theta[pair])
    rates = pauli_rates(m.cnot_eps[pair], m.cnot_split[pair])
    labels = ["II"] + pauli_letters_2q()
    # (control, target) = (0, 1): tensor order is qubit 0 then qubit 1
    kraus = [np.sqrt(p) * np.kron(PAULI_MATRICES[LETTERS.index(a)], PAULI_MATRICES[LETTERS.index(b)]) @ u
             for p, (a, b) in zip(rates, labels)]
    assert np.allclose(m.cnot_ptm(0, 1), ptm_from_kraus(kraus), atol=1e-12)
    # reversed direction: tensor order is qubit 1 then qubit 0, labels still lower qubit first
    kraus = [np.sqrt(p) * np.kron(PAULI_MATRICES[LETTERS.index(b)], PAULI_MATRICES[LETTERS.index(a)]) @ u
             for p, (a, b) in zip(rates, labels)]
    assert np.allclose(m.cnot_ptm(1, 0), ptm_from_kraus(kraus), atol=1e-12)


def test_readout_factor():
    m = ErrorModel(1, "S", dict(FAMILY_CAPS["S"]), readout=[0.0075])
    assert np.allclose(m.readout_factors(), [1 - 0.01])


def test_depolarizing_sample(rng):
    m = ErrorModel.sample("depolarizing", 2, rng)
    lam1, lam2 = m.layer_polarization
    assert 1 - DEPOLARIZING_CAPS["layer1"] <= lam1 <= 1
    assert 1 - DEPOLARIZING_CAPS["layer2"] <= lam2 <= 1
    assert m.is_depolarizing
