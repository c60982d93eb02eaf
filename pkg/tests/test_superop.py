import numpy as np
import pytest

from mcfe.gates1q import xrot
from mcfe.noise import ErrorModel
from mcfe.superop import (
    Superoperator, average_gate_fidelity, basis_state_vector, bitflip_matrix, choi_matrix, entanglement_fidelity,
    entanglement_fidelity_choi, exact_local_twirl_fidelity, fidelity_from_polarization, local_twirl,
    measure_vector, polarization, ptm_from_choi, ptm_from_kraus, ptm_from_unitary, random_kraus, random_unitary,
)


def test_ptm_of_unitary_is_real_orthogonal(rng):
    for n in (1, 2):
        e = Superoperator.from_unitary(random_unitary(2**n, rng))
        assert e.is_orthogonal() and e.is_trace_preserving() and e.is_cptp()


def test_ptm_composition(rng):
    u, v = random_unitary(4, rng), random_unitary(4, rng)
    assert np.allclose(ptm_from_unitary(u @ v), ptm_from_unitary(u) @ ptm_from_unitary(v), atol=1e-12)


def test_choi_round_trip(rng):
    for n in (1, 2):
        ptm = ptm_from_kraus(random_kraus(n, rng))
        assert np.allclose(ptm_from_choi(choi_matrix(ptm)), ptm, atol=1e-12)


def test_fidelity_matches_choi_oracle(rng):
    for n in (1, 2, 3):
        e = Superoperator.from_kraus(random_kraus(n, rng, 3))
        assert abs(entanglement_fidelity(e) - entanglement_fidelity_choi(e)) < 1e-12


def test_unitary_fidelity_is_trace_overlap(rng):
    u = random_unitary(4, rng)
    assert abs(entanglement_fidelity(Superoperator.from_unitary(u)) - abs(np.trace(u)) ** 2 / 16) < 1e-12


@pytest.mark.parametrize("n, lam", [(1, 0.8), (2, 0.9), (3, 0.5)])
def test_depolarizing_examples(n, lam):
    e = Superoperator.depolarizing(n, lam)
    assert abs(entanglement_fidelity(e) - (lam + (1 - lam) / 4**n)) < 1e-14
    assert abs(polarization(e) - lam) < 1e-14
    assert abs(polarization(e, "unital") - lam) < 1e-14
    assert abs(fidelity_from_polarization(lam, n) - entanglement_fidelity(e)) < 1e-14
    assert e.is_cptp()


def test_polarization_example():
    # F = 0.85 on one qubit is polarization (4 * 0.85 - 1) / 3 = 0.8
    assert abs(polarization(Superoperator.depolarizing(1, 0.8)) - 0.8) < 1e-14
    assert abs(fidelity_from_polarization(0.8, 1) - 0.85) < 1e-14


def test_average_gate_fidelity():
    assert abs(average_gate_fidelity(n=1, fidelity=0.85) - 0.9) < 1e-14
    assert abs(average_gate_fidelity(Superoperator.identity(2)) - 1) < 1e-14
    assert abs(average_gate_fidelity(n=2, fidelity=0.0) - 0.2) < 1e-14


def test_polarization_bad_method():
    with pytest.raises(ValueError):
        polarization(Superoperator.identity(1), "other")


def test_bad_shape():
    with pytest.raises(ValueError):
        Superoperator(2, np.eye(4))


def test_single_qubit_twirl_is_depolarizing(rng):
    e = Superoperator.from_kraus(random_kraus(1, rng, 2))
    twirled = local_twirl(e)
    lam = polarization(e)
    expected = np.diag([1, lam, lam, lam])
    expected[1:, 0] = 0
    assert np.allclose(twirled, expected, atol=1e-12)


def test_local_twirl_preserves_fidelity(rng):
    for n in (1, 2, 3):
        e = Superoperator.from_kraus(random_kraus(n, rng, 2))
        assert abs(entanglement_fidelity(local_twirl(e)) - entanglement_fidelity(e)) < 1e-12


def test_twirled_success_equals_fidelity(rng):
    for n in (1, 2, 3):
        e = Superoperator.from_kraus(random_kraus(n, rng, 2))
        for y in ("0" * n, "1" * n, "1" + "0" * (n - 1)):
            assert abs(exact_local_twirl_fidelity(e, y) - entanglement_fidelity(e)) < 1e-12


def test_twirl_limit():
    with pytest.raises(ValueError):
        local_twirl(np.eye(4**4))


def test_basis_state_and_measurement():
    assert np.allclose(measure_vector(basis_state_vector("10"), 2), [0, 0, 1, 0])
    flip = ptm_from_unitary(xrot(np.pi))
    assert np.allclose(measure_vector(flip @ basis_state_vector("0"), 1), [0, 1])


def test_bitflip_matrix():
    a, first = bitflip_matrix(1)
    assert np.allclose(a, [[1, 1 / 3], [0, 2 / 3]])
    for n in (1, 2, 3, 5):
        a, first = bitflip_matrix(n)
        assert np.allclose(a.sum(axis=0), 1)
        assert np.allclose(first, (-0.5) ** np.arange(n + 1))
    with pytest.raises(ValueError):
        bitflip_matrix(0)


def test_error_model_channels_are_cptp(rng):
    for family in ("S", "H", "S+H", "H-2Q"):
        model = ErrorModel.sample(family, 3, rng)
        for q in range(3):
            assert Superoperator(1, model.x90_ptms()[q]).is_cptp()
        for pair in ((0, 1), (2, 0), (1, 2)):
            assert Superoperator(2, model.cnot_ptm(*pair)).is_cptp()


def test_fidelity_spot_values(rng):
    full = Superoperator.depolarizing(1, 0.0)
    assert entanglement_fidelity(full) == pytest.approx(0.25, abs=1e-15)
    assert entanglement_fidelity_choi(full) == pytest.approx(0.25, abs=1e-15)
    assert average_gate_fidelity(full) == pytest.approx(0.5, abs=1e-15)
    from mcfe.pauli import PauliChannel

    rates = rng.dirichlet(np.ones(16))
    assert entanglement_fidelity(Superoperator(2, PauliChannel(2, rates).ptm())) == pytest.approx(rates[0], abs=1e-14)


def test_twirled_depolarizing_spot_value():
    lam = (4 * 0.7 - 1) / 3
    assert exact_local_twirl_fidelity(Superoperator.depolarizing(1, lam), "0") == pytest.approx(0.7, abs=1e-14)


def test_bitflip_entries():
    a, _ = bitflip_matrix(3)
    assert a[0, 0] == 1 and a[0, 1] == pytest.approx(1 / 3)
    assert a[1, 1] == pytest.approx(2 / 3) and a[2, 3] == pytest.approx(3 * 4 / 27)
