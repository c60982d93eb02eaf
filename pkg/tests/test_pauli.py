import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcfe import cliffords
from mcfe.pauli import (
    PauliChannel, PauliOperator, apply_mask, commutes, compose, conjugate_by_cnot,
    conjugate_by_single_qubit_clifford, sample_uniform_pauli, x_mask,
)
from mcfe.superop import entanglement_fidelity, ptm_from_kraus

P = PauliOperator.from_label
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

pauli_n = st.integers(1, 3).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.integers(0, 3),
    )
)


def test_identity_composition():
    for label in ("X", "YZ", "-iXYZ"):
        p = P(label)
        assert compose(PauliOperator.identity(p.n), p) == p


def test_x_times_z_is_minus_i_y():
    assert compose(P("X"), P("Z")) == P("-iY")
    assert np.allclose(P("X").matrix() @ P("Z").matrix(), P("-iY").matrix())


def test_self_inverse():
    assert compose(P("XI"), P("XI")) == P("II")


@settings(max_examples=150, deadline=None)
@given(pauli_n, pauli_n)
def test_compose_matches_matrices(a, b):
    pa = PauliOperator.from_indices(a[0], a[1])
    pb = PauliOperator.from_indices(b[0][: pa.n] + [0] * (pa.n - len(b[0])), b[1])
    assert np.allclose(compose(pa, pb).matrix(), pa.matrix() @ pb.matrix())


def test_square_is_plus_minus_identity():
    for idx in itertools.product(range(4), repeat=2):
        for phase in range(4):
            p = PauliOperator.from_indices(idx, phase)
            sq = compose(p, p)
            assert sq.is_identity(ignore_phase=True) and sq.phase in (0, 2)


def test_width_mismatch():
    with pytest.raises(ValueError):
        compose(P("X"), P("XX"))


def _conj_oracle(p, u):
    m = u @ p.matrix() @ u.conj().T
    for q in itertools.product(range(4), repeat=p.n):
        for phase in range(4):
            cand = PauliOperator.from_indices(q, phase)
            if np.allclose(cand.matrix(), m):
                return cand
    raise AssertionError("not a Pauli")


@pytest.mark.parametrize("before,after", [("XI", "XX"), ("IZ", "ZZ"), ("ZI", "ZI")])
def test_cnot_examples(before, after):
    assert conjugate_by_cnot(P(before), 0, 1) == P(after)


def test_cnot_exhaustive_against_matrices():
    for idx in itertools.product(range(4), repeat=2):
        p = PauliOperator.from_indices(idx)
        assert conjugate_by_cnot(p, 0, 1) == _conj_oracle(p, CNOT)
        assert conjugate_by_cnot(conjugate_by_cnot(p, 0, 1), 0, 1) == p
    swapped = CNOT.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    for idx in itertools.product(range(4), repeat=2):
        p = PauliOperator.from_indices(idx)
        assert conjugate_by_cnot(p, 1, 0) == _conj_oracle(p, swapped)


def test_cnot_errors():
    with pytest.raises(ValueError):
        conjugate_by_cnot(P("XX"), 1, 1)
    with pytest.raises(IndexError):
        conjugate_by_cnot(P("XX"), 0, 2)


def test_single_qubit_clifford_conjugation():
    h = cliffords.clifford_index(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    s = cliffords.clifford_index(np.diag([1, 1j]))
    assert conjugate_by_single_qubit_clifford(P("X"), 0, h) == P("Z")
    assert conjugate_by_single_qubit_clifford(P("X"), 0, s) == P("Y")
    for label in ("X", "-Y", "iZ"):
        assert conjugate_by_single_qubit_clifford(P(label), 0, 0) == P(label)
    with pytest.raises(ValueError):
        conjugate_by_single_qubit_clifford(P("X"), 0, 24)


def test_clifford_conjugation_exhaustive_two_qubits():
    for c in range(24):
        u = np.kron(np.eye(2), cliffords.CLIFFORD_MATRICES[c])
        for idx in itertools.product(range(4), repeat=2):
            p = PauliOperator.from_indices(idx)
            out = conjugate_by_single_qubit_clifford(p, 1, c)
            assert out == _conj_oracle(p, u)
            assert out.indices()[0] == p.indices()[0]
            assert (out.indices()[1] == 0) == (p.indices()[1] == 0)


def test_sample_uniform_pauli_frequencies():
    rng = np.random.default_rng(1)
    draws = np.array([sample_uniform_pauli(1, rng).indices()[0] for _ in range(100_000)])
    counts = np.bincount(draws, minlength=4)
    sigma = np.sqrt(100_000 * 0.25 * 0.75)
    assert np.all(np.abs(counts - 25_000) < 3 * sigma)


def test_sample_uniform_pauli_support_and_determinism():
    rng = np.random.default_rng(2)
    seen = {sample_uniform_pauli(2, rng).label() for _ in range(2000)}
    assert len(seen) == 16
    a = sample_uniform_pauli(5, np.random.default_rng(9))
    b = sample_uniform_pauli(5, np.random.default_rng(9))
    assert a == b and a.phase == 0


def test_x_mask():
    assert x_mask(P("ZZ")) == (0, 0)
    assert x_mask(P("XY")) == (1, 1)
    assert x_mask(PauliOperator.identity(3)) == (0, 0, 0)
    assert apply_mask("010", x_mask(P("XIY"))) == "111"


def test_labels_roundtrip():
    for label in ("+XIZY", "-iZZ", "+iX", "-Y"):
        assert P(label).label() == label
    assert P("XIZY").label() == "+XIZY"
    with pytest.raises(ValueError):
        P("XQ")


def test_commutes():
    assert commutes(P("XX"), P("ZZ"))
    assert not commutes(P("XI"), P("ZI"))


def test_channel_validation():
    with pytest.raises(ValueError):
        PauliChannel(1, [0.5, 0.5, 0.1, 0.0])
    with pytest.raises(ValueError):
        PauliChannel(1, [1.1, -0.1, 0.0, 0.0])


def test_channel_fidelity_is_identity_rate():
    rng = np.random.default_rng(3)
    for n in (1, 2):
        rates = rng.dirichlet(np.ones(4**n))
        chan = PauliChannel(n, rates)
        kraus = []
        for flat, r in enumerate(rates):
            idx = [(flat // 4 ** (n - 1 - q)) % 4 for q in range(n)]
            kraus.append(np.sqrt(r) * PauliOperator.from_indices(idx).matrix())
        ptm = ptm_from_kraus(np.array(kraus))
        assert abs(chan.fidelity() - entanglement_fidelity(ptm)) < 1e-10
        assert np.allclose(np.diag(ptm), chan.ptm_diagonal(), atol=1e-12)
        assert np.allclose(ptm, np.diag(np.diag(ptm)), atol=1e-12)


def test_sparse_channel_for_wide_registers():
    chan = PauliChannel.from_labels({"I" * 7: 0.9, "X" + "I" * 6: 0.1})
    assert chan.fidelity() == 0.9
    assert isinstance(chan.rates, dict)
    with pytest.raises(ValueError):
        chan.ptm()
