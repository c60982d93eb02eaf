"""The 24-element single-qubit Clifford group with a fixed canonical indexing.

Elements are enumerated breadth-first over words in the generators H and S,
trying H before S at every step and keeping the first word that reaches a new
element (up to global phase). Words are read left to right in time, so "HS"
means apply H, then S. Index 0 is the identity. The resulting table is printed
by ``python -m mcfe.cliffords`` and reproduced in the README.

Every element is implemented physically in the same Z-X90-Z-X90-Z form as
parameterized gates; ``CLIFFORD_ANGLES[i]`` holds its canonical ``(psi, phi,
theta)`` and ``CLIFFORD_MATRICES[i]`` the matching SU(2) matrix.
"""

from collections import deque

import numpy as np

from .gates1q import PAULI_MATRICES, zxzxz_angles, zxzxz_unitary

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


def _phase_key(u):
    flat = u.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-9))
    u = u * (abs(flat[k]) / flat[k])
    return tuple(np.round(u.ravel(), 8).tolist())


def _enumerate():
    words, mats, seen = [], [], {}
    queue = deque([("", np.eye(2, dtype=complex))])
    while queue:
        word, u = queue.popleft()
        key = _phase_key(u)
        if key in seen:
            continue
        seen[key] = len(words)
        words.append(word or "I")
        mats.append(u)
        queue.append((word + "H", _H @ u))
        queue.append((word + "S", _S @ u))
    return words, mats, seen


CLIFFORD_WORDS, _raw, _index = _enumerate()
NUM_CLIFFORDS = len(CLIFFORD_WORDS)
assert NUM_CLIFFORDS == 24

CLIFFORD_ANGLES = zxzxz_angles(np.array(_raw))
CLIFFORD_MATRICES = zxzxz_unitary(
    CLIFFORD_ANGLES[:, 0], CLIFFORD_ANGLES[:, 1], CLIFFORD_ANGLES[:, 2]
)


def clifford_index(u):
    """Return the id of the Clifford equal to ``u`` up to phase; KeyError if none."""
    return _index[_phase_key(np.asarray(u, dtype=complex))]


# PRODUCT[a, b] is the id of U_a @ U_b (b applied first).
PRODUCT = np.array(
    [[clifford_index(CLIFFORD_MATRICES[a] @ CLIFFORD_MATRICES[b]) for b in range(24)] for a in range(24)],
    dtype=np.int64,
)
INVERSE = np.array([int(np.argmax(PRODUCT[a] == 0)) for a in range(24)], dtype=np.int64)

# Pauli index (0=I, 1=X, 2=Y, 3=Z) -> Clifford id.
PAULI_TO_CLIFFORD = np.array([clifford_index(p) for p in PAULI_MATRICES], dtype=np.int64)


def _conjugation_table():
    # CONJUGATION[c, p] = (p', sign) with U_c P_p U_c^dag = sign * P_p'
    table = np.zeros((24, 4, 2), dtype=np.int64)
    for c in range(24):
        u = CLIFFORD_MATRICES[c]
        for p in range(4):
            image = u @ PAULI_MATRICES[p] @ u.conj().T
            for q in range(4):
                overlap = np.trace(PAULI_MATRICES[q].conj().T @ image) / 2
                if abs(abs(overlap) - 1) < 1e-9:
                    table[c, p] = (q, int(round(overlap.real)))
                    break
    return table


CONJUGATION = _conjugation_table()


def validate_clifford_id(clifford):
    if not (isinstance(clifford, (int, np.integer)) and 0 <= clifford < NUM_CLIFFORDS):
        raise ValueError(f"invalid single-qubit Clifford id {clifford!r}; expected 0..23")
    return int(clifford)


def clifford_table():
    """Human-readable rows ``(id, word, psi, phi, theta)``."""
    return [
        (i, CLIFFORD_WORDS[i], *map(float, CLIFFORD_ANGLES[i])) for i in range(NUM_CLIFFORDS)
    ]


if __name__ == "__main__":
    for row in clifford_table():
        print("{:2d}  {:<6s} psi={:+.6f} phi={:+.6f} theta={:+.6f}".format(*row))
