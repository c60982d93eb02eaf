"""Single-qubit unitaries in the Z(theta) X90 Z(phi) X90 Z(psi) form.

A parameterized single-qubit gate is stored as three Z angles ``(psi, phi, theta)``
with two implicit X(pi/2) pulses:

    U = Z(theta) @ X90 @ Z(phi) @ X90 @ Z(psi)

so ``psi`` is applied first in time. ``Z(a) = exp(-i a Z / 2)`` and
``X90 = exp(-i pi X / 4)``; the product is always in SU(2).
"""

import numpy as np

PAULI_MATRICES = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

X90 = np.array([[1, -1j], [-1j, 1]], dtype=complex) / np.sqrt(2)


def zrot(angle):
    """Return ``exp(-i angle Z / 2)``; broadcasts over array-valued angles."""
    angle = np.asarray(angle, dtype=float)
    out = np.zeros(angle.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * angle)
    out[..., 1, 1] = np.exp(0.5j * angle)
    return out


def xrot(angle):
    """Return ``exp(-i angle X / 2)``."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def zxzxz_unitary(psi, phi, theta):
    """SU(2) matrix of ``Z(theta) X90 Z(phi) X90 Z(psi)``.

    Uses the closed form, so it vectorizes over array inputs of a common shape.
    """
    psi, phi, theta = np.broadcast_arrays(
        np.asarray(psi, float), np.asarray(phi, float), np.asarray(theta, float)
    )
    s, c = np.sin(phi / 2), np.cos(phi / 2)
    tot, dif = (theta + psi) / 2, (theta - psi) / 2
    out = np.empty(psi.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = -1j * s * np.exp(-1j * tot)
    out[..., 0, 1] = -1j * c * np.exp(-1j * dif)
    out[..., 1, 0] = -1j * c * np.exp(1j * dif)
    out[..., 1, 1] = 1j * s * np.exp(1j * tot)
    return out


def wrap_angle(angle):
    """Map angles into (-pi, pi]."""
    out = np.mod(np.asarray(angle, float) + np.pi, 2 * np.pi) - np.pi
    return np.where(out == -np.pi, np.pi, out)


def zxzxz_angles(u):
    """Extract ``(psi, phi, theta)`` with ``zxzxz_unitary(...)`` equal to ``u`` up to phase.

    ``u`` may be a single 2x2 unitary or a stack ``(..., 2, 2)``. The gauge is
    fixed with ``phi`` in [0, pi] and ``psi``, ``theta`` in (-pi, pi].

    Returns:
        ndarray of shape ``(..., 3)``.
    """
    u = np.asarray(u, dtype=complex)
    det = u[..., 0, 0] * u[..., 1, 1] - u[..., 0, 1] * u[..., 1, 0]
    v = u / np.sqrt(det)[..., None, None]
    a = 1j * v[..., 0, 0]  # sin(phi/2) exp(-i (theta+psi)/2)
    b = 1j * v[..., 0, 1]  # cos(phi/2) exp(-i (theta-psi)/2)
    phi = 2 * np.arctan2(np.abs(a), np.abs(b))
    half_tot = -np.angle(a)
    half_dif = -np.angle(b)
    theta = wrap_angle(half_tot + half_dif)
    psi = wrap_angle(half_tot - half_dif)
    return np.stack([psi, phi, theta], axis=-1)


def phase_distance(u, v):
    """Max-abs distance between ``u`` and ``v`` after optimally aligning global phase."""
    u = np.asarray(u)
    v = np.asarray(v)
    overlap = np.vdot(u, v)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(u * phase - v)))
