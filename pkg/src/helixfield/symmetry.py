"""SO(3) and SU(2) small-matrix algebra.

Conventions: active rotations, right-hand rule, column vectors.  Euler
angles follow the z-x-z sequence ``Rz(phi) @ Rx(theta) @ Rz(psi)``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_AXES = {"x": 0, "y": 1, "z": 2}


class EulerAngles(NamedTuple):
    phi: float
    theta: float
    psi: float

    def reduced(self) -> "EulerAngles":
        """Angles wrapped into [0, 2pi), for display only."""
        return EulerAngles(*(float(np.mod(a, 2 * np.pi)) for a in self))


def rotation_about_axis(axis: str, angle: float) -> np.ndarray:
    """Active rotation by ``angle`` about the coordinate axis ``'x'``, ``'y'`` or ``'z'``."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    c, s = np.cos(angle), np.sin(angle)
    i = _AXES[axis]
    j, k = (i + 1) % 3, (i + 2) % 3
    r = np.zeros((3, 3))
    r[i, i] = 1.0
    r[j, j] = c
    r[k, k] = c
    r[j, k] = -s
    r[k, j] = s
    return r


def compose(second: np.ndarray, first: np.ndarray) -> np.ndarray:
    # `first` acts first on column vectors
    return np.asarray(second) @ np.asarray(first)


def euler_to_matrix(angles) -> np.ndarray:
    phi, theta, psi = angles
    return rotation_about_axis("z", phi) @ rotation_about_axis("x", theta) @ rotation_about_axis("z", psi)


def commutator_defect(r1: np.ndarray, r2: np.ndarray) -> float:
    """Frobenius norm of ``r1 @ r2 - r2 @ r1``; zero iff the pair commutes."""
    return float(np.linalg.norm(r1 @ r2 - r2 @ r1))


def is_rotation(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return False
    return bool(np.max(np.abs(m @ m.T - np.eye(3))) <= tol and abs(np.linalg.det(m) - 1.0) <= tol)


def is_su2(u: np.ndarray, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.all(np.isfinite(u)):
        return False
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(2))) <= tol and abs(np.linalg.det(u) - 1.0) <= tol)


def su2_from_axis_angle(axis, angle: float) -> np.ndarray:
    """``cos(angle/2) I - i sin(angle/2) (axis . sigma)`` for a unit ``axis``.

    A full turn (``angle = 2*pi``) gives ``-I``: SU(2) covers SO(3) twice.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    norm = np.linalg.norm(n)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"axis must have unit norm, got |axis| = {norm:.12g}")
    n_sigma = np.tensordot(n, PAULI, axes=1)
    return np.cos(angle / 2) * np.eye(2, dtype=complex) - 1j * np.sin(angle / 2) * n_sigma


def adjoint_map(u: np.ndarray) -> np.ndarray:
    """SU(2) -> SO(3): ``R[a, b] = tr(sigma_a U sigma_b U^dagger) / 2``."""
    u = np.asarray(u, dtype=complex)
    conj = np.einsum("ij,bjk,lk->bil", u, PAULI, u.conj())
    r = 0.5 * np.einsum("aij,bji->ab", PAULI, conj)
    return r.real.copy()


def spinor_to_vector(xi) -> np.ndarray:
    """Map a spinor ``(xi1, xi2)`` to ``(V_S, V_B, V_G)``.

    Implemented exactly as printed in the source model::

        V_S = (xi2**2 - xi1**2) / 2i
        V_B = (xi1**2 + xi2**2) / 2i
        V_G = xi1 * xi2

    This is not the textbook spinor map; real spinors yield imaginary
    components.  No correction is applied.
    """
    xi1, xi2 = (complex(z) for z in xi)
    return np.array(
        [
            (xi2**2 - xi1**2) / 2j,
            (xi1**2 + xi2**2) / 2j,
            xi1 * xi2,
        ],
        dtype=complex,
    )


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random rotation built from a random unit quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return adjoint_map(_quat_to_su2(q))


def random_su2(rng: np.random.Generator) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return _quat_to_su2(q)


def _quat_to_su2(q) -> np.ndarray:
    a, b, c, d = q
    return np.array([[a - 1j * d, -c - 1j * b], [c - 1j * b, a + 1j * d]], dtype=complex)
