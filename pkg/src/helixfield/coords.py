"""Institutional (G, S, B) <-> functional (W, N, L) coordinate machinery.

A ``FunctionMatrix`` ``a`` maps actor activity to functions,
``(W, N, L) = a @ (G, S, B)``; an ``InstitutionMatrix`` ``b`` maps the
other way, ``(G, S, B) = b @ (W, N, L)``.  Rows of ``b`` are the actors'
relative inputs to the three functions.
"""
from __future__ import annotations

import enum
import warnings
from typing import NamedTuple

import numpy as np

# Relative inputs of Government, University and Industry to
# Wealth, Novelty and Normative control (rows G, S, B; columns W, N, L).
EXAMPLE_INSTITUTION_MATRIX = np.array(
    [
        [0.05, 0.10, 0.85],
        [0.15, 0.60, 0.05],
        [0.80, 0.30, 0.10],
    ]
)

DEFAULT_REGIME_TOLERANCE = 0.15


class SingularMatrixError(ValueError):
    pass


class THVector(NamedTuple):
    g: float
    s: float
    b: float


class EventVector(NamedTuple):
    w: float
    n: float
    l: float


class Regime(str, enum.Enum):
    TH_I = "TH_I"
    TH_II = "TH_II"
    TH_III = "TH_III"
    DH_SG = "DH_SG"
    DH_BG = "DH_BG"
    DH_SB = "DH_SB"
    MIXED = "MIXED"


def _as_matrix(m, warn_range: bool = False) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if warn_range and np.any((m < 0) | (m > 1)):
        warnings.warn("matrix has entries outside [0, 1]; relative contributions are usually fractions", stacklevel=3)
    return m


def functions_from_actors(m, actors) -> np.ndarray:
    """``(W, N, L) = m @ (G, S, B)``."""
    return _as_matrix(m, warn_range=True) @ np.asarray(actors, dtype=float)


def actors_from_functions(m, functions) -> np.ndarray:
    """``(G, S, B) = m @ (W, N, L)``."""
    return _as_matrix(m) @ np.asarray(functions, dtype=float)


def invert_transform(m) -> np.ndarray:
    m = _as_matrix(m, warn_range=True)
    det = np.linalg.det(m)
    if abs(det) <= 1e-12:
        raise SingularMatrixError(f"transform is singular (determinant = {det:.6g})")
    return np.linalg.inv(m)


def actor_contributions(m) -> np.ndarray:
    """Euclidean norm of each actor row: ``(V'_G, V'_S, V'_B)``.

    For ``EXAMPLE_INSTITUTION_MATRIX`` this gives (0.8573, 0.6205, 0.8602).
    The first value is sometimes quoted as 0.81, which does not follow
    from the row entries.
    """
    return np.linalg.norm(_as_matrix(m), axis=1)


def normalize_th_vector(v) -> THVector:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot normalize a zero (or non-finite) vector")
    return THVector(*(v / norm))


def classify_regime(v, tol_angle: float = DEFAULT_REGIME_TOLERANCE) -> Regime:
    """Label a unit TH vector by its closest axis or coordinate plane.

    TH_I, TH_II, TH_III: within ``tol_angle`` of the G, B, S axis.
    DH_*: within ``tol_angle`` of the named plane.  Axis tests win.
    """
    if not 0.0 < tol_angle < np.pi / 4:
        raise ValueError("tol_angle must lie in (0, pi/4)")
    g, s, b = (float(c) for c in v)
    vec = np.array([g, s, b])
    if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
        raise ValueError(f"vector must be normalized, |v| = {np.linalg.norm(vec):.12g}")

    def axis_angle(c):
        return np.arccos(np.clip(abs(c), 0.0, 1.0))

    def plane_angle(normal_c):
        return np.arcsin(np.clip(abs(normal_c), 0.0, 1.0))

    axes = [(axis_angle(g), Regime.TH_I), (axis_angle(b), Regime.TH_II), (axis_angle(s), Regime.TH_III)]
    best_angle, best = min(axes, key=lambda p: p[0])
    if best_angle < tol_angle:
        return best
    planes = [(plane_angle(b), Regime.DH_SG), (plane_angle(s), Regime.DH_BG), (plane_angle(g), Regime.DH_SB)]
    best_angle, best = min(planes, key=lambda p: p[0])
    if best_angle < tol_angle:
        return best
    return Regime.MIXED


def decompose_event(p) -> tuple[EventVector, EventVector, EventVector]:
    w, n, l = (float(c) for c in p)
    return EventVector(w, 0.0, 0.0), EventVector(0.0, n, 0.0), EventVector(0.0, 0.0, l)
