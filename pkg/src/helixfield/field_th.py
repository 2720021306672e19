"""Isovector matter field coupled to an SU(2) Yang-Mills potential in 1+1D.

Fields per site: matter ``u`` (real 3-vector in internal space) and the
potentials ``W0``, ``W1`` (one internal 3-vector per spacetime index).

    D_i u  = d_i u + g W_i x u
    W_ij   = d_i W_j - d_j W_i + g W_i x W_j
    L      = (1/2) D_i u . D^i u - (1/4) W_ij . W^ij - (1/2) (d^i W_i)**2

With this normalization the field equation is ``D_i W^{ij} = g (D^j u) x u``
plus the Lorenz gauge-fixing term; the residual ``d_t W0 - d_x W1`` is a
diagnostic.  In temporal gauge the ``W0 x W1`` term would vanish
identically in 1+1D, so both potentials are kept dynamical.

Written out with ``E = W_01`` (signature +, -)::

    box u  = [g W1_x x u + 2g W1 x u_x + g^2 W1 x (W1 x u)]
           - [g W0_t x u + 2g W0 x u_t + g^2 W0 x (W0 x u)]
    box W0 =  g d_x(W1 x W0) - g W1 x E - g u x D_t u
    box W1 = -g d_t(W0 x W1) - g W0 x E - g u x D_x u

Time derivatives on the right are centered at the current level; the
unknown new layer is resolved by a fixed number of explicit corrector
passes.  With ``g = 0`` every component reduces to the leapfrog of
:mod:`helixfield.waves` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, LatticeMismatchError
from .waves import VectorWaveState, WaveParams, centered_diff, check_courant, forward_diff, leapfrog, step_wave, taylor_start

CSV_COLUMNS = (
    "x",
    "u1", "u2", "u3",
    "W0_1", "W0_2", "W0_3",
    "W1_1", "W1_2", "W1_3",
    "W01_1", "W01_2", "W01_3",
)

FIELDS = ("u", "w0", "w1")


@dataclass(frozen=True)
class THParams:
    g: float = 1.0
    lattice: WaveParams = WaveParams()
    ceiling: float = 1e6
    iterations: int = 3

    def __post_init__(self):
        if not np.isfinite(self.g):
            raise ValueError("coupling g must be finite")
        if self.lattice.a != 1.0:
            raise ValueError("gauge modules use unit wave speed (lattice.a = 1)")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass(frozen=True)
class THFieldState:
    u: np.ndarray
    u_prev: np.ndarray
    w0: np.ndarray
    w0_prev: np.ndarray
    w1: np.ndarray
    w1_prev: np.ndarray
    time_index: int = 0

    def __post_init__(self):
        shape = self.u.shape
        if len(shape) != 2 or shape[1] != 3:
            raise ValueError(f"fields must have shape (nx, 3), got {shape}")
        for name in ("u_prev", "w0", "w0_prev", "w1", "w1_prev"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"layer {name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def nx(self) -> int:
        return self.u.shape[0]

    def layers(self) -> dict[str, np.ndarray]:
        return {
            "u": self.u,
            "u_prev": self.u_prev,
            "w0": self.w0,
            "w0_prev": self.w0_prev,
            "w1": self.w1,
            "w1_prev": self.w1_prev,
        }

    def map(self, fn) -> "THFieldState":
        return THFieldState(**{k: fn(v) for k, v in self.layers().items()}, time_index=self.time_index)

    def __add__(self, other: "THFieldState") -> "THFieldState":
        if self.u.shape != other.u.shape:
            raise LatticeMismatchError("states live on different lattices")
        b = other.layers()
        return THFieldState(**{k: v + b[k] for k, v in self.layers().items()}, time_index=self.time_index)

    def current_fields(self) -> np.ndarray:
        return np.concatenate([self.u, self.w0, self.w1], axis=1)


def initial_state(params: THParams, u0=None, w0=None, w1=None, u_velocity=None, w0_velocity=None, w1_velocity=None) -> THFieldState:
    """State at t = 0; past layers from a free-wave Taylor start."""
    lat = params.lattice
    shape = (lat.nx, 3)

    def prep(f):
        f = np.zeros(shape) if f is None else np.asarray(f, dtype=float)
        if f.shape != shape:
            raise ValueError(f"field must have shape {shape}, got {f.shape}")
        return f

    layers = {}
    for name, f, v in (("u", u0, u_velocity), ("w0", w0, w0_velocity), ("w1", w1, w1_velocity)):
        f = prep(f)
        layers[name] = f.copy()
        layers[name + "_prev"] = taylor_start(f, prep(v), lat)
    return THFieldState(**layers, time_index=0)


def internal_cross(p, q) -> np.ndarray:
    """Cross product in internal space (last axis)."""
    return np.cross(np.asarray(p, dtype=float), np.asarray(q, dtype=float))


_cross = internal_cross


def covariant_derivative_th(state: THFieldState, params: THParams, direction: str) -> np.ndarray:
    """``D_i u = d_i u + g W_i x u``.

    ``'x'``: centered difference at the current level.  ``'t'``: difference
    of the stored layers, with ``W0`` and ``u`` averaged to the half step.
    """
    lat, g = params.lattice, params.g
    if direction == "x":
        return centered_diff(state.u, lat.dx) + g * _cross(state.w1, state.u)
    if direction == "t":
        u_mid = 0.5 * (state.u + state.u_prev)
        w0_mid = 0.5 * (state.w0 + state.w0_prev)
        return (state.u - state.u_prev) / lat.dt + g * _cross(w0_mid, u_mid)
    raise ValueError(f"direction must be 't' or 'x', got {direction!r}")


def field_strength_th(state: THFieldState, params: THParams) -> np.ndarray:
    """``W_01 = d_t W1 - d_x W0 + g W0 x W1`` at the half step."""
    lat, g = params.lattice, params.g
    w0_mid = 0.5 * (state.w0 + state.w0_prev)
    w1_mid = 0.5 * (state.w1 + state.w1_prev)
    return (state.w1 - state.w1_prev) / lat.dt - centered_diff(w0_mid, lat.dx) + g * _cross(w0_mid, w1_mid)


def lorenz_residual(state: THFieldState, params: THParams) -> np.ndarray:
    """``d_t W0 - d_x W1`` per site and internal component, at the half step."""
    lat = params.lattice
    w1_mid = 0.5 * (state.w1 + state.w1_prev)
    return (state.w0 - state.w0_prev) / lat.dt - centered_diff(w1_mid, lat.dx)


def _accelerations(u, w0, w1, u_t, w0_t, w1_t, g, dx):
    u_x = centered_diff(u, dx)
    w0_x = centered_diff(w0, dx)
    w1_x = centered_diff(w1, dx)
    w0xw1 = _cross(w0, w1)
    e01 = w1_t - w0_x + g * w0xw1
    d_t = u_t + g * _cross(w0, u)
    d_x = u_x + g * _cross(w1, u)

    acc_u = (
        g * _cross(w1_x, u)
        + 2.0 * g * _cross(w1, u_x)
        + g * g * _cross(w1, _cross(w1, u))
        - g * _cross(w0_t, u)
        - 2.0 * g * _cross(w0, u_t)
        - g * g * _cross(w0, _cross(w0, u))
    )
    acc_w0 = -g * centered_diff(w0xw1, dx) - g * _cross(w1, e01) - g * _cross(u, d_t)
    acc_w1 = -g * (_cross(w0_t, w1) + _cross(w0, w1_t)) - g * _cross(w0, e01) - g * _cross(u, d_x)
    return acc_u, acc_w0, acc_w1


def _guard(step, ceiling, **fields):
    for name, f in fields.items():
        mag = float(np.max(np.abs(f)))
        if not np.isfinite(mag) or mag > ceiling:
            raise InstabilityError(step, name, mag)


def step_th(state: THFieldState, params: THParams) -> THFieldState:
    lat = params.lattice
    check_courant(lat)
    if state.nx != lat.nx:
        raise LatticeMismatchError(f"state has {state.nx} sites, params expect {lat.nx}")
    g, dt, dx = params.g, lat.dt, lat.dx
    cur = (state.u, state.w0, state.w1)
    prev = (state.u_prev, state.w0_prev, state.w1_prev)

    nxt = tuple(leapfrog(c, p, lat) for c, p in zip(cur, prev))
    if g != 0.0:
        for _ in range(params.iterations):
            rates = [(n - p) / (2.0 * dt) for n, p in zip(nxt, prev)]
            acc = _accelerations(*cur, *rates, g, dx)
            nxt = tuple(leapfrog(c, p, lat, accel=a) for c, p, a in zip(cur, prev, acc))

    _guard(state.time_index + 1, params.ceiling, u=nxt[0], W0=nxt[1], W1=nxt[2])
    return THFieldState(nxt[0], state.u, nxt[1], state.w0, nxt[2], state.w1, state.time_index + 1)


def simulate_th(init: THFieldState, params: THParams, steps: int, stride: int = 1) -> list[THFieldState]:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    out = [init]
    state = init
    for k in range(1, steps + 1):
        state = step_th(state, params)
        if k % stride == 0 or k == steps:
            out.append(state)
    return out


def evolve_th(state: THFieldState, params: THParams, steps: int) -> THFieldState:
    for _ in range(steps):
        state = step_th(state, params)
    return state


def energy_th(state: THFieldState, params: THParams) -> dict[str, float]:
    """Canonical energy of the gauge-fixed Lagrangian at the half step.

    Split into the free quadratic part (paired-gradient form, conserved
    exactly by the free scheme) and the coupling part, which carries no
    time derivatives::

        H_int = g W1 x u . u_x + g^2 |W1 x u|^2 / 2 - g^2 |W0 x u|^2 / 2
              + g (W0 x W1) . W0_x - g^2 |W0 x W1|^2 / 2
    """
    lat, g = params.lattice, params.g
    dt, dx = lat.dt, lat.dx

    def free(f, fp):
        return 0.5 * np.sum(((f - fp) / dt) ** 2 + forward_diff(f, dx) * forward_diff(fp, dx), axis=1)

    matter = free(state.u, state.u_prev)
    gauge = free(state.w1, state.w1_prev) - free(state.w0, state.w0_prev)

    u = 0.5 * (state.u + state.u_prev)
    w0 = 0.5 * (state.w0 + state.w0_prev)
    w1 = 0.5 * (state.w1 + state.w1_prev)
    w1xu = _cross(w1, u)
    w0xu = _cross(w0, u)
    w0xw1 = _cross(w0, w1)
    inter = (
        g * np.sum(w1xu * centered_diff(u, dx), axis=1)
        + 0.5 * g * g * np.sum(w1xu**2, axis=1)
        - 0.5 * g * g * np.sum(w0xu**2, axis=1)
        + g * np.sum(w0xw1 * centered_diff(w0, dx), axis=1)
        - 0.5 * g * g * np.sum(w0xw1**2, axis=1)
    )
    parts = {
        "matter": float(np.sum(matter) * dx),
        "gauge": float(np.sum(gauge) * dx),
        "coupling": float(np.sum(inter) * dx),
    }
    parts["total"] = parts["matter"] + parts["gauge"] + parts["coupling"]
    return parts


def l2_distance(a: THFieldState, b: THFieldState, dx: float) -> float:
    """L2 norm over all current-level fields."""
    return float(np.sqrt(np.sum((a.current_fields() - b.current_fields()) ** 2) * dx))


def _require_matching(*states: THFieldState, params: THParams):
    for s in states:
        if s.nx != params.lattice.nx:
            raise LatticeMismatchError(f"state has {s.nx} sites, params expect {params.lattice.nx}")


def self_interaction_residual(state_a: THFieldState, state_b: THFieldState, params: THParams, steps: int) -> float:
    """``|| evolve(A + B) - evolve(A) - evolve(B) ||_2`` after ``steps``.

    Both inputs must be source-free (``u == 0``).  Zero up to rounding in
    the linear regime; grows with ``g`` once the potentials are not
    internally parallel.
    """
    _require_matching(state_a, state_b, params=params)
    for s in (state_a, state_b):
        if np.any(s.u != 0) or np.any(s.u_prev != 0):
            raise ValueError("self-interaction residual needs source-free states (u == 0)")
    both = evolve_th(state_a + state_b, params, steps)
    a = evolve_th(state_a, params, steps)
    b = evolve_th(state_b, params, steps)
    return l2_distance(both, a + b, params.lattice.dx)


def _as_wave_states(state: THFieldState):
    return [
        VectorWaveState(state.u, state.u_prev, state.time_index),
        VectorWaveState(state.w0, state.w0_prev, state.time_index),
        VectorWaveState(state.w1, state.w1_prev, state.time_index),
    ]


def _from_wave_states(waves) -> THFieldState:
    u, w0, w1 = waves
    return THFieldState(u.current, u.previous, w0.current, w0.previous, w1.current, w1.previous, u.time_index)


def decoupled_reference(state: THFieldState, params: THParams, steps: int) -> list[THFieldState]:
    """Evolve every real component as an independent free wave."""
    lat = params.lattice
    waves = _as_wave_states(state)
    out = [state]
    for _ in range(steps):
        waves = [step_wave(w, lat) for w in waves]
        out.append(_from_wave_states(waves))
    return out


def abelian_limit_check(state: THFieldState, params: THParams, steps: int, reference=None) -> float:
    """Max over time of the L2 distance between the coupled run and the
    component-decoupled linear run from the same initial data."""
    _require_matching(state, params=params)
    if reference is None:
        reference = decoupled_reference(state, params, steps)
    if len(reference) != steps + 1:
        raise ValueError(f"reference must hold {steps + 1} states, got {len(reference)}")
    _require_matching(*reference, params=params)
    worst = l2_distance(state, reference[0], params.lattice.dx)
    current = state
    for k in range(1, steps + 1):
        current = step_th(current, params)
        worst = max(worst, l2_distance(current, reference[k], params.lattice.dx))
    return worst


def rotate_internal(state: THFieldState, rotation: np.ndarray) -> THFieldState:
    """Apply one global internal rotation to every vector of every layer."""
    r = np.asarray(rotation, dtype=float)
    return state.map(lambda f: f @ r.T)


def snapshot_columns(state: THFieldState, params: THParams) -> dict[str, np.ndarray]:
    w01 = field_strength_th(state, params)
    cols = {"x": params.lattice.grid()}
    for i in range(3):
        cols[f"u{i + 1}"] = state.u[:, i]
    for i in range(3):
        cols[f"W0_{i + 1}"] = state.w0[:, i]
    for i in range(3):
        cols[f"W1_{i + 1}"] = state.w1[:, i]
    for i in range(3):
        cols[f"W01_{i + 1}"] = w01[:, i]
    return {k: cols[k] for k in CSV_COLUMNS}
