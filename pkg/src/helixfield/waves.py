"""Linear wave propagation on a periodic 1D lattice.

Each site carries a 3-component field ``(c_G, c_B, c_S)``; every component
obeys ``c_tt - a**2 c_xx = 0`` independently.  Time stepping is the
explicit three-level leapfrog scheme, second order in ``dx`` and ``dt``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CourantError

COMPONENTS = ("c_G", "c_B", "c_S")


@dataclass(frozen=True)
class WaveParams:
    a: float = 1.0
    nx: int = 256
    dx: float = 1.0 / 256
    dt: float = 0.5 / 256

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 3:
            raise ValueError(f"nx must be an integer >= 3, got {self.nx}")
        if not (self.dx > 0 and self.dt > 0):
            raise ValueError("dx and dt must be positive")
        if not np.isfinite(self.a):
            raise ValueError("wave speed must be finite")
        check_courant(self)

    @property
    def courant(self) -> float:
        return abs(self.a) * self.dt / self.dx

    @property
    def length(self) -> float:
        return self.nx * self.dx

    def grid(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx


def check_courant(params: WaveParams, limit: float = 1.0) -> None:
    if params.courant > limit:
        raise CourantError(f"Courant number a*dt/dx = {params.courant:.6g} exceeds {limit}")


@dataclass(frozen=True)
class VectorWaveState:
    current: np.ndarray
    previous: np.ndarray
    time_index: int = 0

    def __post_init__(self):
        if self.current.shape != self.previous.shape:
            raise ValueError("current and previous layers differ in shape")


def laplacian(f: np.ndarray, dx: float) -> np.ndarray:
    """Periodic 3-point second difference along axis 0."""
    return (np.roll(f, -1, axis=0) - 2.0 * f + np.roll(f, 1, axis=0)) / dx**2


def centered_diff(f: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2.0 * dx)


def forward_diff(f: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(f, -1, axis=0) - f) / dx


def leapfrog(cur: np.ndarray, prev: np.ndarray, params: WaveParams, accel=None) -> np.ndarray:
    """``2 cur - prev + dt**2 (a**2 lap(cur) + accel)``.

    Shared by every evolution module so the free (uncoupled) limits agree
    to rounding.
    """
    rhs = params.a**2 * laplacian(cur, params.dx)
    if accel is not None:
        rhs = rhs + accel
    return 2.0 * cur - prev + params.dt**2 * rhs


def taylor_start(c0: np.ndarray, v0, params: WaveParams) -> np.ndarray:
    """Field one step in the past from position and velocity at t = 0."""
    c0 = np.asarray(c0)
    v0 = np.zeros_like(c0) if v0 is None else np.asarray(v0)
    dt = params.dt
    return c0 - dt * v0 + 0.5 * dt**2 * params.a**2 * laplacian(c0, params.dx)


def initial_state(c0, params: WaveParams, velocity=None) -> VectorWaveState:
    c0 = np.asarray(c0, dtype=float)
    if c0.ndim == 1:
        c0 = np.stack([c0, np.zeros_like(c0), np.zeros_like(c0)], axis=1)
    if c0.shape != (params.nx, 3):
        raise ValueError(f"initial field must have shape ({params.nx}, 3), got {c0.shape}")
    if velocity is not None:
        velocity = np.asarray(velocity, dtype=float).reshape(c0.shape)
    return VectorWaveState(c0.copy(), taylor_start(c0, velocity, params), 0)


def dalembert(profile: Callable[[float], float], x, t: float, a: float, direction: int = 1):
    """Travelling-wave solution ``profile(x + direction * a * t)``."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    return profile(np.asarray(x) + direction * a * t)


def step_wave(state: VectorWaveState, params: WaveParams) -> VectorWaveState:
    check_courant(params)
    if state.current.shape != (params.nx, 3):
        raise ValueError(f"state shape {state.current.shape} does not match nx = {params.nx}")
    nxt = leapfrog(state.current, state.previous, params)
    return VectorWaveState(nxt, state.current, state.time_index + 1)


def simulate_wave(init: VectorWaveState, params: WaveParams, steps: int, stride: int = 1) -> list[VectorWaveState]:
    """States at time indices 0, stride, 2*stride, ... up to ``steps``.

    The final state is always included.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    out = [init]
    state = init
    for k in range(1, steps + 1):
        state = step_wave(state, params)
        if k % stride == 0 or k == steps:
            out.append(state)
    return out


def wave_energy(state: VectorWaveState, params: WaveParams) -> float:
    """Discrete energy at the half step between ``previous`` and ``current``.

    The gradient term pairs the two time levels,
    ``E = sum(0.5*(dc/dt)**2 + 0.5*a**2 * grad(cur)*grad(prev)) * dx``,
    which the leapfrog update conserves exactly.
    """
    cur, prev = state.current, state.previous
    vel = (cur - prev) / params.dt
    grad = forward_diff(cur, params.dx) * forward_diff(prev, params.dx)
    return float(0.5 * np.sum(vel**2 + params.a**2 * grad) * params.dx)


def periodic_dalembert(profile: Callable, x, t: float, params: WaveParams):
    """d'Alembert solution for zero initial velocity on a periodic domain.

    ``profile`` must already be periodic in ``x`` with period ``params.length``.
    """
    a = params.a
    return 0.5 * (dalembert(profile, x, t, a, -1) + dalembert(profile, x, t, a, 1))


def l2_norm(f: np.ndarray, dx: float) -> float:
    return float(np.sqrt(np.sum(np.abs(f) ** 2) * dx))
