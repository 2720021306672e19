"""Complex matter field coupled to an Abelian gauge potential in 1+1D.

Conventions
-----------
Signature (+, -), index 0 = t, 1 = x, lower-index potentials ``A0``, ``A1``.
The covariant derivative is ``D u = (d + i e A) u`` and the Lagrangian is

    L = (D_i u)(D^i u)* - (1/4) F_ij F^ij - (1/2) (d^i A_i)**2

so the current is ``j^i = -i e (u* D^i u - u (D^i u)*) = 2 e Im(u* D^i u)``
and ``d_j F^ij = j^i``.  The last term fixes the Lorenz gauge: both
potentials obey ``box A_0 = -j^0`` and ``box A_1 = j^1``, and the residual
``d_t A0 - d_x A1`` is reported as a diagnostic only.

Discretization
--------------
Potentials are stored as plain real numbers per site.  Matter hopping uses
phase factors ``exp(i e dx A1)`` between neighbouring sites and
``exp(i e dt A0)`` between time levels, so charge is conserved to rounding
and a gauge transformation with ``Lambda`` linear in x and t commutes
exactly with the update.  With ``e = 0`` the update is the plain leapfrog
of :mod:`helixfield.waves`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InstabilityError, LatticeMismatchError
from .waves import WaveParams, centered_diff, check_courant, forward_diff, laplacian, leapfrog, taylor_start

CSV_COLUMNS = ("x", "Re_u", "Im_u", "A0", "A1", "j0", "j1", "F01")


@dataclass(frozen=True)
class DHParams:
    e: float = 0.1
    lattice: WaveParams = WaveParams()
    ceiling: float = 1e6
    iterations: int = 2

    def __post_init__(self):
        if not np.isfinite(self.e):
            raise ValueError("coupling e must be finite")
        if self.lattice.a != 1.0:
            raise ValueError("gauge modules use unit wave speed (lattice.a = 1)")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass(frozen=True)
class DHState:
    u: np.ndarray
    u_prev: np.ndarray
    a0: np.ndarray
    a0_prev: np.ndarray
    a1: np.ndarray
    a1_prev: np.ndarray
    time_index: int = 0

    def __post_init__(self):
        shape = self.u.shape
        for name in ("u_prev", "a0", "a0_prev", "a1", "a1_prev"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"layer {name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def nx(self) -> int:
        return self.u.shape[0]

    def __add__(self, other: "DHState") -> "DHState":
        if self.u.shape != other.u.shape:
            raise LatticeMismatchError("states live on different lattices")
        return DHState(
            self.u + other.u,
            self.u_prev + other.u_prev,
            self.a0 + other.a0,
            self.a0_prev + other.a0_prev,
            self.a1 + other.a1,
            self.a1_prev + other.a1_prev,
            self.time_index,
        )

    def layers(self) -> dict[str, np.ndarray]:
        return {
            "u": self.u,
            "u_prev": self.u_prev,
            "a0": self.a0,
            "a0_prev": self.a0_prev,
            "a1": self.a1,
            "a1_prev": self.a1_prev,
        }


def initial_state(params: DHParams, u0, u_velocity=None, a0=None, a1=None, a0_velocity=None, a1_velocity=None) -> DHState:
    """Build a state at t = 0; past layers come from a free-wave Taylor start."""
    lat = params.lattice
    nx = lat.nx

    def prep(f, dtype):
        f = np.zeros(nx, dtype=dtype) if f is None else np.asarray(f, dtype=dtype)
        if f.shape != (nx,):
            raise ValueError(f"field must have shape ({nx},), got {f.shape}")
        return f

    u0 = prep(u0, complex)
    a0 = prep(a0, float)
    a1 = prep(a1, float)
    return DHState(
        u0.copy(),
        taylor_start(u0, prep(u_velocity, complex), lat),
        a0.copy(),
        taylor_start(a0, prep(a0_velocity, float), lat),
        a1.copy(),
        taylor_start(a1, prep(a1_velocity, float), lat),
        0,
    )


def _space_links(a1: np.ndarray, e: float, dx: float) -> np.ndarray:
    # link j -> j+1 carries exp(i e dx <A1>) with <A1> the link midpoint value
    return np.exp(1j * e * dx * 0.5 * (a1 + np.roll(a1, -1)))


def _time_link(a0_early: np.ndarray, a0_late: np.ndarray, e: float, dt: float) -> np.ndarray:
    return np.exp(1j * e * dt * 0.5 * (a0_early + a0_late))


def covariant_laplacian(u: np.ndarray, a1: np.ndarray, e: float, dx: float) -> np.ndarray:
    link = _space_links(a1, e, dx)
    fwd = link * np.roll(u, -1)
    bwd = np.roll(link.conj(), 1) * np.roll(u, 1)
    return (fwd - 2.0 * u + bwd) / dx**2


def _covariant_dx(u, a1, e, dx):
    link = _space_links(a1, e, dx)
    return (link * np.roll(u, -1) - np.roll(link.conj(), 1) * np.roll(u, 1)) / (2.0 * dx)


def _covariant_forward(u, a1, e, dx):
    return (_space_links(a1, e, dx) * np.roll(u, -1) - u) / dx


def covariant_derivative_dh(state: DHState, params: DHParams, direction: str) -> np.ndarray:
    """Gauge-covariant derivative ``D_i u``.

    ``direction='x'``: centered difference at the current time level.
    ``direction='t'``: difference of the two stored layers, located at the
    half step between them.  With ``e = 0`` both reduce to plain
    differences; otherwise the neighbouring value is parallel-transported,
    which agrees with ``d u + i e A u`` to second order.
    """
    lat = params.lattice
    if direction == "x":
        return _covariant_dx(state.u, state.a1, params.e, lat.dx)
    if direction == "t":
        link = _time_link(state.a0_prev, state.a0, params.e, lat.dt)
        return (link * state.u - state.u_prev) / lat.dt
    raise ValueError(f"direction must be 't' or 'x', got {direction!r}")


def _charge_density(u_early, u_late, a0_early, a0_late, e, dt):
    link = _time_link(a0_early, a0_late, e, dt)
    return 2.0 * e * np.imag(u_early.conj() * link * u_late) / dt


def _spatial_current(u, a1, e, dx):
    # contravariant j^1 = 2 e Im(u* D^1 u) = -2 e Im(u* D_x u)
    return -2.0 * e * np.imag(u.conj() * _covariant_dx(u, a1, e, dx))


def current_dh(state: DHState, params: DHParams) -> tuple[np.ndarray, np.ndarray]:
    """``(j^0, j^1)`` per site.

    ``j^0`` sits at the half step between the stored layers (where the
    scheme conserves it exactly); ``j^1`` at the current level.
    """
    lat = params.lattice
    j0 = _charge_density(state.u_prev, state.u, state.a0_prev, state.a0, params.e, lat.dt)
    j1 = _spatial_current(state.u, state.a1, params.e, lat.dx)
    return j0, j1


def total_charge(state: DHState, params: DHParams) -> float:
    j0, _ = current_dh(state, params)
    return float(np.sum(j0) * params.lattice.dx)


def field_strength_dh(state: DHState, params: DHParams) -> np.ndarray:
    """``F_01 = d_t A1 - d_x A0`` at the half step."""
    lat = params.lattice
    a0_mid = 0.5 * (state.a0 + state.a0_prev)
    return (state.a1 - state.a1_prev) / lat.dt - centered_diff(a0_mid, lat.dx)


def lorenz_residual(state: DHState, params: DHParams) -> np.ndarray:
    """``d^i A_i = d_t A0 - d_x A1`` at the half step."""
    lat = params.lattice
    a1_mid = 0.5 * (state.a1 + state.a1_prev)
    return (state.a0 - state.a0_prev) / lat.dt - centered_diff(a1_mid, lat.dx)


def energy_dh(state: DHState, params: DHParams) -> dict[str, float]:
    """Canonical energy of the gauge-fixed system at the half step.

    ``H = |D_t u|^2 + |D_x u|^2 - A0 j^0
          + (A1_t^2 + A1_x^2)/2 - (A0_t^2 + A0_x^2)/2``

    The gauge-potential part is indefinite (the A0 sector enters with a
    minus sign); for weak coupling the matter part dominates.  It is
    unchanged by time-independent gauge transformations; a uniform
    offset ``c`` in ``A0`` shifts it by ``-c Q``.
    """
    lat = params.lattice
    e, dt, dx = params.e, lat.dt, lat.dx
    a0_mid = 0.5 * (state.a0 + state.a0_prev)
    a1_mid = 0.5 * (state.a1 + state.a1_prev)
    link = _time_link(state.a0_prev, state.a0, e, dt)
    u_late = link * state.u
    kinetic = np.abs(u_late - state.u_prev) ** 2 / dt**2
    gradient = np.real(
        np.conj(_covariant_forward(u_late, a1_mid, e, dx)) * _covariant_forward(state.u_prev, a1_mid, e, dx)
    )
    j0 = _charge_density(state.u_prev, state.u, state.a0_prev, state.a0, e, dt)
    coupling = -a0_mid * j0

    def free(f, fp):
        return 0.5 * (((f - fp) / dt) ** 2 + forward_diff(f, dx) * forward_diff(fp, dx))

    gauge = free(state.a1, state.a1_prev) - free(state.a0, state.a0_prev)
    parts = {
        "matter": float(np.sum(kinetic + gradient) * dx),
        "coupling": float(np.sum(coupling) * dx),
        "gauge": float(np.sum(gauge) * dx),
    }
    parts["total"] = parts["matter"] + parts["coupling"] + parts["gauge"]
    return parts


def _guard(step: int, ceiling: float, **fields) -> None:
    for name, f in fields.items():
        mag = float(np.max(np.abs(f)))
        if not np.isfinite(mag) or mag > ceiling:
            raise InstabilityError(step, name, mag)


def step_dh(state: DHState, params: DHParams) -> DHState:
    """One leapfrog step of the coupled matter + gauge system.

    The charge density feeding ``A0`` is the time average of the two
    half-step densities around the current level; the later one depends on
    the new matter layer, so ``params.iterations`` fixed-point passes
    refine it.  The matter layer is always recomputed last with the final
    ``A0``, which keeps charge conservation exact regardless of the
    number of passes.
    """
    lat = params.lattice
    check_courant(lat)
    if state.nx != lat.nx:
        raise LatticeMismatchError(f"state has {state.nx} sites, params expect {lat.nx}")
    e, dt, dx = params.e, lat.dt, lat.dx
    u, up = state.u, state.u_prev

    j1 = _spatial_current(u, state.a1, e, dx)
    a1_next = leapfrog(state.a1, state.a1_prev, lat, accel=j1)

    back = _time_link(state.a0_prev, state.a0, e, dt)
    # u-part of the update that does not depend on the new A0
    base = 2.0 * u - back.conj() * up + dt**2 * (lat.a**2 * covariant_laplacian(u, state.a1, e, dx))
    q_prev = 2.0 * e * np.imag(up.conj() * back * u) / dt

    a0_next = leapfrog(state.a0, state.a0_prev, lat, accel=-q_prev)
    for _ in range(params.iterations):
        fwd = _time_link(state.a0, a0_next, e, dt)
        u_next = fwd.conj() * base
        q_next = 2.0 * e * np.imag(u.conj() * fwd * u_next) / dt
        a0_next = leapfrog(state.a0, state.a0_prev, lat, accel=-0.5 * (q_prev + q_next))
    u_next = _time_link(state.a0, a0_next, e, dt).conj() * base

    _guard(state.time_index + 1, params.ceiling, u=u_next, A0=a0_next, A1=a1_next)
    return DHState(u_next, u, a0_next, state.a0, a1_next, state.a1, state.time_index + 1)


def simulate_dh(init: DHState, params: DHParams, steps: int, stride: int = 1) -> list[DHState]:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    out = [init]
    state = init
    for k in range(1, steps + 1):
        state = step_dh(state, params)
        if k % stride == 0 or k == steps:
            out.append(state)
    return out


def evolve_dh(state: DHState, params: DHParams, steps: int) -> DHState:
    for _ in range(steps):
        state = step_dh(state, params)
    return state


def _wrapped_diff(lam: np.ndarray, dx: float) -> np.ndarray:
    # Lambda only matters modulo 2*pi, so neighbour differences are wrapped
    fwd = np.angle(np.exp(1j * (np.roll(lam, -1) - lam)))
    bwd = np.roll(fwd, 1)
    return (fwd + bwd) / (2.0 * dx)


def gauge_transform_dh(state: DHState, params: DHParams, lam, lam_rate=0.0) -> DHState:
    """Apply ``Lambda(x, t) = lam(x) + lam_rate * (t - t_now)``.

    ``u -> exp(-i Lambda) u``, ``A1 -> A1 + (1/e) d_x Lambda``,
    ``A0 -> A0 + (1/e) d_t Lambda``.  With ``e = 0`` only a constant
    phase is allowed.
    """
    lat = params.lattice
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (state.nx,))
    rate = np.broadcast_to(np.asarray(lam_rate, dtype=float), (state.nx,))
    grad = _wrapped_diff(lam, lat.dx)
    nonconstant = np.ptp(np.angle(np.exp(1j * lam))) > 0 or np.any(rate != 0)
    if params.e == 0:
        if nonconstant:
            raise ValueError("a position- or time-dependent gauge transformation needs e != 0")
        shift1 = shift0 = 0.0
    else:
        shift1 = grad / params.e
        shift0 = rate / params.e
    lam_prev = lam - rate * lat.dt
    return replace(
        state,
        u=np.exp(-1j * lam) * state.u,
        u_prev=np.exp(-1j * lam_prev) * state.u_prev,
        a0=state.a0 + shift0,
        a0_prev=state.a0_prev + shift0,
        a1=state.a1 + shift1,
        a1_prev=state.a1_prev + shift1,
    )


def snapshot_columns(state: DHState, params: DHParams) -> dict[str, np.ndarray]:
    j0, j1 = current_dh(state, params)
    return {
        "x": params.lattice.grid(),
        "Re_u": state.u.real,
        "Im_u": state.u.imag,
        "A0": state.a0,
        "A1": state.a1,
        "j0": j0,
        "j1": j1,
        "F01": field_strength_dh(state, params),
    }
