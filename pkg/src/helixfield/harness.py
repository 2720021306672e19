"""Run-and-compare experiments behind ``helixfield compare``.

Each mode takes a resolved configuration and returns a :class:`Comparison`:
a flat table of measured quantities, the tolerances they were judged
against, and an overall verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import field_dh, field_th, fractal, symmetry, waves
from .config import lattice
from .errors import ConfigError
from .initial import InitialCondition, motion_velocity


@dataclass
class Comparison:
    mode: str
    rows: list = field(default_factory=list)  # (quantity, value)
    checks: dict = field(default_factory=dict)  # name -> bool

    def add(self, name: str, value) -> None:
        self.rows.append((name, value))

    def check(self, name: str, ok: bool) -> None:
        self.checks[name] = bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def diagnostics(self) -> dict:
        return {"mode": self.mode, "metrics": dict(self.rows), "checks": self.checks, "passed": self.passed}


def _parse_entry(entry: dict, vector: bool) -> tuple[InitialCondition, str, float]:
    desc = {k: v for k, v in entry.items() if k not in ("motion", "omega")}
    return InitialCondition.parse(desc, vector=vector), entry["motion"], entry.get("omega", 0.0)


def build_wave(cfg: dict) -> tuple[waves.WaveParams, waves.VectorWaveState]:
    params = lattice(cfg)
    x, length = params.grid(), params.length
    ic, motion, _ = _parse_entry(cfg["initial"]["c"], vector=True)
    c0 = ic.vector(x, length)
    vel = motion_velocity(ic, x, length, params.a, motion, vector=True)
    return params, waves.initial_state(c0, params, vel)


def dh_params(cfg: dict, e=None) -> field_dh.DHParams:
    return field_dh.DHParams(
        e=cfg["e"] if e is None else e,
        lattice=lattice(cfg),
        ceiling=cfg["ceiling"],
        iterations=cfg["iterations"],
    )


def build_dh(group: dict, params: field_dh.DHParams) -> field_dh.DHState:
    lat = params.lattice
    x, length = lat.grid(), lat.length
    fields, rates = {}, {}
    for name in ("u", "A0", "A1"):
        complex_ = name == "u"
        ic, motion, omega = _parse_entry(group[name], vector=False)
        f = ic.scalar(x, length, complex_=complex_)
        v = motion_velocity(ic, x, length, 1.0, motion, vector=False, complex_=complex_)
        if omega:
            v = (0 if v is None else v) - 1j * omega * f
        fields[name], rates[name] = f, v
    return field_dh.initial_state(
        params,
        fields["u"],
        rates["u"],
        a0=fields["A0"],
        a1=fields["A1"],
        a0_velocity=rates["A0"],
        a1_velocity=rates["A1"],
    )


def th_params(cfg: dict, g=None) -> field_th.THParams:
    return field_th.THParams(
        g=cfg["g"] if g is None else g,
        lattice=lattice(cfg),
        ceiling=cfg["ceiling"],
        iterations=cfg["iterations"],
    )


def build_th(group: dict, params: field_th.THParams) -> field_th.THFieldState:
    lat = params.lattice
    x, length = lat.grid(), lat.length
    fields, rates = {}, {}
    for name in ("u", "W0", "W1"):
        ic, motion, _ = _parse_entry(group[name], vector=True)
        fields[name] = ic.vector(x, length)
        rates[name] = motion_velocity(ic, x, length, 1.0, motion, vector=True)
    return field_th.initial_state(
        params,
        fields["u"],
        fields["W0"],
        fields["W1"],
        rates["u"],
        rates["W0"],
        rates["W1"],
    )


def _relative_drift(values) -> float:
    values = np.asarray(values, dtype=float)
    scale = abs(values[0])
    if scale == 0:
        return float(np.max(np.abs(values - values[0])))
    return float(np.max(np.abs(values - values[0])) / scale)


def su2_homomorphism(cfg: dict) -> Comparison:
    tol = cfg["tolerances"]
    rng = np.random.default_rng(cfg["seed"])
    hom = cover = 0.0
    for _ in range(cfg["pairs"]):
        u1, u2 = symmetry.random_su2(rng), symmetry.random_su2(rng)
        lhs = symmetry.adjoint_map(u1 @ u2)
        rhs = symmetry.compose(symmetry.adjoint_map(u1), symmetry.adjoint_map(u2))
        hom = max(hom, float(np.max(np.abs(lhs - rhs))))
        cover = max(cover, float(np.max(np.abs(symmetry.adjoint_map(u1) - symmetry.adjoint_map(-u1)))))
    out = Comparison("su2-homomorphism")
    out.add("pairs", cfg["pairs"])
    out.add("homomorphism_max_error", hom)
    out.add("double_cover_max_error", cover)
    out.check("homomorphism", hom < tol["homomorphism"])
    out.check("double_cover", cover < tol["double_cover"])
    return out


def _wave_reference(cfg: dict, params: waves.WaveParams, t: float) -> np.ndarray:
    ic, motion, _ = _parse_entry(cfg["initial"]["c"], vector=True)

    def profile(x):
        return ic.vector(np.mod(x, params.length), params.length)

    x = params.grid()
    if motion == "standing":
        return waves.periodic_dalembert(profile, x, t, params)
    return waves.dalembert(profile, x, t, params.a, -1 if motion == "right" else 1)


def wave_convergence(cfg: dict) -> Comparison:
    tol = cfg["tolerances"]
    base = lattice(cfg)
    out = Comparison("wave-convergence")
    errors = []
    for level in range(cfg["halvings"] + 1):
        f = 2**level
        sub = dict(cfg, nx=base.nx * f, dx=base.dx / f, dt=base.dt / f)
        params, init = build_wave(sub)
        steps = cfg["steps"] * f
        final = waves.simulate_wave(init, params, steps, stride=max(steps, 1))[-1]
        exact = _wave_reference(sub, params, steps * params.dt)
        err = waves.l2_norm(final.current - exact, params.dx)
        errors.append(err)
        out.add(f"l2_error_nx{params.nx}", err)
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
    for i, r in enumerate(ratios):
        out.add(f"ratio_{i}", r)
        out.check(f"ratio_{i}", tol["ratio_min"] <= r <= tol["ratio_max"])
    return out


def wave_energy(cfg: dict) -> Comparison:
    params, state = build_wave(cfg)
    energies = [waves.wave_energy(state, params)]
    for _ in range(cfg["steps"]):
        state = waves.step_wave(state, params)
        energies.append(waves.wave_energy(state, params))
    drift = _relative_drift(energies)
    out = Comparison("wave-energy")
    out.add("initial_energy", energies[0])
    out.add("final_energy", energies[-1])
    out.add("relative_drift", drift)
    out.check("drift", drift < cfg["tolerances"]["drift"])
    return out


def _require_sourceless(group: dict, key: str) -> None:
    if group["u"]["type"] != "zero" or group["u"].get("omega", 0.0) != 0.0:
        raise ConfigError(f"{key}.u", "superposition tests need u = 0 (source-free gauge field)")


def dh_superposition(cfg: dict) -> Comparison:
    _require_sourceless(cfg["state_a"], "state_a")
    _require_sourceless(cfg["state_b"], "state_b")
    params = dh_params(cfg)
    a = build_dh(cfg["state_a"], params)
    b = build_dh(cfg["state_b"], params)
    steps = cfg["steps"]
    both = field_dh.evolve_dh(a + b, params, steps)
    ea = field_dh.evolve_dh(a, params, steps)
    eb = field_dh.evolve_dh(b, params, steps)
    dx = params.lattice.dx
    diff = np.concatenate([both.a0 - ea.a0 - eb.a0, both.a1 - ea.a1 - eb.a1, np.abs(both.u - ea.u - eb.u)])
    residual = waves.l2_norm(diff, dx)
    out = Comparison("dh-superposition")
    out.add("residual", residual)
    out.check("residual", residual < cfg["tolerances"]["residual"])
    return out


def dh_conservation(cfg: dict) -> Comparison:
    tol = cfg["tolerances"]
    params = dh_params(cfg)
    state = build_dh(cfg["initial"], params)
    charges = [field_dh.total_charge(state, params)]
    if charges[0] == 0:
        raise ConfigError("initial.u", "initial charge is zero, so a relative drift is undefined; set omega or motion")
    energies = [field_dh.energy_dh(state, params)["total"]]
    for _ in range(cfg["steps"]):
        state = field_dh.step_dh(state, params)
        charges.append(field_dh.total_charge(state, params))
        energies.append(field_dh.energy_dh(state, params)["total"])
    out = Comparison("dh-conservation")
    out.add("initial_charge", charges[0])
    out.add("charge_drift", _relative_drift(charges))
    out.add("initial_energy", energies[0])
    out.add("energy_drift", _relative_drift(energies))
    out.check("charge_drift", _relative_drift(charges) < tol["charge_drift"])
    out.check("energy_drift", _relative_drift(energies) < tol["energy_drift"])
    return out


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.max(np.abs(a)))
    diff = float(np.max(np.abs(a - b)))
    return diff / scale if scale > 0 else diff


def dh_gauge(cfg: dict) -> Comparison:
    """Compare a run with the run started from gauge-transformed data.

    ``Lambda(x) = k x`` with ``k = 2 pi windings / L`` so that the phase
    is single-valued on the periodic lattice.
    """
    tol = cfg["tolerances"]["relative"]
    params = dh_params(cfg)
    if params.e == 0:
        raise ConfigError("e", "gauge covariance needs a nonzero coupling")
    lat = params.lattice
    k = 2.0 * math.pi * cfg["windings"] / lat.length
    state = build_dh(cfg["initial"], params)
    gauged = field_dh.gauge_transform_dh(state, params, k * lat.grid())
    out = Comparison("dh-gauge")
    out.add("k", k)
    for label, s, t in (("initial", state, gauged), ("final", *(field_dh.evolve_dh(z, params, cfg["steps"]) for z in (state, gauged)))):
        d_u2 = _rel(np.abs(s.u) ** 2, np.abs(t.u) ** 2)
        d_f = _rel(field_dh.field_strength_dh(s, params), field_dh.field_strength_dh(t, params))
        es, et = field_dh.energy_dh(s, params)["total"], field_dh.energy_dh(t, params)["total"]
        d_e = abs(es - et) / abs(es) if es else abs(es - et)
        out.add(f"{label}_u2_relative", d_u2)
        out.add(f"{label}_F01_relative", d_f)
        out.add(f"{label}_energy_relative", d_e)
        for name, v in (("u2", d_u2), ("F01", d_f), ("energy", d_e)):
            out.check(f"{label}_{name}", v < tol)
    return out


def _sorted_couplings(cfg):
    return sorted(cfg["couplings"], key=abs)


def th_superposition(cfg: dict) -> Comparison:
    tol = cfg["tolerances"]
    _require_sourceless(cfg["state_a"], "state_a")
    _require_sourceless(cfg["state_b"], "state_b")
    out = Comparison("th-superposition")
    residuals = {}
    for g in _sorted_couplings(cfg):
        params = th_params(cfg, g=g)
        a = build_th(cfg["state_a"], params)
        b = build_th(cfg["state_b"], params)
        residuals[g] = field_th.self_interaction_residual(a, b, params, cfg["steps"])
        out.add(f"residual_g={g!r}", residuals[g])
    if 0.0 in residuals:
        out.check("linear_residual", residuals[0.0] < tol["linear_residual"])
    nonzero = [g for g in residuals if g != 0]
    if 0.0 in residuals and nonzero:
        largest = residuals[nonzero[-1]]
        out.check("nonlinear_exceeds_linear", largest > tol["nonlinear_factor"] * residuals[0.0] and largest > tol["linear_residual"])
    if len(nonzero) > 1:
        vals = [residuals[g] for g in nonzero]
        out.check("monotone_in_g", all(p < q for p, q in zip(vals, vals[1:])))
    return out


def abelian_limit(cfg: dict) -> Comparison:
    tol = cfg["tolerances"]
    out = Comparison("abelian-limit")
    reference = None
    for g in _sorted_couplings(cfg):
        params = th_params(cfg, g=g)
        state = build_th(cfg["initial"], params)
        if reference is None:
            reference = field_th.decoupled_reference(state, params, cfg["steps"])
        dev = field_th.abelian_limit_check(state, params, cfg["steps"], reference)
        out.add(f"deviation_g={g!r}", dev)
        if g == 0:
            out.check("g=0", dev < tol["exact"])
        elif abs(g) <= tol["weak_coupling_max"]:
            out.check(f"g={g!r}", dev < tol["weak"])
    return out


def th_rotation(cfg: dict) -> Comparison:
    params = th_params(cfg)
    state = build_th(cfg["initial"], params)
    rot = symmetry.random_rotation(np.random.default_rng(cfg["seed"]))
    a = field_th.evolve_th(field_th.rotate_internal(state, rot), params, cfg["steps"])
    b = field_th.rotate_internal(field_th.evolve_th(state, params, cfg["steps"]), rot)
    diff = float(np.max(np.abs(a.current_fields() - b.current_fields())))
    out = Comparison("th-rotation")
    out.add("max_abs_difference", diff)
    out.add("field_scale", float(np.max(np.abs(b.current_fields()))))
    out.check("covariance", diff < cfg["tolerances"]["covariance"])
    return out


def th_energy(cfg: dict) -> Comparison:
    params = th_params(cfg)
    state = build_th(cfg["initial"], params)
    energies = [field_th.energy_th(state, params)["total"]]
    for _ in range(cfg["steps"]):
        state = field_th.step_th(state, params)
        energies.append(field_th.energy_th(state, params)["total"])
    drift = _relative_drift(energies)
    out = Comparison("th-energy")
    out.add("initial_energy", energies[0])
    out.add("final_energy", energies[-1])
    out.add("relative_drift", drift)
    out.check("drift", drift < cfg["tolerances"]["drift"])
    return out


def fractal_counts(cfg: dict) -> Comparison:
    out = Comparison("fractal-counts")
    tree = fractal.seed_tree("TH")
    for d in range(cfg["max_generations"] + 1):
        if d:
            tree = fractal.grow(tree, 1)
        stats = fractal.tree_stats(tree)
        out.add(f"nodes_d{d}", stats.nodes)
        out.add(f"open_edges_d{d}", stats.open_edges)
        out.check(f"d{d}", stats.open_edges == 3 * 2**d and stats.nodes == 3 * 2**d - 2)
    dh = fractal.grow(fractal.seed_tree("DH"), cfg["max_generations"])
    out.add("dh_nodes", len(dh.nodes))
    out.check("dh_static", len(dh.nodes) == 1 and dh.growth_blocked)
    return out


MODES = {
    "su2-homomorphism": su2_homomorphism,
    "wave-convergence": wave_convergence,
    "wave-energy": wave_energy,
    "dh-superposition": dh_superposition,
    "dh-conservation": dh_conservation,
    "dh-gauge": dh_gauge,
    "th-superposition": th_superposition,
    "abelian-limit": abelian_limit,
    "th-rotation": th_rotation,
    "th-energy": th_energy,
    "fractal-counts": fractal_counts,
}


def run_comparison(cfg: dict) -> Comparison:
    return MODES[cfg["mode"]](cfg)
