"""``helixfield`` command line.

Every subcommand reads an optional TOML config (``--config``), applies
``--set key=value`` overrides, validates the result and writes its data
files plus a ``manifest.json`` into the output directory.

Exit status: 0 success, 2 configuration error, 3 numerical instability,
4 I/O error.  Failures print one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, config, coords, field_dh, field_th, fractal, harness, symmetry, waves
from .errors import ConfigError, InstabilityError
from .output import OutputError, Snapshot, emit_csv, emit_table, emit_text, resolve_output_dir, write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_INSTABILITY, EXIT_IO = 0, 2, 3, 4


def _lattice_meta(lat: waves.WaveParams) -> dict:
    return {"nx": lat.nx, "dx": lat.dx, "dt": lat.dt, "courant": lat.courant}


def _drift(values) -> float:
    values = np.asarray(values, dtype=float)
    scale = abs(values[0]) or 1.0
    return float(np.max(np.abs(values - values[0])) / scale)


def run_simulate_wave(cfg: dict, out: Path):
    params, state = harness.build_wave(cfg)
    x = params.grid()
    states = waves.simulate_wave(state, params, cfg["steps"], cfg["stride"])
    series = [
        Snapshot(s.time_index, s.time_index * params.dt, {"x": x, **{c: s.current[:, i] for i, c in enumerate(waves.COMPONENTS)}})
        for s in states
    ]
    files = emit_csv(series, ("x", *waves.COMPONENTS), out, "wave", cfg["long_format"])
    energies = [waves.wave_energy(s, params) for s in states]
    diag = {"energy_initial": energies[0], "energy_final": energies[-1], "energy_relative_drift": _drift(energies)}
    return files, diag


def _stream(state, step, steps, stride, snapshot):
    series = [snapshot(state)]
    for k in range(1, steps + 1):
        state = step(state)
        if k % stride == 0 or k == steps:
            series.append(snapshot(state))
    return series


def run_simulate_dh(cfg: dict, out: Path):
    params = harness.dh_params(cfg)
    lat = params.lattice
    state = harness.build_dh(cfg["initial"], params)

    def snap(s):
        meta = {
            "charge": field_dh.total_charge(s, params),
            "energy": field_dh.energy_dh(s, params)["total"],
            "lorenz_residual_max": float(np.max(np.abs(field_dh.lorenz_residual(s, params)))),
        }
        return Snapshot(s.time_index, s.time_index * lat.dt, field_dh.snapshot_columns(s, params), meta)

    series = _stream(state, lambda s: field_dh.step_dh(s, params), cfg["steps"], cfg["stride"], snap)
    meta = {"model": "DH", "e": params.e, **_lattice_meta(lat), "steps": cfg["steps"], "iterations": params.iterations}
    files = emit_csv(series, field_dh.CSV_COLUMNS, out, "dh", cfg["long_format"], meta)
    charges = [s.meta["charge"] for s in series]
    energies = [s.meta["energy"] for s in series]
    diag = {
        "charge_initial": charges[0],
        "charge_relative_drift": _drift(charges),
        "energy_initial": energies[0],
        "energy_relative_drift": _drift(energies),
        "lorenz_residual_max_final": series[-1].meta["lorenz_residual_max"],
    }
    return files, diag


def run_simulate_th(cfg: dict, out: Path):
    params = harness.th_params(cfg)
    lat = params.lattice
    state = harness.build_th(cfg["initial"], params)

    def snap(s):
        meta = {
            "energy": field_th.energy_th(s, params)["total"],
            "lorenz_residual_max": float(np.max(np.abs(field_th.lorenz_residual(s, params)))),
        }
        return Snapshot(s.time_index, s.time_index * lat.dt, field_th.snapshot_columns(s, params), meta)

    series = _stream(state, lambda s: field_th.step_th(s, params), cfg["steps"], cfg["stride"], snap)
    meta = {"model": "TH", "g": params.g, **_lattice_meta(lat), "steps": cfg["steps"], "iterations": params.iterations}
    files = emit_csv(series, field_th.CSV_COLUMNS, out, "th", cfg["long_format"], meta)
    energies = [s.meta["energy"] for s in series]
    diag = {
        "energy_initial": energies[0],
        "energy_relative_drift": _drift(energies),
        "lorenz_residual_max_final": series[-1].meta["lorenz_residual_max"],
    }
    return files, diag


def run_rotate_demo(cfg: dict, out: Path):
    a, b = cfg["axes"]
    ra = symmetry.rotation_about_axis(a, cfg["angle"])
    rb = symmetry.rotation_about_axis(b, cfg["angle"])
    v = np.asarray(cfg["vector"], dtype=float)
    # "first" is applied to the vector before "second"
    rows = []
    for first, second, m in ((b, a, symmetry.compose(ra, rb)), (a, b, symmetry.compose(rb, ra))):
        rows.append([first, second, *(float(c) for c in m @ v)])
    path = emit_table(rows, ["first", "second", "v_x", "v_y", "v_z"], out / "rotate_demo.csv")
    diag = {
        "commutator_defect": symmetry.commutator_defect(ra, rb),
        "orders_differ": bool(not np.allclose(rows[0][2:], rows[1][2:], atol=1e-12)),
    }
    return [path], diag


def run_coords(cfg: dict, out: Path):
    m = np.asarray(cfg["matrix"], dtype=float)
    contrib = coords.actor_contributions(m)
    unit = coords.normalize_th_vector(contrib)
    regime = coords.classify_regime(unit, cfg["tol_angle"])
    rows = [[name, float(c), float(u)] for name, c, u in zip(("G", "S", "B"), contrib, unit)]
    path = emit_table(rows, ["actor", "contribution", "unit"], out / "coords.csv")
    diag = {"norm": float(np.linalg.norm(contrib)), "regime": regime.value, "determinant": float(np.linalg.det(m))}
    return [path], diag


def run_fractal(cfg: dict, out: Path):
    tree = fractal.grow(fractal.seed_tree(cfg["mode"]), cfg["generations"])
    files = [emit_text(fractal.export_tree(tree, fmt), out / f"tree.{fmt}") for fmt in cfg["formats"]]
    stats = fractal.tree_stats(tree)
    rows = [[d, n] for d, n in enumerate(stats.nodes_per_depth)]
    files.append(emit_table(rows, ["depth", "nodes"], out / "depth_counts.csv"))
    diag = {
        "nodes": stats.nodes,
        "open_edges": stats.open_edges,
        "branching_factor": stats.branching_factor,
        "growth_blocked": tree.growth_blocked,
    }
    return files, diag


def run_compare(cfg: dict, out: Path):
    result = harness.run_comparison(cfg)
    path = emit_table([[k, float(v)] for k, v in result.rows], ["quantity", "value"], out / f"{cfg['mode']}.csv")
    return [path], result.diagnostics()


RUNNERS = {
    "simulate-wave": run_simulate_wave,
    "simulate-dh": run_simulate_dh,
    "simulate-th": run_simulate_th,
    "rotate-demo": run_rotate_demo,
    "coords": run_coords,
    "fractal": run_fractal,
    "compare": run_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helixfield", description="Triple-helix gauge-field toolkit.")
    parser.add_argument("--version", action="version", version=f"helixfield {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in config.SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", "-c", help="TOML config file, or a manifest.json from an earlier run")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a config value (dotted keys, TOML values)")
        p.add_argument("--output-dir", "-o", help="output directory (overrides output_dir)")
        if name == "compare":
            p.add_argument("--mode", choices=sorted(harness.MODES))
        if name.startswith("simulate"):
            p.add_argument("--long-format", action="store_true", default=None, help="write one long-format CSV")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    raw = config.load_file(args.config) if args.config else {}
    declared = raw.get("subcommand")
    if declared is not None and declared != args.subcommand:
        raise ConfigError("subcommand", f"config is for {declared!r}, not {args.subcommand!r}")
    if getattr(args, "mode", None):
        raw["mode"] = args.mode
    if args.output_dir:
        raw["output_dir"] = args.output_dir
    if getattr(args, "long_format", None):
        raw["long_format"] = True
    cfg = config.resolve(args.subcommand, raw)
    if args.overrides:
        # overrides land on the fully resolved tree so partial tables work
        overrides = [config.parse_override(o) for o in args.overrides]
        cfg = config.resolve(args.subcommand, config.apply_overrides(cfg, overrides))
    if cfg["output_dir"] is None:
        suffix = f"-{cfg['mode']}" if args.subcommand == "compare" else ""
        cfg["output_dir"] = f"out/{args.subcommand}{suffix}"
    return cfg


def _fail(kind: str, code: int, **fields) -> int:
    print(json.dumps({"error": kind, **fields}, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = resolve_output_dir(cfg["output_dir"], cfg["output_dir"])
        files, diag = RUNNERS[args.subcommand](cfg, out)
        manifest = write_manifest(out, cfg, diag, files)
    except ConfigError as exc:
        return _fail("config", EXIT_CONFIG, key=exc.key, reason=exc.reason)
    except InstabilityError as exc:
        return _fail("instability", EXIT_INSTABILITY, step=exc.step, field=exc.field, magnitude=exc.magnitude)
    except OutputError as exc:
        return _fail("io", EXIT_IO, reason=str(exc))
    if args.subcommand == "compare":
        verdict = "PASS" if diag["passed"] else "FAIL"
        print(f"{cfg['mode']}: {verdict}")
    print(str(manifest))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
