"""Acceptance suite: every criterion runs from a config under configs/acceptance.

Each test prints (and the terminal summary repeats) one PASS/FAIL line.
"""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from helixfield import cli, fractal, output, symmetry
from helixfield.config import load_file

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs" / "acceptance"
CONFIGS = sorted(CONFIG_DIR.glob("*.toml"))


def _run(path: Path, out: Path) -> int:
    sub = load_file(path)["subcommand"]
    return cli.main([sub, "--config", str(path), "--output-dir", str(out)])


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    """Run every acceptance config twice into separate directories."""
    base = tmp_path_factory.mktemp("acceptance")
    result = {}
    for path in CONFIGS:
        dirs = []
        for rep in ("first", "second"):
            out = base / rep / path.stem
            assert _run(path, out) == 0, f"{path.name} failed to run"
            dirs.append(out)
        result[path.stem] = dirs
    return result


def diagnostics(runs, stem):
    return json.loads((runs[stem][0] / "manifest.json").read_text())["diagnostics"]


def metrics(runs, stem):
    return diagnostics(runs, stem)["metrics"]


def test_configs_present():
    stems = {p.stem for p in CONFIGS}
    for n in range(1, 11):
        assert any(s.startswith(f"c{n:02d}_") for s in stems), f"no config for criterion {n}"


def test_criterion_01_rotation_order(runs, acceptance):
    rows = (runs["c01_rotation_order"][0] / "rotate_demo.csv").read_text().splitlines()[1:]
    got = {tuple(r.split(",")[:2]): np.array([float(v) for v in r.split(",")[2:]]) for r in rows}
    # direct matrix arithmetic as the oracle
    rx, ry = symmetry.rotation_about_axis("x", math.pi / 2), symmetry.rotation_about_axis("y", math.pi / 2)
    e1 = np.array([1.0, 0.0, 0.0])
    xy = got[("y", "x")]  # Ry first, then Rx
    yx = got[("x", "y")]
    err = max(
        np.max(np.abs(xy - [0, 1, 0])),
        np.max(np.abs(yx - [0, 0, -1])),
        np.max(np.abs(xy - rx @ (ry @ e1))),
        np.max(np.abs(yx - ry @ (rx @ e1))),
    )
    ok = acceptance(1, "rotation order", err < 1e-12, f"max error {err:.1e}")
    assert ok


def test_criterion_02_su2_homomorphism(runs, acceptance):
    m = metrics(runs, "c02_su2_homomorphism")
    ok = m["pairs"] == 1000 and m["homomorphism_max_error"] < 1e-9 and m["double_cover_max_error"] < 1e-12
    acceptance(
        2,
        "SU(2) -> SO(3) homomorphism and double cover",
        ok,
        f"hom {m['homomorphism_max_error']:.1e}, cover {m['double_cover_max_error']:.1e}, {m['pairs']} pairs",
    )
    assert ok


def test_criterion_03_worked_example(runs, acceptance):
    text = (runs["c03_worked_example"][0] / "coords.csv").read_text().splitlines()[1:]
    v = {r.split(",")[0]: float(r.split(",")[1]) for r in text}
    ok = (
        abs(v["S"] - 0.6205) <= 5e-4
        and abs(v["B"] - 0.8602) <= 5e-4
        and abs(v["G"] - 0.8573) <= 5e-4
        and abs(v["G"] - 0.81) > 5e-4  # the 0.81 reference value is a known arithmetic slip
    )
    acceptance(3, "actor contributions", ok, f"G {v['G']:.4f} (reference 0.81), S {v['S']:.4f}, B {v['B']:.4f}")
    assert ok


def test_criterion_04_wave_fidelity(runs, acceptance):
    conv = metrics(runs, "c04_wave_convergence")
    energy = metrics(runs, "c04_wave_energy")
    ratio, drift = conv["ratio_0"], energy["relative_drift"]
    ok = 3.5 <= ratio <= 4.5 and drift < 1e-6
    acceptance(4, "wave convergence and energy", ok, f"ratio {ratio:.3f}, drift {drift:.1e}")
    assert ok


def test_criterion_05_dh_linearity_and_charge(runs, acceptance):
    res = metrics(runs, "c05_dh_superposition")["residual"]
    drift = metrics(runs, "c05_dh_charge")["charge_drift"]
    ok = res < 1e-10 and drift < 1e-4
    acceptance(5, "DH linearity and charge", ok, f"residual {res:.1e}, charge drift {drift:.1e}")
    assert ok


def test_criterion_06_gauge_invariance(runs, acceptance):
    m = metrics(runs, "c06_dh_gauge")
    worst = max(v for k, v in m.items() if k.endswith("_relative"))
    ok = worst < 1e-6
    acceptance(6, "DH gauge invariance", ok, f"worst relative change {worst:.1e}")
    assert ok


def test_criterion_07_th_nonlinearity(runs, acceptance):
    m = metrics(runs, "c07_th_superposition")
    r = {float(k.split("=")[1]): v for k, v in m.items()}
    monotone = r[0.25] < r[0.5] < r[1.0]
    ok = r[1.0] > 100 * r[0.0] and r[1.0] > 1e-10 and monotone
    acceptance(7, "TH nonlinearity", ok, f"g=0 {r[0.0]:.1e}, g=1 {r[1.0]:.2e}, monotone {monotone}")
    assert ok


def test_criterion_08_abelian_reduction(runs, acceptance):
    m = metrics(runs, "c08_abelian_limit")
    d0, d6 = m["deviation_g=0.0"], m["deviation_g=1e-06"]
    ok = d0 < 1e-12 and d6 < 1e-4
    acceptance(8, "Abelian reduction", ok, f"g=0 {d0:.1e}, g=1e-6 {d6:.1e}")
    assert ok


def test_criterion_09_rotation_covariance(runs, acceptance):
    d = metrics(runs, "c09_th_rotation")["max_abs_difference"]
    ok = d < 1e-9
    acceptance(9, "TH internal-rotation covariance", ok, f"max difference {d:.1e}")
    assert ok


def test_criterion_10_fractal_counts(runs, acceptance):
    m = metrics(runs, "c10_fractal_counts")
    ok = all(m[f"open_edges_d{d}"] == 3 * 2**d and m[f"nodes_d{d}"] == 3 * 2**d - 2 for d in range(13))
    ok = ok and m["dh_nodes"] == 1 and diagnostics(runs, "c10_fractal_counts")["checks"]["dh_static"]
    tree = fractal.import_tree((runs["c10_fractal_tree"][0] / "tree.json").read_text())
    ok = ok and len(tree.nodes) == 3 * 2**4 - 2
    acceptance(10, "fractal count law", ok, f"d=0..12 checked, d=12 nodes {m['nodes_d12']}")
    assert ok


def test_criterion_11_determinism(runs, acceptance):
    mismatched = []
    count = 0
    for stem, (a, b) in runs.items():
        files_a = sorted(p.name for p in a.iterdir() if p.name != "manifest.json")
        files_b = sorted(p.name for p in b.iterdir() if p.name != "manifest.json")
        if files_a != files_b:
            mismatched.append(stem)
            continue
        for name in files_a:
            count += 1
            if (a / name).read_bytes() != (b / name).read_bytes():
                mismatched.append(f"{stem}/{name}")
        # manifests agree on everything except the timestamp
        ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
        for doc in (ma, mb):
            doc.pop("created")
            doc["config"].pop("output_dir")
        if ma != mb:
            mismatched.append(f"{stem}/manifest.json")
    ok = not mismatched and count > 0
    acceptance(11, "determinism", ok, f"{count} data files over {len(runs)} runs, mismatches {mismatched or 'none'}")
    assert ok


def test_csv_outputs_reparse(runs):
    # every CSV written by the acceptance runs re-parses to finite values
    for a, _ in runs.values():
        for p in a.glob("*.csv"):
            with open(p) as fh:
                header = fh.readline()
            if header.startswith(("first,", "actor,", "quantity,")):
                continue
            _, cols = output.read_csv(p)
            assert all(np.all(np.isfinite(c)) for c in cols.values())
