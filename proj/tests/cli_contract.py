"""Exit-code and file contract of the pwstab command-line driver."""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]
failures = []


def run(*args, env=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env)


def expect(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def summary(stdout):
    return dict(line.split("=", 1) for line in stdout.splitlines() if "=" in line)


with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)

    r = run("build-wave", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--out", tmp)
    s = summary(r.stdout)
    expect("build-wave kdv exits 0", r.returncode == 0, r.stderr)
    expect("build-wave kdv residual < 1e-8", float(s.get("residual", 1)) < 1e-8)
    doc = json.loads((out / "kdv_wave.json").read_text())
    expect("wave json schema", all(k in doc for k in ("system", "L", "c", "A1", "A2", "mu", "params", "grid")))
    expect("wave csv files", (out / "kdv_phi1.csv").exists() and (out / "kdv_phi2.csv").exists())

    r = run("build-wave", "--system", "logkdv", "--c", "1", "--A", "2", "--out", tmp)
    s = summary(r.stdout)
    expect("build-wave logkdv exits 0", r.returncode == 0, r.stderr)
    expect("logkdv reports the emergent period", float(s.get("period", 0)) > 0)
    expect("logkdv min phi > 1 flag", float(s.get("above_one", 0)) == 1.0)

    r = run("build-wave", "--system", "logkdv", "--c", "1", "--A", "1", "--period", "4.0", "--tag", "target", "--out", tmp)
    expect("logkdv period targeting", r.returncode == 0 and abs(float(summary(r.stdout)["L"]) - 4.0) < 1e-8, r.stderr)

    r = run("build-wave", "--system", "kdv", "--L", "6.2831853", "--out", tmp)
    expect("missing parameter exits 2", r.returncode == 2, f"{r.returncode} {r.stderr}")
    r = run("build-wave", "--system", "kdv", "--bogus", "1")
    expect("unknown flag exits 2", r.returncode == 2)
    r = run("build-wave", "--system", "kdv", "--L", "6.28", "--k", "1.5", "--out", tmp)
    expect("domain error exits 2", r.returncode == 2)
    r = run("build-wave", "--system", "kdv", "--L", "6.28", "--k", "0.5", "--N", "100", "--out", tmp)
    expect("non power of two exits 2", r.returncode == 2)

    r = run("check", "--system", "kdv", "--coeffs", "0.5,0,0,0.5", "--mu", "1", "--L", "6.2831853",
            "--k", "0.5", "--N", "128", "--tag", "decoupled", "--out", tmp)
    rep = json.loads((out / "decoupled_report.json").read_text())
    expect("decoupled check exits 1", r.returncode == 1, r.stderr)
    expect("decoupled negative_count 2", rep["h1"]["negative_count"] == 2)

    r = run("check", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--N", "128", "--out", tmp)
    rep = json.loads((out / "kdv_report.json").read_text())
    expect("kdv det D < 1/2 check exits 0", r.returncode == 0, r.stdout + r.stderr)
    expect("report carries det D and I", rep["h1"]["criterion_value"] < 0.5 and rep["h2"]["I"] < 0)

    r = run("check", "--system", "mkdv", "--coeffs", "1,0,1,0,1", "--mu", "0", "--L", "6.2831853",
            "--k", "0.5", "--N", "128", "--tag", "boundary", "--out", tmp)
    rep = json.loads((out / "boundary_report.json").read_text())
    expect("mkdv boundary exits 1", r.returncode == 1, r.stderr)
    expect("mkdv boundary note", "boundary" in rep["h1"]["note"])

    r = run("check", "--system", "mkdv", "--coeffs", "1,0,1,0,1", "--L", "6.2831853", "--k", "0.5",
            "--out", tmp)
    expect("identically satisfied relation needs --mu", r.returncode == 2)

    for system, extra in (("logkdv", ["--c", "1", "--A", "2"]), ("lkk", ["--omega", "2", "--L", "6.2831853", "--W", "0.02"])):
        r = run("check", "--system", system, "--N", "128", *extra, "--out", tmp)
        expect(f"{system} check exits 0", r.returncode == 0, r.stdout + r.stderr)

    r = run("evolve", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--N", "128", "--delta", "0",
            "--T", "2", "--tag", "exact", "--out", tmp)
    s = summary(r.stdout)
    expect("exact evolve exits 0", r.returncode == 0, r.stderr)
    expect("exact evolve max rho < 1e-5", float(s.get("max_rho", 1)) < 1e-5)
    hist = (out / "exact_history.csv").read_text().splitlines()
    expect("history header", hist[0] == "t,E,F,M,rho")

    r = run("evolve", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--N", "128", "--T", "2",
            "--tag", "pert", "--out", tmp)
    expect("perturbed evolve bounded", r.returncode == 0 and summary(r.stdout)["bounded"] == "true", r.stderr)

    r = run("evolve", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--dt", "0.5", "--out", tmp)
    expect("dt above the bound is rejected", r.returncode == 2 and "dt" in r.stderr, r.stderr)

    r = run("evolve", "--system", "mkdv", "--coeffs", "2,0,0,0,0", "--mu", "0", "--L", "6.2831853", "--k", "0.99",
            "--N", "64", "--dt", "0.05", "--cfl", "1e9", "--T", "50", "--tag", "blow", "--out", tmp)
    expect("blow-up exits 3 with partial csv", r.returncode == 3 and (out / "blow_history.csv").exists(),
           f"{r.returncode} {r.stderr}")

    r = run("phase-plane", "--c", "1", "--A", "2", "--orbits", "5", "--samples", "40", "--out", tmp)
    rows = (out / "logkdv_phase.csv").read_text().splitlines()
    expect("phase-plane exits 0", r.returncode == 0, r.stderr)
    expect("phase-plane has orbits above one", int(summary(r.stdout)["orbits_above_one"]) > 0)
    eq_rows = [row.split(",") for row in rows[1:] if ",equilibrium," in row]
    expect("equilibrium rows have zero velocity", eq_rows and all(float(row[3]) == 0.0 for row in eq_rows))

    cfg = out / "run.cfg"
    cfg.write_text("# flat config\nsystem = kdv\nL = 6.2831853\nk = 0.3\nN = 64\ntag = fromcfg\n")
    r = run("build-wave", "--config", str(cfg), "--k", "0.6", "--out", tmp)
    doc = json.loads((out / "fromcfg_wave.json").read_text())
    expect("config file read and flags override", r.returncode == 0 and doc["params"]["k"] == 0.6, r.stderr)

    env = dict(os.environ, PWSTAB_OUTPUT_DIR=str(out / "envdir"))
    r = run("build-wave", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--N", "64", env=env)
    expect("output directory from the environment", (out / "envdir" / "kdv_wave.json").exists(), r.stderr)

    r1 = run("build-wave", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--tag", "d1", "--out", tmp)
    r2 = run("build-wave", "--system", "kdv", "--L", "6.2831853", "--k", "0.5", "--tag", "d2", "--out", tmp)
    expect("byte-identical outputs",
           (out / "d1_wave.json").read_bytes() == (out / "d2_wave.json").read_bytes()
           and (out / "d1_phi1.csv").read_bytes() == (out / "d2_phi1.csv").read_bytes())

    r = run("sweep", "--command", "check", "--param", "k", "--values", "0.3,0.5,0.7", "--jobs", "2",
            "--system", "kdv", "--L", "6.2831853", "--N", "64", "--tag", "sw", "--out", tmp)
    sweep = json.loads((out / "sw_sweep.json").read_text())
    expect("sweep exits 0", r.returncode == 0, r.stdout + r.stderr)
    expect("sweep writes disjoint files", all((out / f"sw_k_{i}_report.json").exists() for i in range(3)))
    expect("sweep summary", [e["exit"] for e in sweep] == [0, 0, 0])

if failures:
    print(f"{len(failures)} contract checks failed")
    sys.exit(1)
print("all contract checks passed")
