"""
The command line: run, sweep, theory
====================================

Everything the library does is reachable from YAML configs through three
subcommands. This script writes small configs to a temp directory, invokes
the CLI the way a shell user would, and shows what comes back.
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import yaml


def cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "diana.cli", *args],
        capture_output=True,
        text=True,
    )
    print(f"$ diana {' '.join(args)}")
    if proc.stdout:
        print(proc.stdout.rstrip())
    if proc.returncode != 0:
        print(proc.stderr.rstrip())
    print()
    return proc


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # ---- run: auto-selected parameters, bit accounting -------------------
    run_cfg = {
        "problem": {
            "kind": "quadratic",
            "workers": 2,
            "dim": 12,
            "condition_number": 8.0,
            "seed": 5,
            "sigma": 0.3,
        },
        "quantization": {"p": "inf", "block_size": 4},
        "alpha": "auto",
        "stepsize": {"kind": "constant", "gamma": "auto"},
        "iterations": 400,
        "seeds": [0, 1, 2],
        "record_every": 100,
        "count_bits": True,
    }
    (tmp / "run.yaml").write_text(yaml.safe_dump(run_cfg))
    cli("run", "--config", str(tmp / "run.yaml"), "--out", str(tmp / "run_out"))

    summary = json.loads((tmp / "run_out" / "summary.json").read_text())
    resolved = summary["config"]
    print(f"resolved alpha = {resolved['alpha']:.4f}, "
          f"gamma = {resolved['stepsize']['gamma']:.5f} "
          f"(a_p = {resolved['alpha_p']:.4f})")
    print(f"uplink traffic: {summary['gather_bits']} bits over "
          f"{resolved['iterations']} iterations x {len(resolved['seeds'])} seeds")
    print("final Lyapunov per seed:",
          [f"{row['lyapunov']:.2e}" for row in summary["per_seed"]])
    print()
    print("records.csv starts with:")
    for line in (tmp / "run_out" / "records.csv").read_text().splitlines()[:4]:
        print(" ", line)
    print()

    # ---- sweep: norm order x stepsize grid --------------------------------
    sweep_cfg = dict(run_cfg)
    sweep_cfg.pop("count_bits")
    sweep_cfg["sweep"] = {"p": [1, 2, "inf"]}
    sweep_cfg["iterations"] = 600
    (tmp / "sweep.yaml").write_text(yaml.safe_dump(sweep_cfg))
    cli("sweep", "--config", str(tmp / "sweep.yaml"), "--out", str(tmp / "sweep_out"))
    rows = (tmp / "sweep_out" / "sweep.csv").read_text().splitlines()
    header = rows[0].split(",")
    show = ["sweep_p", "lyapunov", "alpha", "gamma"]
    idx = [header.index(c) for c in show]
    print("sweep.csv (selected columns):")
    for line in rows:
        cells = line.split(",")
        print("  " + "  ".join(cells[i][:12].ljust(12) for i in idx))
    print("(larger p -> larger a_p -> larger auto-selected stepsize)")
    print()

    # ---- theory: the calculators without any simulation -------------------
    theory_cfg = {
        "theory": {
            "mode": "strongly-convex",
            "constants": {"L": 10, "mu": 1, "sigma2": 1, "n": 2},
            "dim": 20,
            "p": "inf",
            "V0": 20.0,
            "ks": [0, 500, 2000],
        }
    }
    (tmp / "theory.yaml").write_text(yaml.safe_dump(theory_cfg))
    cli("theory", "--config", str(tmp / "theory.yaml"), "--out", str(tmp / "theory_out"))
