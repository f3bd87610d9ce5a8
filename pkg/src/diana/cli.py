"""Command-line front end: run one configuration, sweep a grid, or print
theory numbers. Configurations are YAML files (see docs/config-format.md);
outputs are a CSV of telemetry rows plus a JSON summary, both deterministic
for a fixed config (wall times live only in the summary).

Exit codes: 0 success, 2 configuration or validation error, 3 divergence.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import __version__, problems, prox, simnet, theory
from .optim import (
    ConstantStepsize,
    DecreasingStepsize,
    DianaConfig,
    RunRecord,
    run,
)
from .quantize import BlockLayout, norm_ratio_floor

CSV_COLUMNS = [
    "seed",
    "k",
    "objective",
    "grad_norm",
    "lyapunov",
    "nonconvex_gap",
    "bits_up",
    "diverged",
]


class ConfigError(ValueError):
    """Configuration problem, reported with its field path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _get(cfg: dict, key: str, path: str, default=None, required: bool = False):
    if key not in cfg:
        if required:
            _fail(f"{path}.{key}" if path else key, "missing required field")
        return default
    return cfg[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _parse_p(value, path: str) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        _fail(path, f"expected a number >= 1 or 'inf', got {value!r}")
    p = _as_number(value, path)
    if math.isnan(p) or p < 1:
        _fail(path, f"norm order must be >= 1, got {p}")
    return p


def _version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except OSError:
        pass
    return __version__


def _build_problem(cfg: dict, path: str = "problem"):
    if not isinstance(cfg, dict):
        _fail(path, "expected a mapping")
    kind = _get(cfg, "kind", path, required=True)
    if kind == "quadratic":
        prob = problems.quadratic_problem(
            n=int(_as_number(_get(cfg, "workers", path, 2), f"{path}.workers")),
            dim=int(_as_number(_get(cfg, "dim", path, 20), f"{path}.dim")),
            condition_number=_as_number(
                _get(cfg, "condition_number", path, 10.0), f"{path}.condition_number"
            ),
            seed=int(_as_number(_get(cfg, "seed", path, 0), f"{path}.seed")),
            sigma=_as_number(_get(cfg, "sigma", path, 0.0), f"{path}.sigma"),
        )
    elif kind == "logistic":
        data_path = _get(cfg, "path", path, required=True)
        if not Path(data_path).exists():
            _fail(f"{path}.path", f"no such file: {data_path}")
        batch = _get(cfg, "batch_size", path)
        prob = problems.logistic_problem(
            data_path,
            n_workers=int(_as_number(_get(cfg, "workers", path, 2), f"{path}.workers")),
            lambda2=_as_number(_get(cfg, "lambda2", path, 0.0), f"{path}.lambda2"),
            partition_seed=int(
                _as_number(_get(cfg, "partition_seed", path, 0), f"{path}.partition_seed")
            ),
            partition=_get(cfg, "partition", path, "shuffled"),
            sigma=_as_number(_get(cfg, "sigma", path, 0.0), f"{path}.sigma"),
            batch_size=None if batch is None else int(_as_number(batch, f"{path}.batch_size")),
        )
    elif kind == "rosenbrock":
        prob = problems.rosenbrock_split()
    else:
        _fail(f"{path}.kind", f"unknown problem kind {kind!r}")
    return prob


def _build_regularizer(cfg, path: str = "regularizer") -> prox.Regularizer:
    if cfg is None:
        return prox.Regularizer()
    if not isinstance(cfg, dict):
        _fail(path, "expected a mapping")
    kind = _get(cfg, "kind", path, "none")
    lam1 = _as_number(_get(cfg, "lambda1", path, 0.0), f"{path}.lambda1")
    lam2 = _as_number(_get(cfg, "lambda2", path, 0.0), f"{path}.lambda2")
    if kind == "none":
        return prox.Regularizer()
    if kind == "l1":
        return prox.L1(lam1)
    if kind == "l2":
        return prox.SquaredL2(lam2)
    if kind == "elastic":
        return prox.ElasticNet(lam1, lam2)
    if kind == "box":
        return prox.Box(
            _as_number(_get(cfg, "lower", path, -1.0), f"{path}.lower"),
            _as_number(_get(cfg, "upper", path, 1.0), f"{path}.upper"),
        )
    _fail(f"{path}.kind", f"unknown regularizer kind {kind!r}")


def _build_layout(cfg, dim: int, path: str = "quantization") -> BlockLayout:
    block = _get(cfg or {}, "block_size", path)
    if block is None:
        return BlockLayout.full(dim)
    block = int(_as_number(block, f"{path}.block_size"))
    if block < 1 or block > dim:
        _fail(f"{path}.block_size", f"must lie in [1, {dim}], got {block}")
    return BlockLayout.uniform(dim, block)


def _resolve_run(cfg: dict, seed_offset: int = 0) -> dict:
    """Validate a run config and resolve 'auto' parameters via the theory
    module. Returns everything needed to call optim.run plus an echo of the
    resolved values."""
    if not isinstance(cfg, dict):
        _fail("", "top level must be a mapping")
    method = _get(cfg, "method", "", "diana")
    if method not in ("diana", "baseline"):
        _fail("method", f"expected 'diana' or 'baseline', got {method!r}")
    prob = _build_problem(_get(cfg, "problem", "", required=True))
    reg = _build_regularizer(_get(cfg, "regularizer", ""))
    qcfg = _get(cfg, "quantization", "", {}) or {}
    p = _parse_p(_get(qcfg, "p", "quantization", 2), "quantization.p")
    layout = _build_layout(qcfg, prob.dim)
    a_p = norm_ratio_floor(layout.max_block, p)

    consts = prob.constants
    selected = None
    if consts.mu > 0:
        selected = theory.select_strongly_convex(consts, a_p)

    alpha_cfg = _get(cfg, "alpha", "", 0)
    if alpha_cfg == "auto":
        if selected is None:
            _fail("alpha", "auto needs a strongly convex problem (mu > 0)")
        alpha = selected.alpha
    else:
        alpha = _as_number(alpha_cfg, "alpha")
    if method == "baseline" and alpha != 0:
        _fail("alpha", "the baseline method has no memory; use alpha 0")

    beta = _as_number(_get(cfg, "beta", "", 0.0), "beta")

    scfg = _get(cfg, "stepsize", "", required=True)
    if not isinstance(scfg, dict):
        _fail("stepsize", "expected a mapping")
    skind = _get(scfg, "kind", "stepsize", "constant")
    if skind == "constant":
        gamma = _get(scfg, "gamma", "stepsize")
        if gamma == "auto":
            if selected is None:
                _fail("stepsize.gamma", "auto needs a strongly convex problem (mu > 0)")
            stepsize = ConstantStepsize(selected.gamma)
        else:
            stepsize = ConstantStepsize(_as_number(gamma, "stepsize.gamma"))
    elif skind == "decreasing":
        theta = _get(scfg, "theta", "stepsize")
        if theta in (None, "auto"):
            if consts.mu <= 0:
                _fail("stepsize.theta", "auto needs a strongly convex problem (mu > 0)")
            theta = theory.select_decreasing(consts, a_p).theta
        else:
            theta = _as_number(theta, "stepsize.theta")
        stepsize = DecreasingStepsize(consts.mu, theta)
    else:
        _fail("stepsize.kind", f"expected 'constant' or 'decreasing', got {skind!r}")

    seeds_cfg = _get(cfg, "seeds", "", [0])
    if isinstance(seeds_cfg, dict):
        count = int(_as_number(_get(seeds_cfg, "count", "seeds", required=True), "seeds.count"))
        start = int(_as_number(_get(seeds_cfg, "start", "seeds", 0), "seeds.start"))
        seeds = list(range(start, start + count))
    elif isinstance(seeds_cfg, list) and seeds_cfg:
        seeds = [int(_as_number(s, "seeds[]")) for s in seeds_cfg]
    else:
        _fail("seeds", "expected a nonempty list or {count, start}")
    seeds = [s + seed_offset for s in seeds]

    iterations = int(_as_number(_get(cfg, "iterations", "", 1000), "iterations"))
    if iterations < 0:
        _fail("iterations", "must be >= 0")

    lyap_cfg = _get(cfg, "lyapunov_c", "", "auto")
    if lyap_cfg == "auto":
        lyapunov_c = selected.c if selected is not None else None
    elif lyap_cfg is None:
        lyapunov_c = None
    else:
        lyapunov_c = _as_number(lyap_cfg, "lyapunov_c")

    if _get(cfg, "reference_optimum", "", False):
        problems.attach_reference_optimum(prob, reg)

    x0 = _get(cfg, "x0", "")
    if x0 is not None:
        x0 = [_as_number(v, "x0[]") for v in x0]
        if len(x0) != prob.dim:
            _fail("x0", f"expected {prob.dim} entries, got {len(x0)}")

    try:
        config = DianaConfig(
            n=prob.n, layout=layout, p=p, alpha=alpha, stepsize=stepsize, beta=beta
        )
    except ValueError as exc:
        _fail("", str(exc))

    return {
        "method": method,
        "problem": prob,
        "reg": reg,
        "config": config,
        "iterations": iterations,
        "seeds": seeds,
        "record_every": int(
            _as_number(_get(cfg, "record_every", "", 1), "record_every")
        ),
        "lyapunov_c": lyapunov_c,
        "count_bits": bool(_get(cfg, "count_bits", "", False)),
        "log_messages": bool(_get(cfg, "log_messages", "", False)),
        "cost_model": simnet.CostModel(
            float_bits=int(_as_number(_get(cfg, "float_bits", "", 32), "float_bits")),
            count_broadcast=bool(_get(cfg, "count_broadcast", "", False)),
        ),
        "alpha_p": a_p,
        "selected": selected,
        "resolved": {
            "method": method,
            "p": "inf" if p == math.inf else p,
            "block_sizes": list(layout.block_sizes),
            "alpha_p": a_p,
            "alpha": alpha,
            "beta": beta,
            "stepsize": (
                {"kind": "constant", "gamma": stepsize.gamma}
                if isinstance(stepsize, ConstantStepsize)
                else {"kind": "decreasing", "mu": stepsize.mu, "theta": stepsize.theta}
            ),
            "iterations": iterations,
            "seeds": seeds,
            "lyapunov_c": lyapunov_c,
        },
    }


def _strict_violations(resolved: dict) -> list[str]:
    """Admissibility report for the resolved parameters against the theory
    of the matching regime (standard memory weight c)."""
    prob = resolved["problem"]
    config = resolved["config"]
    consts = prob.constants
    a_p = resolved["alpha_p"]
    out: list[str] = []
    gamma0 = config.stepsize.at(0)
    if isinstance(resolved["reg"], prox.Box) and consts.mu == 0:
        out.append(
            "box-indicator-nonconvex: box constraints with a nonconvex "
            "objective are outside the supported theory"
        )
    if config.beta > 0:
        out.extend(
            theory.momentum_admissibility(
                consts, a_p, config.beta, gamma0, config.alpha
            )
        )
    elif consts.mu > 0:
        c = resolved["selected"].c
        out.extend(
            theory.validate_params(consts, config.alpha, c, gamma0, a_p)
        )
    elif config.alpha > 0:
        n = consts.n
        c = 4 * (1 - a_p) / (n * a_p * a_p)
        ceiling = 2 / (consts.L * (1 + 2 * c * config.alpha))
        if gamma0 > ceiling * (1 + 1e-12):
            out.append(
                f"nonconvex-stepsize-ceiling: gamma = {gamma0} exceeds "
                f"2/(L(1+2 c alpha)) = {ceiling}"
            )
    return out


def _write_csv(records: list[RunRecord], path: Path) -> None:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    fmt(r.seed),
                    fmt(r.k),
                    fmt(r.objective),
                    fmt(r.grad_norm),
                    fmt(r.lyapunov),
                    fmt(r.nonconvex_gap),
                    fmt(r.bits_up),
                    fmt(r.diverged),
                ]
            )


def _final_rows(records: list[RunRecord]) -> list[RunRecord]:
    finals: dict[int, RunRecord] = {}
    for r in records:
        finals[r.seed] = r
    return list(finals.values())


def _summarize(records: list[RunRecord], resolved: dict, wall: float) -> dict:
    finals = _final_rows(records)
    return {
        "version": _version_string(),
        "config": resolved["resolved"],
        "comm_bound_log_base": "e",
        "wall_time": wall,
        "diverged": any(r.diverged for r in finals),
        "per_seed": [
            {
                "seed": r.seed,
                "iterations": r.k,
                "objective": r.objective,
                "grad_norm": r.grad_norm,
                "lyapunov": r.lyapunov,
                "bits_up": r.bits_up,
                "diverged": r.diverged,
                "wall_time": r.wall_time,
            }
            for r in finals
        ],
    }


def cmd_run(cfg: dict, out: Path, strict: bool, threads: int, seed_offset: int) -> int:
    resolved = _resolve_run(cfg, seed_offset)
    violations = _strict_violations(resolved)
    if violations:
        for v in violations:
            print(f"admissibility: {v}", file=sys.stderr)
        if strict:
            return 2

    out.mkdir(parents=True, exist_ok=True)
    channel = (
        simnet.Channel()
        if (resolved["count_bits"] or resolved["log_messages"])
        else None
    )
    t0 = time.perf_counter()
    records = run(
        resolved["problem"],
        resolved["config"],
        resolved["reg"],
        iterations=resolved["iterations"],
        seeds=resolved["seeds"],
        method=resolved["method"],
        record_every=resolved["record_every"],
        lyapunov_c=resolved["lyapunov_c"],
        channel=channel,
        cost_model=resolved["cost_model"],
        threads=threads if threads > 1 else None,
    )
    wall = time.perf_counter() - t0
    _write_csv(records, out / "records.csv")
    summary = _summarize(records, resolved, wall)
    if channel is not None:
        summary["gather_bits"] = channel.gather_bits
        summary["broadcast_bits"] = channel.broadcast_bits
        if resolved["log_messages"]:
            channel.dump_jsonl(out / "messages.jsonl")
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out / 'records.csv'} and {out / 'summary.json'}")
    if summary["diverged"]:
        print("divergence guard tripped; see summary.json", file=sys.stderr)
        return 3
    return 0


def _sweep_axes(cfg: dict) -> list[tuple[str, list]]:
    sweep = _get(cfg, "sweep", "", required=True)
    if not isinstance(sweep, dict) or not sweep:
        _fail("sweep", "expected a nonempty mapping of axis -> values list")
    axes = []
    for key, values in sweep.items():
        if key not in ("p", "alpha", "block_size", "beta", "gamma"):
            _fail(f"sweep.{key}", "unknown sweep axis")
        if not isinstance(values, list) or not values:
            _fail(f"sweep.{key}", "expected a nonempty list")
        axes.append((key, values))
    return axes


def _apply_cell(cfg: dict, assignment: dict) -> dict:
    cell = json.loads(json.dumps({k: v for k, v in cfg.items() if k != "sweep"}))
    for key, value in assignment.items():
        if key == "p":
            cell.setdefault("quantization", {})["p"] = value
        elif key == "block_size":
            cell.setdefault("quantization", {})["block_size"] = value
        elif key == "alpha":
            cell["alpha"] = value
        elif key == "beta":
            cell["beta"] = value
        elif key == "gamma":
            cell.setdefault("stepsize", {})["gamma"] = value
    return cell


def cmd_sweep(cfg: dict, out: Path, strict: bool, threads: int, seed_offset: int) -> int:
    axes = _sweep_axes(cfg)
    names = [name for name, _ in axes]
    cells = [
        dict(zip(names, combo))
        for combo in itertools.product(*(values for _, values in axes))
    ]
    out.mkdir(parents=True, exist_ok=True)

    def run_cell(assignment: dict) -> dict:
        label = {k: ("inf" if v == math.inf else v) for k, v in assignment.items()}
        try:
            resolved = _resolve_run(_apply_cell(cfg, assignment), seed_offset)
            violations = _strict_violations(resolved)
            if violations and strict:
                return {"cell": label, "failed": True, "error": "; ".join(violations)}
            records = run(
                resolved["problem"],
                resolved["config"],
                resolved["reg"],
                iterations=resolved["iterations"],
                seeds=resolved["seeds"],
                method=resolved["method"],
                record_every=max(resolved["iterations"], 1),
                lyapunov_c=resolved["lyapunov_c"],
            )
            finals = _final_rows(records)
            return {
                "cell": label,
                "failed": False,
                "diverged": any(r.diverged for r in finals),
                "objective": float(np.mean([r.objective for r in finals])),
                "grad_norm": (
                    float(np.mean([r.grad_norm for r in finals]))
                    if finals[0].grad_norm is not None
                    else None
                ),
                "lyapunov": (
                    float(np.mean([r.lyapunov for r in finals]))
                    if finals[0].lyapunov is not None
                    else None
                ),
                "alpha": resolved["config"].alpha,
                "gamma": resolved["config"].stepsize.at(0),
            }
        except (ConfigError, ValueError, RuntimeError) as exc:
            return {"cell": label, "failed": True, "error": str(exc)}

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    axis_cols = [f"sweep_{n}" for n in names]
    cols = axis_cols + [
        "failed",
        "diverged",
        "objective",
        "grad_norm",
        "lyapunov",
        "alpha",
        "gamma",
        "error",
    ]
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for res in results:
            row = [str(res["cell"][n]) for n in names]
            for col in cols[len(names):]:
                val = res.get(col)
                row.append("" if val is None else (repr(val) if isinstance(val, float) else str(val)))
            writer.writerow(row)
    with open(out / "sweep_summary.json", "w") as fh:
        json.dump(
            {"version": _version_string(), "cells": results}, fh, indent=2, default=str
        )
        fh.write("\n")
    failed = sum(1 for r in results if r["failed"])
    print(f"swept {len(results)} cells ({failed} failed) -> {out / 'sweep.csv'}")
    return 0


def cmd_theory(cfg: dict, out: Path, strict: bool) -> int:
    tcfg = _get(cfg, "theory", "", required=True)
    if not isinstance(tcfg, dict):
        _fail("theory", "expected a mapping")
    ccfg = _get(tcfg, "constants", "theory", required=True)
    consts = theory.ProblemConstants(
        L=_as_number(_get(ccfg, "L", "theory.constants", required=True), "theory.constants.L"),
        mu=_as_number(_get(ccfg, "mu", "theory.constants", 0), "theory.constants.mu"),
        sigma2=_as_number(_get(ccfg, "sigma2", "theory.constants", 0), "theory.constants.sigma2"),
        zeta2=_as_number(_get(ccfg, "zeta2", "theory.constants", 0), "theory.constants.zeta2"),
        n=int(_as_number(_get(ccfg, "n", "theory.constants", 1), "theory.constants.n")),
    )
    if "alpha_p" in tcfg:
        a_p = _as_number(tcfg["alpha_p"], "theory.alpha_p")
    else:
        p = _parse_p(_get(tcfg, "p", "theory", 2), "theory.p")
        dim = int(_as_number(_get(tcfg, "dim", "theory", required=True), "theory.dim"))
        a_p = norm_ratio_floor(dim, p)
    mode = _get(tcfg, "mode", "theory", "strongly-convex")
    ks = [int(_as_number(k, "theory.ks[]")) for k in _get(tcfg, "ks", "theory", [1000])]
    report: dict = {"version": _version_string(), "mode": mode, "alpha_p": a_p}

    if mode == "strongly-convex":
        b = theory.select_strongly_convex(consts, a_p)
        V0 = _as_number(_get(tcfg, "V0", "theory", 1.0), "theory.V0")
        report.update(
            alpha=b.alpha,
            c=b.c,
            gamma=b.gamma,
            leading_term=b.leading_term,
            neighborhood=b.neighborhood,
            violations=theory.validate_params(consts, b.alpha, b.c, b.gamma, a_p),
            bound={str(k): theory.strongly_convex_bound(consts, b, V0, k) for k in ks},
        )
    elif mode == "decreasing":
        b = theory.select_decreasing(consts, a_p)
        V0 = _as_number(_get(tcfg, "V0", "theory", 1.0), "theory.V0")
        report.update(
            alpha=b.alpha,
            c=b.c,
            theta=b.theta,
            eta=b.eta,
            noise_term=b.noise_term,
            regime=b.regime,
            regime_scores=b.regime_scores,
            bound={str(k): theory.decreasing_bound(b, V0, k) for k in ks},
        )
    elif mode == "nonconvex":
        K = int(_as_number(_get(tcfg, "K", "theory", required=True), "theory.K"))
        Lambda0 = _as_number(_get(tcfg, "Lambda0", "theory", 1.0), "theory.Lambda0")
        b = theory.nonconvex_bound(consts, a_p, K, Lambda0)
        report.update(
            gamma=b.gamma,
            terms=list(b.terms),
            total=b.total,
        )
    elif mode == "momentum":
        beta = _as_number(_get(tcfg, "beta", "theory", required=True), "theory.beta")
        gamma = _as_number(_get(tcfg, "gamma", "theory", required=True), "theory.gamma")
        alpha = _as_number(_get(tcfg, "alpha", "theory", 0), "theory.alpha")
        gap0 = _as_number(_get(tcfg, "gap0", "theory", 1.0), "theory.gap0")
        violations = theory.momentum_admissibility(consts, a_p, beta, gamma, alpha)
        report["violations"] = violations
        if violations and strict:
            for v in violations:
                print(f"admissibility: {v}", file=sys.stderr)
            return 2
        if not violations:
            bounds = {
                str(k): theory.momentum_bound(consts, a_p, beta, gamma, k, gap0, alpha)
                for k in ks
            }
            some = next(iter(bounds.values()))
            report.update(
                omega=some.omega,
                delta=some.delta,
                bound={k: b.total for k, b in bounds.items()},
            )
    else:
        _fail("theory.mode", f"unknown mode {mode!r}")

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "theory.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for key, value in report.items():
        if key != "version":
            print(f"{key}: {value}")
    if report.get("violations"):
        if strict:
            return 2
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diana",
        description="Distributed optimization with quantized gradient differences.",
    )
    parser.add_argument("command", choices=["run", "sweep", "theory"])
    parser.add_argument("--config", required=True, help="YAML configuration file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument(
        "--strict",
        action="store_true",
        help="fail (exit 2) on admissibility violations instead of warning",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker/cell threads")
    parser.add_argument(
        "--seed-offset", type=int, default=0, help="added to every configured seed"
    )
    args = parser.parse_args(argv)

    config_path = Path(args.config)
    if not config_path.exists():
        print(f"config: no such file: {config_path}", file=sys.stderr)
        return 2
    try:
        with open(config_path) as fh:
            cfg = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        print(f"config: invalid YAML: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    try:
        if args.command == "run":
            return cmd_run(cfg, out, args.strict, args.threads, args.seed_offset)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, args.strict, args.threads, args.seed_offset)
        return cmd_theory(cfg, out, args.strict)
    except ConfigError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
