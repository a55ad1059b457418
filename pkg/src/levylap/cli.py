"""Command-line runner: ``levylap <subcommand> --config run.json``.

Subcommands equiv, heat, eigen, holonomy and ym-u1 run the scenarios of that
type from the config; ``selftest`` runs the built-in acceptance checks.
Every scenario writes ``<out>/<scenario-id>/{data.csv, summary.json, config.json}``.
Exit status: 0 when everything passed, 1 on failed checks, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config

log = logging.getLogger("levylap")

SCENARIO_COMMANDS = ("equiv", "heat", "eigen", "holonomy", "ym-u1")


# ----------------------------------------------------------------- scenarios
def _run_equiv(cfg, sc, tol, out_dir):
    from .levy import levy_analytic, levy_cesaro

    rows = []
    n_max = int(sc.get("n_max", 32))
    h = float(sc.get("h", 1e-3))
    for p in sc.get("pairs", []):
        F = cfg.functional(p["functional"], f"scenario {sc['id']}")
        c = cfg.curve(p["curve"], f"scenario {sc['id']}")
        an = levy_analytic(F, c)
        rep = levy_cesaro(F, c, n_max=n_max, h=h, richardson=bool(sc.get("richardson", False)))
        rep.meta.update(functional=p["functional"], curve=p["curve"], analytic=an)
        rep.write(out_dir, f"cesaro_{p['functional']}_{p['curve']}", header=_header(cfg, sc))
        est = rep.best_limit
        bound = max(tol["cesaro_rel"] * abs(an), tol["cesaro_abs"])
        err = abs(est - an)
        rows.append({"functional": p["functional"], "curve": p["curve"], "analytic": an, "cesaro": est,
                     "fit_residual": rep.residual, "error": err, "tolerance": bound, "passed": err <= bound})
    return rows, {}


def _run_heat(cfg, sc, tol, out_dir):
    from .flows import levy_heat_residual, long_time_limit

    where = f"scenario {sc['id']}"
    F = cfg.functional(sc["template"], where)
    ts = [float(t) for t in sc.get("t_grid", [0.0, 0.01, 0.05, 0.1, 0.5])]
    dt = float(sc.get("dt", 1e-5))
    rows, limits = [], {}
    for cid in sc.get("curves", []):
        c = cfg.curve(cid, where)
        res = long_time_limit(F, c, ts)
        limits[cid] = {"limit": res.limit, "rate": res.rate, "winding": c.winding}
        for t, v in zip(ts, res.values):
            r = levy_heat_residual(F, c, t, dt)
            rows.append({"curve": cid, "t": t, "value": float(v), "residual": r,
                         "passed": r <= tol["heat_residual"]})
    return rows, {"limits": limits}


def _run_eigen(cfg, sc, tol, out_dir):
    from .functionals import build_eigenfunctional, evaluate
    from .levy import levy_analytic, levy_cesaro

    where = f"scenario {sc['id']}"
    fs = [cfg.form(i, where) for i in sc.get("scalars", [])]
    as_ = [cfg.form(i, where) for i in sc.get("oneforms", [])]
    F, lam = build_eigenfunctional(fs, as_)
    rows = []
    for cid in sc.get("curves", []):
        c = cfg.curve(cid, where)
        val = evaluate(F, c)
        an = levy_analytic(F, c)
        err = abs(an - lam * val)
        ok = err <= tol["eigen_analytic"] * max(1.0, abs(lam * val))
        row = {"curve": cid, "eigenvalue": lam, "value": val, "analytic": an, "analytic_error": err}
        if "n_max" in sc and c.closed:
            ces = levy_cesaro(F, c, n_max=int(sc["n_max"]), h=float(sc.get("h", 1e-3))).limit
            rel = abs(ces - lam * val) / max(abs(lam * val), 1e-300)
            row.update(cesaro=ces, cesaro_rel_error=rel)
            ok = ok and rel <= tol["eigen_cesaro"]
        row["passed"] = ok
        rows.append(row)
    return rows, {"predicted_eigenvalue": lam}


def _run_holonomy(cfg, sc, tol, out_dir):
    from .geometry import Sphere2
    from .pathspace import sphere_latitude
    from .transport import holonomy, holonomy_angle

    m = cfg.manifolds.get("default")
    radius = float(sc.get("radius", m.radius if isinstance(m, Sphere2) else 1.0))
    S = Sphere2(radius)
    N = int(sc.get("N", 2048))
    rows = []
    for th in sc.get("theta0", [math.pi / 6, math.pi / 3, math.pi / 2]):
        ang = holonomy_angle(holonomy(sphere_latitude(S, float(th), N=N)))
        exp = (2 * math.pi * (1 - math.cos(th))) % (2 * math.pi)
        d = (ang - exp) % (2 * math.pi)
        err = min(d, 2 * math.pi - d)
        rows.append({"theta0": float(th), "angle": ang, "gauss_bonnet": exp, "error": err,
                     "passed": err <= tol["holonomy"]})
    return rows, {"N": N, "radius": radius}


def _run_ym(cfg, sc, tol, out_dir):
    from .flows import u1_transport_heat_check, ym_u1_flow
    from .hodge import heat_propagate, line_integral

    where = f"scenario {sc['id']}"
    a0 = cfg.form(sc["form"], where)
    ts = [float(t) for t in sc.get("t_grid", [0.0, 0.01, 0.1, 0.5])]
    rows = []
    for cid in sc.get("curves", []):
        c = cfg.curve(cid, where)
        u1 = u1_transport_heat_check(a0, c, ts, float(sc.get("dt", 1e-5))) if c.closed else [math.nan] * len(ts)
        for t, r in zip(ts, u1):
            ym = line_integral(ym_u1_flow(a0, t), c)
            hd = line_integral(heat_propagate(a0, t), c)
            gap = abs(ym - hd)
            ok = (not c.closed) or (gap <= tol["ym_theta"] and r <= tol["u1_residual"])
            rows.append({"curve": cid, "closed": c.closed, "t": t, "theta_ym": ym, "theta_hodge": hd,
                         "gap": gap, "u1_residual": float(r), "passed": ok})
    return rows, {}


RUNNERS = {"equiv": _run_equiv, "heat": _run_heat, "eigen": _run_eigen,
           "holonomy": _run_holonomy, "ym-u1": _run_ym}


# -------------------------------------------------------------------- output
def _header(cfg, sc):
    return f"scenario={sc['id']} config_sha256={cfg.sha256} seed={cfg.seed}"


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _write_outputs(cfg, sc, rows, extra, out_dir: Path, error=None):
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "data.csv").open("w", newline="") as fh:
        fh.write(f"# {_header(cfg, sc)}\n")
        if rows:
            w = csv.writer(fh)
            keys = list(rows[0])
            w.writerow(keys)
            for r in rows:
                w.writerow([repr(float(r[k])) if isinstance(r[k], (float, np.floating)) else r[k] for k in keys])
    passed = error is None and all(r.get("passed", True) for r in rows)
    summary = {"scenario": sc["id"], "type": sc["type"], "config_sha256": cfg.sha256, "seed": cfg.seed,
               "passed": passed, "rows": len(rows), "error": error,
               **{k: _jsonable(v) for k, v in extra.items()}}
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=_jsonable) + "\n")
    resolved = dict(cfg.raw)
    resolved["seed"] = cfg.seed
    resolved["tolerances"] = cfg.tolerances
    (out_dir / "config.json").write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")
    return passed


def _scaled(tol: dict, scale: float) -> dict:
    return {k: v * scale for k, v in tol.items()}


def _run_one(args):
    """Worker entry (also used in-process): returns (scenario id, passed, error)."""
    raw, seed, sid, out_root, scale = args
    cfg = load_config(raw, seed)
    sc = next(s for s in cfg.scenarios if s["id"] == sid)
    out_dir = Path(out_root) / sid
    try:
        rows, extra = RUNNERS[sc["type"]](cfg, sc, _scaled(cfg.tolerances, scale), out_dir)
        err = None
    except (ValueError, ArithmeticError) as exc:
        # guard violations are reported per scenario; the run continues
        rows, extra, err = [], {}, f"{type(exc).__name__}: {exc}"
    passed = _write_outputs(cfg, sc, rows, extra, out_dir, err)
    if cfg.raw.get("output", {}).get("write_curves"):
        from .pathspace import write_curve_csv

        for cid in _referenced_curves(sc):
            if cid in cfg.curves:
                write_curve_csv(cfg.curves[cid], out_dir / f"curve_{cid}.csv")
    return sid, passed, err


def _referenced_curves(sc):
    ids = [p["curve"] for p in sc.get("pairs", [])] + list(sc.get("curves", []))
    return list(dict.fromkeys(ids))


def run_scenarios(kind: str, config, out: Path | None = None, jobs: int = 1, seed=None, scale: float = 1.0):
    cfg = load_config(config, seed)
    out = Path(out if out is not None else cfg.raw.get("output", {}).get("dir", "out"))
    chosen = [s for s in cfg.scenarios if s["type"] == kind]
    if not chosen:
        raise ConfigError(f"$.scenarios: no scenario of type {kind!r}")
    tasks = [(cfg.raw, cfg.seed, s["id"], str(out), scale) for s in chosen]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    return results


# ----------------------------------------------------------------------- main
def _parser():
    p = argparse.ArgumentParser(prog="levylap", description="Levy Laplacian experiments on loop spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SCENARIO_COMMANDS + ("selftest",):
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, required=name != "selftest", help="run configuration (JSON)")
        sp.add_argument("--out", type=Path, default=None,
                        help="output directory (default: output.dir from the config, else ./out)")
        sp.add_argument("--jobs", type=int, default=1, help="parallel scenarios")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply every tolerance")
        sp.add_argument("-v", "--verbose", action="store_true")
        if name == "selftest":
            sp.add_argument("--only", type=int, nargs="*", help="run only these criterion numbers")
    return p


def _selftest(args) -> int:
    from .checks import run_all

    results = run_all(scale=args.tolerance_scale, jobs=args.jobs if args.jobs > 1 else None, only=args.only)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"selftest: {sum(r.passed for r in results)}/{len(results)} passed")
    if args.out is not None:
        d = args.out / "selftest"
        d.mkdir(parents=True, exist_ok=True)
        (d / "summary.json").write_text(json.dumps([r.to_dict() for r in results], indent=2, default=_jsonable) + "\n")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.tolerance_scale <= 0 or args.jobs < 1:
        print("error: --tolerance-scale must be > 0 and --jobs >= 1", file=sys.stderr)
        return 2
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.command == "selftest":
        return _selftest(args)
    try:
        results = run_scenarios(args.command, args.config, args.out, args.jobs, args.seed, args.tolerance_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for sid, passed, err in results:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {sid}" + (f"  ({err})" if err else ""))
    return 0 if all(p for _, p, _ in results) else 1


if __name__ == "__main__":
    sys.exit(main())
