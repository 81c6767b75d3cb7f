"""Command-line entry point exposing every experiment in the package.

Each subcommand wraps one operation pipeline, reads an optional INI config
(sections per module, unknown keys rejected), echoes the fully resolved
configuration, and writes CSV/JSON artifacts that are byte-identical for
identical (config, seed) pairs.  Exit status: 0 on success, 1 when an
``--assert`` threshold fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import chordarc as ca
from . import isoperimetry as iso
from .density import DensitySpec, check_admissibility, cone_angle
from .errors import ConfigError, DomainError
from .geometry import (
    SurfacePoint,
    clairaut_geodesic,
    cone_distance,
    distortion_estimate,
)
from . import plateau as pl

EUCLIDEAN_ISO = 1.0 / (4.0 * math.pi)

_KNOWN_KEYS = {
    "density": {"kind", "beta", "radius"},
    "geometry": {"pairs", "k", "n"},
    "isoperimetry": {"alphas", "m", "restarts", "iters", "ball_dirs", "ball_radii",
                     "mono_tol"},
    "chordarc": {"delta", "lambda", "samples", "families"},
    "plateau": {"shape", "k_chart", "h", "init", "max_iters", "threshold", "fft_size"},
    "run": {"seed", "out", "jobs"},
}


def _load_config(path: str | None) -> dict:
    cfg = {section: {} for section in _KNOWN_KEYS}
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            cfg[section][key] = value
    return cfg


def _density_from(args, cfg) -> DensitySpec:
    kind = args.kind or cfg["density"].get("kind", "log-e0")
    beta = args.beta if args.beta is not None else float(cfg["density"].get("beta", 3 * math.pi))
    if kind == "flat":
        return DensitySpec.flat()
    if kind == "cone":
        return DensitySpec.cone(beta)
    if kind == "log-e0":
        return DensitySpec.log_e0()
    if kind == "loglog-e1":
        return DensitySpec.loglog_e1()
    raise ConfigError(f"unknown density kind {kind!r}")


def _out_dir(args, cfg) -> str:
    out = args.out or cfg["run"].get("out") or os.environ.get("WARPDISK_OUT", "warpdisk-out")
    os.makedirs(out, exist_ok=True)
    return out


def _resolve_seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    return int(cfg["run"].get("seed", 0))


def _resolve_jobs(args, cfg) -> int:
    if args.jobs is not None:
        return max(args.jobs, 1)
    return max(int(cfg["run"].get("jobs", os.cpu_count() or 1)), 1)


def _emit(out_dir: str, name: str, text: str):
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _echo_config(out_dir: str, resolved: dict):
    text = json.dumps(resolved, sort_keys=True, indent=2) + "\n"
    _emit(out_dir, "config.json", text)
    sys.stdout.write(text)


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_density_check(args, cfg) -> int:
    spec = _density_from(args, cfg)
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "density-check", "kind": spec.kind, "R": spec.R,
                       "beta": spec.beta})
    report = check_admissibility(spec)
    _emit(out, "admissibility.json", json.dumps(report.to_dict(), sort_keys=True,
                                                indent=2) + "\n")
    if args.enforce and not report.passed:
        return 1
    return 0


def cmd_distance_table(args, cfg) -> int:
    spec = _density_from(args, cfg)
    seed = _resolve_seed(args, cfg)
    n_pairs = args.pairs or int(cfg["geometry"].get("pairs", 100))
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "distance-table", "kind": spec.kind, "beta": spec.beta,
                       "pairs": n_pairs, "seed": seed})
    rng = np.random.default_rng(seed)
    rows = ["r1,theta1,r2,theta2,d,kind,residual"]
    worst = 0.0
    for _ in range(n_pairs):
        p = SurfacePoint(rng.uniform(0, min(spec.R, 1.0)), rng.uniform(-math.pi, math.pi))
        q = SurfacePoint(rng.uniform(0, min(spec.R, 1.0)), rng.uniform(-math.pi, math.pi))
        g = clairaut_geodesic(spec, p, q)
        if spec.kind == "cone":
            worst = max(worst, abs(g.distance - cone_distance(spec.beta, p, q)))
        rows.append(
            f"{p.r:.12g},{p.theta:.12g},{q.r:.12g},{q.theta:.12g},"
            f"{g.distance:.12g},{g.kind},{g.residual:.3g}"
        )
    _emit(out, "distances.csv", "\n".join(rows) + "\n")
    if args.enforce and spec.kind == "cone" and worst > 1e-6:
        sys.stderr.write(f"cone-oracle deviation {worst:.3g} exceeds 1e-6\n")
        return 1
    return 0


def cmd_distortion(args, cfg) -> int:
    spec = _density_from(args, cfg)
    seed = _resolve_seed(args, cfg)
    alphas = _parse_alphas(args.alphas or cfg["isoperimetry"].get("alphas", "1e-1,1e-2,1e-3"))
    k = args.k if args.k is not None else float(cfg["geometry"].get("k", 0.5))
    n = args.n or int(cfg["geometry"].get("n", 100))
    jobs = _resolve_jobs(args, cfg)
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "distortion", "kind": spec.kind, "alphas": alphas,
                       "k": k, "n": n, "seed": seed, "jobs": jobs})
    work = [(spec.to_json(), a, k, n, seed) for a in alphas]
    deltas = _parallel_map(_distortion_row, work, jobs)
    rows = ["alpha,beta,delta_hat"]
    rows += [f"{a:.12g},{cone_angle(spec, a):.12g},{d:.12g}" for a, d in zip(alphas, deltas)]
    _emit(out, "distortion.csv", "\n".join(rows) + "\n")
    if args.enforce and any(d2 >= d1 for d1, d2 in zip(deltas, deltas[1:])):
        sys.stderr.write("distortion estimates are not strictly decreasing\n")
        return 1
    return 0


def _distortion_row(item):
    spec_json, alpha, k, n, seed = item
    spec = DensitySpec.from_json(spec_json)
    return distortion_estimate(spec, alpha, k=k, n=n, seed=seed)


def cmd_iso_scan(args, cfg) -> int:
    spec = _density_from(args, cfg)
    seed = _resolve_seed(args, cfg)
    alphas = _parse_alphas(args.alphas or cfg["isoperimetry"].get("alphas",
                                                                  "1e-1,1e-2,1e-3,1e-4"))
    sec = cfg["isoperimetry"]
    opt = iso.OptimizerConfig(
        m=args.m or int(sec.get("m", 64)),
        restarts=int(sec.get("restarts", 8)),
        iters=int(sec.get("iters", 2000)),
        ball_dirs=int(sec.get("ball_dirs", 96)),
        ball_radii=int(sec.get("ball_radii", 20)),
        mono_tol=float(sec.get("mono_tol", 1e-3)),
        seed=seed,
    )
    jobs = _resolve_jobs(args, cfg)
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "iso-scan", "kind": spec.kind, "beta": spec.beta,
                       "alphas": alphas, "seed": seed, "m": opt.m, "jobs": jobs})
    rows = iso.scan_alpha(spec, alphas, opt, jobs=jobs)
    _emit(out, "iso_scan.csv",
          iso.CSV_HEADER + "\n" + "\n".join(r.to_csv_row() for r in rows) + "\n")
    flagged = [r.alpha for r in rows if r.mono_flag]
    if flagged:
        sys.stderr.write(f"monotonicity flags at alphas {flagged}\n")
    if args.enforce and flagged:
        return 1
    return 0


def cmd_chordarc_verify(args, cfg) -> int:
    seed = _resolve_seed(args, cfg)
    sec = cfg["chordarc"]
    delta = args.delta if args.delta is not None else float(sec.get("delta", 0.5))
    lam = args.lam if args.lam is not None else float(sec.get("lambda", 3.0))
    samples = args.samples or int(sec.get("samples", 1000))
    families = (args.families or sec.get("families", "fourier,barbell,stadium")).split(",")
    jobs = _resolve_jobs(args, cfg)
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "chordarc-verify", "delta": delta, "lambda": lam,
                       "samples": samples, "families": families, "seed": seed,
                       "jobs": jobs})
    work = [(fam, delta, lam, samples, seed) for fam in families]
    reports = _parallel_map(_chordarc_row, work, jobs)
    payload = {rep.family: rep.to_dict() for rep in reports}
    _emit(out, "chordarc.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if args.enforce and any(not rep.passed for rep in reports):
        sys.stderr.write("chord-arc contrapositive violated\n")
        return 1
    return 0


def _chordarc_row(item):
    fam, delta, lam, samples, seed = item
    return ca.verify_lemma31(fam, delta, lam, n_samples=samples, seed=seed)


def cmd_plateau_solve(args, cfg) -> int:
    sec = cfg["plateau"]
    shape = args.shape or sec.get("shape", "disk")
    k_chart = args.k_chart if args.k_chart is not None else float(sec.get("k_chart", 2.0))
    h = args.h if args.h is not None else float(sec.get("h", 0.02))
    init_kind = args.init or sec.get("init", "swirl")
    max_iters = args.max_iters or int(sec.get("max_iters", 120))
    threshold = args.threshold if args.threshold is not None else float(sec.get("threshold", 0.015))
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "plateau-solve", "shape": shape, "k_chart": k_chart,
                       "h": h, "init": init_kind, "max_iters": max_iters,
                       "threshold": threshold})
    E = (pl.CollapsedSetSpec.disk(k_chart) if shape == "disk"
         else pl.CollapsedSetSpec.point(k_chart))
    mesh = pl.disk_mesh(h)
    if init_kind == "swirl":
        init = pl.swirl_distorted_state(mesh, k_chart)
    elif init_kind == "moebius":
        init = pl.moebius_distorted_state(mesh, k_chart)
    elif init_kind == "reference":
        init = pl.reference_state(mesh, k_chart)
    else:
        raise ConfigError(f"unknown init {init_kind!r}")
    res = pl.minimize_energy(mesh, E, init, pl.SolverConfig(max_iters=max_iters))
    ref = pl.reference_map_energy(E)
    fib = pl.fiber_region(mesh, res.state, E, threshold)
    summary = {
        "reference_energy": ref,
        "final": res.energy.to_dict(),
        "reshetnyak_rel_gap": (res.energy.reshetnyak - ref) / ref,
        "fiber": fib.to_dict(),
        "iterations": res.iterations,
        "stagnated": res.stagnated,
    }
    _emit(out, "plateau_map.json", res.state.to_json() + "\n")
    _emit(out, "plateau_trace.csv", res.trace_csv())
    _emit(out, "plateau_summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if args.enforce and abs(summary["reshetnyak_rel_gap"]) > 0.02:
        sys.stderr.write("final energy misses the reference by more than 2%\n")
        return 1
    return 0


def cmd_surgery(args, cfg) -> int:
    sec = cfg["plateau"]
    k_chart = args.k_chart if args.k_chart is not None else float(sec.get("k_chart", 2.0))
    h = args.h if args.h is not None else float(sec.get("h", 0.004))
    fft_size = int(sec.get("fft_size", 2048))
    threshold = args.threshold if args.threshold is not None else float(sec.get("threshold", 0.015))
    out = _out_dir(args, cfg)
    _echo_config(out, {"cmd": "surgery", "k_chart": k_chart, "h": h,
                       "fft_size": fft_size, "threshold": threshold})
    E = pl.CollapsedSetSpec.disk(k_chart)
    mesh = pl.disk_mesh(h)
    state, eb, _ = pl.surgery_segment(E, mesh, fft_size=fft_size)
    ref = pl.reference_map_energy(E)
    fib = pl.fiber_region(mesh, state, E, threshold)
    summary = {
        "reference_energy": ref,
        "energy": eb.to_dict(),
        "reshetnyak_rel_gap": (eb.reshetnyak - ref) / ref,
        "fiber": fib.to_dict(),
    }
    _emit(out, "surgery_map.json", state.to_json() + "\n")
    _emit(out, "surgery_summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if args.enforce and abs(summary["reshetnyak_rel_gap"]) > 0.01:
        sys.stderr.write("surgered energy misses the reference by more than 1%\n")
        return 1
    return 0


def _parse_alphas(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        alphas = [float(a) for a in text]
    else:
        alphas = [float(tok) for tok in str(text).split(",") if tok.strip()]
    if not alphas or any(a2 >= a1 for a1, a2 in zip(alphas, alphas[1:])):
        raise ConfigError("alphas must be a strictly decreasing list")
    return alphas


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpdisk",
        description="Numerical experiments on singular warped-product disks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file (sections per module)")
        p.add_argument("--seed", type=int, default=None, help="root random seed")
        p.add_argument("--out", help="output directory (default $WARPDISK_OUT)")
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel workers (default: logical cores)")
        p.add_argument("--assert", dest="enforce", action="store_true",
                       help="enforce the documented threshold via exit status")

    p = sub.add_parser("density-check", help="admissibility report for a density",
                       epilog="--assert: all three admissibility conditions pass.")
    p.add_argument("--kind", choices=["flat", "cone", "log-e0", "loglog-e1"])
    p.add_argument("--beta", type=float, default=None, help="cone angle")
    common(p)
    p.set_defaults(fn=cmd_density_check)

    p = sub.add_parser("distance-table", help="seeded geodesic distance queries",
                       epilog="--assert (cone kinds): |solver - closed form| <= 1e-6.")
    p.add_argument("--kind", choices=["flat", "cone", "log-e0", "loglog-e1"])
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--pairs", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_distance_table)

    p = sub.add_parser("distortion", help="comparison-cone bi-Lipschitz defects",
                       epilog="--assert: defects strictly decrease along the alphas.")
    p.add_argument("--kind", choices=["flat", "cone", "log-e0", "loglog-e1"])
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--alphas", help="comma-separated decreasing list")
    p.add_argument("--k", type=float, default=None, help="inner annulus cutoff")
    p.add_argument("--n", type=int, default=None, help="sample pairs per alpha")
    common(p)
    p.set_defaults(fn=cmd_distortion)

    p = sub.add_parser("iso-scan", help="isoperimetric-ratio lower bounds per alpha",
                       epilog="--assert: no monotonicity flags "
                              "(C_hat nondecreasing in alpha within mono_tol).")
    p.add_argument("--kind", choices=["flat", "cone", "log-e0", "loglog-e1"])
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--alphas")
    p.add_argument("--m", type=int, default=None, help="profile half-resolution")
    common(p)
    p.set_defaults(fn=cmd_iso_scan)

    p = sub.add_parser("chordarc-verify", help="chord-arc contrapositive over families",
                       epilog="--assert: zero curves failing chord-arc with ratio >= "
                              "(1/(4pi))/(1+eps(delta,lambda)).")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--families", help="comma-separated: fourier,barbell,stadium")
    common(p)
    p.set_defaults(fn=cmd_chordarc_verify)

    p = sub.add_parser("plateau-solve", help="energy descent in the collapsed chart",
                       epilog="--assert: final reshetnyak within 2% of the "
                              "reference-map energy.")
    p.add_argument("--shape", choices=["disk", "point"])
    p.add_argument("--k-chart", type=float, default=None)
    p.add_argument("--h", type=float, default=None, help="mesh size")
    p.add_argument("--init", choices=["swirl", "moebius", "reference"])
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None, help="fiber distance cut")
    common(p)
    p.set_defaults(fn=cmd_plateau_solve)

    p = sub.add_parser("surgery", help="segment-fiber surgery of the disk minimizer",
                       epilog="--assert: surgered reshetnyak within 1% of the "
                              "reference-map energy (needs a fine mesh, h <= 0.004).")
    p.add_argument("--k-chart", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    common(p)
    p.set_defaults(fn=cmd_surgery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.fn(args, cfg)
    except (ConfigError, DomainError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
