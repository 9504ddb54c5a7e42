"""Command-line entry point: ``momentshape <subcommand> ...``.

A usage error (bad flags, unknown subcommand, missing file) exits with 2.
Input that fails validation, or a failed check, exits with 1.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import io as mio
from .domains import (
    ConformalImage,
    Disk,
    IntervalUnion,
    MomentTable1D,
    MomentTable2D,
    OutsideUnitDiskWarning,
    conformal_moments,
    disk_moments,
    grid_moments,
    interval_moments,
    sample_shade,
)
from .exptransform import ExpCoeffTable, ExpCoeffTable1D, b_to_s, s_to_b, s_to_t, t_to_s
from .markov1d import endpoints, hankel_rank, pade_recover
from .reconstruct import boundary_samples, reconstruct
from .stability import (
    C3,
    HolderConfig,
    check_bgap_bound,
    check_diagonal_bound,
    fenchel_check,
    random_exterior_points,
    random_shade_pair,
    run_holder_experiment,
    run_jobs,
    two_domains_experiment,
)
from .volume import check_vol_ratio, find_admissible

log = logging.getLogger("momentshape")

DEFAULT_SEED = 42
DEFAULT_GRID_N = 512
DEFAULT_TOL = 1e-8


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    seed: int = DEFAULT_SEED
    grid_n: int = DEFAULT_GRID_N
    tol: float = DEFAULT_TOL
    verbose: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.grid_n < 2:
            raise UsageError("--grid-n must be at least 2")


# --------------------------------------------------------------------------
# helpers


def _load(path):
    try:
        return mio.load_json(path)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text, out):
    if out:
        mio.write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


# --------------------------------------------------------------------------
# subcommands


def cmd_moments(cfg, a):
    spec = mio.spec_from_json(_load(a.spec))
    if isinstance(spec, IntervalUnion):
        table = interval_moments(spec, a.d)
    elif a.grid or not isinstance(spec, (Disk, ConformalImage)):
        table = grid_moments(sample_shade(spec, cfg.grid_n), a.d)
    elif isinstance(spec, Disk):
        table = disk_moments(spec.center, spec.radius, a.d)
    else:
        table = conformal_moments(spec.phi, a.d)
    _emit(mio.dumps(mio.table_to_json(table)), a.out)
    return 0


def cmd_exptransform(cfg, a):
    table = mio.table_from_json(_load(a.input))
    if isinstance(table, MomentTable2D):
        out = s_to_b(table)
    elif isinstance(table, MomentTable1D):
        out = s_to_t(table)
    elif isinstance(table, ExpCoeffTable):
        out = b_to_s(table)
    else:
        out = t_to_s(table)
    _emit(mio.dumps(mio.table_to_json(out)), a.out)
    return 0


def cmd_reconstruct(cfg, a):
    table = mio.table_from_json(_load(a.input))
    if not isinstance(table, (MomentTable2D, ExpCoeffTable)):
        raise ValueError("reconstruct needs a 2D moment or coefficient table")
    rep = reconstruct(table, tol=cfg.tol, max_degree=a.max_degree, mode=a.mode)
    quad = rep.quadrature
    report = {
        "degree": rep.degree,
        "minimal": rep.minimal,
        "degenerate": rep.degenerate,
        "spectrum": rep.spectrum,
        "P": rep.P,
        "Q": rep.Q.q,
        "structure_ok": rep.structure.ok,
        "structure_rank": rep.structure.rank,
        "structure_eigenvalues": rep.structure.eigenvalues,
        "nodes": None if quad is None else quad.nodes,
        "multiplicities": None if quad is None else quad.multiplicities,
        "weights": None if quad is None else quad.weights,
        "derivative_weights": None if quad is None else quad.derivative_weights,
        "diagnostics": rep.diagnostics,
    }
    if a.boundary:
        rows = boundary_samples(rep.Q, n=a.boundary_n)
        mio.write_csv(a.boundary, ["x", "y", "Q"], rows)
    _emit(mio.dumps(report), a.out)
    return 0 if rep.structure.ok else 1


def cmd_markov1d(cfg, a):
    obj = _load(a.input)
    if isinstance(obj, dict) and obj.get("kind") == "intervals":
        spec = mio.spec_from_json(obj)
        t = s_to_t(interval_moments(spec, 2 * len(spec.intervals) + 1))
    else:
        table = mio.table_from_json(obj)
        t = table if isinstance(table, ExpCoeffTable1D) else s_to_t(table)
    d = hankel_rank(t, tol=cfg.tol)
    if d is None:
        raise ValueError("Hankel matrix has full rank; need more coefficients")
    rat = pade_recover(t, d)
    ivs = endpoints(rat)
    _emit(mio.dumps({"d": d, "P": rat.P, "Q": rat.Q, "condition": rat.condition, "intervals": ivs}), a.out)
    return 0


def cmd_volume(cfg, a):
    p = mio.poly_from_json(_load(a.poly))
    alpha = min(find_admissible(p), key=lambda x: (x.order, x.alpha))
    table = check_vol_ratio(p, alpha, _floats(a.delta_grid), samples=a.samples, seed=cfg.seed)
    rows = [(r.delta, r.volume, r.stderr, r.ratio, r.ratio_stderr) for r in table.rows]
    _emit(mio.csv_text(["delta", "volume", "stderr", "ratio", "ratio_stderr"], rows), a.out)
    log.info("alpha=%s bound=%.4g bounded=%s", alpha.alpha, table.bound, table.bounded)
    return 0 if table.bounded else 1


STABILITY_COLUMNS = ["id", "type", "param", "l1", "gap", "ratio", "left", "right", "margin", "in_ball"]


def _holder_job(job):
    keys = ("shape", "family", "eps_grid", "scale", "kappa", "grid_n", "ball_C", "seed")
    ex = run_holder_experiment(HolderConfig(**{k: job[k] for k in keys if k in job}))
    rows = [
        (job["id"], "holder", r.eps, r.l1, r.gap, r.ratio, None, None, None, r.in_ball) for r in ex.records
    ]
    summary = {
        "alpha": ex.alpha.alpha,
        "ball_radius": ex.ball_radius,
        "max_ratio": ex.max_ratio,
        "implied_C": ex.implied_C,
        "ratio_slope": ex.ratio_slope,
        "gap_slope": ex.gap_slope,
        "bounded": ex.bounded,
        "notes": ex.notes,
    }
    return rows, summary, ex.bounded


def _fenchel_job(job):
    p = mio.poly_from_json(job["poly"])
    r = fenchel_check(p, job["eps_grid"], job["s_grid"], N=job.get("grid_n"))
    rows = [(job["id"], "fenchel", s, None, t, None, None, None, None, None) for s, t in zip(r.s_grid, r.tail)]
    summary = {"min_margin": r.min_margin, "slope": r.slope, "expected_slope": r.expected_slope, "holds": r.holds}
    return rows, summary, r.holds


def _diagonal_job(job):
    seed, n = job["seed"], job.get("grid_n", 64)
    f, g = random_shade_pair(seed, n)
    rec = check_diagonal_bound(f, g, random_exterior_points(seed + 1, job.get("points", 100)))
    rows = [
        (job["id"], "diagonal", complex(z), rec.l1, None, None, lf, rt, rt - lf, None)
        for z, lf, rt in zip(rec.points, rec.left, rec.right)
    ]
    b = check_bgap_bound(f, g, job.get("R", 2.0), job.get("d", 4))
    summary = {"l1": rec.l1, "violations": rec.violations, "min_margin": rec.min_margin,
               "bgap_violations": b.violations, "bgap_min_margin": b.min_margin}
    return rows, summary, rec.violations == 0 and b.violations == 0


def _two_domains_job(job):
    rep = two_domains_experiment(
        mio.spec_from_json(job["spec1"]), mio.spec_from_json(job["spec2"]), N=job.get("grid_n", 512)
    )
    rows = [(job["id"], "two_domains", rep.degree, None, None, rep.implied_constant, rep.left, rep.right, None, None)]
    summary = {
        "left": rep.left,
        "right": rep.right,
        "integral": rep.integral,
        "implied_constant": rep.implied_constant,
        "reference_constant": rep.reference_constant,
        "consistent": rep.consistent,
    }
    return rows, summary, rep.consistent


STABILITY_JOBS = {
    "holder": _holder_job,
    "fenchel": _fenchel_job,
    "diagonal": _diagonal_job,
    "two_domains": _two_domains_job,
}


def _run_stability_job(job):
    return STABILITY_JOBS[job["type"]](job)


def cmd_stability(cfg, a):
    conf = _load(a.config)
    jobs = conf.get("experiments", [conf]) if isinstance(conf, dict) else None
    if not isinstance(jobs, list) or not jobs:
        raise mio.FormatError(f"{a.config}: expected an object or an 'experiments' list")
    prepared = []
    for i, job in enumerate(jobs):
        if not isinstance(job, dict) or job.get("type", "holder") not in STABILITY_JOBS:
            raise mio.FormatError(f"{a.config}: experiments[{i}].type must be one of {sorted(STABILITY_JOBS)}")
        job = dict(job)
        job.setdefault("type", "holder")
        job.setdefault("id", f"exp{i}")
        job.setdefault("seed", cfg.seed + i)
        if job["type"] == "holder" and "grid_n" not in job and a.grid_check:
            job["grid_n"] = cfg.grid_n
        prepared.append(job)
    results = run_jobs(_run_stability_job, prepared)
    rows = [row for r in results for row in r[0]]
    summary = {job["id"]: {"type": job["type"], **r[1]} for job, r in zip(prepared, results)}
    _emit(mio.csv_text(STABILITY_COLUMNS, rows), a.out)
    if a.summary:
        mio.write_json(a.summary, summary)
    else:
        sys.stderr.write(mio.dumps(summary))
    return 0 if all(r[2] for r in results) else 1


# --------------------------------------------------------------------------
# selftest


def selftest_rows(tol=1e-8):
    """Deterministic oracle checks: ``(name, error, tolerance)`` triples."""
    rows = []
    r = 0.5
    for a in (0j, 0.2 + 0.1j):
        s = disk_moments(a, r, 3)
        b = s_to_b(s).b
        k = np.arange(4)
        exact = r * r * (a ** k[:, None]) * (np.conj(a) ** k[None, :])
        rows.append((f"disk a={a:g} b_kl", float(np.max(np.abs(b - exact))), 1e-12))
        rep = reconstruct(s, tol=tol)
        rows.append((f"disk a={a:g} degree", float(abs(rep.degree - 1)), 0.0))
        rows.append((f"disk a={a:g} P", float(np.max(np.abs(rep.P - [-a, 1]))), 1e-10))
        q = np.array([[abs(a) ** 2 - r * r, -a], [-np.conj(a), 1]])
        rows.append((f"disk a={a:g} Q", float(np.max(np.abs(rep.Q.q - q))), 1e-10))
        quad = rep.quadrature
        rows.append((f"disk a={a:g} node", float(abs(quad.nodes[0] - a)), 1e-8))
        rows.append((f"disk a={a:g} weight", float(abs(quad.weights[0] - np.pi * r * r)), 1e-8))
    t = s_to_t(MomentTable1D(1.0 / np.arange(1, 10))).t
    rows.append(("unit interval t_k", float(np.max(np.abs(t - np.eye(1, 9)[0]))), 1e-12))
    rat = pade_recover(s_to_t(interval_moments([(-0.8, -0.3), (0.1, 0.6)], 5)), 2)
    ivs = np.array(endpoints(rat))
    rows.append(("two intervals endpoints", float(np.max(np.abs(ivs - [[-0.8, -0.3], [0.1, 0.6]]))), 1e-9))
    sc = conformal_moments([0, 1, 0.3], 4)
    rep = reconstruct(sc, tol=tol)
    rows.append(("conformal degree", float(abs(rep.degree - 2)), 0.0))
    rows.append(("conformal quadrature residual", float(rep.diagnostics["quadrature_residual"]), 1e-6))
    rows.append(("C3(2)", abs(C3(2.0) - 2 / np.pi * np.exp(4 / np.pi)), 1e-12))
    rows.append(("two domains left side", abs(two_domains_experiment(Disk(0, 0.4), Disk(0, 0.5), N=64).left - 0.09), 1e-12))
    return rows


def cmd_selftest(cfg, a):
    rows = selftest_rows(cfg.tol)
    width = max(len(r[0]) for r in rows)
    lines = [f"{'check'.ljust(width)}  {'error':>10}  {'tol':>8}  result"]
    ok = True
    for name, err, tol in rows:
        passed = err <= tol
        ok &= passed
        lines.append(f"{name.ljust(width)}  {err:10.3e}  {tol:8.1e}  {'PASS' if passed else 'FAIL'}")
    lines.append(f"{sum(e <= t for _, e, t in rows)}/{len(rows)} checks passed")
    _emit("\n".join(lines) + "\n", a.out)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# parser


def _global_flags(p, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=default(DEFAULT_SEED), help="random seed (default 42)")
    p.add_argument("--grid-n", type=int, default=default(DEFAULT_GRID_N), help="grid resolution N")
    p.add_argument("--tol", type=float, default=default(DEFAULT_TOL), help="numerical tolerance")
    p.add_argument("-v", "--verbose", action="count", default=default(0))


def build_parser():
    parser = argparse.ArgumentParser(prog="momentshape", description="Shapes from moments via the exponential transform.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        p.add_argument("-o", "--out", help="output file (default: stdout)")
        return p

    p = add("moments", cmd_moments, "moment table of a shape spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--d", type=int, required=True, help="maximal order")
    p.add_argument("--grid", action="store_true", help="use grid quadrature even when a closed form exists")

    p = add("exptransform", cmd_exptransform, "moments to exponential-transform coefficients (or back)")
    p.add_argument("--input", required=True)

    p = add("reconstruct", cmd_reconstruct, "defining polynomial and quadrature data from a 2D table")
    p.add_argument("--input", required=True)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--mode", choices=("null", "lowest"), default="null")
    p.add_argument("--boundary", help="CSV of Q(x, y) samples for contouring")
    p.add_argument("--boundary-n", type=int, default=201)

    p = add("markov1d", cmd_markov1d, "interval endpoints from 1D data")
    p.add_argument("--input", required=True)

    p = add("volume", cmd_volume, "Monte Carlo sublevel-set volume ratios")
    p.add_argument("--poly", required=True)
    p.add_argument("--delta-grid", default="1e-2,1e-3,1e-4,1e-5")
    p.add_argument("--samples", type=int, default=1_000_000)

    p = add("stability", cmd_stability, "run stability experiments from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--summary", help="JSON summary file (default: stderr)")
    p.add_argument("--grid-check", action="store_true", help="cross-check Hoelder closed forms on a grid")

    add("selftest", cmd_selftest, "deterministic oracle checks")
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(a.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(a.subcommand, a.seed, a.grid_n, a.tol, a.verbose)
        with warnings.catch_warnings():
            warnings.simplefilter("always", OutsideUnitDiskWarning)
            return a.func(cfg, a)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"momentshape: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"momentshape: validation failed: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
