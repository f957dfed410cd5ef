"""Command-line interface: ``sl2mag <subcommand> ...``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import geometry, homogeneous, lie_core, periodicity, trajectories
from .errors import (
    NonpositiveYReached,
    Sl2MagError,
    StepUnderflow,
    StrengthTooSmall,
    UnknownFigureId,
)
from .figures import FIGURES, figure_curve, render_svg
from .hyperbolic import cayley_to_disk, riemannian_circle
from .hopf_tube import HopfTube, brioschi_curvature, f1_metric

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COLUMNS = ["s", "x", "y", "theta_unwrapped", "theta_mod2pi", "U", "disk_u", "disk_v"]

_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


class ConfigError(Exception):
    pass


def parse_angle(text: str) -> float:
    """A float, or an expression like ``pi/3``, ``2pi/5``, ``2*pi/5``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    den = float(m.group(2)) if m.group(2) else 1.0
    return c * math.pi / den


def fmt(v: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(v))


# -- integrate -----------------------------------------------------------------

def _trajectory_table(args):
    params = trajectories.MagneticParams(args.q, args.sigma)
    case = trajectories.classify_case(params)
    S = params.sin_sigma
    kappa = params.qbar / S if S > 1e-12 else float("nan")
    span = args.span
    if span is None:
        span = 3.0 * periodicity.phase_period(params) if params.discriminant > 0 else 10.0
    s = np.linspace(0.0, span, args.samples)
    init = trajectories.TrajectoryState(args.x0, args.y0, args.theta0, args.u0)
    oracle = None
    if case is trajectories.PhaseCase.REEB:
        direction = 1 if params.cos_sigma > 0 else -1
        xyt = trajectories.reeb_trajectory(args.x0, args.y0, args.theta0, direction)(s)
        U = np.full_like(s, args.u0)
        method = "reeb"
    else:
        try:
            traj = trajectories.general_trajectory(params, init)
            xyt = traj(s)
            U = traj.phase(s)
            traj.check_positive(s)
            method = "closed-form"
        except StrengthTooSmall:
            oracle = trajectories.integrate_oracle(init, params, span)
            xyt = oracle(s)
            _, d1, _ = oracle.jet(s)
            U = np.unwrap(np.arctan2(d1[:, 1], d1[:, 0]))
            method = "oracle"
    u, v = cayley_to_disk(xyt[:, 0], xyt[:, 1])
    table = np.column_stack([s, xyt[:, 0], xyt[:, 1], xyt[:, 2], np.mod(xyt[:, 2], 2 * np.pi), U, u, v])
    meta = {"q": args.q, "sigma": args.sigma, "qbar": params.qbar, "kappa_beta": kappa,
            "case": case.name, "method": method}
    return params, init, s, table, meta


def write_table(path, table: np.ndarray, meta: dict, fmt_name: str) -> None:
    if fmt_name == "json":
        doc = {"metadata": meta, "columns": COLUMNS,
               "data": {c: [float(v) for v in table[:, i]] for i, c in enumerate(COLUMNS)}}
        text = json.dumps(doc, indent=1, allow_nan=True) + "\n"
    else:
        lines = [f"# {k}={fmt(v) if isinstance(v, float) else v}" for k, v in meta.items()]
        lines.append(",".join(COLUMNS))
        lines.extend(",".join(fmt(v) for v in row) for row in table)
        text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_table(path) -> tuple[dict, np.ndarray]:
    """Inverse of :func:`write_table` for both formats."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return doc["metadata"], np.column_stack([doc["data"][c] for c in doc["columns"]])
    meta, rows = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        elif line and not line.startswith("s,"):
            rows.append([float(t) for t in line.split(",")])
    return meta, np.array(rows)


def cmd_integrate(args) -> int:
    params, init, s, table, meta = _trajectory_table(args)
    write_table(args.output, table, meta, args.format)
    if args.oracle:
        if meta["method"] == "reeb":
            oracle_xyt = table[:, 1:4]
        else:
            oracle_xyt = trajectories.integrate_oracle(init, params, float(s[-1]))(s)
        diff = float(np.max(np.abs(oracle_xyt - table[:, 1:4])))
        if args.output not in (None, "-"):
            out = Path(args.output)
            otable = table.copy()
            otable[:, 1:4] = oracle_xyt
            otable[:, 4] = np.mod(oracle_xyt[:, 2], 2 * np.pi)
            otable[:, 6], otable[:, 7] = cayley_to_disk(oracle_xyt[:, 0], oracle_xyt[:, 1])
            write_table(out.with_suffix(".oracle" + out.suffix), otable, dict(meta, method="oracle"), args.format)
        print(f"oracle sup-norm difference: {diff:.3e}", file=sys.stderr)
        if diff >= 1e-6:
            return EXIT_VERIFY
    return EXIT_OK


# -- scan-periodic -------------------------------------------------------------

def scan_row(task):
    m, k, sigma, window, perturb = task
    cert = periodicity.quantized_strength(m, k, sigma, window)
    T, defect, n, pert = [], [], [], []
    for q in cert.q_values:
        p = trajectories.MagneticParams(q, sigma)
        c = periodicity.detect_closure(p, window)
        T.append(periodicity.phase_period(p))
        defect.append(c.defect)
        n.append(c.n_periods)
        md = []
        for f in (1.0 - perturb, 1.0 + perturb):
            try:
                md.append(periodicity.min_defect(trajectories.MagneticParams(q * f, sigma), window))
            except Sl2MagError:
                md.append(float("inf"))
        pert.append(min(md))
    return {
        "m": m, "k": k, "sigma": sigma,
        "q_accepted": cert.q_values,
        "q_rejected": [(r.q, r.reason) for r in cert.rejected],
        "T_phase": T, "n_periods": n, "defect": defect, "perturbed_min_defect": pert,
    }


SCAN_COLUMNS = ["m", "k", "sigma", "q_accepted", "q_rejected", "T_phase", "n_periods", "defect",
                "perturbed_min_defect"]


def format_scan_row(row: dict) -> str:
    def join(vals):
        return ";".join(fmt(v) for v in vals) if vals else "-"

    rej = ";".join(f"{fmt(q)}:{reason}" for q, reason in row["q_rejected"]) or "-"
    return "\t".join([
        str(row["m"]), str(row["k"]), fmt(row["sigma"]), join(row["q_accepted"]), rej,
        join(row["T_phase"]), ";".join(map(str, row["n_periods"])) or "-", join(row["defect"]),
        join(row["perturbed_min_defect"]),
    ])


def scan_tasks(args):
    if args.m_max < 1 or args.k_max < 1 or not args.sigma:
        raise ConfigError("need m-max >= 1, k-max >= 1 and at least one sigma")
    tasks = []
    for m in range(1, args.m_max + 1):
        for k in range(1, args.k_max + 1):
            if m == k or math.gcd(m, k) != 1:
                continue
            for sigma in args.sigma:
                if not 0.0 < sigma < math.pi:
                    raise ConfigError(f"sigma = {sigma!r} must lie in (0, pi)")
                tasks.append((m, k, sigma, args.window or 4 * k, args.perturb))
    return tasks


def cmd_scan_periodic(args) -> int:
    tasks = scan_tasks(args)
    workers = args.workers or os.cpu_count() or 1
    if workers == 1 or len(tasks) < 2:
        rows = [scan_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(scan_row, tasks, chunksize=8))
    text = "\t".join(SCAN_COLUMNS) + "\n" + "".join(format_scan_row(r) + "\n" for r in rows)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


# -- figures -------------------------------------------------------------------

def cmd_figures(args) -> int:
    ids = sorted(FIGURES) if args.id == "all" else [args.id]
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for fid in ids:
        fc = figure_curve(fid, args.samples)
        (outdir / f"{fid}.svg").write_text(render_svg(fc))
        a, b = fc.xyt[0], fc.xyt[-1]
        dth = abs((b[2] - a[2] + math.pi) % (2 * math.pi) - math.pi)
        print(f"{fid}: q={fmt(fc.q)} periods={fc.n_periods} endpoint={math.hypot(*(b[:2] - a[:2])):.3e} "
              f"theta_defect={dth:.3e}")
    return EXIT_OK


# -- verify --------------------------------------------------------------------

def _suite_tables(corrupt):
    conn = geometry.CONNECTION.copy()
    if corrupt:
        conn[0, 0, 1] += 1
    d1 = int(np.abs(conn - geometry.koszul_frame_connection()).max())
    return {"connection vs Koszul": (d1, 0)}


def _suite_curvature(corrupt):
    table = geometry.CURVATURE.copy()
    if corrupt:
        table[0, 1, 0, 1] += 1
    derived = geometry.curvature_from_connection()
    worst = 0.0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = np.eye(3)
                worst = max(worst, float(np.abs(geometry.curvature_formula(e[i], e[j], e[k]) - table[i, j, k]).max()))
    phi_sec = float(geometry.curvature_operator(np.eye(3)[0], np.eye(3)[1], np.eye(3)[1]) @ np.eye(3)[0])
    return {
        "curvature table vs connection": (int(np.abs(table - derived).max()), 0),
        "curvature table vs closed formula": (worst, 1e-12),
        "phi-sectional curvature + 7": (abs(phi_sec + 7.0), 1e-12),
    }


def _suite_sasakian(corrupt):
    rep = geometry.verify_sasakian(200)
    out = {k: (v + (1.0 if corrupt else 0.0), 1e-9) for k, v in rep.residuals.items()}
    out["d eta finite difference"] = (rep.fd_residual, rep.fd_tol)
    return out


def _suite_exp(corrupt):
    rng = np.random.default_rng(0)
    rel, rt = 0.0, 0.0
    for _ in range(50):
        X = lie_core.AlgebraVector(*rng.uniform(-1, 1, 3))
        t = rng.uniform(-3, 3)
        A = lie_core.exp_algebra(X, t).as_array()
        B = lie_core.exp_oracle(X, t).as_array()
        rel = max(rel, float(np.abs(A - B).max() / max(1.0, np.abs(B).max())))
        c = lie_core.iwasawa_decompose(lie_core.Sl2Matrix.from_array(B, check=False))
        rt = max(rt, float(np.abs(c.to_matrix().as_array() - B).max() / max(1.0, np.abs(B).max())))
    return {"exp closed form vs oracle (relative)": (rel + corrupt, 1e-12),
            "Iwasawa round trip (relative)": (rt, 1e-12)}


def _suite_trajectories(corrupt):
    worst = 0.0
    s = np.linspace(0.0, 5.0, 201)
    for q, sigma in [(3.0, math.pi / 2), (2.5, 1.0), (-2.0, 1.2), (0.9, 1.3)]:
        p = trajectories.MagneticParams(q + (0.01 if corrupt else 0.0), sigma)
        c = trajectories.reconstruct_curve(trajectories.MagneticParams(q, sigma))
        o = trajectories.integrate_oracle(c.initial_state(), p, 5.0)
        worst = max(worst, float(np.abs(c(s) - o(s)).max()))
    return {"closed form vs integrator": (worst, 1e-6)}


def _suite_homogeneous(corrupt):
    rng = np.random.default_rng(1)
    bad = 0
    for i in range(100):
        X = lie_core.AlgebraVector(*rng.normal(size=3)).normalized()
        q = homogeneous.magnetic_strength_for(X) if i % 2 == 0 else rng.uniform(-4, 4)
        crit = homogeneous.is_homogeneous_magnetic(X, q + (0.5 if corrupt else 0.0))
        bad += crit != homogeneous.exp_trajectory_check(X, q).ok
    return {"criterion vs Lorentz residual disagreements": (bad, 0)}


def _suite_hopf(corrupt):
    worst = 0.0
    for k in (0.0, 1.0, 2.0, 3.0):
        tube = HopfTube(riemannian_circle(k, 1.0))
        hTT, hTx, hxx = tube.second_fundamental_form(0.2, 0.4)
        worst = max(worst, abs(hTT - k - corrupt), abs(hTx - 1.0), abs(hxx))
        K = brioschi_curvature(lambda u, v, b=tube.base: tuple(a[0] for a in f1_metric(b, u)), 0.4, 0.0)
        worst = max(worst, abs(K))
    return {"second fundamental form and flatness": (worst, 1e-6)}


SUITES = {
    "tables": _suite_tables,
    "curvature": _suite_curvature,
    "sasakian": _suite_sasakian,
    "exp": _suite_exp,
    "trajectories": _suite_trajectories,
    "homogeneous": _suite_homogeneous,
    "hopf": _suite_hopf,
}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        for check, (value, tol) in SUITES[name](args.corrupt).items():
            ok = value <= tol
            failed |= not ok
            print(f"{'PASS' if ok else 'FAIL'}  {name:<13} {check}: {value:.3e} (tol {tol:.1e})")
    return EXIT_VERIFY if failed else EXIT_OK


# -- exp / iwasawa -------------------------------------------------------------

def cmd_exp(args) -> int:
    X = lie_core.AlgebraVector(args.a, args.b, args.c)
    if X.norm() == 0:
        raise ConfigError("X must be nonzero")
    P = lie_core.exp_algebra(X, args.t)
    co = lie_core.iwasawa_decompose(P, tol=1e-9)
    out = {
        "matrix": P.as_array().tolist(),
        "iwasawa": {"x": co.x, "y": co.y, "theta": co.theta},
        "mobius": lie_core.classify_mobius(P).value,
        "det_X": X.det,
        "contact_angle": homogeneous.contact_angle(X),
        "geodesic": homogeneous.is_homogeneous_geodesic(X),
        "magnetic_strength": homogeneous.magnetic_strength_for(X),
    }
    if not homogeneous.is_reeb_direction(X):
        c = homogeneous.project_exp_curve(X)
        out["projection"] = {"kind": c.kind, "class": c.classification.value, "curvature": c.curvature,
                             "center": c.center, "radius": c.radius, "line": c.line}
    print(json.dumps(out, indent=1))
    return EXIT_OK


def cmd_iwasawa(args) -> int:
    vals = args.matrix
    if vals is None:
        vals = [float(t) for t in sys.stdin.read().split()]
    if len(vals) != 4:
        raise ConfigError("need exactly four matrix entries p11 p12 p21 p22")
    P = lie_core.Sl2Matrix(*vals)
    c = lie_core.iwasawa_decompose(P)
    print(json.dumps({"x": c.x, "y": c.y, "theta": c.theta}))
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sl2mag", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file of option defaults; command-line flags take precedence")
    sub = p.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("integrate", help="sample one trajectory to CSV or JSON")
    pi.add_argument("--q", type=float, required=False)
    pi.add_argument("--sigma", type=parse_angle, required=False)
    pi.add_argument("--x0", type=float, default=0.0)
    pi.add_argument("--y0", type=float, default=1.0)
    pi.add_argument("--theta0", type=float, default=0.0)
    pi.add_argument("--u0", type=float, default=0.0)
    pi.add_argument("--span", type=float, default=None, help="arclength span (default: 3 phase periods)")
    pi.add_argument("--samples", type=int, default=1001)
    pi.add_argument("--format", choices=["csv", "json"], default="csv")
    pi.add_argument("--output", "-o", default=None)
    pi.add_argument("--oracle", action="store_true", help="also integrate numerically and compare")
    pi.set_defaults(func=cmd_integrate)

    ps = sub.add_parser("scan-periodic", help="tabulate quantized strengths over (m, k, sigma)")
    ps.add_argument("--m-max", type=int, default=5)
    ps.add_argument("--k-max", type=int, default=7)
    ps.add_argument("--sigma", type=parse_angle, nargs="+", default=None)
    ps.add_argument("--window", type=int, default=None, help="phase periods searched (default 4k)")
    ps.add_argument("--perturb", type=float, default=0.01)
    ps.add_argument("--workers", type=int, default=None)
    ps.add_argument("--output", "-o", default=None)
    ps.set_defaults(func=cmd_scan_periodic)

    pf = sub.add_parser("figures", help="render the closed-trajectory figures as SVG")
    pf.add_argument("--id", default="all")
    pf.add_argument("--outdir", default="figures")
    pf.add_argument("--samples", type=int, default=2000)
    pf.set_defaults(func=cmd_figures)

    pv = sub.add_parser("verify", help="run the structure verification suites")
    pv.add_argument("--suite", choices=["all", *SUITES], default="all")
    pv.add_argument("--corrupt", action="store_true", help="test mode: perturb a table before checking")
    pv.set_defaults(func=cmd_verify)

    pe = sub.add_parser("exp", help="one-parameter subgroup exp(tX)")
    pe.add_argument("--a", type=float, default=0.0)
    pe.add_argument("--b", type=float, default=0.0)
    pe.add_argument("--c", type=float, default=0.0)
    pe.add_argument("--t", type=float, default=1.0)
    pe.set_defaults(func=cmd_exp)

    pw = sub.add_parser("iwasawa", help="decompose p = n(x) a(y) k(theta)")
    pw.add_argument("--matrix", type=float, nargs=4, default=None, metavar=("P11", "P12", "P21", "P22"))
    pw.set_defaults(func=cmd_iwasawa)
    return p


def _apply_config(parser, argv):
    pre, _ = parser.parse_known_args(argv)
    if not pre.config:
        return parser.parse_args(argv)
    try:
        cfg = json.loads(Path(pre.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {pre.config!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[pre.command]
    known = {a.dest for a in sub._actions}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys for {pre.command}: {sorted(unknown)}")
    for a in sub._actions:
        v = cfg.get(a.dest)
        if v is None or a.type is None:
            continue
        try:
            cfg[a.dest] = [a.type(str(t)) for t in v] if isinstance(v, list) else a.type(str(v))
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"bad value for {a.dest!r} in config: {exc}") from exc
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.command == "integrate" and (args.q is None or args.sigma is None):
            raise ConfigError("integrate needs --q and --sigma")
        if args.command == "scan-periodic" and args.sigma is None:
            args.sigma = [math.pi / 6, math.pi / 4, math.pi / 3, 2 * math.pi / 5, math.pi / 2]
        if getattr(args, "samples", 2) < 2:
            raise ConfigError("samples must be at least 2")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepUnderflow, NonpositiveYReached, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UnknownFigureId as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except (Sl2MagError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
