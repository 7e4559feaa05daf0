"""``bos`` command-line interface.

Every command writes one data file (CSV by default) and one JSON report into
the output directory, prints one line per check, and exits with

* 0 when every check passes,
* 1 when a check fails,
* 2 for an invalid configuration (parameters outside the regime, bad grid),
* 3 for a numerical failure (quadrature, eigensolver, near-eigenvalue shift).

Errors are reported as a JSON object on stderr and in the report.
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

from . import acceptance
from .evolution import SCHEMES, envelope_monotone, evolve, growth_envelope, preset
from .factorization import (
    NearEigenvalueError,
    ResolventError,
    composition_stages,
    factorization_residual,
    hs_differences_decreasing,
    hs_norm_estimate,
    l11_inverse_direct,
    resolvent_apply,
    row_norm_slope,
)
from .inverse import (
    InverseProfile,
    QuadratureError,
    compute_y0,
    minv_closed_form,
    minv_fourier,
    minv_ode,
)
from .operators import KINDS, adjoint_check, assemble, quadrature_assemble
from .params import AliasingError, FourierVector, GridError, OperatorParams, ParamsError, validate_params
from .report import Check, Report, check
from .spectrum import SpectrumError, compute_spectrum

log = logging.getLogger("bos")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_ERRORS = (ParamsError, GridError, AliasingError, ValueError)
NUMERIC_ERRORS = (QuadratureError, NearEigenvalueError, ResolventError, SpectrumError, np.linalg.LinAlgError, ArithmeticError)


class ConfigError(ValueError):
    """Bad flag values or config file contents."""


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so that usage errors get a JSON error object."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def parse_grid(text: str) -> list[tuple[float, float]]:
    """``"0,1;0.3,1.0"`` -> ``[(0.0, 1.0), (0.3, 1.0)]``."""
    pairs = []
    for item in str(text).split(";"):
        if not item.strip():
            continue
        parts = item.split(",")
        if len(parts) != 2:
            raise ConfigError(f"grid entries are 'a,b' pairs, got {item!r}")
        pairs.append((float(parts[0]), float(parts[1])))
    return pairs


def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    """``"a=0:0.4:0.05"`` -> ``("a", [0, 0.05, ..., 0.4])`` (stop inclusive)."""
    try:
        name, rng = text.split("=", 1)
        start, stop, step = (float(v) for v in rng.split(":"))
    except ValueError as exc:
        raise ConfigError(f"sweep must look like 'a=START:STOP:STEP', got {text!r}") from exc
    name = name.strip()
    if name not in ("a", "b"):
        raise ConfigError(f"can only sweep 'a' or 'b', got {name!r}")
    if step <= 0 or stop < start:
        raise ConfigError("sweep needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return name, np.round(start + step * np.arange(count), 12)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use flag names."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _add_params(p: argparse.ArgumentParser, n_default: int | None = 64) -> None:
    p.add_argument("--a", type=float, default=0.0, help="drift coefficient a >= 0")
    p.add_argument("--b", type=float, default=1.0, help="diffusion coefficient b > 0")
    if n_default is not None:
        p.add_argument("--n", type=int, default=n_default, help="truncation half-width N")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bos", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="key = value file; command-line flags override it")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized data and tests")
    parser.add_argument("--out", dest="out_dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="data file format")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assemble", help="Fourier matrices of S, M, Mstar, D, C, L")
    _add_params(p, 16)
    p.add_argument("--kind", choices=KINDS + ("all",), default="all")

    p = sub.add_parser("minverse", help="M^{-1} u by closed form, Fourier solve or ODE")
    _add_params(p, None)
    p.add_argument("--rhs", default="one", help="one | cos | sin | trig (seeded random trig polynomial)")
    p.add_argument("--method", choices=("closed-form", "fourier", "ode", "all"), default="all")
    p.add_argument("--points", type=int, default=201, help="number of sample points in (-pi, pi)")
    p.add_argument("--n-solve", type=int, default=2**17, help="half-width of the Fourier solve")
    p.add_argument("--x-cut", type=float, default=InverseProfile.x_cut)
    p.add_argument("--quad-order", type=int, default=InverseProfile.quad_order)

    p = sub.add_parser("factor-check", help="L = S M residual and L11 composition check")
    _add_params(p)

    p = sub.add_parser("resolvent", help="apply (L_N - lambda)^{-1} through the block formula")
    _add_params(p)
    p.add_argument("--lam", type=_complex, default=complex(1.0), help="shift, e.g. 2+1i")
    p.add_argument("--rhs", choices=("one", "bump", "random"), default="random")

    p = sub.add_parser("hs-norm", help="Frobenius norms of truncated L11^{-1}")
    _add_params(p, None)
    p.add_argument("--n-list", type=_int_list, default=[16, 32, 64, 128])

    p = sub.add_parser("spectrum", help="trusted eigenvalues of L")
    _add_params(p)
    p.add_argument("--k", type=int, default=10, help="number of eigenvalues")
    p.add_argument("--tol", type=float, default=1e-6, help="relative stability tolerance")
    p.add_argument("--sweep", help="parameter sweep, e.g. a=0:0.4:0.05")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    p = sub.add_parser("evolve", help="integrate y_t + L y = 0")
    _add_params(p)
    p.add_argument("--init", default="bump", help="bump | random | mode:K")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--scheme", choices=SCHEMES, default="rk4")
    p.add_argument("--checkpoint", type=float, default=0.1)

    p = sub.add_parser("growth", help="norm envelope of exp(-t L11_N)")
    _add_params(p, None)
    p.add_argument("--n-list", type=_int_list, default=[16, 32, 64])
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--t-step", type=float, default=0.25)

    p = sub.add_parser("verify-all", help="run the acceptance criteria")
    p.add_argument("--grid", help="parameter pairs 'a,b;a,b' for the parameter-generic criteria")
    p.add_argument("--n", type=int, default=None, help="override N for criteria 6, 8 and 9")
    p.add_argument("--criteria", type=_int_list, default=list(acceptance.CRITERIA))

    for name, sp in sub.choices.items():
        sp.add_argument("--out", dest="out_file", default=None, help="data file path (default OUT/<command>.<format>)")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """Parse flags, then reparse with config-file values as defaults."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest: a for a in sub._actions} | {a.dest: a for a in parser._actions}  # noqa: SLF001
    unknown = sorted(set(cfg) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    # typed conversion through the same argparse actions
    converted = {}
    for key, value in cfg.items():
        act = known[key]
        conv = act.type or (lambda v: v)
        if act.choices is not None and value not in act.choices and conv(value) not in act.choices:
            raise ConfigError(f"config key {key!r}: {value!r} not in {list(act.choices)}")
        converted[key] = conv(value)
    parser.set_defaults(**{k: v for k, v in converted.items() if k in {a.dest for a in parser._actions}})  # noqa: SLF001
    sub.set_defaults(**converted)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- output


class Outputs:
    """Resolves data and report paths for one command."""

    def __init__(self, args: argparse.Namespace, stem: str):
        self.fmt = args.format
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.out_file:
            self.data = Path(args.out_file)
            self.data.parent.mkdir(parents=True, exist_ok=True)
            self.report = self.data.with_name(self.data.stem + ".report.json")
        else:
            self.data = out_dir / f"{stem}.{self.fmt}"
            self.report = out_dir / f"{stem}.report.json"

    def table(self, header: list[str], rows, report: Report, key: str = "table") -> None:
        """Write rows as CSV, or embed them in the report when the format is JSON."""
        rows = [[_cell(v) for v in r] for r in rows]
        if self.fmt == "csv":
            with open(self.data, "w", newline="\n", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                w.writerows(rows)
        else:
            payload = {"columns": header, "rows": rows}
            report.results[key] = payload
            with open(self.data, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        report.results.setdefault("data_file", str(self.data))


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _params(args) -> OperatorParams:
    return validate_params(args.a, args.b)


def _config_echo(args) -> dict:
    return {k: (str(v) if isinstance(v, complex) else v) for k, v in sorted(vars(args).items()) if k != "verbose"}


def _check_grid_size(N: int, name: str = "N") -> None:
    if N < 2:
        raise GridError(f"{name} must be at least 2, got {N}")


# ---------------------------------------------------------------- commands


def cmd_assemble(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    _check_grid_size(args.n)
    kinds = KINDS if args.kind == "all" else (args.kind,)
    rows = []
    for kind in kinds:
        op = assemble(p, args.n, kind)
        D = op.dense()
        idx = np.argwhere(D != 0)
        rows.extend((kind, m - args.n, n - args.n, D[m, n].real, D[m, n].imag) for m, n in idx)
        err = float(np.max(np.abs(D - quadrature_assemble(p, args.n, kind))))
        rep.add(check(f"{kind} stencil vs quadrature assembly", err, 1e-10, "<=", 1))
    out.table(["kind", "m", "n", "re", "im"], rows, rep)
    rep.add(check("Mstar - M^H", adjoint_check(p, args.n), 1e-13, "<=", 4))
    C = assemble(p, args.n, "C").dense()
    D = assemble(p, args.n, "D").dense()
    rep.add(check("C Hermitian", float(np.max(np.abs(C - C.conj().T))), 1e-13, "<=", 4))
    rep.add(check("min eig D", float(np.linalg.eigvalsh(D).min()), 1 - (p.a + p.b / 2) - 1e-10, ">=", 4))
    rep.results.update(N=args.n, kinds=list(kinds), degenerate_drainage=p.degenerate_drainage)


def _rhs_function(spec: str, seed: int):
    if spec == "one":
        return FourierVector.from_modes({0: 1.0}, 1)
    if spec == "cos":
        return FourierVector.from_modes({-1: 0.5, 1: 0.5}, 1)
    if spec == "sin":
        return FourierVector.from_modes({-1: 0.5j, 1: -0.5j}, 1)
    if spec == "trig":
        return acceptance.random_trig_polys(seed, 1)[0]
    raise ConfigError(f"unknown rhs {spec!r}; expected one, cos, sin or trig")


def cmd_minverse(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    if args.points < 2:
        raise GridError("need at least 2 points")
    u = _rhs_function(args.rhs, args.seed)
    # open interval, symmetric, avoiding the singular points 0 and +-pi
    x = -math.pi + 2 * math.pi * (np.arange(args.points) + 0.5) / args.points
    profile = InverseProfile(x_cut=args.x_cut, quad_order=args.quad_order)
    methods = ("closed-form", "fourier", "ode") if args.method == "all" else (args.method,)
    vals = {}
    for m in methods:
        if m == "closed-form":
            vals[m] = minv_closed_form(p, u, x, profile).values
        elif m == "fourier":
            vals[m] = minv_fourier(p, u, x, N_solve=args.n_solve).values
        else:
            vals[m] = minv_ode(p, u, x).values
    header = ["x"] + [f"{m}_{part}" for m in methods for part in ("re", "im")]
    rows = [[xi] + [v for m in methods for v in (vals[m][i].real, vals[m][i].imag)] for i, xi in enumerate(x)]
    out.table(header, rows, rep)
    keep = np.abs(np.abs(x) - math.pi / 2) < math.pi / 2 - 1e-2
    for i, m1 in enumerate(methods):
        for m2 in methods[i + 1:]:
            d = float(np.max(np.abs(vals[m1][keep] - vals[m2][keep])) / max(1.0, np.max(np.abs(vals[m2][keep]))))
            rep.add(check(f"{m1} vs {m2} (max, delta=1e-2)", d, 1e-6, "<=", 3))
    if args.rhs == "one":
        meta = compute_y0(p, profile, n_points=9).meta
        rep.add(check("y0(0) vs 1/(1-a)", abs(meta["near_zero"] - meta["limit_zero"]), 1e-6, "<=", 2))
        rep.add(check("y0(pi) vs 1/(1+a)", abs(meta["near_pi"] - meta["limit_pi"]), 1e-6, "<=", 2))
        rep.add(check("y0 evenness defect", meta["evenness_defect"], 1e-8, "<=", 2))
        rep.results["y0"] = {k: meta[k] for k in ("limit_zero", "limit_pi", "near_zero", "near_pi", "integral")}
    rep.results.update(methods=list(methods), rhs=args.rhs)


def cmd_factor_check(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    _check_grid_size(args.n)
    res = factorization_residual(p, args.n)
    rep.add(check("factorization residual L - S M (interior)", res, 1e-10, "<=", 1))
    rng = np.random.default_rng(args.seed)
    inv = l11_inverse_direct(p, args.n)
    rows = []
    worst = 0.0
    for j in range(20):
        c = rng.normal(size=2 * args.n + 1) + 1j * rng.normal(size=2 * args.n + 1)
        c[args.n] = 0
        g = FourierVector(c)
        st = composition_stages(p, args.n, g)
        d = (st.y - inv.apply(g)).l2_norm() / inv.apply(g).l2_norm()
        worst = max(worst, d)
        rows.append((j, d, st.orthogonality, abs(st.y.mean)))
    out.table(["sample", "rel_diff", "orthogonality", "mean"], rows, rep)
    rep.add(check("composed vs direct L11^-1 (20 samples)", worst, 1e-7, "<=", 5))
    rep.results.update(N=args.n, factorization_residual=res, l11_condition=inv.condition)


def cmd_resolvent(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    _check_grid_size(args.n)
    N = args.n
    if args.rhs == "one":
        f = FourierVector.from_modes({0: 1.0}, N)
    elif args.rhs == "bump":
        from .evolution import bump

        f = bump(N)
    else:
        rng = np.random.default_rng(args.seed)
        f = FourierVector(rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1))
    y = resolvent_apply(p, N, args.lam, f)
    L = assemble(p, N, "L").dense()
    yd = np.linalg.solve(L - args.lam * np.eye(2 * N + 1), f.coeffs)
    rel = float(np.linalg.norm(y.coeffs - yd) / max(np.linalg.norm(yd), 1e-300))
    out.table(["n", "re", "im"], [(n, c.real, c.imag) for n, c in zip(y.modes, y.coeffs)], rep)
    rep.add(check("block vs dense resolvent", rel, 1e-8, "<=", 6))
    rep.results.update(N=N, lam=args.lam, l2_norm=y.l2_norm())


def cmd_hs_norm(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    if not args.n_list:
        raise GridError("empty N list")
    for N in args.n_list:
        _check_grid_size(N)
    seq = hs_norm_estimate(p, sorted(args.n_list))
    out.table(["N", "hs_norm"], seq, rep)
    if len(seq) >= 3:
        rep.add(check("HS successive differences strictly decreasing", hs_differences_decreasing(seq), True, "==", 7))
    rep.add(check(f"row-norm log-log slope N={seq[-1][0]}", row_norm_slope(p, seq[-1][0]), -0.9, "<=", 7))
    rep.results["hs_norms"] = dict(seq)


def _spectrum_checks(rep_s, k: int) -> list[Check]:
    checks = [
        check("trusted eigenvalues converged", rep_s.n_converged, k, ">=", 8),
        check("zero count matches roots found", rep_s.complete, True, "==", 8),
        check("min gap vs 10x convergence tolerance", rep_s.min_gap,
              10 * rep_s.tolerance * (1 + float(np.max(np.abs(rep_s.eigenvalues)))), ">=", 8),
    ]
    if rep_s.params.a == 0:
        checks += [
            check("max |Re lambda|/(1+|lambda|)", rep_s.max_real_part_ratio, 1e-8, "<=", 8),
            check("eigenfunction symmetry defect", rep_s.symmetry_defect, 1e-6, "<=", 8),
            check("J-self-adjointness defect", rep_s.j_defect, 1e-12, "<=", 8),
        ]
    return checks


def _spectrum_job(job):
    a, b, N, k, tol, path, fmt = job
    p = validate_params(a, b)
    rep_s = compute_spectrum(p, N, k, tol)
    if fmt == "csv":
        rep_s.to_csv(path)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_summary_json(rep_s), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rep_s


def _summary_json(rep_s) -> dict:
    from .report import _jsonable

    return _jsonable(rep_s.summary())


def cmd_spectrum(args, rep: Report, out: Outputs) -> None:
    if args.k < 1:
        raise ConfigError("k must be positive")
    _check_grid_size(args.n)
    if not args.sweep:
        rep_s = _spectrum_job((args.a, args.b, args.n, args.k, args.tol, out.data, args.format))
        rep.add(*_spectrum_checks(rep_s, args.k))
        rep.results.update(_summary_json(rep_s))
        rep.results["data_file"] = str(out.data)
        return
    name, values = parse_sweep(args.sweep)
    points = [(float(v), args.b) if name == "a" else (args.a, float(v)) for v in values]
    for a, b in points:
        validate_params(a, b)
    base = out.data.parent
    jobs = [
        (a, b, args.n, args.k, args.tol, str(base / f"spectrum_a{a:g}_b{b:g}.{args.format}"), args.format)
        for a, b in points
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_spectrum_job, jobs))
    else:
        reports = [_spectrum_job(j) for j in jobs]
    index = []
    for job, rep_s in zip(jobs, reports):
        for c in _spectrum_checks(rep_s, args.k):
            rep.add(Check(f"{c.name} (a={job[0]:g}, b={job[1]:g})", c.value, c.threshold, c.op, c.passed, c.criterion))
        index.append({"a": job[0], "b": job[1], "file": job[5], "n_converged": rep_s.n_converged,
                      "max_real_part_ratio": rep_s.max_real_part_ratio})
    index_path = base / "spectrum_index.json"
    with open(index_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    rep.results.update(sweep=args.sweep, index_file=str(index_path), points=index)


def cmd_evolve(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    _check_grid_size(args.n)
    y0, lam = preset(p, args.n, args.init, args.seed)
    tr = evolve(p, args.n, y0, dt=args.dt, t_max=args.t_max, scheme=args.scheme,
                checkpoint=args.checkpoint, eigenvalue=lam, label=args.init)
    out.table(["t", "l2", "h1", "blowup_flag"],
              [(t, a, b, tr.blowup) for t, a, b in zip(tr.times, tr.l2_norms, tr.h1_norms)], rep)
    s = tr.summary()
    rep.add(check("mean conservation", s["mean_drift"], 1e-10, "<=", 9))
    if args.scheme == "modal" and p.a == 0:
        rep.add(check("eigenmode L2 norm drift", s["norm_drift"], 1e-6, "<=", 9))
    if tr.blowup:
        log.warning("solution overflowed after t = %g", tr.last_finite_time)
    rep.results.update(s, eigenvalue=lam)


def cmd_growth(args, rep: Report, out: Outputs) -> None:
    p = _params(args)
    if not args.n_list:
        raise GridError("empty N list")
    if args.t_step <= 0 or args.t_max < 0:
        raise ConfigError("t-step must be positive and t-max non-negative")
    t = np.arange(0, args.t_max + 1e-9, args.t_step)
    rows = growth_envelope(p, args.n_list, t)
    out.table(["N", "t", "log10_norm"], [(r.N, r.t, r.log10_norm) for r in rows], rep)
    mono, peak = envelope_monotone(rows)
    rep.add(check("envelope max_t log10 norm non-decreasing in N", mono, True, "==", 9))
    rep.results["peak_log10_norm"] = peak


def cmd_verify_all(args, rep: Report, out: Outputs) -> None:
    grid = None
    if args.grid is not None:
        grid = parse_grid(args.grid)
        if not grid:
            raise GridError("empty parameter grid")
        for a, b in grid:
            validate_params(a, b)
    for k in args.criteria:
        if k not in acceptance.CRITERIA:
            raise ConfigError(f"no criterion {k}")
    for k in args.criteria:
        log.info("criterion %d: %s", k, acceptance.CRITERIA[k][0])
        rep.add(*acceptance.run_criterion(k, grid=grid, seed=args.seed, N=args.n))
    out.table(["criterion", "name", "value", "threshold", "op", "pass"],
              [(c.criterion, c.name, c.value, c.threshold, c.op, c.passed) for c in rep.checks], rep)
    rep.results["criteria"] = {
        str(k): all(c.passed for c in rep.checks if c.criterion == k) for k in args.criteria
    }


COMMANDS = {
    "assemble": cmd_assemble,
    "minverse": cmd_minverse,
    "factor-check": cmd_factor_check,
    "resolvent": cmd_resolvent,
    "hs-norm": cmd_hs_norm,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "growth": cmd_growth,
    "verify-all": cmd_verify_all,
}


def _error_object(exc: BaseException, kind: str) -> dict:
    err = {"kind": kind, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParamsError):
        err["code"] = exc.code
    if isinstance(exc, NearEigenvalueError):
        err["nearest"] = [exc.nearest.real, exc.nearest.imag]
        err["distance"] = exc.distance
    return err


def run(args: argparse.Namespace) -> int:
    """Execute one parsed command; returns the exit status."""
    out = Outputs(args, args.command.replace("-", "_"))
    rep = Report(args.command, _config_echo(args))
    status = EXIT_OK
    try:
        COMMANDS[args.command](args, rep, out)
    except NUMERIC_ERRORS as exc:
        rep.error, status = _error_object(exc, "numerical-failure"), EXIT_NUMERIC
    except CONFIG_ERRORS as exc:
        rep.error, status = _error_object(exc, "invalid-config"), EXIT_CONFIG
    for c in rep.checks:
        print(c.line())
    if rep.error is not None:
        print(json.dumps({"error": rep.error}, sort_keys=True), file=sys.stderr)
    elif not rep.passed:
        status = EXIT_CHECK
    rep.write(out.report)
    print(f"report: {out.report}")
    return status


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except (ConfigError, OSError, argparse.ArgumentTypeError) as exc:
        print(json.dumps({"error": {"kind": "invalid-config", "type": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except OSError as exc:
        print(json.dumps({"error": {"kind": "io", "type": type(exc).__name__, "message": str(exc)}}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
