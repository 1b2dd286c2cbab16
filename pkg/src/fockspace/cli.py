"""Command-line front end.

Every subcommand takes ``--config FILE`` (TOML). The file may hold a table
named after the subcommand whose keys are that subcommand's long options
(dashes or underscores), a ``[quad]`` table of quadrature overrides, and the
top-level keys ``seed`` and ``jobs``. Command-line flags win over the file;
unknown keys are rejected.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace
from fractions import Fraction
from functools import partial
from typing import Callable, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import decide, lattice, mittag, normcheck, project, quad
from .exceptions import FockError, NonConvergence, ToleranceNotMet
from .kernel import FockParams, Sector, kernel_eval, kernel_verify_rows

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
STABILITY_TOL = 0.05


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # let values such as -1j or -0.5+2j through as arguments, not options
    _NEGATIVE = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?([ij]|[-+](\d+\.?\d*|\.\d+)?([eE][-+]?\d+)?[ij])?$")

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = self._NEGATIVE

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument types -----------------------------------------------------------------


def _typed(convert):
    def parse(text):
        try:
            return convert(text)
        except (FockError, ValueError, ZeroDivisionError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    parse.__name__ = getattr(convert, "__name__", "value")
    return parse


def _real(text) -> float:
    return float(decide.as_fraction(text))


def _exponent_text(text) -> str:
    return str(decide.ExtExponent.parse(text))


def _complex(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _grid(text) -> list[float]:
    """``a:b:k`` expands to ``k`` equally spaced values; anything else is one real."""
    parts = str(text).split(":")
    if len(parts) == 3:
        lo, hi, k = _real(parts[0]), _real(parts[1]), int(parts[2])
        if k < 1:
            raise ValueError("grid needs at least one point")
        return [float(v) for v in np.linspace(lo, hi, k)]
    return [_real(text)]


RATIONAL = _typed(decide.as_fraction)
REAL = _typed(_real)
EXPONENT = _typed(_exponent_text)
COMPLEX = _typed(_complex)
GRID = _typed(_grid)


def _flatten(values):
    if values is None:
        return None
    out = []
    for v in values:
        out.extend(v if isinstance(v, list) else [v])
    return out


# -- output ---------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (Fraction, decide.ExtExponent)):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_plain(obj)) + "\n"


def _dump_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _plain(v) for k, v in row.items()})
    return buf.getvalue()


def _write(text: str, path: str | None, stream) -> None:
    if path is None or path == "-":
        stream.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """``map`` in input order, over ``jobs`` worker processes when ``jobs > 1``."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _band(values) -> float:
    """Smallest ``C`` with all values in ``[1/C, C]``."""
    v = np.asarray(values, float)
    if v.size == 0:
        return 1.0
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        return math.inf
    return float(max(v.max(), 1 / v.min()))


def _stable(a, b, tol: float = STABILITY_TOL) -> bool:
    ba, bb = _band(a), _band(b)
    return math.isfinite(ba) and math.isfinite(bb) and abs(ba / bb - 1) <= tol


# -- commands -------------------------------------------------------------------------------


def cmd_ml_eval(args, ctx):
    params = mittag.MLParams(_real(args.a), _real(args.b), args.m)
    ev = mittag.ml_eval_detailed(params, complex(args.re, args.im))
    out = {"log_mag": float(ev.value.log_mag), "phase": float(ev.value.phase),
           "branch": ev.branch, "rel_err": float(ev.rel_err), "warn": list(ev.warnings)}
    ctx.emit(_dump_json(out))
    return EXIT_OK


def cmd_kernel_eval(args, ctx):
    fp = FockParams(args.n, args.ell, args.alpha)
    if len(args.z) != args.n or len(args.w) != args.n:
        raise UsageError(f"--z and --w need {args.n} coordinates each")
    v = kernel_eval(fp, np.array(args.z), np.array(args.w))
    ctx.emit(_dump_json({"log_mag": float(v.log_mag), "phase": float(v.phase)}))
    return EXIT_OK


def cmd_kernel_verify(args, ctx):
    fp = FockParams(args.n, args.ell, args.alpha)
    sec = Sector(args.delta, args.N, args.ell)
    radii = args.radii or list(np.linspace(0.5, 30, 12))
    angles = args.angles or list(np.linspace(-math.pi, math.pi, 25))
    rows = kernel_verify_rows(fp, sec, radii, angles)
    inside = [r["ratio"] for r in rows if r["in_sector"]]
    outside = [r["ratio"] for r in rows if not r["in_sector"]]
    ok = _band(inside) <= args.c_max and all(v <= args.c_max for v in outside)
    ctx.emit(_dump_csv(rows))
    return EXIT_OK if ok else EXIT_FAIL


def _lemma_point(which: str, params: dict, spec: quad.QuadSpec, refine: bool, x):
    if which == "sup":
        n_grid = 8001 if refine else 4001
        return [float(quad.lemma_est_sup_check(params["alpha"], params["beta"], [x], n_grid)[0])]
    spec = spec.refined() if refine else spec
    if which == "cm":
        return [float(quad.lemma_est_cm_check(params["a"], params["b"], params["ell"],
                                              params["n"], [x], spec)[0])]
    i, j = quad.lemma_estuv_check(params["a"], params["b"], [x], spec)
    return [float(i[0]), float(j[0])]


LEMMA_DEFAULTS = {
    "sup": ({"alpha": 1.0, "beta": 3.0}, [0, 1, 2, 5, 10, 20]),
    "cm": ({"a": 1.0, "b": 2.0, "ell": 2.0, "n": 2}, [1, 2, 3, 4, 5, 6]),
    "uv": ({"a": 1.0, "b": 3.0}, [0, 2, 5, 10]),
}


def lemma_family(which: str, params: dict | None = None, grid=None,
                 spec: quad.QuadSpec = quad.QuadSpec(), jobs: int = 1):
    """Rows ``(point, kind, ratio)`` plus ``(band, stable)`` for one lemma family."""
    defaults, default_grid = LEMMA_DEFAULTS[which]
    params = {**defaults, **(params or {})}
    grid = list(default_grid if grid is None else grid)
    base = _pmap(partial(_lemma_point, which, params, spec, False), grid, jobs)
    fine = _pmap(partial(_lemma_point, which, params, spec, True), grid, jobs)
    kinds = ["I", "J"] if which == "uv" else [which]
    rows, stable, band = [], True, 1.0
    for k, kind in enumerate(kinds):
        a = [b[k] for b in base]
        b = [f[k] for f in fine]
        stable &= _stable(a, b)
        band = max(band, _band(a))
        rows += [{"point": x, "kind": kind, "ratio": v} for x, v in zip(grid, a)]
    return rows, band, stable


def cmd_lemma_check(args, ctx):
    if args.which == "sup":
        params = {"alpha": args.alpha, "beta": args.beta}
    elif args.which == "cm":
        params = {"a": args.a, "b": args.b, "ell": args.ell, "n": args.n}
    else:
        params = {"a": args.a, "b": args.b}
    params = {k: v for k, v in params.items() if v is not None}
    rows, band, stable = lemma_family(args.which, params, args.grid, ctx.spec, ctx.jobs)
    ctx.emit(_dump_csv(rows))
    return EXIT_OK if stable and band <= args.c_max else EXIT_FAIL


def _norm_point(fp: FockParams, space, p, spec: quad.QuadSpec, r: float):
    z = np.zeros(fp.n, complex)
    z[0] = r
    q = normcheck.NormQuery(fp, space, p, z)
    return normcheck.kernel_log_norm(q, spec), normcheck.log_closed_form(q)


def norm_family(fp: FockParams, space, p, radii, spec: quad.QuadSpec = quad.QuadSpec(),
                jobs: int = 1):
    base = _pmap(partial(_norm_point, fp, space, p, spec), list(radii), jobs)
    fine = _pmap(partial(_norm_point, fp, space, p, spec.refined()), list(radii), jobs)
    rows = [{"z": r, "log_norm": ln, "log_closed": lc, "ratio": math.exp(ln - lc)}
            for r, (ln, lc) in zip(radii, base)]
    a = [row["ratio"] for row in rows]
    b = [math.exp(ln - lc) for ln, lc in fine]
    return rows, _band(a), _stable(a, b)


def cmd_norm_check(args, ctx):
    fp = FockParams(args.n, args.ell, args.alpha)
    beta = args.alpha if args.beta is None else args.beta
    space = normcheck.SpaceParams(args.n, args.ell, beta, args.rho)
    radii = args.radii or list(np.linspace(0, 3, 7))
    rows, band, stable = norm_family(fp, space, args.p, radii, ctx.spec, ctx.jobs)
    ctx.emit(_dump_csv(rows))
    return EXIT_OK if stable and band <= args.c_max else EXIT_FAIL


def cmd_project(args, ctx):
    if not args.z:
        raise UsageError("--z needs at least one point")
    beta = args.alpha if args.beta is None else args.beta
    f = project.named_sample(args.f, beta, args.ell)
    vals = np.atleast_1d(project.bergman_project(args.alpha, args.ell, f, np.array(args.z), ctx.spec))
    out = [{"z": complex(z), "value": complex(v)} for z, v in zip(args.z, vals)]
    ctx.emit(_dump_json(out))
    return EXIT_OK


PROJECTION_Z = np.array([0.5, 1 + 1j, -0.7 + 0.3j])


def projection_rows(alpha: float, beta: float, ell: float, p="2", rho: float = 1.0,
                    spec: quad.QuadSpec = quad.QuadSpec()) -> list[dict]:
    """The projection checks as rows ``(check, sample, value, threshold, passed)``."""
    z = PROJECTION_Z
    rows = []

    def add(check, sample, value, threshold, passed=None):
        passed = bool(value < threshold) if passed is None else passed
        rows.append({"check": check, "sample": sample, "value": float(value),
                     "threshold": threshold, "passed": passed})

    if beta >= 2 * alpha:
        rep = project.divergence_exhibit(alpha, beta, ell, r_start=2.0 if ell == 1 else 1.0,
                                         spec=spec)
        add("divergence", "borderline", float(rep.log_increments[-1]), 0.0, rep.diverges)
        return rows
    for m, d in enumerate(project.reproduction_defect(alpha, ell, range(7), z, spec)):
        add("reproduction", f"z^{m}", d, 1e-6)
    pc = project.bergman_project(alpha, ell, project.conjugate_sample(ell), z, spec)
    add("annihilates", "conj", float(np.max(np.abs(pc))), 1e-8)
    samples = {name: project.named_sample(name, beta, ell)
               for name in ("borderline", "shifted_bump", "quarter_square", "damped_conj")}
    add("linearity", "shifted_bump+z^3",
        project.linearity_defect(alpha, ell, 2 - 1j, samples["shifted_bump"], 0.5,
                                 project.monomial(3, ell), z, spec), 1e-6)
    rp = project.RescaleParams(alpha, beta, ell)
    for name, f in samples.items():
        add("idempotence", name, project.idempotence_check(alpha, ell, f, z, spec), 1e-6)
        add("factorization", name, project.factorization_check(rp, f, z, spec), 1e-6)
    rep = project.projection_image_check(rp, p, rho, list(samples.values()), spec,
                                         holomorphic=[project.monomial(2, ell)])
    for r in rep.rows:
        add("image:" + r.check, r.sample, r.value, r.threshold, r.passed)
    return rows


def cmd_project_verify(args, ctx):
    beta = args.alpha if args.beta is None else args.beta
    rows = projection_rows(args.alpha, beta, args.ell, args.p, args.rho, ctx.spec)
    ctx.emit(_dump_csv(rows))
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def cmd_embed_decide(args, ctx):
    q = decide.EmbeddingQuery(args.n, args.ell, args.p, args.q, args.beta, args.gamma,
                              args.rho, args.eta)
    ctx.emit(_dump_json(decide.embed_decision(q).to_json()))
    return EXIT_OK


def cmd_proj_decide(args, ctx):
    q = decide.ProjectionQuery(args.n, args.ell, args.p, args.q, args.alpha, args.beta,
                               args.gamma, args.rho, args.eta)
    ctx.emit(_dump_json(decide.projection_decision(q).to_json()))
    return EXIT_OK


def cmd_counterexample(args, ctx):
    res = lattice.khinchine_ratio_experiment(
        args.beta, args.ell, args.p, args.q, args.rho, args.eta,
        sizes=args.sizes or [3, 5, 7], trials=args.trials, seed=ctx.seed, r=args.r,
        density=args.density, spec=ctx.spec)
    embeds = decide.embed_decide(decide.EmbeddingQuery(
        1, Fraction(repr(args.ell)), args.p, args.q, Fraction(repr(args.beta)),
        Fraction(repr(args.beta)), Fraction(repr(args.rho)), Fraction(repr(args.eta))))
    verdict = {**res.to_json(), "embeds": embeds, "consistent": res.grows != embeds}
    ctx.emit(_dump_csv(res.rows()))
    _write(_dump_json(verdict), args.verdict, ctx.stderr)
    return EXIT_OK if verdict["consistent"] else EXIT_FAIL


# -- verify-all ----------------------------------------------------------------------------


def _summary(suite, cases, max_ratio, stable, passed):
    return {"suite": suite, "cases": int(cases), "max_ratio": float(max_ratio),
            "stable": bool(stable), "pass": bool(passed and stable)}


# (n, ell, p, q, beta, gamma, rho, eta, expected decision, expected branch)
DECISION_CASES = [
    (1, "2", "2", "2", "1", "1", "0", "0", True, "2"),
    (1, "2", "2", "2", "1", "2", "0", "0", True, "1"),
    (1, "2", "2", "2", "2", "1", "5", "0", False, None),
    (1, "2", "2", "4", "1", "1", "1/2", "0", True, "2"),
    (1, "2", "2", "4", "1", "1", "1/3", "0", False, None),
    (2, "3/2", "1", "inf", "1", "1", "2", "0", True, "2"),
    (2, "3/2", "1", "inf", "1", "1", "1", "0", False, None),
    (1, "2", "4", "2", "1", "1", "1/2", "0", False, None),
    (1, "2", "4", "2", "1", "1", "2", "1", True, "3"),
    (1, "1", "4", "2", "1", "1", "0", "0", False, None),
    (1, "1", "2", "4", "1", "1", "0", "0", True, "2"),
    (3, "2", "inf", "1", "1", "1", "7", "0", True, "3"),
]


def suite_decide(spec, seed, jobs):
    bad = 0
    for n, ell, p, q, b, g, rho, eta, dec, br in DECISION_CASES:
        d = decide.embed_decision(decide.EmbeddingQuery(n, ell, p, q, b, g, rho, eta))
        bad += (d.decision, d.branch) != (dec, br)
    return _summary("decide", len(DECISION_CASES), bad, True, bad == 0)


def suite_mittag(spec, seed, jobs):
    lam = np.concatenate([np.linspace(-20, 20, 41), 15 * np.exp(1j * np.linspace(0, 2 * np.pi, 24))])
    v = mittag.ml_eval(mittag.MLParams(1, 1), lam).to_complex()
    err_exp = np.max(np.abs(v / np.exp(lam) - 1))
    # E_{1,2}(x) = (e^x - 1) / x
    x = np.linspace(0.5, 20, 40)
    v2 = mittag.ml_eval(mittag.MLParams(1, 2), x).to_complex()
    err_b = np.max(np.abs(v2 / (np.expm1(x) / x) - 1))
    # series and asymptotic branches agree on the crossover annulus, at angles
    # where the plain series is still summable in double precision
    worst, overlap = 0.0, 0
    for m in range(4):
        for ell in (1.0, 1.5, 2.0, 3.0):
            pr = mittag.MLParams(1 / ell, 1 / ell, m)
            R = mittag.crossover_radius(pr)
            for r in np.linspace(0.9 * R, 0.999 * R, 3):
                phi_max = math.acos(max(-1.0, 1 - 10.0 / r**ell))
                pts = r * np.exp(1j * np.linspace(-phi_max, phi_max, 5) / ell)
                s = mittag.ml_series_log(pr, pts)
                t = mittag.ml_asymptotic(pr, pts)
                d = (np.asarray(t.log_mag) - np.asarray(s.log_mag)
                     + 1j * (np.asarray(t.phase) - np.asarray(s.phase)))
                worst = max(worst, float(np.max(np.abs(np.expm1(d)))))
                overlap += pts.size
    ok = err_exp < 1e-12 and err_b < 1e-12 and worst < 1e-6
    return _summary("mittag", lam.size + x.size + overlap, max(err_exp, err_b, worst), True, ok)


def suite_kernel(spec, seed, jobs):
    band, cases = 1.0, 0
    rng = np.random.default_rng(seed)
    sym = 0.0
    for n, ell in ((1, 1.0), (1, 2.0), (2, 1.5), (3, 2.0)):
        fp = FockParams(n, ell, 1.0)
        rows = kernel_verify_rows(fp, Sector(ell=ell), np.linspace(0.5, 30, 12),
                                  np.linspace(-math.pi, math.pi, 25))
        band = max(band, _band([r["ratio"] for r in rows if r["in_sector"]]))
        cases += len(rows)
        z = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
        w = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
        a, b = kernel_eval(fp, z, w).to_complex(), kernel_eval(fp, w, z).to_complex()
        sym = max(sym, float(np.max(np.abs(a - np.conj(b)) / np.abs(a))))
        cases += 20
    return _summary("kernel", cases, band, sym < 1e-10, band < 10)


def suite_lemmas(spec, seed, jobs):
    band, stable, cases = 1.0, True, 0
    for which in ("sup", "cm", "uv"):
        rows, b, s = lemma_family(which, spec=spec, jobs=jobs)
        band, stable, cases = max(band, b), stable and s, cases + len(rows)
    return _summary("lemma", cases, band, stable, band < 1e3)


NORM_CASES = [(1, 1.0, "2", 0.0), (1, 2.0, "4", 1.0), (2, 1.5, "1", 1.0), (2, 2.0, "inf", 0.0)]


def suite_norm(spec, seed, jobs):
    band, stable, cases = 1.0, True, 0
    for n, ell, p, rho in NORM_CASES:
        fp = FockParams(n, ell, 1.0)
        rows, b, s = norm_family(fp, normcheck.SpaceParams(n, ell, 1.0, rho), p,
                                 np.linspace(0, 3, 7), spec, jobs)
        band, stable, cases = max(band, b), stable and s, cases + len(rows)
    rk = float(np.max(np.abs(normcheck.rkhs_defect(FockParams(1, 2.0, 1.0), [0, 1, 2], spec))))
    return _summary("norm", cases + 3, band, stable, band < 10 and rk < 1e-8)


def suite_project(spec, seed, jobs):
    rows = projection_rows(1.0, 1.0, 2.0, spec=spec) + projection_rows(1.0, 2.0, 1.0, spec=spec)
    worst = max((r["value"] / r["threshold"] for r in rows if r["threshold"] > 0), default=0.0)
    return _summary("project", len(rows), worst, True, all(r["passed"] for r in rows))


def suite_lattice(spec, seed, jobs):
    audit = lattice.overlap_audit(lattice.RadiusFunction(1.0, 2.0))
    cover_ok = all(r["coverage"] == 1.0 for r in audit)
    overlap = max(r["max_overlap"] for r in audit)
    fail = lattice.khinchine_ratio_experiment(1.0, 2.0, 4, 2, 0, 0, trials=9, seed=seed, spec=spec)
    hold = lattice.khinchine_ratio_experiment(1.0, 2.0, 4, 2, 2, 0, trials=9, seed=seed, spec=spec)
    ok = cover_ok and overlap <= 4 and fail.grows and not hold.grows
    return _summary("lattice", len(audit) + 2, float(np.max(fail.medians)), True, ok)


SUITES = {
    "decide": suite_decide,
    "mittag": suite_mittag,
    "kernel": suite_kernel,
    "lemma": suite_lemmas,
    "norm": suite_norm,
    "project": suite_project,
    "lattice": suite_lattice,
}


def cmd_verify_all(args, ctx):
    names = args.suites or list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    summary = []
    for name in names:
        try:
            summary.append(SUITES[name](ctx.spec, ctx.seed, ctx.jobs))
        except (NonConvergence, ToleranceNotMet) as exc:
            summary.append({**_summary(name, 0, math.inf, False, False), "error": str(exc)})
    ctx.emit(_dump_json(summary))
    width = max(len(s["suite"]) for s in summary)
    for s in summary:
        ctx.stderr.write(f"{s['suite']:<{width}}  cases={s['cases']:<5d} "
                         f"max_ratio={s['max_ratio']:<12.6g} stable={str(s['stable']):<5} "
                         f"{'PASS' if s['pass'] else 'FAIL'}\n")
    return EXIT_OK if all(s["pass"] for s in summary) else EXIT_FAIL


# -- parser ---------------------------------------------------------------------------------


def _add_decision_flags(sp, with_alpha: bool):
    sp.add_argument("--n", type=int)
    sp.add_argument("--ell", type=RATIONAL)
    sp.add_argument("--p", type=EXPONENT)
    sp.add_argument("--q", type=EXPONENT)
    if with_alpha:
        sp.add_argument("--alpha", type=RATIONAL)
    sp.add_argument("--beta", type=RATIONAL)
    sp.add_argument("--gamma", type=RATIONAL)
    sp.add_argument("--rho", type=RATIONAL, default=Fraction(0))
    sp.add_argument("--eta", type=RATIONAL, default=Fraction(0))


# command -> (handler, help, required options)
COMMANDS: dict[str, tuple[Callable, str, tuple[str, ...]]] = {}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockspace", description="Numerics for generalized Fock-Sobolev spaces.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, handler, help_, required=()):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--config", help="TOML file with defaults for this command")
        sp.add_argument("--out", help="output file (default: stdout)")
        COMMANDS[name] = (handler, help_, tuple(required))
        return sp

    sp = command("ml-eval", cmd_ml_eval, "evaluate E^(m)_{a,b}(re + i im)", ("a", "b"))
    sp.add_argument("--a", type=RATIONAL)
    sp.add_argument("--b", type=RATIONAL)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--re", type=REAL, default=0.0)
    sp.add_argument("--im", type=REAL, default=0.0)

    sp = command("kernel-eval", cmd_kernel_eval, "evaluate K_alpha(z, w) in log-polar form",
                 ("n", "ell", "alpha", "z", "w"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--ell", type=REAL)
    sp.add_argument("--alpha", type=REAL)
    sp.add_argument("--z", type=COMPLEX, nargs="+")
    sp.add_argument("--w", type=COMPLEX, nargs="+")

    sp = command("kernel-verify", cmd_kernel_verify, "tabulate the pointwise kernel estimate",
                 ("n", "ell"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--ell", type=REAL)
    sp.add_argument("--alpha", type=REAL, default=1.0)
    sp.add_argument("--delta", type=REAL, default=0.25)
    sp.add_argument("--N", type=REAL, default=8.0)
    sp.add_argument("--radii", type=GRID, nargs="+")
    sp.add_argument("--angles", type=GRID, nargs="+")
    sp.add_argument("--c-max", type=REAL, default=10.0)

    sp = command("lemma-check", cmd_lemma_check, "ratio families of the auxiliary estimates",
                 ("which",))
    sp.add_argument("--which", choices=["sup", "cm", "uv"])
    for flag in ("alpha", "beta", "a", "b", "ell"):
        sp.add_argument(f"--{flag}", type=REAL)
    sp.add_argument("--n", type=int)
    sp.add_argument("--grid", type=GRID, nargs="+")
    sp.add_argument("--c-max", type=REAL, default=1e3)
    sp.add_argument("--jobs", type=int, default=1)

    sp = command("norm-check", cmd_norm_check, "kernel norms against their closed form",
                 ("n", "ell", "p"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--ell", type=REAL)
    sp.add_argument("--alpha", type=REAL, default=1.0)
    sp.add_argument("--beta", type=REAL, help="weight of the space (default: alpha)")
    sp.add_argument("--rho", type=REAL, default=0.0)
    sp.add_argument("--p", type=EXPONENT)
    sp.add_argument("--radii", type=GRID, nargs="+")
    sp.add_argument("--c-max", type=REAL, default=10.0)
    sp.add_argument("--jobs", type=int, default=1)

    sp = command("project", cmd_project, "P_alpha of a named sample at points z",
                 ("alpha", "f", "z"))
    sp.add_argument("--alpha", type=REAL)
    sp.add_argument("--beta", type=REAL, help="weight the sample is built for (default: alpha)")
    sp.add_argument("--ell", type=REAL, default=1.0)
    sp.add_argument("--f", help=f"sample name: {', '.join(project.SAMPLES)} or z^m")
    sp.add_argument("--z", type=COMPLEX, nargs="+")

    sp = command("project-verify", cmd_project_verify, "run the projection checks", ("alpha",))
    sp.add_argument("--alpha", type=REAL)
    sp.add_argument("--beta", type=REAL)
    sp.add_argument("--ell", type=REAL, default=1.0)
    sp.add_argument("--p", type=EXPONENT, default="2")
    sp.add_argument("--rho", type=REAL, default=1.0)

    sp = command("embed-decide", cmd_embed_decide, "decide F^p_{beta,rho} -> F^q_{gamma,eta}",
                 ("n", "ell", "p", "q", "beta", "gamma"))
    _add_decision_flags(sp, with_alpha=False)

    sp = command("proj-decide", cmd_proj_decide, "decide boundedness of P_alpha",
                 ("n", "ell", "p", "q", "alpha", "beta", "gamma"))
    _add_decision_flags(sp, with_alpha=True)

    sp = command("counterexample", cmd_counterexample,
                 "random-sign kernel sums over a covering (CSV; JSON verdict on stderr)",
                 ("beta", "ell", "p", "q"))
    sp.add_argument("--beta", type=REAL)
    sp.add_argument("--ell", type=REAL)
    sp.add_argument("--p", type=EXPONENT)
    sp.add_argument("--q", type=EXPONENT)
    sp.add_argument("--rho", type=REAL, default=0.0)
    sp.add_argument("--eta", type=REAL, default=0.0)
    sp.add_argument("--sizes", type=GRID, nargs="+")
    sp.add_argument("--trials", type=int, default=9)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--r", type=REAL, default=1.0)
    sp.add_argument("--density", type=REAL, default=1.0)
    sp.add_argument("--verdict", help="file for the JSON verdict (default: stderr)")

    sp = command("verify-all", cmd_verify_all, "run every suite and print a summary")
    sp.add_argument("--suites", nargs="+")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    return parser


# -- configuration ---------------------------------------------------------------------------


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config {path}: {exc}") from exc


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _convert(action: argparse.Action, key: str, value):
    conv = action.type or (lambda v: v)
    try:
        if action.nargs in ("+", "*"):
            vals = value if isinstance(value, list) else [value]
            out = [conv(v if action.type is None else str(v)) for v in vals]
        elif isinstance(value, (list, dict)):
            raise argparse.ArgumentTypeError("expected a scalar")
        else:
            out = conv(value if action.type is None else str(value))
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"config key {key!r}: {exc}") from exc
    if action.choices is not None and out not in action.choices:
        raise UsageError(f"config key {key!r} must be one of {list(action.choices)}")
    return out


def _config_defaults(cfg: dict, command: str, parser: argparse.ArgumentParser) -> dict:
    """Validate every table of ``cfg``; return parser defaults for ``command``."""
    allowed_top = {"seed", "jobs", "quad"} | set(COMMANDS)
    unknown = sorted(set(cfg) - allowed_top)
    if unknown:
        raise UsageError(f"unknown config keys {unknown}; allowed: {sorted(allowed_top)}")
    for key in ("seed", "jobs"):
        if key in cfg and (isinstance(cfg[key], bool) or not isinstance(cfg[key], int)):
            raise UsageError(f"config key {key!r} must be an integer")
    qkeys = {f.name for f in fields(quad.QuadSpec)}
    bad = sorted(set(cfg.get("quad", {})) - qkeys)
    if bad:
        raise UsageError(f"unknown [quad] keys {bad}; allowed: {sorted(qkeys)}")
    out = {}
    for name in COMMANDS:
        if name not in cfg:
            continue
        table = cfg[name]
        if not isinstance(table, dict):
            raise UsageError(f"[{name}] must be a table")
        sp = _subparser(parser, name)
        actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
        for key, value in table.items():
            dest = key.replace("-", "_")
            if dest not in actions:
                raise UsageError(f"unknown key {key!r} in [{name}]; allowed: {sorted(actions)}")
            converted = _convert(actions[dest], key, value)
            if name == command:
                out[dest] = converted
    sp = _subparser(parser, command)
    dests = {a.dest for a in sp._actions}
    for key in ("seed", "jobs"):
        if key in cfg and key in dests and key not in out:
            out[key] = cfg[key]
    return out


class _Context:
    def __init__(self, args, cfg, stdout, stderr):
        self.args = args
        self.stdout, self.stderr = stdout, stderr
        overrides = cfg.get("quad", {})
        try:
            self.spec = replace(quad.QuadSpec(), **overrides)
        except (TypeError, FockError) as exc:
            raise UsageError(f"bad [quad] table: {exc}") from exc
        self.seed = getattr(args, "seed", None)
        if self.seed is None:
            self.seed = int(cfg.get("seed", 0))
        self.jobs = max(1, int(getattr(args, "jobs", 1) or 1))

    def emit(self, text: str) -> None:
        _write(text, self.args.out, self.stdout)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        if args.command is None:
            raise UsageError("missing subcommand; choose from " + ", ".join(COMMANDS))
        handler, _, required = COMMANDS[args.command]
        cfg = {}
        if args.config:
            cfg = load_config(args.config)
            defaults = _config_defaults(cfg, args.command, parser)
            _subparser(parser, args.command).set_defaults(**defaults)
            args = parser.parse_args(argv)
        for name in vars(args):
            v = getattr(args, name)
            if isinstance(v, list):
                setattr(args, name, _flatten(v))
        missing = [f"--{r.replace('_', '-')}" for r in required if getattr(args, r) is None]
        if missing:
            raise UsageError(f"{args.command}: missing {', '.join(missing)}")
        ctx = _Context(args, cfg, stdout, stderr)
        return handler(args, ctx)
    except (NonConvergence, ToleranceNotMet) as exc:
        stderr.write(f"verification failed: {exc}\n")
        return EXIT_FAIL
    except (UsageError, FockError) as exc:
        stderr.write(f"error: {exc}\n")
        command = getattr(locals().get("args"), "command", None)
        (_subparser(parser, command) if command else parser).print_usage(stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
