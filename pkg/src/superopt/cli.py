"""Command-line front end.

Every subcommand reads UTF-8 JSON, writes a deterministic JSON report and
exits 0 on success, 2 when a certificate or degree bound fails, and 1 on bad
input or a numerical breakdown.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace

from . import __version__
from .counterexample import build_ekp, build_kp, exterior_gap, g_residuals
from .errors import (
    ConstructionFailure,
    IdentityCase,
    InvalidFunction,
    ShapeError,
    SuperoptError,
    TheoremViolation,
)
from .hankel import aak_certificate, aak_scalar, rank_degree
from .nehari2x2 import superopt_degree_report, superoptimal, verify_very_bad
from .ratfun import RatFun, riesz_split
from .ratmat import RatMat, local_degree_map, mcmillan_degree, riesz_split_mat
from .serialize import (
    SCHEMA,
    complex_to_json,
    dumps,
    load_any,
    ratfun_to_json,
    ratmat_to_json,
    thematic_to_json,
)
from .thematic import ThematicData, check_bounds, verify_identities
from .tolerances import GRID_SIZE, Tolerances

COMMANDS = ("degree", "split", "aak", "superopt", "family-scan", "counterexample", "verify")
EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    grid_size: int = GRID_SIZE
    t_grid: int = 100
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    k: int | None = None
    a: float = 2.0
    t: list = field(default_factory=list)
    kappa: list = field(default_factory=list)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.grid_size < 64:
            raise InputError(f"grid size must be at least 64, got {self.grid_size}")
        if self.t_grid < 1:
            raise InputError("t-grid size must be positive")
        for name, value in self.tolerances.as_dict().items():
            if value <= 0:
                raise InputError(f"tolerance {name} must be positive")
        self.tolerances = replace(self.tolerances, grid_size=self.grid_size)


# -- input -------------------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _load(path):
    obj = _read_json(path)
    if isinstance(obj, dict):
        obj = {k: v for k, v in obj.items() if k != "schema"}
    try:
        return load_any(obj)
    except (InvalidFunction, ShapeError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _as_matrix(x, path):
    if isinstance(x, RatFun):
        return RatMat([[x]])
    if isinstance(x, RatMat):
        return x
    raise InputError(f"{path}: expected a rational function or matrix")


def _encode(x):
    return ratfun_to_json(x) if isinstance(x, RatFun) else ratmat_to_json(x)


def _parse_list(text, conv, name):
    try:
        return [conv(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--{name}: cannot parse {text!r}") from None


# -- commands ----------------------------------------------------------------------

def cmd_degree(cfg):
    A = _as_matrix(_load(cfg.input), cfg.input)
    inside, outside = mcmillan_degree(A, "inside"), mcmillan_degree(A, "outside")
    r_in, r_out = rank_degree(A, "inside"), rank_degree(A, "outside")
    agree = (inside, outside) == (r_in, r_out)
    local = [{"point": "inf" if lam == float("inf") else complex_to_json(lam), "degree": d}
             for lam, d in local_degree_map(A, "all").items() if d]
    report = {"inside": inside, "outside": outside, "total": inside + outside,
              "hankel_rank": {"inside": r_in, "outside": r_out}, "local": local,
              "oracles_agree": agree}
    failed = [] if agree else ["degree_oracle_agreement"]
    return report, failed


def cmd_split(cfg):
    x = _load(cfg.input)
    if isinstance(x, RatFun):
        minus, plus = riesz_split(x)
    else:
        minus, plus = riesz_split_mat(_as_matrix(x, cfg.input))
    return {"minus": _encode(minus), "plus": _encode(plus)}, []


def cmd_aak(cfg):
    x = _load(cfg.input)
    if isinstance(x, RatMat) and x.shape == (1, 1):
        x = x[0, 0]
    if not isinstance(x, RatFun):
        raise InputError(f"{cfg.input}: aak needs a scalar function")
    res = aak_scalar(x)
    cert = aak_certificate(x, res, cfg.grid_size)
    report = {"sigma0": res.sigma0, "best": ratfun_to_json(res.best),
              "error": ratfun_to_json(res.error), "certificate": cert}
    failed = []
    if not res.error.is_zero and minus_nonzero(x):
        if cert["flatness"] > cfg.tolerances.flatness:
            failed.append("error_modulus_constant")
        if cert["winding"] >= 0:
            failed.append("error_winding_negative")
    return report, failed


def minus_nonzero(f):
    return not riesz_split(f)[0].is_zero


def _superopt_report(res):
    return {"approximant": ratmat_to_json(res.approximant), "t0": res.t0, "t1": res.t1,
            "thematic": thematic_to_json(res.factorization), "certificates": res.certificates}


def cmd_superopt(cfg):
    A = _as_matrix(_load(cfg.input), cfg.input)
    try:
        res = superoptimal(A, cfg.grid_size)
    except IdentityCase:
        return {"approximant": ratmat_to_json(A), "t0": 0.0, "t1": 0.0,
                "identity_case": True}, []
    c = res.certificates
    tol = cfg.tolerances.flatness
    failed = [name for name in ("s0_flatness", "s1_flatness", "residual") if c[name] > tol]
    if not c["identities_pass"]:
        failed.append("identities_pass")
    return _superopt_report(res), failed


def _thematic_input(cfg):
    th = _load(cfg.input)
    if not isinstance(th, ThematicData):
        raise InputError(f"{cfg.input}: expected a thematic spec with t0, t1, u0, u1, v, w")
    return th


def _bounds_report(verdict):
    rep = verdict.report
    return {
        "profile": [{"s": r.s, "deg_minus": r.deg_minus, "deg_plus": r.deg_plus,
                     "margin": r.margin} for r in verdict.rows],
        "events": [{"s": e.s, "point": "inf" if e.lam == float("inf") else complex_to_json(e.lam),
                    "drop": e.drop, "side": e.side} for e in rep.events],
        "generic": list(rep.generic),
        "clauses": {k: {"ok": ok, "detail": "" if ok else d}
                    for k, (ok, d) in verdict.clauses.items()},
        "deficit_sum": verdict.deficit_sum,
        "deg_minus_u1": verdict.deg_minus_u1,
    }


def cmd_family_scan(cfg):
    th = _thematic_input(cfg)
    verdict = check_bounds(th, n_scan=cfg.t_grid, raise_on_failure=False)
    return _bounds_report(verdict), verdict.failed


def cmd_counterexample(cfg):
    if cfg.k is None or not cfg.t:
        raise InputError("counterexample needs --k and --t")
    kappa = cfg.kappa or ([cfg.k - 1] if len(cfg.t) == 1 else [])
    try:
        if len(cfg.t) == 1 and kappa == [cfg.k - 1]:
            kp = build_kp(cfg.k, cfg.a, cfg.t[0])
            spec, dm, dp = kp.spec, kp.deg_minus, kp.deg_plus
            rows = [{"t": cfg.t[0], "deg_minus": dm, "deg_plus": dp}]
            extra = {"psi": ratmat_to_json(kp.psi), "phi": ratmat_to_json(kp.phi)}
            summary = [f"deg P-: {dm}, deg P+: {dp}"]
        else:
            ekp = build_ekp(cfg.k, cfg.a, cfg.t, kappa)
            spec = ekp.spec
            rows = [{"t": t, "deg_minus": r.deg_minus, "deg_plus": r.deg_plus}
                    for t, r in zip(spec.t_values, ekp.rows)]
            extra = {"thematic": thematic_to_json(ekp.thematic)}
            summary = [f"t = {r['t']}: deg P-: {r['deg_minus']}, deg P+: {r['deg_plus']}"
                       for r in rows]
    except ConstructionFailure as exc:
        raise InputError(str(exc)) from None
    report = {
        "k": spec.k, "a": spec.a, "t": spec.t_values, "kappa": spec.kappa,
        "B0_zeros": [complex_to_json(z) for d in spec.deltas for z in d],
        "disk_zero_counts": spec.disk_zero_counts,
        "g_residuals": g_residuals(spec),
        "exterior_gap": exterior_gap(spec),
        "rows": rows, "summary": "; ".join(summary),
    }
    report.update(extra)
    return report, []


def cmd_verify(cfg):
    x = _load(cfg.input)
    if isinstance(x, ThematicData):
        ident = verify_identities(x, x.t1, cfg.grid_size)
        verdict = check_bounds(x, n_scan=cfg.t_grid, raise_on_failure=False)
        report = {"identities": ident.residuals, "identities_pass": ident.passed}
        report.update(_bounds_report(verdict))
        failed = list(verdict.failed)
        failed += [f"identity_{k}" for k, r in ident.residuals.items() if r > ident.tolerance]
        return report, failed
    A = _as_matrix(x, cfg.input)
    if A.shape != (2, 2):
        raise InputError(f"{cfg.input}: verify needs a 2x2 matrix or a thematic spec")
    cert = verify_very_bad(A, cfg.grid_size, cfg.tolerances.flatness)
    deg = superopt_degree_report(A)
    report = {"very_badly_approximable": cert.__dict__,
              "degree_report": {"deg_phi": deg.deg_phi, "deg_approximant": deg.deg_approx,
                                "t1": deg.t1, "bound": deg.bound, "branch": deg.branch,
                                "holds": deg.holds}}
    failed = [] if deg.holds else [f"approximant_degree_bound ({deg.branch})"]
    return report, failed


HANDLERS = {
    "degree": cmd_degree, "split": cmd_split, "aak": cmd_aak, "superopt": cmd_superopt,
    "family-scan": cmd_family_scan, "counterexample": cmd_counterexample, "verify": cmd_verify,
}


# -- argument handling ----------------------------------------------------------------

def _env_grid():
    raw = os.environ.get("SUPEROPT_GRID")
    if raw is None:
        return GRID_SIZE
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"SUPEROPT_GRID={raw!r} is not an integer") from None


def build_parser():
    p = argparse.ArgumentParser(prog="superopt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    common.add_argument("--grid", type=int, default=None, help="circle grid size (>= 64)")
    common.add_argument("--t-grid", type=int, default=100, help="parameter scan size")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--flat-tol", type=float, default=None)
    common.add_argument("--identity-tol", type=float, default=None)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("degree", "split", "aak", "superopt", "family-scan", "verify"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input")
    ce = sub.add_parser("counterexample", parents=[common])
    ce.add_argument("--k", type=int, required=True)
    ce.add_argument("--a", type=float, default=2.0)
    ce.add_argument("--t", required=True, help="comma-separated parameter values")
    ce.add_argument("--kappa", default="", help="comma-separated partition sizes")
    return p


def config_from_args(ns):
    tol = Tolerances()
    if ns.flat_tol is not None:
        tol = replace(tol, flatness=ns.flat_tol)
    if ns.identity_tol is not None:
        tol = replace(tol, identity=ns.identity_tol)
    cfg = RunConfig(command=ns.command, input=getattr(ns, "input", None), output=ns.output,
                    grid_size=ns.grid if ns.grid is not None else _env_grid(),
                    t_grid=ns.t_grid, seed=ns.seed, tolerances=tol)
    if ns.command == "counterexample":
        cfg.k, cfg.a = ns.k, ns.a
        cfg.t = _parse_list(ns.t, float, "t")
        cfg.kappa = _parse_list(ns.kappa, int, "kappa")
    return cfg


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = config_from_args(ns)
        body, failed = HANDLERS[cfg.command](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except TheoremViolation as exc:
        print(f"violation: {exc}", file=stderr)
        return EXIT_VIOLATION
    except SuperoptError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INPUT
    report = {"schema": SCHEMA, "command": cfg.command, "tolerances": cfg.tolerances.as_dict(),
              "passed": not failed, "failed_clauses": failed}
    report.update(body)
    text = dumps(report) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if "summary" in body:
        print(body["summary"], file=stderr)
    for name in failed:
        print(f"violation: {name}", file=stderr)
    return EXIT_VIOLATION if failed else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
