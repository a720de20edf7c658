"""Command-line front end: every check exposed as a subcommand.

Exit codes: 0 success, 1 violation finding (still a valid run: a failed
contraction check, a non-cone fit, a negative scan slack, a witness verdict,
a deviation above tolerance), 2 usage or input error, 3 numerical failure.
A verdict refused because the density fails the measure-contraction
precondition exits 3: the rigidity dichotomy says nothing about such
densities, so neither exit 0 nor 1 would be honest.

JSON reports share one shape: {command, config, results, seed, version} with
keys sorted.  Every computed number inside `results` is wrapped as
{"value": v, "error": e} where e is a propagated estimate, a quadrature
tolerance bound, or the tag "exact" for closed-form and purely arithmetic
quantities; non-finite values are spelled "inf", "-inf", "nan".  `config`
echoes the resolved inputs, which are exact by construction.  CSV output is
limited to the tabular subcommands (scan, bg-profile); --plot writes a static
vector figure for scan, bg-profile, and minimize.

Density specs are JSON, inline or in a file:

    {"kind": "powerlaw", "c": 1, "N": 3}
    {"kind": "truncated", "c": 1, "N": 3, "R": 1}
    {"kind": "powerlawexp", "c": 1, "N": 3, "a": 1}
    {"kind": "tabulated", "nodes": [0, 1, 2], "values": [1, 2, 1]}

Ensembles: {"N": 3, "rays": [{"c": 1, "q": 0.5}, {"c": 2, "q": 0.5}]}.
Grid functions: {"nodes": [0, 1, 2], "values": [1, 0.5, 0]}.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__, functionals, needles, space, variational
from .functionals import CknParams, GridFunction
from .quadrature import DEFAULT_CONFIG, QuadratureError

__all__ = ["main", "run"]

_CSV_COMMANDS = frozenset({"scan", "bg-profile"})
_PLOT_COMMANDS = frozenset({"scan", "bg-profile", "minimize"})


# ---------------------------------------------------------------------------
# report plumbing


def _finite(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _num(value, error="exact") -> dict:
    """Wrap a computed number with its error annotation."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric results")
    if isinstance(value, (int, np.integer)):
        v: Any = int(value)
    else:
        v = _finite(float(value))
    e = error if isinstance(error, str) else _finite(float(error))
    return {"value": v, "error": e}


def _quad_bound(value: float, cfg=DEFAULT_CONFIG) -> float:
    # Guaranteed bound for any integral the quadrature returned (it raises
    # rather than silently missing its tolerance).
    return max(cfg.rel_tol * abs(value), cfg.abs_tol)


def _sqrt_slack_error(dirichlet: float, moment2: float, mass: float, N: float) -> float:
    """Error bound for sqrt(D*M2) - (N/2)*M from per-integral bounds."""
    b_d = _quad_bound(dirichlet)
    b_2 = _quad_bound(moment2)
    b_m = _quad_bound(mass)
    prod = dirichlet * moment2
    if prod > 0.0:
        geom = 0.5 * (b_d * moment2 + b_2 * dirichlet) / math.sqrt(prod)
    else:
        geom = math.sqrt(b_d * b_2)
    return geom + 0.5 * N * b_m


@dataclass
class _Report:
    config: dict
    results: dict
    exit_code: int
    csv: Optional[tuple[tuple[str, ...], list[tuple[float, ...]]]] = None
    plot: Optional[dict] = None


# ---------------------------------------------------------------------------
# input parsing


def _load_doc(text: str) -> dict:
    t = text.strip()
    if t.startswith("{"):
        doc = json.loads(t)
    else:
        with open(t, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("spec must be a JSON object")
    return doc


def _field(doc: dict, name: str) -> float:
    if name not in doc:
        raise ValueError(f"spec is missing field {name!r}")
    return float(doc[name])


def _parse_density(doc: dict) -> space.Density:
    kind = doc.get("kind")
    if kind == "powerlaw":
        return space.PowerLaw(c=_field(doc, "c"), N=_field(doc, "N"))
    if kind == "truncated":
        return space.TruncatedPowerLaw(
            c=_field(doc, "c"), N=_field(doc, "N"), R=_field(doc, "R")
        )
    if kind == "powerlawexp":
        return space.PowerLawExp(
            c=_field(doc, "c"), N=_field(doc, "N"), a=_field(doc, "a")
        )
    if kind == "tabulated":
        if "nodes" not in doc or "values" not in doc:
            raise ValueError("tabulated spec needs 'nodes' and 'values'")
        return space.Tabulated(
            nodes=tuple(float(x) for x in doc["nodes"]),
            values=tuple(float(v) for v in doc["values"]),
        )
    raise ValueError(
        f"unknown density kind {kind!r}; expected one of "
        "powerlaw, truncated, powerlawexp, tabulated"
    )


def _parse_ensemble(doc: dict) -> needles.NeedleEnsemble:
    if "rays" not in doc or not isinstance(doc["rays"], list) or not doc["rays"]:
        raise ValueError("ensemble spec needs a nonempty 'rays' list")
    rays = tuple(
        needles.Ray(c=_field(r, "c"), weight=_field(r, "q")) for r in doc["rays"]
    )
    return needles.NeedleEnsemble(N=_field(doc, "N"), rays=rays)


def _parse_grid_function(doc: dict) -> GridFunction:
    if "nodes" not in doc or "values" not in doc:
        raise ValueError("grid function spec needs 'nodes' and 'values'")
    return GridFunction(
        nodes=tuple(float(x) for x in doc["nodes"]),
        values=tuple(float(v) for v in doc["values"]),
    )


def _density_doc(d: space.Density) -> dict:
    if isinstance(d, space.PowerLaw):
        return {"kind": "powerlaw", "c": d.c, "N": d.N}
    if isinstance(d, space.TruncatedPowerLaw):
        return {"kind": "truncated", "c": d.c, "N": d.N, "R": d.R}
    if isinstance(d, space.PowerLawExp):
        return {"kind": "powerlawexp", "c": d.c, "N": d.N, "a": d.a}
    assert isinstance(d, space.Tabulated)
    return {"kind": "tabulated", "nodes": list(d.nodes), "values": list(d.values)}


def _ensemble_doc(e: needles.NeedleEnsemble) -> dict:
    return {"N": e.N, "rays": [{"c": r.c, "q": r.weight} for r in e.rays]}


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty float list")
    return vals


def _test_function(args: argparse.Namespace, params: Optional[CknParams]):
    """Resolve --lam / --u into a profile plus its config echo."""
    if args.u is not None:
        u = _parse_grid_function(_load_doc(args.u))
        return u, {"u": {"nodes": list(u.nodes), "values": list(u.values)}}
    lam = float(args.lam)
    if params is None:
        return functionals.hpw_extremal(lam), {"lam": lam}
    return functionals.ckn_extremal(params, lam), {"lam": lam}


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_check_mcp(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    box = tuple(args.box) if args.box is not None else None
    rep = space.check_mcp_density(d, args.N, sampling=tuple(args.samples), box=box)
    x0, x1, t = rep.argmin
    results = {
        "passes": rep.passes,
        "min_slack": _num(rep.min_slack),
        "argmin": {"x0": _num(x0), "x1": _num(x1), "t": _num(t)},
        "h_scale": _num(rep.h_scale),
        "samples_tested": _num(rep.samples_tested),
    }
    config = {
        "density": _density_doc(d),
        "N": args.N,
        "samples": list(args.samples),
        "box": list(box) if box is not None else None,
    }
    return _Report(config, results, 0 if rep.passes else 1)


def _cmd_check_cone(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    fit = space.cone_fit(d, args.N, args.radii, tol=args.tol)
    results = {
        "is_cone": fit.is_cone,
        "A": _num(fit.A),
        "max_rel_deviation": _num(fit.max_rel_deviation),
        "radii_tested": [_num(r) for r in fit.radii_tested],
    }
    config = {
        "density": _density_doc(d),
        "N": args.N,
        "radii": list(args.radii),
        "tol": args.tol,
    }
    return _Report(config, results, 0 if fit.is_cone else 1)


def _cmd_bg_profile(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    prof = space.bishop_gromov_profile(d, args.N, args.radii)
    results = {
        "points": [
            {"radius": _num(r), "ratio": _num(v)} for r, v in prof.points
        ],
        "monotone_nonincreasing": prof.monotone_nonincreasing,
    }
    config = {"density": _density_doc(d), "N": args.N, "radii": list(args.radii)}
    radii = [r for r, _ in prof.points]
    ratios = [v for _, v in prof.points]
    return _Report(
        config,
        results,
        0 if prof.monotone_nonincreasing else 1,
        csv=(("radius", "ratio"), list(prof.points)),
        plot={
            "xs": radii,
            "ys": ratios,
            "xlabel": "radius",
            "ylabel": "volume ratio",
            "logx": True,
        },
    )


def _cmd_hpw(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    u, u_doc = _test_function(args, None)
    rep = functionals.hpw_report(d, args.N, u)
    e_d, e_2, e_0 = rep.integral_errors
    results = {
        "dirichlet": _num(rep.dirichlet, e_d),
        "moment2": _num(rep.moment2, e_2),
        "mass": _num(rep.mass, e_0),
        "quotient": _num(rep.quotient, rep.quotient_error),
        "sharp_constant": _num(rep.sharp_constant),
        "slack": _num(rep.slack, rep.quotient_error),
    }
    config = {"density": _density_doc(d), "N": args.N, **u_doc}
    violated = rep.slack < -(rep.quotient_error + 1e-9 * rep.sharp_constant)
    return _Report(config, results, 1 if violated else 0)


def _cmd_ckn(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    params = CknParams(p=args.p, q=args.q, N=args.N)
    u, u_doc = _test_function(args, params)
    rep = functionals.ckn_report(d, params, u)
    e_d, e_s, e_m = rep.integral_errors
    results = {
        "dirichlet": _num(rep.dirichlet, e_d),
        "singular_moment": _num(rep.singular_moment, e_s),
        "ckn_mass": _num(rep.ckn_mass, e_m),
        "quotient": _num(rep.quotient, rep.quotient_error),
        "sharp_constant": _num(rep.sharp_constant),
        "slack": _num(rep.slack, rep.quotient_error),
    }
    config = {
        "density": _density_doc(d),
        "p": args.p,
        "q": args.q,
        "N": args.N,
        **u_doc,
    }
    violated = rep.slack < -(rep.quotient_error + 1e-9 * rep.sharp_constant)
    return _Report(config, results, 1 if violated else 0)


def _scan_params(args: argparse.Namespace):
    if args.kind == "hpw":
        return float(args.N)
    if args.p is None or args.q is None:
        raise ValueError("--p and --q are required for --kind ckn")
    return CknParams(p=args.p, q=args.q, N=args.N)


def _cmd_scan(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    params = _scan_params(args)
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.lambda_count)
    res = variational.family_scan(d, params, args.kind, grid)
    idx = int(np.argmin(res.values))
    results = {
        "points": [
            {"lambda": _num(lam), "slack": _num(v, e)}
            for lam, v, e in zip(res.lambdas, res.values, res.errors)
        ],
        "min_value": _num(res.min_value, res.errors[idx]),
        "argmin_lambda": _num(res.argmin_lambda),
        "threshold": _num(args.threshold),
    }
    config = {
        "density": _density_doc(d),
        "kind": args.kind,
        "N": args.N,
        "p": args.p,
        "q": args.q,
        "lambda_min": args.lambda_min,
        "lambda_max": args.lambda_max,
        "lambda_count": args.lambda_count,
        "threshold": args.threshold,
    }
    rows = [(lam, v) for lam, v in zip(res.lambdas, res.values)]
    return _Report(
        config,
        results,
        1 if res.min_value < -args.threshold else 0,
        csv=(("lambda", "slack"), rows),
        plot={
            "xs": list(res.lambdas),
            "ys": list(res.values),
            "xlabel": "lambda",
            "ylabel": f"{args.kind} family slack",
            "logx": True,
        },
    )


def _minimize_init(
    args: argparse.Namespace,
    params,
    nodes: np.ndarray,
    rng: np.random.Generator,
) -> GridFunction:
    if args.init == "tent":
        values = 1.0 - nodes / nodes[-1]
    elif args.init == "extremal":
        if args.kind == "hpw":
            prof = functionals.hpw_extremal(args.lam)
        else:
            prof = functionals.ckn_extremal(params, args.lam)
        values = np.asarray(prof.value(nodes), dtype=float)
        values[-1] = 0.0
    else:
        # Nonincreasing, nonnegative, compactly supported random start.
        steps = rng.random(len(nodes) - 1)
        values = np.concatenate([np.cumsum(steps[::-1])[::-1], [0.0]])
    return GridFunction(nodes=tuple(nodes), values=tuple(values))


def _cmd_minimize(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    params = _scan_params(args)
    nodes = variational.default_minimize_nodes(args.kind)
    rng = np.random.default_rng(args.seed)
    u0 = _minimize_init(args, params, nodes, rng)
    opt = variational.MinimizeOptions(max_iters=args.max_iters, grad_tol=args.grad_tol)
    res = variational.minimize_quotient(d, params, args.kind, u0, opt)
    sharp = (
        args.N**2 / 4.0
        if args.kind == "hpw"
        else (args.N - args.q) ** 2 / args.p**2
    )
    results = {
        "quotient": _num(res.quotient),
        "sharp_constant": _num(sharp),
        "excess": _num(res.quotient / sharp - 1.0 if sharp > 0 else math.inf),
        "iterations": _num(res.iterations),
        "converged": res.converged,
        "grad_norm": _num(res.grad_norm),
        "trace": [_num(qv) for qv in res.trace],
    }
    config = {
        "density": _density_doc(d),
        "kind": args.kind,
        "N": args.N,
        "p": args.p,
        "q": args.q,
        "init": args.init,
        "lam": args.lam,
        "max_iters": args.max_iters,
        "grad_tol": args.grad_tol,
    }
    return _Report(
        config,
        results,
        0,
        plot={
            "xs": list(range(len(res.trace))),
            "ys": list(res.trace),
            "xlabel": "iteration",
            "ylabel": "discrete quotient",
            "logx": False,
        },
    )


def _cmd_verdict(args: argparse.Namespace) -> _Report:
    d = _parse_density(_load_doc(args.density))
    params = None
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None:
            raise ValueError("--p and --q must be given together")
        params = CknParams(p=args.p, q=args.q, N=args.N)
    cfg = variational.VerdictConfig(threshold=args.threshold, cone_tol=args.cone_tol)
    v = variational.rigidity_verdict(d, args.N, params, cfg)

    scans = {}
    for kind, res in v.scans.items():
        idx = int(np.argmin(res.values))
        scans[kind] = {
            "min_value": _num(res.min_value, res.errors[idx]),
            "argmin_lambda": _num(res.argmin_lambda),
        }
    results: dict[str, Any] = {
        "variant": "Cone" if v.variant == "cone" else "NonConeWitness",
        "cone_fit": {
            "is_cone": v.cone.is_cone,
            "A": _num(v.cone.A),
            "max_rel_deviation": _num(v.cone.max_rel_deviation),
        },
        "scans": scans,
        "mcp": {"passes": v.mcp.passes, "min_slack": _num(v.mcp.min_slack)},
    }
    if v.variant == "cone":
        results["A"] = _num(v.A)
    else:
        worst = v.scans[v.witness_kind]
        idx = int(np.argmin(worst.values))
        results["witness"] = {
            "kind": v.witness_kind,
            "lambda": _num(v.witness_lambda),
            "slack": _num(v.witness_slack, worst.errors[idx]),
        }
    config = {
        "density": _density_doc(d),
        "N": args.N,
        "p": args.p,
        "q": args.q,
        "threshold": args.threshold,
        "cone_tol": args.cone_tol,
    }
    return _Report(config, results, 0 if v.variant == "cone" else 1)


def _cmd_needle_verify(args: argparse.Namespace) -> _Report:
    e = _parse_ensemble(_load_doc(args.ensemble))
    dev = needles.verify_disintegration(e, args.radii)
    results = {
        "deviation": _num(dev),
        "rays": _num(len(e.rays)),
        "total_weight": _num(e.total_weight),
        "tol": _num(args.tol),
    }
    config = {"ensemble": _ensemble_doc(e), "radii": list(args.radii), "tol": args.tol}
    return _Report(config, results, 0 if dev <= args.tol else 1)


def _cmd_needle_aggregate(args: argparse.Namespace) -> _Report:
    e = _parse_ensemble(_load_doc(args.ensemble))
    if args.u is not None:
        u: Any = _parse_grid_function(_load_doc(args.u))
        u_doc: dict[str, Any] = {"u": {"nodes": list(u.nodes), "values": list(u.values)}}
    else:
        u = functionals.hpw_extremal(args.lam)
        u_doc = {"lam": args.lam}
    rep = needles.aggregate_hpw(e, u)
    per_ray = []
    for ray, terms in zip(e.rays, rep.per_ray):
        per_ray.append(
            {
                "c": _num(ray.c),
                "weight": _num(ray.weight),
                "dirichlet": _num(terms.dirichlet, _quad_bound(terms.dirichlet)),
                "moment2": _num(terms.moment2, _quad_bound(terms.moment2)),
                "mass": _num(terms.mass, _quad_bound(terms.mass)),
                "slack": _num(
                    terms.slack,
                    _sqrt_slack_error(terms.dirichlet, terms.moment2, terms.mass, e.N),
                ),
            }
        )
    total_err = _sqrt_slack_error(
        rep.total_dirichlet, rep.total_moment2, rep.total_mass, e.N
    )
    per_ray_err = sum(
        _sqrt_slack_error(t.dirichlet, t.moment2, t.mass, e.N) for t in rep.per_ray
    )
    results = {
        "per_ray": per_ray,
        "total_dirichlet": _num(rep.total_dirichlet, _quad_bound(rep.total_dirichlet)),
        "total_moment2": _num(rep.total_moment2, _quad_bound(rep.total_moment2)),
        "total_mass": _num(rep.total_mass, _quad_bound(rep.total_mass)),
        "cs_slack": _num(rep.cs_slack, total_err + per_ray_err),
        "final_slack": _num(rep.final_slack, total_err),
        "final_quotient_slack": _num(
            rep.final_quotient_slack,
            _quad_bound(rep.final_quotient_slack) if rep.total_mass > 0 else 0.0,
        ),
        "sharp_constant": _num(rep.sharp_constant),
    }
    config = {"ensemble": _ensemble_doc(e), **u_doc}
    scale = 0.5 * e.N * rep.total_mass
    violated = rep.final_slack < -(total_err + 1e-9 * max(1.0, scale))
    return _Report(config, results, 1 if violated else 0)


def _cmd_distortion(args: argparse.Namespace) -> _Report:
    inp = space.DistortionInput(K=args.K, N=args.N, t=args.t, theta=args.theta)
    results = {"sigma": _num(space.sigma(inp))}
    if args.N >= 1.0:
        results["tau"] = _num(space.tau(inp))
    config = {"K": args.K, "N": args.N, "t": args.t, "theta": args.theta}
    return _Report(config, results, 0)


_HANDLERS: dict[str, Callable[[argparse.Namespace], _Report]] = {
    "check-mcp": _cmd_check_mcp,
    "check-cone": _cmd_check_cone,
    "bg-profile": _cmd_bg_profile,
    "hpw": _cmd_hpw,
    "ckn": _cmd_ckn,
    "scan": _cmd_scan,
    "minimize": _cmd_minimize,
    "verdict": _cmd_verdict,
    "needle-verify": _cmd_needle_verify,
    "needle-aggregate": _cmd_needle_aggregate,
    "distortion": _cmd_distortion,
}


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--plot", metavar="PATH", default=None)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="needlelab",
        description="Sharp functional inequalities on weighted half-line needles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = cmd("check-mcp", "sampled measure-contraction slack check")
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--samples", type=int, nargs=3, default=(64, 64, 32))
    p.add_argument("--box", type=float, nargs=2, default=None)

    p = cmd("check-cone", "volume-cone fit over a radius ladder")
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument(
        "--radii",
        type=_csv_floats,
        default=tuple(np.geomspace(0.125, 16.0, 9)),
    )
    p.add_argument("--tol", type=float, default=1e-8)

    p = cmd("bg-profile", "volume-ratio monotonicity profile")
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument(
        "--radii",
        type=_csv_floats,
        default=tuple(np.geomspace(0.125, 16.0, 9)),
    )

    p = cmd("hpw", "quadratic quotient report for one test function")
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lam", type=float)
    group.add_argument("--u")

    p = cmd("ckn", "weighted quotient report for one test function")
    p.add_argument("--density", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lam", type=float)
    group.add_argument("--u")

    p = cmd("scan", "slack diagnostic along a log lambda grid")
    p.add_argument("--kind", choices=("hpw", "ckn"), required=True)
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--lambda-min", type=float, default=1e-3)
    p.add_argument("--lambda-max", type=float, default=1e3)
    p.add_argument("--lambda-count", type=int, default=61)
    p.add_argument("--threshold", type=float, default=1e-6)

    p = cmd("minimize", "projected gradient descent on the discrete quotient")
    p.add_argument("--kind", choices=("hpw", "ckn"), required=True)
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--init", choices=("tent", "extremal", "random"), default="tent")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=1500)
    p.add_argument("--grad-tol", type=float, default=1e-3)

    p = cmd("verdict", "cone / non-cone rigidity dichotomy")
    p.add_argument("--density", required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--cone-tol", type=float, default=1e-8)

    p = cmd("needle-verify", "disintegration identity deviation")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--radii", type=_csv_floats, default=(0.5, 1.0, 2.0, 4.0))
    p.add_argument("--tol", type=float, default=1e-12)

    p = cmd("needle-aggregate", "two-step aggregation slack ledger")
    p.add_argument("--ensemble", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lam", type=float, default=1.0)
    group.add_argument("--u")

    p = cmd("distortion", "model-space interpolation coefficients")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)

    return parser


# ---------------------------------------------------------------------------
# output


def _emit_json(command: str, report: _Report, seed: int) -> str:
    payload = {
        "command": command,
        "config": report.config,
        "results": report.results,
        "seed": seed,
        "version": __version__,
    }
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)


def _emit_csv(report: _Report) -> str:
    assert report.csv is not None
    header, rows = report.csv
    lines = [",".join(header)]
    lines.extend(",".join(repr(float(x)) for x in row) for row in rows)
    return "\n".join(lines)


def _write_plot(path: str, spec: dict) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "needlelab"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(spec["xs"], spec["ys"], marker="o", markersize=3, linewidth=1)
    if spec["logx"]:
        ax.set_xscale("log")
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.set_xlabel(spec["xlabel"])
    ax.set_ylabel(spec["ylabel"])
    ax.grid(alpha=0.3)
    fig.tight_layout()
    kwargs = {"metadata": {"Date": None}} if path.endswith(".svg") else {}
    fig.savefig(path, **kwargs)
    plt.close(fig)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    if args.format == "csv" and args.command not in _CSV_COMMANDS:
        print(
            f"csv output is not available for {args.command!r} "
            f"(tabular subcommands: {', '.join(sorted(_CSV_COMMANDS))})",
            file=sys.stderr,
        )
        return 2
    if args.plot is not None and args.command not in _PLOT_COMMANDS:
        print(
            f"--plot is not available for {args.command!r} "
            f"(plottable subcommands: {', '.join(sorted(_PLOT_COMMANDS))})",
            file=sys.stderr,
        )
        return 2

    try:
        report = _HANDLERS[args.command](args)
    except variational.McpPreconditionError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (QuadratureError, variational.DiagnosticMismatchError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.plot is not None and report.plot is not None:
        _write_plot(args.plot, report.plot)

    if args.format == "csv":
        print(_emit_csv(report))
    else:
        print(_emit_json(args.command, report, int(args.seed)))
    return report.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
