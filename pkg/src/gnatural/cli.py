"""Batch command line: base curvature, closed-form lift check, weak symmetry.

    python3 -m gnatural curvature --manifold sphere_polar --mparam r=2
    python3 -m gnatural lift-check --manifold hyperbolic_halfspace --gnat skew
    python3 -m gnatural weaksym --manifold sphere_polar --gnat sasaki --mode recurrent
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import catalog, weaksym
from .base_geometry import curvature_bundle, invariant_violations, sectional_curvature
from .calculus import DiffConfig
from .errors import GeometryError
from .lift import ALL_CASES, PRINTED_CASES, GNaturalParams, TangentPoint
from .oracle import brute_curvature, bundle_metric, compare_cases, fit_term_coefficients

SCHEMA_VERSION = "gnatural-report/1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_LIFT = 4
EXIT_VERDICT = 5

EXIT_SEMANTICS = {
    "0": "ok",
    "2": "configuration error",
    "3": "base invariant failure",
    "4": "closed-form curvature disagrees with the oracle",
    "5": "weak-symmetry verdict contradicts the flatness theorem",
}

INDEX_ORDER = {
    "g": "i,j",
    "gamma": "k,i,j",
    "riemann": "l,i,j,k",
    "nabla_riemann": "w,l,i,j,k",
}

INVARIANT_TOL = {"dual": 1e-8, "finite_difference": 1e-5}
FIBER_RADIUS = 2.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    manifold: str = "euclidean"
    mparams: dict = field(default_factory=dict)
    gnat: tuple = (1.0, 0.0, 0.0)
    points: int = 20
    seed: int = 42
    diff_mode: str = "dual"
    agree_tol: float = 1e-6
    flat_tol: float = 1e-9
    reject: float = 0.01
    mode: str = "weak"
    space: str = "tangent_bundle"
    variant: str = "printed"
    fiber_norm: float | None = None
    format: str = "json"
    output: str | None = None
    jobs: int = 1

    def entry(self) -> catalog.CatalogEntry:
        return catalog.make(self.manifold, self.mparams)

    def params(self) -> GNaturalParams:
        return GNaturalParams(*self.gnat)

    def diff(self) -> DiffConfig:
        return DiffConfig(mode=self.diff_mode)

    def resolved(self) -> dict:
        out = asdict(self)
        out["mparams"] = dict(sorted(self.entry().params.items()))
        out["gnat"] = list(self.gnat)
        del out["output"], out["jobs"]  # do not change results
        return out


# ---------------------------------------------------------------------------
# sampling


def sample_point(cfg: RunConfig, entry: catalog.CatalogEntry, index: int) -> TangentPoint:
    """Deterministic per-point sample; point 0 sits on the zero section unless a norm is forced."""
    child = np.random.SeedSequence(cfg.seed).spawn(index + 1)[index]
    rng = np.random.default_rng(child)
    x = entry.sample_points(1, rng)[0]
    n = entry.dim
    d = rng.normal(size=n)
    d /= np.linalg.norm(d)
    if cfg.fiber_norm is not None:
        y = cfg.fiber_norm * d
    elif index == 0:
        y = np.zeros(n)
    else:
        y = FIBER_RADIUS * rng.random() ** (1.0 / n) * d
    return TangentPoint(x, y)


def _floats(a) -> list[float]:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


# ---------------------------------------------------------------------------
# per-point work


def _curvature_point(cfg: RunConfig, entry, index: int) -> dict:
    p = sample_point(cfg, entry, index)
    b = curvature_bundle(entry.metric, list(p.x), cfg.diff(), with_nabla=True)
    n = entry.dim
    eye = np.eye(n)
    sec = [sectional_curvature(b, eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)]
    return {
        "index": index,
        "x": _floats(p.x),
        "g": _floats(b.g),
        "gamma": _floats(b.gamma),
        "riemann": _floats(b.riemann),
        "nabla_riemann": _floats(b.nabla_riemann),
        "sectional_curvatures": [float(s) for s in sec],
        "invariants": invariant_violations(b),
    }


def _lift_point(cfg: RunConfig, entry, index: int) -> dict:
    p = sample_point(cfg, entry, index)
    params = cfg.params()
    diff = cfg.diff()
    b = curvature_bundle(entry.metric, list(p.x), diff, with_nabla=True)
    rm = brute_curvature(bundle_metric(entry.metric, params), p, diff)
    comp = compare_cases(params, b, p, rm, ALL_CASES, cfg.variant)
    fits = []
    for case in PRINTED_CASES[1:]:
        if comp[case].max_dev > cfg.agree_tol:
            for f in fit_term_coefficients(params, b, p, rm, case):
                if not f.agrees:
                    fits.append({
                        "case": f.case, "part": f.part, "term": f.label,
                        "printed_coefficient": f.printed_label,
                        "printed": f.printed, "fitted": f.fitted, "ratio": f.ratio,
                    })
    return {
        "index": index,
        "x": _floats(p.x),
        "y": _floats(p.y),
        "max_dev": {c: {"h": comp[c].max_dev_h, "v": comp[c].max_dev_v} for c in ALL_CASES},
        "term_fits": fits,
    }


def _weaksym_point(cfg: RunConfig, entry, index: int) -> dict:
    p = sample_point(cfg, entry, index)
    diff = cfg.diff()
    if cfg.space == "base":
        t = weaksym.base_tensors(entry.metric, p.x, diff)
    else:
        t = weaksym.bundle_tensors(entry.metric, cfg.params(), p, diff)
    s = t.solve(cfg.mode)
    out = {"index": index, "x": _floats(p.x)}
    if cfg.space != "base":
        out["y"] = _floats(p.y)
    out.update({
        "residual": s.residual,
        "r_norm": s.r_norm,
        "nr_norm": s.nr_norm,
        "alpha1": _floats(s.alpha1),
        "alpha2": _floats(s.alpha2),
        "approximate": s.approximate,
    })
    return out


_POINT_JOBS = {"curvature": _curvature_point, "lift-check": _lift_point, "weaksym": _weaksym_point}


def _job(args: tuple[RunConfig, int]) -> dict:
    cfg, index = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _POINT_JOBS[cfg.command](cfg, cfg.entry(), index)


def run_points(cfg: RunConfig) -> list[dict]:
    work = [(cfg, i) for i in range(cfg.points)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_job, work))
    return [_job(w) for w in work]


# ---------------------------------------------------------------------------
# aggregation


def _aggregate_curvature(cfg: RunConfig, entry, per_point: list[dict]) -> tuple[dict, str, int]:
    tol = INVARIANT_TOL[cfg.diff_mode]
    keys = per_point[0]["invariants"].keys()
    worst = {k: max(pp["invariants"][k] for pp in per_point) for k in keys}
    sec = [s for pp in per_point for s in pp["sectional_curvatures"]]
    agg = {
        "invariant_tolerance": tol,
        "max_violation": worst,
        "sectional_curvature": {"min": min(sec), "max": max(sec)} if sec else None,
        "max_abs_riemann": max(max(map(abs, pp["riemann"])) for pp in per_point),
        "max_abs_nabla_riemann": max(max(map(abs, pp["nabla_riemann"])) for pp in per_point),
    }
    ok = all(v <= tol for v in worst.values())
    return agg, "PASS" if ok else "FAIL", EXIT_OK if ok else EXIT_INVARIANT


def _simple_ratio(r: float) -> str | None:
    if not np.isfinite(r) or r == 0:
        return None
    frac = Fraction(r).limit_denominator(64)
    if abs(float(frac) - r) <= 1e-8 * max(1.0, abs(r)):
        return str(frac)
    return None


def _aggregate_lift(cfg: RunConfig, entry, per_point: list[dict]) -> tuple[dict, str, int]:
    worst = {c: max(max(pp["max_dev"][c].values()) for pp in per_point) for c in ALL_CASES}
    failing = [c for c in ALL_CASES if worst[c] > cfg.agree_tol]
    ledger: dict[tuple, list] = {}
    for pp in per_point:
        for f in pp["term_fits"]:
            ledger.setdefault((f["case"], f["part"], f["term"], f["printed_coefficient"]), []).append(f["ratio"])
    discrepancies = []
    for (case, part, term, printed), ratios in ledger.items():
        spread = max(ratios) - min(ratios)
        ratio = float(np.median(ratios))
        discrepancies.append({
            "case": case,
            "part": part,
            "term": term,
            "printed_coefficient": printed,
            "fitted_over_printed": ratio,
            "ratio_spread": spread,
            "rational_ratio": _simple_ratio(ratio) if spread <= 1e-8 * max(1.0, abs(ratio)) else None,
            "points": len(ratios),
        })
    agg = {"max_dev": worst, "failing_cases": failing, "discrepancies": discrepancies}
    ok = not failing
    return agg, "AGREE" if ok else "DISAGREE", EXIT_OK if ok else EXIT_LIFT


def expected_verdict(entry: catalog.CatalogEntry, space: str) -> str:
    if entry.known_flat:
        return weaksym.FLAT
    if space == "tangent_bundle" or not entry.known_locally_symmetric:
        return weaksym.OBSTRUCTED
    return weaksym.NONFLAT_CONSISTENT


def _aggregate_weaksym(cfg: RunConfig, entry, per_point: list[dict]) -> tuple[dict, str, int]:
    sols = [
        weaksym.WeakSymSolution(np.array(pp["alpha1"]), np.array(pp["alpha2"]), pp["residual"], pp["r_norm"], pp["nr_norm"], cfg.mode)
        for pp in per_point
    ]
    th = weaksym.Thresholds(cfg.flat_tol, weaksym.ACCEPT, cfg.reject)
    got = weaksym.verdict(sols, th)
    want = expected_verdict(entry, cfg.space)
    res = [s.residual for s in sols]
    agg = {
        "min_residual": min(res),
        "max_residual": max(res),
        "max_r_norm": max(s.r_norm for s in sols),
        "expected_verdict": want,
        "dimension_warning": entry.dim < 3,
        "banner": (
            f"flatness theorem check on {cfg.space}: base known_flat={entry.known_flat}, "
            f"mode={cfg.mode}, verdict={got}, expected={want}"
        ),
    }
    return agg, got, EXIT_OK if got == want else EXIT_VERDICT


_AGGREGATORS = {"curvature": _aggregate_curvature, "lift-check": _aggregate_lift, "weaksym": _aggregate_weaksym}


def build_report(cfg: RunConfig) -> tuple[dict, int]:
    entry = cfg.entry()
    per_point = run_points(cfg)
    agg, verdict, code = _AGGREGATORS[cfg.command](cfg, entry, per_point)
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.resolved(),
        "index_order": INDEX_ORDER,
        "per_point": per_point,
        "aggregate": agg,
        "verdict": verdict,
        "exit_code": code,
        "exit_semantics": EXIT_SEMANTICS,
    }
    return report, code


def render_text(report: dict) -> str:
    cfg = report["config"]
    agg = report["aggregate"]
    lines = [
        f"{cfg['command']}  manifold={cfg['manifold']} {cfg['mparams']}  gnat={cfg['gnat']}  "
        f"points={cfg['points']} seed={cfg['seed']} diff={cfg['diff_mode']}",
    ]
    for key, val in agg.items():
        if isinstance(val, dict):
            lines.append(f"{key}:")
            lines.extend(f"  {k}: {v}" for k, v in val.items())
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(v, sort_keys=True)}" for v in val)
        else:
            lines.append(f"{key}: {val}")
    lines.append(f"verdict: {report['verdict']}  (exit {report['exit_code']})")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return render_text(report)
    return json.dumps(report, indent=2) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _mparam(text: str) -> tuple[str, float | int]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    try:
        return key, int(val)
    except ValueError:
        pass
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric value in {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnatural", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifold", default="euclidean", help=f"one of {', '.join(catalog.NAMES)}")
    common.add_argument("--mparam", action="append", type=_mparam, default=[], metavar="K=V")
    common.add_argument("--gnat", default="sasaki", help="a,b,c or a preset (sasaki, mixed, skew)")
    common.add_argument("--points", type=int, default=20)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--diff", choices=("dual", "fd"), default="dual")
    common.add_argument("--tol-agree", type=float, default=1e-6)
    common.add_argument("--tol-flat", type=float, default=1e-9)
    common.add_argument("--reject", type=float, default=0.01)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--fiber-norm", type=float, default=None, help="force |y| at every point")

    sub.add_parser("curvature", parents=[common], help="base g, Gamma, R, nabla R and identity checks")
    lc = sub.add_parser("lift-check", parents=[common], help="closed-form lifted curvature vs brute force")
    lc.add_argument("--variant", choices=("printed", "adjudicated"), default="printed")
    ws = sub.add_parser("weaksym", parents=[common], help="weak-symmetry classification")
    ws.add_argument("--mode", choices=weaksym.MODES, default="weak")
    ws.add_argument("--space", choices=("base", "tangent_bundle"), default="tangent_bundle")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = GNaturalParams.parse(ns.gnat)
    if ns.points < 1:
        raise GeometryError("--points must be at least 1")
    if ns.jobs < 1:
        raise GeometryError("--jobs must be at least 1")
    cfg = RunConfig(
        command=ns.command,
        manifold=ns.manifold,
        mparams=dict(ns.mparam),
        gnat=params.as_tuple(),
        points=ns.points,
        seed=ns.seed,
        diff_mode="finite_difference" if ns.diff == "fd" else "dual",
        agree_tol=ns.tol_agree,
        flat_tol=ns.tol_flat,
        reject=ns.reject,
        mode=getattr(ns, "mode", "weak"),
        space=getattr(ns, "space", "tangent_bundle"),
        variant=getattr(ns, "variant", "printed"),
        fiber_norm=ns.fiber_norm,
        format=ns.format,
        output=ns.output,
        jobs=ns.jobs,
    )
    cfg.entry()  # validate manifold and parameters up front
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (GeometryError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gnatural: configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.command == "weaksym" and cfg.entry().dim < 3:
        print("gnatural: warning: base dimension < 3 is outside the flatness theorem's hypothesis", file=sys.stderr)
    report, code = build_report(cfg)
    text = render(report, cfg.format)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
