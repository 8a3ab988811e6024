"""Brute-force geometry of (TM, G) as an ordinary 2n-dimensional manifold.

The metric of TM in induced coordinates (x, y) contains the base Christoffel
symbols, so evaluating it on dual numbers nests one more derivative of the
base metric inside the outer request.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .base_geometry import CurvatureBundle, MetricSpec, christoffel_from_jets, curvature_bundle
from .calculus import DEFAULT_CONFIG, DiffConfig, derivatives, fd_error_estimate
from .lift import (
    ALL_CASES,
    GNaturalParams,
    LiftedFrame,
    TangentPoint,
    adapted_frame,
    case_value,
    curvature_terms,
    lifted_metric_coords_from,
    metric_blocks,
)


@dataclass(frozen=True)
class BundleAsManifold:
    base: MetricSpec
    params: GNaturalParams
    spec2n: MetricSpec


def bundle_metric(base: MetricSpec, params: GNaturalParams, inner_cfg: DiffConfig = DEFAULT_CONFIG) -> BundleAsManifold:
    n = base.dim

    def g2n(z):
        x, y = z[:n], z[n:]
        g, dg = derivatives(base.g, x, 1, inner_cfg)
        gamma = christoffel_from_jets(np.asarray(g), np.asarray(dg))
        return lifted_metric_coords_from(params, np.asarray(g), gamma, np.asarray(y, dtype=object))

    def domain(z):
        return base.in_domain(list(z[:n]))

    spec = MetricSpec(2 * n, g2n, domain, name=f"TM[{base.name}; a,b,c={params.as_tuple()}]")
    return BundleAsManifold(base, params, spec)


AGREE_TOL = 1e-6


def _tm_bundle(bm: BundleAsManifold, p: TangentPoint, cfg: DiffConfig, with_nabla: bool) -> CurvatureBundle:
    if cfg.mode == "finite_difference":
        est = fd_error_estimate(cfg, 3 if with_nabla else 2)
        if est > AGREE_TOL:
            warnings.warn(
                f"finite-difference error estimate {est:.1e} exceeds the agreement tolerance {AGREE_TOL:g}",
                RuntimeWarning,
                stacklevel=3,
            )
    return curvature_bundle(bm.spec2n, list(p.coords), cfg, with_nabla=with_nabla)


def brute_bundle(bm: BundleAsManifold, p: TangentPoint, cfg: DiffConfig = DEFAULT_CONFIG, with_nabla: bool = False) -> CurvatureBundle:
    """Full coordinate-frame curvature bundle of (TM, G) at p."""
    return _tm_bundle(bm, p, cfg, with_nabla)


def brute_curvature(bm: BundleAsManifold, p: TangentPoint, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Coordinate-frame Rm of G on 2n indices."""
    return _tm_bundle(bm, p, cfg, False).riemann


def brute_nabla_curvature(bm: BundleAsManifold, p: TangentPoint, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Coordinate-frame ∇Rm of G on 2n indices."""
    return _tm_bundle(bm, p, cfg, True).nabla_riemann


# ---------------------------------------------------------------------------
# change of frame


def tensor_to_frame(t: np.ndarray, basis: np.ndarray, upper: int = 1) -> np.ndarray:
    """Components of a tensor in the frame whose vectors are the columns of ``basis``.

    The first ``upper`` axes are contravariant, the rest covariant.  The
    derivative tensor ∇Rm[w, l, i, j, k], whose only upper axis is the second,
    goes through :func:`nabla_to_frame` instead.
    """
    inv = np.linalg.inv(basis)
    out = t
    for axis in range(t.ndim):
        mat = inv if axis < upper else basis.T
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def nabla_to_frame(nrm: np.ndarray, basis: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(basis)
    out = nrm
    for axis in range(nrm.ndim):
        mat = inv if axis == 1 else basis.T
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def riemann_to_adapted(rm_coords: np.ndarray, frame: LiftedFrame) -> np.ndarray:
    return tensor_to_frame(rm_coords, frame.basis)


def riemann_from_adapted(rm_adapted: np.ndarray, frame: LiftedFrame) -> np.ndarray:
    return tensor_to_frame(rm_adapted, np.linalg.inv(frame.basis))


# ---------------------------------------------------------------------------
# closed form vs brute force


def _block(rm_adapted: np.ndarray, case: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(h, v) output blocks of the adapted-frame tensor for one input case."""
    sl = {"h": slice(0, n), "v": slice(n, 2 * n)}
    blk = rm_adapted[:, sl[case[0]], sl[case[1]], sl[case[2]]]
    return blk[:n], blk[n:]


def closed_form_blocks(params, base: CurvatureBundle, p: TangentPoint, case: str, variant: str = "printed"):
    """Closed-form R̃ for lifts of every basis triple: arrays [l, i, j, k]."""
    n = base.dim
    eye = np.eye(n)
    X = eye.reshape(n, n, 1, 1)
    Y = eye.reshape(n, 1, n, 1)
    Z = eye.reshape(n, 1, 1, n)
    if case == "vvv":
        return np.zeros((n,) * 4), np.zeros((n,) * 4)
    h, v = case_value(params, base, p, case, X, Y, Z, variant)
    return np.broadcast_to(h, (n,) * 4), np.broadcast_to(v, (n,) * 4)


def input_norms(params: GNaturalParams, g: np.ndarray) -> dict[str, np.ndarray]:
    """G-norms of the lifted basis vectors e_i^h and e_i^v."""
    hh, _, vv = metric_blocks(params, g)
    return {"h": np.sqrt(np.diag(hh)), "v": np.sqrt(np.diag(vv))}


@dataclass
class CaseComparison:
    case: str
    max_dev_h: float
    max_dev_v: float
    closed_h: np.ndarray
    closed_v: np.ndarray
    brute_h: np.ndarray
    brute_v: np.ndarray
    scale: np.ndarray  # 1 / (|U| |V| |W|) per basis triple

    @property
    def max_dev(self) -> float:
        return max(self.max_dev_h, self.max_dev_v)


def compare_cases(
    params: GNaturalParams,
    base: CurvatureBundle,
    p: TangentPoint,
    rm_coords: np.ndarray,
    cases=ALL_CASES,
    variant: str = "printed",
) -> dict[str, CaseComparison]:
    """Componentwise deviation closed vs brute, inputs scaled to unit G-norm."""
    n = base.dim
    frame = adapted_frame(base, p)
    rm_ad = riemann_to_adapted(rm_coords, frame)
    norms = input_norms(params, base.g)
    out = {}
    for case in cases:
        ch, cv = closed_form_blocks(params, base, p, case, variant)
        bh, bv = _block(rm_ad, case, n)
        scale = 1.0 / np.einsum("i,j,k->ijk", norms[case[0]], norms[case[1]], norms[case[2]])
        out[case] = CaseComparison(
            case,
            float(np.abs((ch - bh) * scale).max()),
            float(np.abs((cv - bv) * scale).max()),
            ch, cv, bh, bv, scale,
        )
    return out


# ---------------------------------------------------------------------------
# term-wise coefficient fit


@dataclass(frozen=True)
class TermFit:
    case: str
    part: str
    label: str
    printed_label: str
    printed: float
    fitted: float
    part_gap: float  # relative norm of brute minus printed sum, this part


    @property
    def ratio(self) -> float:
        return self.fitted / self.printed if self.printed else float("nan")

    @property
    def agrees(self) -> bool:
        if self.part_gap <= 1e-9:
            return True
        return abs(self.fitted - self.printed) <= 1e-8 * max(1.0, abs(self.printed))


def fit_term_coefficients(
    params: GNaturalParams, base: CurvatureBundle, p: TangentPoint, rm_coords: np.ndarray, case: str
) -> list[TermFit]:
    """Least-squares coefficients of each printed summand against the brute-force tensor.

    Each output part is fitted separately over all basis triples.  Summands with
    identical expressions in one part are not separable; the fit then splits
    their total by the minimum-norm rule, so check against several points.
    """
    n = base.dim
    eye = np.eye(n)
    X = eye.reshape(n, n, 1, 1)
    Y = eye.reshape(n, 1, n, 1)
    Z = eye.reshape(n, 1, 1, n)
    terms = curvature_terms(params, base, p, case, X, Y, Z)
    rm_ad = riemann_to_adapted(rm_coords, adapted_frame(base, p))
    brute = dict(zip("hv", _block(rm_ad, case, n)))
    out = []
    for part in "hv":
        sel = [t for t in terms if t.part == part]
        if not sel:
            continue
        A = np.stack([np.broadcast_to(t.vector, (n,) * 4).ravel() for t in sel], axis=1)
        target = brute[part].ravel()
        printed = A @ np.array([t.value for t in sel])
        gap = float(np.linalg.norm(target - printed) / max(np.linalg.norm(target), 1e-300))
        coef, *_ = np.linalg.lstsq(A, target, rcond=None)
        out.extend(TermFit(case, part, t.label, t.coefficient, t.value, float(k), gap) for t, k in zip(sel, coef))
    return out
