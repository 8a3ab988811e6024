"""Levi-Civita data of a coordinate metric: Γ, R and ∇R at a point.

Index conventions (used everywhere in the package):

* ``gamma[k, i, j]``            = Γ^k_{ij}
* ``riemann[l, i, j, k]``       = l-component of R(e_i, e_j) e_k, with
  R(X, Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z
* ``nabla_riemann[w, l, i, j, k]`` = l-component of (∇_{e_w} R)(e_i, e_j) e_k

Derivatives of Γ are assembled from the metric jets (g, ∂g, ∂²g, ∂³g) by the
Leibniz rule, so one call into :mod:`gnatural.calculus` per point suffices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .calculus import DEFAULT_CONFIG, DiffConfig, Dual, derivatives, real
from .errors import DomainError, SingularMetricError

COND_LIMIT = 1e12


@dataclass(frozen=True)
class MetricSpec:
    """A Riemannian metric on a coordinate chart.

    ``g`` maps a list of coordinates to an ``dim × dim`` symmetric matrix
    (nested lists or an array).  It must be written with the operators and
    elementary functions of :mod:`gnatural.calculus`.
    """

    dim: int
    g: Callable[[list], object]
    domain_check: Optional[Callable[[Sequence[float]], bool]] = None
    name: str = "metric"

    def in_domain(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            return False
        return self.domain_check is None or bool(self.domain_check([float(real(v)) for v in x]))

    def check(self, x: Sequence) -> None:
        if not self.in_domain(x):
            raise DomainError(f"{self.name}: point {[float(real(v)) for v in x]} outside chart domain")

    def matrix(self, x: Sequence) -> np.ndarray:
        self.check(x)
        return np.asarray(self.g(list(x)), dtype=float)

    def is_positive_definite(self, x: Sequence) -> bool:
        g = self.matrix(x)
        return all(np.linalg.det(g[:k, :k]) > 0 for k in range(1, self.dim + 1))


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray
    nabla_riemann: Optional[np.ndarray] = None
    dg: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("x", "g", "g_inv", "gamma", "riemann", "nabla_riemann", "dg"):
            arr = getattr(self, name)
            if isinstance(arr, np.ndarray):
                arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.g.shape[0]


# ---------------------------------------------------------------------------
# linear algebra that also works on object arrays of dual numbers


def _generic_inverse(a: np.ndarray) -> np.ndarray:
    # Gauss-Jordan without pivoting; fine for symmetric positive-definite input
    n = a.shape[0]
    m = np.empty((n, 2 * n), dtype=object)
    m[:, :n] = a
    m[:, n:] = np.eye(n)
    for c in range(n):
        m[c] = m[c] / m[c, c]
        for r in range(n):
            if r != c:
                m[r] = m[r] - m[r, c] * m[c]
    return m[:, n:]


def inverse(g: np.ndarray) -> np.ndarray:
    """Inverse metric; raises SingularMetricError past the condition limit."""
    primal = np.vectorize(lambda v: float(real(v)), otypes=[float])(g) if g.dtype == object else g
    cond = np.linalg.cond(primal)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMetricError(f"metric condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    if g.dtype == object:
        return _generic_inverse(g)
    return np.linalg.inv(g)


def _symmetrize(arr: np.ndarray, nderiv: int) -> np.ndarray:
    """Average over permutations of the derivative axes and of the matrix pair."""
    if arr.dtype == object:
        return arr
    n_axes = arr.ndim
    deriv = list(range(nderiv))
    acc = np.zeros_like(arr)
    perms = list(itertools.permutations(deriv))
    for p in perms:
        t = arr.transpose(tuple(p) + tuple(range(nderiv, n_axes)))
        acc = acc + t + np.swapaxes(t, -1, -2)
    return acc / (2 * len(perms))


def metric_jets(m: MetricSpec, x: Sequence, order: int, cfg: DiffConfig = DEFAULT_CONFIG) -> list[np.ndarray]:
    """``[g, ∂g, ..., ∂^order g]`` with ``∂^k g`` indexed ``[a_1..a_k, i, j]``."""
    m.check(x)
    jets = derivatives(m.g, x, order, cfg)
    return [_symmetrize(j, k) for k, j in enumerate(jets)]


def christoffel_from_jets(g: np.ndarray, dg: np.ndarray, g_inv: Optional[np.ndarray] = None) -> np.ndarray:
    """Γ^k_{ij} from g and ∂g (accepts object arrays of dual numbers)."""
    if g_inv is None:
        g_inv = inverse(g)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", g_inv, first)


def curvature_from_jets(g, dg, d2g, d3g=None) -> dict:
    """Γ, ∂Γ, R and (if ∂³g is given) ∇R from metric jets, via the Leibniz rule."""
    g_inv = inverse(g)
    first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    d_first = 0.5 * (np.einsum("aijl->alij", d2g) + np.einsum("ajil->alij", d2g) - d2g)
    d_inv = -np.einsum("kp,apq,ql->akl", g_inv, dg, g_inv)

    gamma = np.einsum("kl,lij->kij", g_inv, first)
    d_gamma = np.einsum("akl,lij->akij", d_inv, first) + np.einsum("kl,alij->akij", g_inv, d_first)

    riemann = (
        np.einsum("iljk->lijk", d_gamma)
        - np.einsum("jlik->lijk", d_gamma)
        + np.einsum("lim,mjk->lijk", gamma, gamma)
        - np.einsum("ljm,mik->lijk", gamma, gamma)
    )
    out = {"g_inv": g_inv, "gamma": gamma, "d_gamma": d_gamma, "riemann": riemann}
    if d3g is None:
        return out

    dd_first = 0.5 * (np.einsum("abijl->ablij", d3g) + np.einsum("abjil->ablij", d3g) - d3g)
    dd_inv = -(
        np.einsum("akp,bpq,ql->abkl", d_inv, dg, g_inv)
        + np.einsum("kp,abpq,ql->abkl", g_inv, d2g, g_inv)
        + np.einsum("kp,bpq,aql->abkl", g_inv, dg, d_inv)
    )
    dd_gamma = (
        np.einsum("abkl,lij->abkij", dd_inv, first)
        + np.einsum("bkl,alij->abkij", d_inv, d_first)
        + np.einsum("akl,blij->abkij", d_inv, d_first)
        + np.einsum("kl,ablij->abkij", g_inv, dd_first)
    )
    d_riemann = (
        np.einsum("wiljk->wlijk", dd_gamma)
        - np.einsum("wjlik->wlijk", dd_gamma)
        + np.einsum("wlim,mjk->wlijk", d_gamma, gamma)
        + np.einsum("lim,wmjk->wlijk", gamma, d_gamma)
        - np.einsum("wljm,mik->wlijk", d_gamma, gamma)
        - np.einsum("ljm,wmik->wlijk", gamma, d_gamma)
    )
    out["nabla_riemann"] = (
        d_riemann
        + np.einsum("lwm,mijk->wlijk", gamma, riemann)
        - np.einsum("mwi,lmjk->wlijk", gamma, riemann)
        - np.einsum("mwj,limk->wlijk", gamma, riemann)
        - np.einsum("mwk,lijm->wlijk", gamma, riemann)
    )
    return out


# ---------------------------------------------------------------------------
# public operations


def christoffel(m: MetricSpec, x: Sequence, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    g, dg = metric_jets(m, x, 1, cfg)
    return christoffel_from_jets(g, dg)


def riemann(m: MetricSpec, x: Sequence, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    return curvature_from_jets(*metric_jets(m, x, 2, cfg))["riemann"]


def nabla_riemann(m: MetricSpec, x: Sequence, cfg: DiffConfig = DEFAULT_CONFIG) -> np.ndarray:
    return curvature_from_jets(*metric_jets(m, x, 3, cfg))["nabla_riemann"]


def bundle_from_jets(x, jets: list[np.ndarray]) -> CurvatureBundle:
    data = curvature_from_jets(*jets)
    return CurvatureBundle(
        x=np.array([float(real(v)) for v in x]),
        g=np.array(jets[0], dtype=float),
        g_inv=data["g_inv"],
        gamma=data["gamma"],
        riemann=data["riemann"],
        nabla_riemann=data.get("nabla_riemann"),
        dg=np.array(jets[1], dtype=float),
    )


def curvature_bundle(
    m: MetricSpec, x: Sequence, cfg: DiffConfig = DEFAULT_CONFIG, with_nabla: bool = True
) -> CurvatureBundle:
    """g, g⁻¹, Γ, R and ∇R of ``m`` at ``x`` from a single jet evaluation."""
    return bundle_from_jets(x, metric_jets(m, x, 3 if with_nabla else 2, cfg))


# ---------------------------------------------------------------------------
# operator form and diagnostics


def apply_riemann(rm: np.ndarray, x, y, z) -> np.ndarray:
    """R(X, Y)Z as a vector."""
    return np.einsum("lijk,i,j,k->l", rm, x, y, z)


def apply_nabla_riemann(nrm: np.ndarray, w, x, y, z) -> np.ndarray:
    """(∇_W R)(X, Y)Z as a vector."""
    return np.einsum("wlijk,w,i,j,k->l", nrm, w, x, y, z)


def sectional_curvature(b: CurvatureBundle, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    num = apply_riemann(b.riemann, u, v, v) @ b.g @ u
    den = (u @ b.g @ u) * (v @ b.g @ v) - (u @ b.g @ v) ** 2
    return float(num / den)


def lowered_riemann(b: CurvatureBundle) -> np.ndarray:
    """R_{lijk} = g_{lm} Rm[m, i, j, k]."""
    return np.einsum("lm,mijk->lijk", b.g, b.riemann)


def invariant_violations(b: CurvatureBundle) -> dict[str, float]:
    """Max absolute violation of each Levi-Civita identity at the bundle point."""
    rm = b.riemann
    out = {
        "gamma_symmetry": np.abs(b.gamma - b.gamma.transpose(0, 2, 1)).max(),
        "riemann_antisymmetry": np.abs(rm + rm.transpose(0, 2, 1, 3)).max(),
        "first_bianchi": np.abs(rm + rm.transpose(0, 2, 3, 1) + rm.transpose(0, 3, 1, 2)).max(),
    }
    low = lowered_riemann(b)
    out["lowered_antisymmetry"] = np.abs(low + low.transpose(3, 1, 2, 0)).max()
    if b.dg is not None:
        compat = b.dg - np.einsum("mki,mj->kij", b.gamma, b.g) - np.einsum("mkj,im->kij", b.gamma, b.g)
        out["metric_compatibility"] = np.abs(compat).max()
    if b.nabla_riemann is not None:
        n = b.nabla_riemann
        # cyclic sum over (w, i, j) of (∇_w R)(e_i, e_j)
        cyc = n + np.einsum("iljwk->wlijk", n) + np.einsum("jlwik->wlijk", n)
        out["second_bianchi"] = np.abs(cyc).max()
    return {k: float(v) for k, v in out.items()}


def is_dual_array(arr: np.ndarray) -> bool:
    return arr.dtype == object and any(isinstance(v, Dual) for v in arr.ravel())
