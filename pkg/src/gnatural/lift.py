"""The g-natural metric G = a·g^s + b·g^h + c·g^v on TM and its geometry.

Vectors on TM are held as :class:`SplitVector` components with respect to the
adapted frame {δ/δx^i, ∂/∂y^i}.  The Levi-Civita connection and the curvature
are evaluated from the closed forms, term by term, with t = y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .base_geometry import CurvatureBundle, apply_riemann
from .errors import ParamError


@dataclass(frozen=True)
class GNaturalParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        alpha = a * (a + c) - b * b
        if not (a > 0 and alpha > 0):
            raise ParamError(
                "G is Riemannian iff a > 0 and alpha = a(a+c) - b^2 > 0; "
                f"got a={a:g}, alpha = {a:g}*{a + c:g} - {b * b:g} = {alpha:g}"
            )

    @property
    def alpha(self) -> float:
        return self.a * (self.a + self.c) - self.b * self.b

    @classmethod
    def sasaki(cls) -> "GNaturalParams":
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def parse(cls, text: str) -> "GNaturalParams":
        """Accept a preset name or ``"a,b,c"``."""
        if text in PRESETS:
            return PRESETS[text]
        try:
            a, b, c = (float(v) for v in text.split(","))
        except ValueError:
            raise ParamError(f"expected a preset ({', '.join(PRESETS)}) or 'a,b,c', got {text!r}") from None
        return cls(a, b, c)

    def as_tuple(self) -> tuple[float, float, float]:
        return (float(self.a), float(self.b), float(self.c))


PRESETS = {
    "sasaki": GNaturalParams(1.0, 0.0, 0.0),
    "mixed": GNaturalParams(1.0, 1.0, 1.0),
    "skew": GNaturalParams(2.0, -1.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class SplitVector:
    """Horizontal and vertical components in the adapted frame."""

    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    @classmethod
    def horizontal(cls, x) -> "SplitVector":
        x = np.asarray(x, dtype=float)
        return cls(x, np.zeros_like(x))

    @classmethod
    def vertical(cls, x) -> "SplitVector":
        x = np.asarray(x, dtype=float)
        return cls(np.zeros_like(x), x)

    @classmethod
    def from_array(cls, arr) -> "SplitVector":
        arr = np.asarray(arr, dtype=float)
        n = arr.shape[0] // 2
        return cls(arr[:n], arr[n:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.h, self.v])

    def __add__(self, other: "SplitVector") -> "SplitVector":
        return SplitVector(self.h + other.h, self.v + other.v)

    def __sub__(self, other: "SplitVector") -> "SplitVector":
        return SplitVector(self.h - other.h, self.v - other.v)

    def __neg__(self) -> "SplitVector":
        return SplitVector(-self.h, -self.v)

    def __mul__(self, s: float) -> "SplitVector":
        return SplitVector(s * self.h, s * self.v)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TangentPoint:
    """A point (x, y) of TM; y doubles as the canonical field t = y^i ∂/∂x^i."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be vectors of equal length")
        if not np.all(np.isfinite(y)):
            raise ValueError("fiber vector must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def t(self) -> np.ndarray:
        return self.y

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    def spray(self) -> SplitVector:
        """Geodesic spray t^h at this point."""
        return SplitVector(self.y, np.zeros_like(self.y))

    def liouville(self) -> SplitVector:
        """Liouville field t^v at this point."""
        return SplitVector(np.zeros_like(self.y), self.y)


def connection_matrix(gamma: np.ndarray, y) -> np.ndarray:
    """N[j, i] = y^a Γ^j_{ai} (works on object arrays)."""
    return np.einsum("jai,a->ji", gamma, y)


@dataclass(frozen=True, eq=False)
class LiftedFrame:
    """Columns are the induced-coordinate components of {δ/δx^i, ∂/∂y^i}."""

    basis: np.ndarray

    @property
    def n(self) -> int:
        return self.basis.shape[0] // 2

    def inverse(self) -> np.ndarray:
        n = self.n
        inv = np.eye(2 * n)
        inv[n:, :n] = -self.basis[n:, :n]
        return inv

    def to_coords(self, sv: SplitVector) -> np.ndarray:
        return self.basis @ sv.as_array()

    def from_coords(self, vec) -> SplitVector:
        return SplitVector.from_array(self.inverse() @ np.asarray(vec, dtype=float))


def adapted_frame(bundle: CurvatureBundle, p: TangentPoint) -> LiftedFrame:
    n = bundle.dim
    basis = np.eye(2 * n)
    basis[n:, :n] = -connection_matrix(bundle.gamma, p.y)
    return LiftedFrame(basis)


def metric_blocks(params: GNaturalParams, g):
    return (params.a + params.c) * g, params.b * g, params.a * g


def lifted_metric_adapted(params: GNaturalParams, bundle: CurvatureBundle, p: Optional[TangentPoint] = None) -> np.ndarray:
    hh, hv, vv = metric_blocks(params, bundle.g)
    return np.block([[hh, hv], [hv, vv]])


def lifted_metric_coords_from(params: GNaturalParams, g, gamma, y) -> np.ndarray:
    """G in induced coordinates from g, Γ and y; object arrays of duals allowed."""
    hh, hv, vv = metric_blocks(params, g)
    nm = connection_matrix(gamma, y)
    xx = hh + hv @ nm + nm.T @ hv + nm.T @ vv @ nm
    xx = 0.5 * (xx + xx.T)  # exact symmetry; the products round differently
    xy = hv + nm.T @ vv
    n = g.shape[0]
    out = np.empty((2 * n, 2 * n), dtype=xx.dtype)
    out[:n, :n] = xx
    out[:n, n:] = xy
    out[n:, :n] = xy.T
    out[n:, n:] = vv
    return out


def lifted_metric_coords(params: GNaturalParams, bundle: CurvatureBundle, p: TangentPoint) -> np.ndarray:
    return lifted_metric_coords_from(params, bundle.g, bundle.gamma, p.y)


def pairing(params: GNaturalParams, g: np.ndarray, u: SplitVector, w: SplitVector) -> float:
    """G(U, W) from adapted components."""
    hh, hv, vv = metric_blocks(params, g)
    return float(u.h @ hh @ w.h + u.h @ hv @ w.v + u.v @ hv @ w.h + u.v @ vv @ w.v)


# ---------------------------------------------------------------------------
# connection


class ABCD(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def abcd(params: GNaturalParams, bundle: CurvatureBundle, p: TangentPoint, X, Y) -> ABCD:
    a, b, c, al = params.a, params.b, params.c, params.alpha
    rm, t = bundle.riemann, p.y
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    r_xty = apply_riemann(rm, X, t, Y)
    r_ytx = apply_riemann(rm, Y, t, X)
    A = -(a * b / (2 * al)) * (r_xty + r_ytx)
    B = (b * b / al) * r_xty - (a * (a + c) / (2 * al)) * apply_riemann(rm, X, Y, t)
    C = -(a * a / (2 * al)) * r_ytx
    D = (a * b / (2 * al)) * r_ytx
    return ABCD(A, B, C, D)


@dataclass(frozen=True, eq=False)
class LiftField:
    """X^h + X'^v + σ t^h + τ t^v with constant base components X, X'."""

    h: np.ndarray
    v: np.ndarray
    spray: float = 0.0
    liouville: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    def at(self, p: TangentPoint) -> SplitVector:
        return SplitVector(self.h + self.spray * p.y, self.v + self.liouville * p.y)


def _as_field(f) -> LiftField:
    return f if isinstance(f, LiftField) else LiftField(f.h, f.v)


def _nabla_of_constant_lifts(params, bundle, p, u: SplitVector, h, v) -> SplitVector:
    # ∇̃_U (Y^h + Y'^v) for constant base components Y = h, Y' = v
    gm = bundle.gamma
    out = SplitVector(np.zeros_like(h), np.zeros_like(h))
    hh = abcd(params, bundle, p, u.h, h)
    out += SplitVector(np.einsum("kab,a,b->k", gm, u.h, h) + hh.A, hh.B)
    vh = abcd(params, bundle, p, h, u.v)
    out += SplitVector(vh.C, vh.D)
    hv = abcd(params, bundle, p, u.h, v)
    out += SplitVector(hv.C, np.einsum("kab,a,b->k", gm, u.h, v) + hv.D)
    return out


def lifted_connection(params: GNaturalParams, bundle: CurvatureBundle, p: TangentPoint, U, V) -> SplitVector:
    """∇̃_U V at p.

    ``U`` is only needed at p (a SplitVector will do).  ``V`` must be a
    :class:`LiftField` (or a SplitVector read as a lift of constant fields).
    """
    u = U.at(p) if isinstance(U, LiftField) else U
    V = _as_field(V)
    out = _nabla_of_constant_lifts(params, bundle, p, u, V.h, V.v)
    if V.spray or V.liouville:
        # U(y^i) = u.v^i - (N u.h)^i for the fiber coordinates
        dy = u.v - connection_matrix(bundle.gamma, p.y) @ u.h
        zero = np.zeros_like(p.y)
        if V.spray:
            out += V.spray * (SplitVector(dy, zero) + _nabla_of_constant_lifts(params, bundle, p, u, p.y, zero))
        if V.liouville:
            out += V.liouville * (SplitVector(zero, dy) + _nabla_of_constant_lifts(params, bundle, p, u, zero, p.y))
    return out


# ---------------------------------------------------------------------------
# closed-form curvature, one named term per printed summand


class Term(NamedTuple):
    case: str  # e.g. "hvv" for R̃(X^h, Y^v)Z^v
    part: str  # "h" or "v"
    label: str
    coefficient: str
    value: float
    vector: np.ndarray  # raw expression, before the coefficient


Coefficient = Callable[[float, float, float, float], float]

# (case, part, coefficient label, coefficient, expression label)
_TABLE: list[tuple[str, str, str, Coefficient, str]] = [
    ("vvh", "h", "a^2/alpha", lambda a, b, c, al: a**2 / al, "R(X,Y)Z"),
    ("vvh", "h", "a^2/(4 alpha^2)", lambda a, b, c, al: a**2 / (4 * al**2), "R(X,t)R(Y,t)Z - R(Y,t)R(X,t)Z"),
    ("vvh", "v", "ab/alpha", lambda a, b, c, al: a * b / al, "R(Y,X)Z"),
    ("vvh", "v", "a^3 b/(4 alpha^2)", lambda a, b, c, al: a**3 * b / (4 * al**2), "R(Y,t)R(X,t)Z - R(X,t)R(Y,t)Z"),
    ("hvv", "h", "a^2/(2 alpha)", lambda a, b, c, al: a**2 / (2 * al), "R(Z,Y)X"),
    ("hvv", "h", "-a^4/(4 alpha^2)", lambda a, b, c, al: -(a**4) / (4 * al**2), "R(Y,t)R(Z,t)X"),
    ("hvv", "v", "a^3 b/(4 alpha^2)", lambda a, b, c, al: a**3 * b / (4 * al**2), "R(Y,t)R(Z,t)X"),
    ("hvv", "v", "-ab/(2 alpha)", lambda a, b, c, al: -a * b / (2 * al), "R(Z,Y)X"),
    ("hhv", "h", "a^2/(2 alpha)", lambda a, b, c, al: a**2 / (2 * al), "(nabla_Y R)(Z,t)X - (nabla_X R)(Z,t)Y"),
    ("hhv", "h", "a^3 b/(4 alpha^2)", lambda a, b, c, al: a**3 * b / (4 * al**2), "R(X,t)R(Z,t)Y - R(Y,t)R(Z,t)X"),
    ("hhv", "v", "1", lambda a, b, c, al: 1.0, "R(X,Y)Z"),
    ("hhv", "v", "ab/(2 alpha)", lambda a, b, c, al: a * b / (2 * al), "(nabla_X R)(Z,t)Y - (nabla_Y R)(Z,t)X"),
    ("hhv", "v", "a^2/(4 alpha)", lambda a, b, c, al: a**2 / (4 * al), "R(X,R(Z,t)Y)t - R(Y,R(Z,t)X)t"),
    ("hhv", "v", "a^2 b^2/(4 alpha^2)", lambda a, b, c, al: a**2 * b**2 / (4 * al**2), "R(Y,t)R(Z,t)X - R(X,t)R(Z,t)Y"),
    ("hhh", "h", "1", lambda a, b, c, al: 1.0, "R(X,Y)Z"),
    ("hhh", "h", "ab/(2 alpha)", lambda a, b, c, al: a * b / (2 * al), "2(nabla_t R)(X,Y)Z - (nabla_Z R)(X,Y)t"),
    ("hhh", "h", "a^2/(4 alpha)", lambda a, b, c, al: a**2 / (4 * al), "R(R(Y,Z)t,t)X - R(R(X,Z)t,t)Y"),
    (
        "hhh", "h", "a^2 b^2/(4 alpha^2)", lambda a, b, c, al: a**2 * b**2 / (4 * al**2),
        "R(X,t)R(Y,t)Z + R(X,t)R(Z,t)Y - R(Y,t)R(X,t)Z - R(Y,t)R(Z,t)X",
    ),
    ("hhh", "h", "-a^2/(2 alpha)", lambda a, b, c, al: -(a**2) / (2 * al), "R(R(X,Y)t,t)Z"),
    ("hhh", "v", "-b^2/alpha", lambda a, b, c, al: -(b**2) / al, "(nabla_t R)(X,Y)Z"),
    ("hhh", "v", "a(a+c)/(2 alpha)", lambda a, b, c, al: a * (a + c) / (2 * al), "(nabla_Z R)(X,Y)t"),
    (
        "hhh", "v", "ab^3/(2 alpha^2)", lambda a, b, c, al: a * b**3 / (2 * al**2),
        "R(R(Y,t)Z,X)t - R(X,t)R(Z,t)Y - R(R(X,t)Z,Y)t + R(Y,t)R(Z,t)X",
    ),
    (
        "hhh", "v", "a^2 b(a+c)/(4 alpha^2)", lambda a, b, c, al: a**2 * b * (a + c) / (4 * al**2),
        "R(X,R(Y,t)Z)t + R(X,R(Z,t)Y)t - R(Y,R(X,t)Z)t - R(Y,R(Z,t)X)t - R(R(Y,Z)t,t)X + R(R(X,Z)t,t)Y",
    ),
    ("hhh", "v", "ab/(2 alpha)", lambda a, b, c, al: a * b / (2 * al), "R(R(X,Y)t,t)Z"),
    ("hvh", "h", "-a^2/(2 alpha)", lambda a, b, c, al: -(a**2) / (2 * al), "(nabla_X R)(Y,t)Z"),
    (
        "hvh", "h", "a^3 b/(4 alpha^2)", lambda a, b, c, al: a**3 * b / (4 * al**2),
        "R(X,t)R(Y,t)Z - R(Y,t)R(Z,t)X - R(Y,t)R(X,t)Z",
    ),
    ("hvh", "h", "ab/(2 alpha)", lambda a, b, c, al: a * b / (2 * al), "R(X,Y)Z + R(Z,Y)X"),
    ("hvh", "v", "ab/(2 alpha)", lambda a, b, c, al: a * b / (2 * al), "(nabla_X R)(Y,t)Z"),
    (
        "hvh", "v", "-a^2 b^2/(4 alpha^2)", lambda a, b, c, al: -(a**2) * b**2 / (4 * al**2),
        "R(X,t)R(Y,t)Z - R(Y,t)R(Z,t)X - R(Y,t)R(X,t)Z",
    ),
    ("hvh", "v", "a^2/(4 alpha)", lambda a, b, c, al: a**2 / (4 * al), "R(X,R(Y,t)Z)t"),
    ("hvh", "v", "-b^2/alpha", lambda a, b, c, al: -(b**2) / al, "R(X,Y)Z"),
    ("hvh", "v", "a(a+c)/(2 alpha)", lambda a, b, c, al: a * (a + c) / (2 * al), "R(X,Z)Y"),
]

PRINTED_CASES = ("vvv", "vvh", "hvv", "hhv", "hhh", "hvh")

# Coefficient replacements settled against the brute-force oracle, keyed by
# (case, part, expression label).  Applied only with ``variant="adjudicated"``.
ADJUDICATED: dict[tuple[str, str, str], tuple[str, Coefficient]] = {
    # fitted / printed = a^2 at every point and parameter triple tried; the
    # printed a^2 also breaks degree-0 homogeneity in (a, b, c)
    ("vvh", "h", "R(X,t)R(Y,t)Z - R(Y,t)R(X,t)Z"): (
        "a^4/(4 alpha^2)", lambda a, b, c, al: a**4 / (4 * al**2)
    ),
}


class _Ops:
    """Operator-form R and ∇R with t fixed; vectors may carry batch axes."""

    def __init__(self, bundle: CurvatureBundle, t: np.ndarray):
        self.rm = bundle.riemann
        self.nrm = bundle.nabla_riemann
        self.t = t

    def R(self, x, y, z):
        return np.einsum("lijk,i...,j...,k...->l...", self.rm, x, y, z)

    def Rt(self, x, z):
        """R(X, t)Z."""
        return self.R(x, self.t, z)

    def nR(self, w, x, y, z):
        if self.nrm is None:
            raise ValueError("bundle lacks nabla_riemann; build it with with_nabla=True")
        return np.einsum("wlijk,w...,i...,j...,k...->l...", self.nrm, w, x, y, z)


def _case_terms(case: str, o: _Ops, X, Y, Z) -> dict[tuple[str, str], np.ndarray]:
    t, R, Rt, nR = o.t, o.R, o.Rt, o.nR
    # Rt(X, Z) reads R(X, t)Z; nR(W, X, Y, Z) reads (∇_W R)(X, Y)Z
    if case == "vvh":
        return {
            ("h", "R(X,Y)Z"): R(X, Y, Z),
            ("h", "R(X,t)R(Y,t)Z - R(Y,t)R(X,t)Z"): Rt(X, Rt(Y, Z)) - Rt(Y, Rt(X, Z)),
            ("v", "R(Y,X)Z"): R(Y, X, Z),
            ("v", "R(Y,t)R(X,t)Z - R(X,t)R(Y,t)Z"): Rt(Y, Rt(X, Z)) - Rt(X, Rt(Y, Z)),
        }
    if case == "hvv":
        ryz = Rt(Y, Rt(Z, X))
        return {
            ("h", "R(Z,Y)X"): R(Z, Y, X),
            ("h", "R(Y,t)R(Z,t)X"): ryz,
            ("v", "R(Y,t)R(Z,t)X"): ryz,
            ("v", "R(Z,Y)X"): R(Z, Y, X),
        }
    if case == "hhv":
        return {
            ("h", "(nabla_Y R)(Z,t)X - (nabla_X R)(Z,t)Y"): nR(Y, Z, t, X) - nR(X, Z, t, Y),
            ("h", "R(X,t)R(Z,t)Y - R(Y,t)R(Z,t)X"): Rt(X, Rt(Z, Y)) - Rt(Y, Rt(Z, X)),
            ("v", "R(X,Y)Z"): R(X, Y, Z),
            ("v", "(nabla_X R)(Z,t)Y - (nabla_Y R)(Z,t)X"): nR(X, Z, t, Y) - nR(Y, Z, t, X),
            ("v", "R(X,R(Z,t)Y)t - R(Y,R(Z,t)X)t"): R(X, Rt(Z, Y), t) - R(Y, Rt(Z, X), t),
            ("v", "R(Y,t)R(Z,t)X - R(X,t)R(Z,t)Y"): Rt(Y, Rt(Z, X)) - Rt(X, Rt(Z, Y)),
        }
    if case == "hhh":
        return {
            ("h", "R(X,Y)Z"): R(X, Y, Z),
            ("h", "2(nabla_t R)(X,Y)Z - (nabla_Z R)(X,Y)t"): 2 * nR(t, X, Y, Z) - nR(Z, X, Y, t),
            ("h", "R(R(Y,Z)t,t)X - R(R(X,Z)t,t)Y"): R(R(Y, Z, t), t, X) - R(R(X, Z, t), t, Y),
            ("h", "R(X,t)R(Y,t)Z + R(X,t)R(Z,t)Y - R(Y,t)R(X,t)Z - R(Y,t)R(Z,t)X"): (
                Rt(X, Rt(Y, Z)) + Rt(X, Rt(Z, Y)) - Rt(Y, Rt(X, Z)) - Rt(Y, Rt(Z, X))
            ),
            ("h", "R(R(X,Y)t,t)Z"): R(R(X, Y, t), t, Z),
            ("v", "(nabla_t R)(X,Y)Z"): nR(t, X, Y, Z),
            ("v", "(nabla_Z R)(X,Y)t"): nR(Z, X, Y, t),
            ("v", "R(R(Y,t)Z,X)t - R(X,t)R(Z,t)Y - R(R(X,t)Z,Y)t + R(Y,t)R(Z,t)X"): (
                R(Rt(Y, Z), X, t) - Rt(X, Rt(Z, Y)) - R(Rt(X, Z), Y, t) + Rt(Y, Rt(Z, X))
            ),
            ("v", "R(X,R(Y,t)Z)t + R(X,R(Z,t)Y)t - R(Y,R(X,t)Z)t - R(Y,R(Z,t)X)t - R(R(Y,Z)t,t)X + R(R(X,Z)t,t)Y"): (
                R(X, Rt(Y, Z), t)
                + R(X, Rt(Z, Y), t)
                - R(Y, Rt(X, Z), t)
                - R(Y, Rt(Z, X), t)
                - R(R(Y, Z, t), t, X)
                + R(R(X, Z, t), t, Y)
            ),
            ("v", "R(R(X,Y)t,t)Z"): R(R(X, Y, t), t, Z),
        }
    if case == "hvh":
        mixed = Rt(X, Rt(Y, Z)) - Rt(Y, Rt(Z, X)) - Rt(Y, Rt(X, Z))
        return {
            ("h", "(nabla_X R)(Y,t)Z"): nR(X, Y, t, Z),
            ("h", "R(X,t)R(Y,t)Z - R(Y,t)R(Z,t)X - R(Y,t)R(X,t)Z"): mixed,
            ("h", "R(X,Y)Z + R(Z,Y)X"): R(X, Y, Z) + R(Z, Y, X),
            ("v", "(nabla_X R)(Y,t)Z"): nR(X, Y, t, Z),
            ("v", "R(X,t)R(Y,t)Z - R(Y,t)R(Z,t)X - R(Y,t)R(X,t)Z"): mixed,
            ("v", "R(X,R(Y,t)Z)t"): R(X, Rt(Y, Z), t),
            ("v", "R(X,Y)Z"): R(X, Y, Z),
            ("v", "R(X,Z)Y"): R(X, Z, Y),
        }
    raise ValueError(f"no printed terms for case {case!r}")


def curvature_terms(
    params: GNaturalParams, bundle: CurvatureBundle, p: TangentPoint, case: str, X, Y, Z, variant: str = "printed"
) -> list[Term]:
    """Named summands of R̃ for one printed h/v case, with base vectors X, Y, Z."""
    if case == "vvv":
        return []
    if variant not in ("printed", "adjudicated"):
        raise ValueError(f"unknown variant {variant!r}")
    a, b, c, al = params.a, params.b, params.c, params.alpha
    exprs = _case_terms(case, _Ops(bundle, p.y), X, Y, Z)
    out = []
    for tcase, part, clabel, coef, elabel in _TABLE:
        if tcase != case:
            continue
        if variant == "adjudicated" and (tcase, part, elabel) in ADJUDICATED:
            clabel, coef = ADJUDICATED[tcase, part, elabel]
        value = coef(a, b, c, al)
        out.append(Term(case, part, elabel, clabel, value, exprs[part, elabel]))
    return out


def case_value(params, bundle, p, case: str, X, Y, Z, variant: str = "printed") -> tuple[np.ndarray, np.ndarray]:
    """(horizontal, vertical) parts of R̃ for one h/v case; all eight cases accepted.

    The two unprinted cases come from antisymmetry in the first two slots.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if case == "vhv":
        h, v = case_value(params, bundle, p, "hvv", Y, X, Z, variant)
        return -h, -v
    if case == "vhh":
        h, v = case_value(params, bundle, p, "hvh", Y, X, Z, variant)
        return -h, -v
    shape = np.broadcast_shapes(X.shape, Y.shape, Z.shape)
    h = np.zeros(shape)
    v = np.zeros(shape)
    for term in curvature_terms(params, bundle, p, case, X, Y, Z, variant):
        if term.part == "h":
            h = h + term.value * term.vector
        else:
            v = v + term.value * term.vector
    return h, v


ALL_CASES = ("vvv", "vvh", "vhv", "vhh", "hvv", "hvh", "hhv", "hhh")


def lifted_curvature_closed(
    params: GNaturalParams,
    bundle: CurvatureBundle,
    p: TangentPoint,
    U: SplitVector,
    V: SplitVector,
    W: SplitVector,
    variant: str = "printed",
) -> SplitVector:
    """R̃(U, V)W assembled trilinearly from the eight h/v cases."""
    parts = {"h": (U.h, V.h, W.h), "v": (U.v, V.v, W.v)}
    h = np.zeros(bundle.dim)
    v = np.zeros(bundle.dim)
    for case in ALL_CASES:
        if case == "vvv":
            continue
        X, Y, Z = parts[case[0]][0], parts[case[1]][1], parts[case[2]][2]
        dh, dv = case_value(params, bundle, p, case, X, Y, Z, variant)
        h = h + dh
        v = v + dv
    return SplitVector(h, v)
