"""Forward-mode derivatives of coordinate fields, up to third order.

Two engines live here:

* nested first-order dual numbers (``mode="dual"``), one nesting level per
  derivative order.  Every level carries an integer tag so a derivative may be
  taken *inside* a function that is itself being differentiated (the tangent
  bundle oracle does exactly that: its metric contains Christoffel symbols of
  the base).  Seeds are batched along numpy axes, so a single evaluation of the
  field yields the full array of partials of a given order.
* central finite differences (``mode="finite_difference"``) built from nested
  first-derivative stencils of order 2, 4 or 6.

Fields are plain Python callables taking a list of coordinates.  They must be
written with the operators and the elementary functions exported here
(:func:`sin`, :func:`exp`, ...) so they accept :class:`Dual` arguments.
"""

from __future__ import annotations

import contextvars
import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, OrderError

MAX_ORDER = 3

# Number of batch axes / tags allocated by the enclosing derivative requests.
_DEPTH: contextvars.ContextVar[int] = contextvars.ContextVar("gnatural_dual_depth", default=0)

_FD_WEIGHTS = {
    2: ((-1, -1 / 2), (1, 1 / 2)),
    4: ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12)),
    6: ((-3, -1 / 60), (-2, 3 / 20), (-1, -3 / 4), (1, 3 / 4), (2, -3 / 20), (3, 1 / 60)),
}


def _is_container(v) -> bool:
    # object arrays hold many values; float arrays are batched leaves of one value
    return type(v) is np.ndarray and v.dtype == object


def _each(fn, arr: np.ndarray) -> np.ndarray:
    return np.frompyfunc(fn, 1, 1)(arr)


class Dual:
    """Dual number ``re + eps * ε_tag`` with nestable parts.

    ``re`` and ``eps`` may be floats, numpy arrays (batched seeds) or Duals of
    strictly lower tag.  Mixing two tags treats the lower-tagged operand as a
    constant with respect to the higher tag.
    """

    __slots__ = ("tag", "re", "eps")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, tag: int, re, eps):
        self.tag = tag
        self.re = re
        self.eps = eps

    def __repr__(self) -> str:
        return f"Dual[{self.tag}]({self.re!r}, {self.eps!r})"

    def __add__(self, other):
        if _is_container(other):
            return _each(lambda o: self + o, other)
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.tag, self.re + other.re, self.eps + other.eps)
            if other.tag > self.tag:
                return other.__radd__(self)
        return Dual(self.tag, self.re + other, self.eps)

    def __radd__(self, other):
        if _is_container(other):
            return _each(lambda o: o + self, other)
        return Dual(self.tag, other + self.re, self.eps)

    def __sub__(self, other):
        if _is_container(other):
            return _each(lambda o: self - o, other)
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.tag, self.re - other.re, self.eps - other.eps)
            if other.tag > self.tag:
                return other.__rsub__(self)
        return Dual(self.tag, self.re - other, self.eps)

    def __rsub__(self, other):
        if _is_container(other):
            return _each(lambda o: o - self, other)
        return Dual(self.tag, other - self.re, -self.eps)

    def __neg__(self):
        return Dual(self.tag, -self.re, -self.eps)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if _is_container(other):
            return _each(lambda o: self * o, other)
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.tag, self.re * other.re, self.re * other.eps + self.eps * other.re)
            if other.tag > self.tag:
                return other.__rmul__(self)
        return Dual(self.tag, self.re * other, self.eps * other)

    def __rmul__(self, other):
        if _is_container(other):
            return _each(lambda o: o * self, other)
        return Dual(self.tag, other * self.re, other * self.eps)

    def __truediv__(self, other):
        if _is_container(other):
            return _each(lambda o: self / o, other)
        if isinstance(other, Dual):
            if other.tag == self.tag:
                q = self.re / other.re
                return Dual(self.tag, q, (self.eps - q * other.eps) / other.re)
            if other.tag > self.tag:
                return other.__rtruediv__(self)
        return Dual(self.tag, self.re / other, self.eps / other)

    def __rtruediv__(self, other):
        if _is_container(other):
            return _each(lambda o: o / self, other)
        inv = 1.0 / self.re
        q = other * inv
        return Dual(self.tag, q, -q * self.eps * inv)

    def __pow__(self, power):
        if isinstance(power, Dual):
            return exp(power * log(self))
        if power == 2:
            return self * self
        return Dual(self.tag, self.re**power, power * self.re ** (power - 1) * self.eps)

    def __rpow__(self, base):
        return exp(self * np.log(base))


def real(v) -> float:
    """Primal value of a possibly nested dual number."""
    while isinstance(v, Dual):
        v = v.re
    return v


def sin(v):
    if isinstance(v, Dual):
        return Dual(v.tag, sin(v.re), cos(v.re) * v.eps)
    return np.sin(v)


def cos(v):
    if isinstance(v, Dual):
        return Dual(v.tag, cos(v.re), -sin(v.re) * v.eps)
    return np.cos(v)


def tan(v):
    if isinstance(v, Dual):
        t = tan(v.re)
        return Dual(v.tag, t, (1.0 + t * t) * v.eps)
    return np.tan(v)


def exp(v):
    if isinstance(v, Dual):
        e = exp(v.re)
        return Dual(v.tag, e, e * v.eps)
    return np.exp(v)


def log(v):
    if isinstance(v, Dual):
        return Dual(v.tag, log(v.re), v.eps / v.re)
    return np.log(v)


def sqrt(v):
    if isinstance(v, Dual):
        s = sqrt(v.re)
        return Dual(v.tag, s, v.eps / (2.0 * s))
    return np.sqrt(v)


def sinh(v):
    if isinstance(v, Dual):
        return Dual(v.tag, sinh(v.re), cosh(v.re) * v.eps)
    return np.sinh(v)


def cosh(v):
    if isinstance(v, Dual):
        return Dual(v.tag, cosh(v.re), sinh(v.re) * v.eps)
    return np.cosh(v)


def tanh(v):
    if isinstance(v, Dual):
        t = tanh(v.re)
        return Dual(v.tag, t, (1.0 - t * t) * v.eps)
    return np.tanh(v)


@dataclass(frozen=True)
class DiffConfig:
    mode: str = "dual"
    fd_step: float = 1e-4
    fd_order: int = 4

    def __post_init__(self):
        if self.mode == "fd":
            object.__setattr__(self, "mode", "finite_difference")
        if self.mode not in ("dual", "finite_difference"):
            raise ValueError(f"unknown differentiation mode {self.mode!r}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.fd_order not in _FD_WEIGHTS:
            raise ValueError(f"fd_order must be one of {sorted(_FD_WEIGHTS)}")


DEFAULT_CONFIG = DiffConfig()


@dataclass(frozen=True)
class ScalarField:
    """A real function of ``dim`` chart coordinates."""

    dim: int
    eval: Callable[[list], object]
    smoothness_order: int = 3
    domain: Optional[Callable[[Sequence[float]], bool]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.smoothness_order < MAX_ORDER:
            raise ValueError("fields must be at least C^3")

    def __call__(self, x):
        return self.eval(x)


# ---------------------------------------------------------------------------
# dual-number engine


def _select(v, tag: int, want_eps: bool):
    if isinstance(v, Dual) and v.tag == tag:
        return v.eps if want_eps else v.re
    return 0.0 if want_eps else v


def _map_leaves(v, f):
    if isinstance(v, Dual):
        return Dual(v.tag, _map_leaves(v.re, f), _map_leaves(v.eps, f))
    return f(v)


def _dual_eval(fn, x: Sequence, seeds: list[list]):
    """Evaluate ``fn`` on coordinates perturbed level by level.

    ``seeds[L][a]`` is the ε-part given to coordinate ``a`` at level ``L``
    (``None`` leaves the coordinate constant at that level).  Returns the raw
    output as an object array and the tags used.
    """
    base = _DEPTH.get()
    tags = [base + L + 1 for L in range(len(seeds))]
    xs = []
    for a, xa in enumerate(x):
        v = xa
        for L, tag in enumerate(tags):
            s = seeds[L][a]
            if s is not None:
                v = Dual(tag, v, s)
        xs.append(v)
    token = _DEPTH.set(base + len(seeds))
    try:
        out = fn(xs)
    finally:
        _DEPTH.reset(token)
    return np.asarray(out, dtype=object), tags, base


def _coefficient(v, tags: list[int], j: int):
    # coefficient of ε_1 ... ε_j, with the higher levels set to their primal part
    for L in range(len(tags) - 1, -1, -1):
        v = _select(v, tags[L], L < j)
    return v


def _fit_rank(leaf, rank: int) -> np.ndarray:
    """Drop leading unit axes (levels not selected) so that ``ndim <= rank``."""
    leaf = np.asarray(leaf)
    if leaf.ndim > rank:
        extra = leaf.ndim - rank
        if any(d != 1 for d in leaf.shape[:extra]):
            raise RuntimeError(f"unexpected batch layout {leaf.shape} for rank {rank}")
        leaf = leaf.reshape(leaf.shape[extra:])
    return leaf


def _split_leaf(leaf, idx: tuple, rank_outer: int):
    j = len(idx)
    leaf = _fit_rank(leaf, rank_outer + j)
    if leaf.ndim <= rank_outer:
        return leaf if leaf.ndim else float(leaf)
    pad = rank_outer + j - leaf.ndim
    if pad:
        leaf = leaf.reshape((1,) * pad + leaf.shape)
    sub = leaf[tuple(i if leaf.shape[k] > 1 else 0 for k, i in enumerate(idx))]
    return sub if sub.ndim else float(sub)


def _dual_derivatives(fn, x: Sequence, order: int) -> list[np.ndarray]:
    m = len(x)
    base = _DEPTH.get()
    seeds = []
    for L in range(order):
        rank = base + L + 1
        level = []
        for a in range(m):
            s = np.zeros((m,) + (1,) * (rank - 1))
            s[a] = 1.0
            level.append(s)
        seeds.append(level)
    out, tags, base = _dual_eval(fn, x, seeds)
    result = []
    for j in range(order + 1):
        coeffs = [_coefficient(v, tags, j) for v in out.ravel()]
        if j == 0:
            arr = np.empty(len(coeffs), dtype=object)
            arr[:] = [_map_leaves(c, lambda leaf: _split_leaf(leaf, (), base)) for c in coeffs]
            result.append(_tidy(arr.reshape(out.shape)))
            continue
        if base == 0 and not any(isinstance(c, Dual) for c in coeffs):
            # leaf axes are (level j, ..., level 1); reverse to (level 1, ..., level j)
            full = np.stack([np.broadcast_to(_fit_rank(np.asarray(c, dtype=float), j), (m,) * j) for c in coeffs], axis=-1)
            full = full.transpose(tuple(range(j - 1, -1, -1)) + (j,))
            result.append(np.ascontiguousarray(full.reshape((m,) * j + out.shape)))
            continue
        arr = np.empty((m,) * j + (len(coeffs),), dtype=object)
        for idx in itertools.product(range(m), repeat=j):
            lead = idx[::-1]
            for e, c in enumerate(coeffs):
                arr[idx + (e,)] = _map_leaves(c, lambda leaf: _split_leaf(leaf, lead, base))
        result.append(_tidy(arr.reshape((m,) * j + out.shape)))
    return result


def _tidy(arr: np.ndarray) -> np.ndarray:
    """Convert an object array to float when it holds no dual numbers."""
    if arr.dtype == object and not any(isinstance(v, Dual) for v in arr.ravel()):
        return arr.astype(float)
    return arr


# ---------------------------------------------------------------------------
# finite differences


# step multiplier per derivative order; deeper stencils need wider steps to
# keep roundoff (~eps/h^k) below truncation, tuned on the catalog entries
_ORDER_SCALE = (1.0, 10.0, 15.0)


def _steps(x: Sequence, order: int, cfg: DiffConfig) -> np.ndarray:
    scale = cfg.fd_step * _ORDER_SCALE[order - 1]
    return np.array([scale * max(1.0, abs(float(real(xa)))) for xa in x])


def fd_error_estimate(cfg: DiffConfig, order: int) -> float:
    """A priori error scale of an order-``order`` derivative for O(1) fields.

    Truncation h^p plus roundoff eps/h^order at the widened step for that order.
    """
    h = cfg.fd_step * _ORDER_SCALE[order - 1]
    return h**cfg.fd_order + np.finfo(float).eps / h**order


def _fd_mixed(fn, x: Sequence, multi_index: tuple, cfg: DiffConfig, cache: dict):
    weights = _FD_WEIGHTS[cfg.fd_order]
    h = _steps(x, len(multi_index), cfg)
    total = 0.0
    for combo in itertools.product(weights, repeat=len(multi_index)):
        offset = [0] * len(x)
        w = 1.0
        for (k, wk), a in zip(combo, multi_index):
            offset[a] += k
            w *= wk / h[a]
        key = (len(multi_index), tuple(offset))
        if key not in cache:
            xp = [xa + off * ha for xa, off, ha in zip(x, offset, h)]
            cache[key] = np.asarray(fn(xp), dtype=object)
        total = total + w * cache[key]
    return total


def _fd_derivatives(fn, x: Sequence, order: int, cfg: DiffConfig) -> list[np.ndarray]:
    m = len(x)
    f0 = np.asarray(fn(list(x)), dtype=object)
    result = [_tidy(f0)]
    cache: dict = {}
    for j in range(1, order + 1):
        arr = np.empty((m,) * j + f0.shape, dtype=object)
        for mi in itertools.combinations_with_replacement(range(m), j):
            val = _fd_mixed(fn, x, mi, cfg, cache)
            for perm in set(itertools.permutations(mi)):
                arr[perm] = val
        result.append(_tidy(arr))
    return result


# ---------------------------------------------------------------------------
# public API


def derivatives(fn, x: Sequence, order: int, cfg: DiffConfig = DEFAULT_CONFIG) -> list[np.ndarray]:
    """All partial derivatives of ``fn`` at ``x`` up to ``order``.

    Returns ``[f, df, d2f, ...]`` where ``d^k f`` has shape ``(m,)*k + f.shape``
    and ``d2f[a, b, ...] = ∂_a ∂_b f``.  Arrays are float unless ``x`` carries
    dual numbers of an enclosing request, in which case they are object arrays.
    """
    if order > MAX_ORDER:
        raise OrderError(f"derivative order {order} exceeds the cap of {MAX_ORDER}")
    if order < 0:
        raise ValueError("order must be non-negative")
    x = list(x)
    if cfg.mode == "dual":
        return _dual_derivatives(fn, x, order)
    return _fd_derivatives(fn, x, order, cfg)


def partial(field: ScalarField, x: Sequence, multi_index: tuple, cfg: DiffConfig = DEFAULT_CONFIG):
    """``∂^{|multi_index|} field / ∂x^{multi_index}`` at ``x``."""
    multi_index = tuple(multi_index)
    if len(multi_index) > MAX_ORDER:
        raise OrderError(f"multi-index {multi_index} longer than {MAX_ORDER}")
    if len(x) != field.dim:
        raise ValueError(f"expected {field.dim} coordinates, got {len(x)}")
    if any(not 0 <= i < field.dim for i in multi_index):
        raise ValueError(f"multi-index {multi_index} out of range for dim {field.dim}")
    if field.domain is not None and not field.domain([float(real(v)) for v in x]):
        raise DomainError(f"point {list(x)} outside the chart domain")
    x = list(x)
    if not multi_index:
        return field.eval(x)
    if cfg.mode == "finite_difference":
        val = _fd_mixed(field.eval, x, multi_index, cfg, {})
        return val.item() if isinstance(val, np.ndarray) else val
    seeds = [[1.0 if a == i else None for a in range(field.dim)] for i in multi_index]
    out, tags, _ = _dual_eval(field.eval, x, seeds)
    val = _coefficient(out.item(), tags, len(multi_index))
    return float(val) if not isinstance(val, Dual) else val
