"""Predefined base manifolds with analytic metrics and safe sampling boxes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .base_geometry import MetricSpec
from .calculus import sin
from .errors import ParamError, UnknownEntryError

POLE_MARGIN = 0.3
MAX_PERTURBATION = 0.2


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict
    metric: MetricSpec
    box: tuple[tuple[float, float], ...]
    known_flat: bool
    known_locally_symmetric: bool
    periodic: tuple[bool, ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.metric.dim

    def sample_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return lo + (hi - lo) * rng.random((count, self.dim))


def _diag(entries: list) -> list[list]:
    n = len(entries)
    return [[entries[i] if i == j else 0.0 for j in range(n)] for i in range(n)]


def _euclidean(n: int) -> CatalogEntry:
    def g(x):
        return _diag([1.0] * n)

    metric = MetricSpec(n, g, name=f"euclidean({n})")
    return CatalogEntry("euclidean", {"n": n}, metric, ((-2.0, 2.0),) * n, True, True)


def _flat_torus(n: int) -> CatalogEntry:
    two_pi = 2.0 * np.pi

    def g(x):
        return _diag([1.0] * n)

    def domain(x):
        return all(0.0 <= v < two_pi for v in x)

    metric = MetricSpec(n, g, domain, name=f"flat_torus_chart({n})")
    # interior of one fundamental cell; stencils never cross the identification
    box = ((0.5, two_pi - 0.5),) * n
    return CatalogEntry("flat_torus_chart", {"n": n}, metric, box, True, True, (True,) * n)


def _sphere(n: int, r: float) -> CatalogEntry:
    if n not in (2, 3):
        raise ParamError("sphere_polar supports n = 2 or 3")
    if r <= 0:
        raise ParamError("sphere radius must be positive")
    r2 = r * r

    if n == 2:
        def g(x):
            s = sin(x[0])
            return _diag([r2, r2 * s * s])

        def domain(x):
            return 0.0 < x[0] < np.pi
    else:
        def g(x):
            s0 = sin(x[0])
            s1 = sin(x[1])
            return _diag([r2, r2 * s0 * s0, r2 * s0 * s0 * s1 * s1])

        def domain(x):
            return 0.0 < x[0] < np.pi and 0.0 < x[1] < np.pi

    polar = (POLE_MARGIN, np.pi - POLE_MARGIN)
    box = (polar,) * (n - 1) + ((-np.pi, np.pi),)
    metric = MetricSpec(n, g, domain, name=f"sphere_polar({n}, r={r:g})")
    return CatalogEntry("sphere_polar", {"n": n, "r": r}, metric, box, False, True)


def _hyperbolic(n: int) -> CatalogEntry:
    def g(x):
        w = 1.0 / (x[n - 1] * x[n - 1])
        return _diag([w] * n)

    def domain(x):
        return x[n - 1] > 0.0

    box = ((-1.0, 1.0),) * (n - 1) + ((0.5, 3.0),)
    metric = MetricSpec(n, g, domain, name=f"hyperbolic_halfspace({n})")
    return CatalogEntry("hyperbolic_halfspace", {"n": n}, metric, box, False, True)


def perturbation_coefficients(n: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Amplitudes (|s| <= 1), integer wave vectors and phases of S; only i <= j is used."""
    rng = np.random.default_rng(seed)
    amp = rng.uniform(-1.0, 1.0, (n, n))
    waves = rng.integers(-2, 3, (n, n, n)).astype(float)
    phase = rng.uniform(0.0, 2.0 * np.pi, (n, n))
    for i in range(n):
        for j in range(n):
            if not waves[i, j].any():
                waves[i, j, (i + j) % n] = 1.0
    return amp, waves, phase


def _perturbed_flat(n: int, eps: float, seed: int) -> CatalogEntry:
    if n > 4:
        raise ParamError("perturbed_flat supports n <= 4 (Gershgorin bound)")
    if not 0.0 <= eps <= MAX_PERTURBATION:
        raise ParamError(f"perturbation eps={eps} outside [0, {MAX_PERTURBATION}]")
    amp, waves, phase = perturbation_coefficients(n, seed)
    # Gershgorin: smallest eigenvalue >= 1 - n*eps >= 0.2
    def g(x):
        out = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                arg = phase[i, j]
                for k in range(n):
                    if waves[i, j, k]:
                        arg = arg + waves[i, j, k] * x[k]
                v = eps * amp[i, j] * sin(arg)
                if i == j:
                    v = v + 1.0
                out[i][j] = v
                out[j][i] = v
        return out

    metric = MetricSpec(n, g, name=f"perturbed_flat({n}, eps={eps:g}, seed={seed})")
    return CatalogEntry(
        "perturbed_flat",
        {"n": n, "eps": eps, "seed": seed},
        metric,
        ((-np.pi, np.pi),) * n,
        eps == 0.0,
        eps == 0.0,
    )


_FACTORIES: dict[str, tuple[Callable[..., CatalogEntry], dict[str, Any]]] = {
    "euclidean": (_euclidean, {"n": 3}),
    "flat_torus_chart": (_flat_torus, {"n": 3}),
    "sphere_polar": (_sphere, {"n": 3, "r": 1.0}),
    "hyperbolic_halfspace": (_hyperbolic, {"n": 3}),
    "perturbed_flat": (_perturbed_flat, {"n": 3, "eps": 0.1, "seed": 7}),
}

NAMES = tuple(_FACTORIES)


def make(name: str, params: dict | None = None, **kwargs) -> CatalogEntry:
    """Build catalog entry ``name``; unspecified parameters take the defaults."""
    if name not in _FACTORIES:
        raise UnknownEntryError(f"unknown catalog entry {name!r}; choose from {', '.join(NAMES)}")
    factory, defaults = _FACTORIES[name]
    merged = dict(defaults)
    merged.update(params or {})
    merged.update(kwargs)
    unknown = set(merged) - set(defaults)
    if unknown:
        raise ParamError(f"{name}: unknown parameter(s) {sorted(unknown)}")
    try:
        merged = {k: type(defaults[k])(v) for k, v in merged.items()}
    except (TypeError, ValueError) as exc:
        raise ParamError(f"{name}: bad parameter value ({exc})") from None
    if merged["n"] < 2:
        raise ParamError("dimension must be at least 2")
    return factory(**merged)
