import numpy as np
import pytest

from gnatural import catalog
from gnatural.base_geometry import (
    MetricSpec,
    christoffel,
    curvature_bundle,
    invariant_violations,
    inverse,
    nabla_riemann,
    riemann,
    sectional_curvature,
)
from gnatural.calculus import DiffConfig, sin
from gnatural.errors import SingularMetricError

FD = DiffConfig(mode="finite_difference")


def test_euclidean_is_flat():
    e = catalog.make("euclidean")
    b = curvature_bundle(e.metric, [0.3, -1.0, 2.0])
    assert np.array_equal(b.g, np.eye(3)) and np.array_equal(b.g_inv, np.eye(3))
    for arr in (b.gamma, b.riemann, b.nabla_riemann):
        assert not arr.any()


def test_sphere_christoffel_symbols():
    # g = diag(1, sin^2 th) at th = pi/4
    s2 = catalog.make("sphere_polar", n=2)
    gam = christoffel(s2.metric, [np.pi / 4, 0.2])
    assert gam[0, 1, 1] == pytest.approx(-0.5, abs=1e-14)
    assert gam[1, 0, 1] == pytest.approx(1.0, abs=1e-14)
    assert gam[1, 1, 0] == pytest.approx(1.0, abs=1e-14)


def test_hyperbolic_plane_christoffel():
    h2 = catalog.make("hyperbolic_halfspace", n=2)
    gam = christoffel(h2.metric, [0.0, 2.0])
    assert gam[0, 0, 1] == pytest.approx(-0.5, abs=1e-14)


@pytest.mark.parametrize("name, expected", [("sphere_polar", 1.0), ("hyperbolic_halfspace", -1.0)])
def test_constant_curvature_planes(name, expected):
    m = catalog.make(name, n=2)
    x = [np.pi / 3, 1.0] if name == "sphere_polar" else [0.3, 1.7]
    b = curvature_bundle(m.metric, x)
    assert sectional_curvature(b, [1, 0], [0, 1]) == pytest.approx(expected, abs=1e-12)


def test_riemann_sign_convention():
    # R(e_th, e_ph) e_ph = sin^2 th e_th on the unit sphere for R = [nabla, nabla] - nabla_[,]
    s2 = catalog.make("sphere_polar", n=2)
    th = 0.9
    rm = riemann(s2.metric, [th, 0.0])
    assert rm[0, 0, 1, 1] == pytest.approx(np.sin(th) ** 2, abs=1e-13)


def test_s3_is_locally_symmetric():
    s3 = catalog.make("sphere_polar")
    assert np.abs(nabla_riemann(s3.metric, [1.0, 2.0, 0.3])).max() < 1e-6


# fixture: g = I + 0.1 diag(sin x1, 0, 0) at the point below, frozen from dual
# mode and matched by finite differences to 1e-9
PERTURBED_POINT = [0.3, 0.7, -0.2]
PERTURBED_COMPONENT = (1, 1, 0, 1, 0)
PERTURBED_VALUE = -0.03341562112187533


def _diag_perturbed():
    return MetricSpec(3, lambda x: [[1 + 0.1 * sin(x[1]), 0, 0], [0, 1.0, 0], [0, 0, 1.0]], name="diag perturbed")


def test_perturbed_nabla_regression():
    m = _diag_perturbed()
    d = nabla_riemann(m, PERTURBED_POINT)
    f = nabla_riemann(m, PERTURBED_POINT, FD)
    assert np.abs(d).max() > 1e-4
    assert d[PERTURBED_COMPONENT] == pytest.approx(PERTURBED_VALUE, abs=1e-13)
    assert f[PERTURBED_COMPONENT] == pytest.approx(PERTURBED_VALUE, abs=1e-7)


def test_singular_metric_rejected():
    with pytest.raises(SingularMetricError):
        inverse(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]]))
    m = MetricSpec(2, lambda x: [[x[0] * x[0], 0.0], [0.0, 1.0]])
    with pytest.raises(SingularMetricError):
        christoffel(m, [0.0, 0.0])


def test_bundle_is_immutable():
    b = curvature_bundle(catalog.make("sphere_polar").metric, [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        b.riemann[0, 0, 0, 0] = 1.0


@pytest.mark.parametrize("name", catalog.NAMES)
@pytest.mark.parametrize("mode, tol", [("dual", 1e-8), ("finite_difference", 1e-5)])
def test_invariant_suite(name, mode, tol):
    e = catalog.make(name)
    rng = np.random.default_rng(11)
    cfg = DiffConfig(mode=mode)
    for x in e.sample_points(10, rng):
        viol = invariant_violations(curvature_bundle(e.metric, list(x), cfg))
        assert set(viol) >= {"gamma_symmetry", "metric_compatibility", "first_bianchi", "second_bianchi"}
        assert max(viol.values()) <= tol, viol


@pytest.mark.parametrize("name", catalog.NAMES)
def test_mode_agreement(name):
    e = catalog.make(name)
    rng = np.random.default_rng(5)
    for x in e.sample_points(20, rng):
        d = curvature_bundle(e.metric, list(x))
        f = curvature_bundle(e.metric, list(x), FD)
        for key in ("g_inv", "gamma", "riemann", "nabla_riemann"):
            assert np.abs(getattr(d, key) - getattr(f, key)).max() <= 1e-5, key
