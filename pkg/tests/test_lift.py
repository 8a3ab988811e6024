import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnatural import catalog
from gnatural.base_geometry import apply_riemann, curvature_bundle
from gnatural.errors import ParamError
from gnatural.lift import (
    ADJUDICATED,
    ALL_CASES,
    PRESETS,
    GNaturalParams,
    LiftField,
    SplitVector,
    TangentPoint,
    abcd,
    adapted_frame,
    case_value,
    curvature_terms,
    lifted_connection,
    lifted_curvature_closed,
    lifted_metric_adapted,
    lifted_metric_coords,
    pairing,
)

S3 = catalog.make("sphere_polar")
H3 = catalog.make("hyperbolic_halfspace")
PF = catalog.make("perturbed_flat")
CURVED = [S3, H3, PF]


def _point(entry, seed):
    rng = np.random.default_rng(seed)
    x = entry.sample_points(1, rng)[0]
    return TangentPoint(x, rng.normal(size=entry.dim)), rng


def test_params_validation():
    assert GNaturalParams.sasaki().as_tuple() == (1.0, 0.0, 0.0)
    assert GNaturalParams.sasaki().alpha == 1.0
    assert [PRESETS[k].alpha for k in ("sasaki", "mixed", "skew")] == [1.0, 1.0, 5.0]
    with pytest.raises(ParamError, match="alpha"):
        GNaturalParams(1, 2, 0)
    with pytest.raises(ParamError):
        GNaturalParams(-1, 0, 3)
    with pytest.raises(ParamError):
        GNaturalParams.parse("1,2")
    assert GNaturalParams.parse("2,-1,1") == PRESETS["skew"]


def test_frame_on_flat_base_and_zero_section():
    e = catalog.make("euclidean")
    b = curvature_bundle(e.metric, [0.1, 0.2, 0.3])
    assert np.array_equal(adapted_frame(b, TangentPoint([0.1, 0.2, 0.3], [1, 2, 3])).basis, np.eye(6))
    b = curvature_bundle(S3.metric, [1.0, 1.0, 1.0])
    assert np.array_equal(adapted_frame(b, TangentPoint([1.0, 1.0, 1.0], [0, 0, 0])).basis, np.eye(6))


def test_s2_frame_block():
    s2 = catalog.make("sphere_polar", n=2)
    x = [np.pi / 4, 0.3]
    b = curvature_bundle(s2.metric, x)
    F = adapted_frame(b, TangentPoint(x, [1.0, 1.0])).basis
    # -(y^a Γ^j_{ai}) with Γ^θ_{φφ} = -1/2, Γ^φ_{θφ} = 1
    assert F[2:, :2] == pytest.approx(-np.array([[0.0, -0.5], [1.0, 1.0]]), abs=1e-14)


def test_adapted_metric_blocks():
    e = catalog.make("euclidean")
    b = curvature_bundle(e.metric, [0, 0, 0])
    eye = np.eye(3)
    assert np.array_equal(lifted_metric_adapted(PRESETS["mixed"], b), np.block([[2 * eye, eye], [eye, eye]]))
    s2 = catalog.make("sphere_polar", n=2)
    b = curvature_bundle(s2.metric, [np.pi / 3, 0])
    G = lifted_metric_adapted(PRESETS["skew"], b)
    assert np.allclose(G[:2, :2], 3 * b.g) and np.allclose(G[:2, 2:], -b.g) and np.allclose(G[2:, 2:], 2 * b.g)


def test_coordinate_metric_regression():
    # S^2, Sasaki, th = pi/4, y = (1, 1): hand-expanded G_xx = g + N^T g N, G_xy = N^T g
    s2 = catalog.make("sphere_polar", n=2)
    x = [np.pi / 4, 0.3]
    M = lifted_metric_coords(PRESETS["sasaki"], curvature_bundle(s2.metric, x), TangentPoint(x, [1.0, 1.0]))
    expected = np.array([[1.5, 0.5, 0.0, 0.5], [0.5, 1.25, -0.5, 0.5], [0.0, -0.5, 1.0, 0.0], [0.5, 0.5, 0.0, 0.5]])
    assert M == pytest.approx(expected, abs=1e-14)
    assert np.array_equal(M, M.T) and np.linalg.eigvalsh(M).min() > 0


@pytest.mark.parametrize("preset", PRESETS)
def test_coordinate_metric_pulls_back_to_adapted(preset):
    for i, entry in enumerate(CURVED):
        p, _ = _point(entry, i)
        b = curvature_bundle(entry.metric, list(p.x))
        F = adapted_frame(b, p).basis
        Gc = lifted_metric_coords(PRESETS[preset], b, p)
        assert F.T @ Gc @ F == pytest.approx(lifted_metric_adapted(PRESETS[preset], b), abs=1e-13)


def test_frame_round_trip():
    p, rng = _point(S3, 3)
    fr = adapted_frame(curvature_bundle(S3.metric, list(p.x)), p)
    sv = SplitVector(rng.normal(size=3), rng.normal(size=3))
    back = fr.from_coords(fr.to_coords(sv))
    assert np.abs(back.as_array() - sv.as_array()).max() <= 1e-12


def test_abcd_zero_cases():
    p, rng = _point(S3, 4)
    b = curvature_bundle(S3.metric, list(p.x))
    X, Y = rng.normal(size=(2, 3))
    flat = curvature_bundle(catalog.make("euclidean").metric, list(p.x))
    assert all(not v.any() for v in abcd(PRESETS["mixed"], flat, p, X, Y))
    r = abcd(GNaturalParams(1.0, 0.0, 0.7), b, p, X, Y)
    assert not r.A.any() and not r.D.any()
    zero = TangentPoint(p.x, np.zeros(3))
    assert all(not v.any() for v in abcd(PRESETS["skew"], b, zero, X, Y))


def test_vertical_vertical_connection_vanishes():
    p, rng = _point(H3, 5)
    b = curvature_bundle(H3.metric, list(p.x))
    out = lifted_connection(PRESETS["skew"], b, p, SplitVector(np.zeros(3), rng.normal(size=3)), SplitVector(np.zeros(3), rng.normal(size=3)))
    assert not out.h.any() and not out.v.any()


def test_flat_horizontal_connection():
    e = catalog.make("euclidean")
    p = TangentPoint([0.1, 0.2, 0.3], [1.0, -1.0, 0.5])
    b = curvature_bundle(e.metric, list(p.x))
    out = lifted_connection(PRESETS["mixed"], b, p, SplitVector.horizontal([1, 2, 3]), SplitVector.horizontal([0, 1, 0]))
    assert not out.h.any() and not out.v.any()


@pytest.mark.parametrize("preset", PRESETS)
def test_torsion_free(preset):
    params = PRESETS[preset]
    for i, entry in enumerate(CURVED):
        p, rng = _point(entry, 10 + i)
        b = curvature_bundle(entry.metric, list(p.x))
        X, Y = rng.normal(size=(2, 3))
        d = lifted_connection(params, b, p, SplitVector.horizontal(X), SplitVector.horizontal(Y)) - lifted_connection(
            params, b, p, SplitVector.horizontal(Y), SplitVector.horizontal(X)
        )
        # [X^h, Y^h] = -(R(X, Y) t)^v for constant X, Y
        assert np.abs(d.h).max() <= 1e-8
        assert np.abs(d.v + apply_riemann(b.riemann, X, Y, p.y)).max() <= 1e-8
        d = lifted_connection(params, b, p, SplitVector.vertical(X), SplitVector.horizontal(Y)) - lifted_connection(
            params, b, p, SplitVector.horizontal(Y), SplitVector.vertical(X)
        )
        # [X^v, Y^h] = (Γ(X, Y))^v with the sign fixed by δ/δx = ∂_x - N ∂_y
        assert np.abs(d.h).max() <= 1e-8
        assert np.abs(d.v + np.einsum("jia,i,a->j", b.gamma, Y, X)).max() <= 1e-8


def _field_value(params, entry, z, U: LiftField, V: LiftField):
    n = entry.dim
    g = entry.metric.matrix(list(z[:n]))
    q = TangentPoint(z[:n], z[n:])
    return pairing(params, g, U.at(q), V.at(q))


@pytest.mark.parametrize("preset", PRESETS)
def test_metricity_sampled(preset):
    params = PRESETS[preset]
    for k, entry in enumerate(CURVED):
        rng = np.random.default_rng(100 + k)
        for x in entry.sample_points(20, rng):
            p = TangentPoint(x, rng.normal(size=3))
            b = curvature_bundle(entry.metric, list(x))
            fr = adapted_frame(b, p)
            U = LiftField(rng.normal(size=3), rng.normal(size=3), spray=0.7)
            V = LiftField(rng.normal(size=3), rng.normal(size=3), liouville=-1.3)
            w = SplitVector(rng.normal(size=3), rng.normal(size=3))
            dz = fr.to_coords(w)
            h = 1e-5
            z = p.coords
            num = (_field_value(params, entry, z + h * dz, U, V) - _field_value(params, entry, z - h * dz, U, V)) / (2 * h)
            lhs = pairing(params, b.g, lifted_connection(params, b, p, w, U), V.at(p))
            rhs = pairing(params, b.g, U.at(p), lifted_connection(params, b, p, w, V))
            assert num == pytest.approx(lhs + rhs, abs=1e-4)


def test_vertical_triple_is_zero():
    p, rng = _point(PF, 20)
    b = curvature_bundle(PF.metric, list(p.x))
    X, Y, Z = (SplitVector.vertical(v) for v in rng.normal(size=(3, 3)))
    out = lifted_curvature_closed(PRESETS["skew"], b, p, X, Y, Z)
    assert not out.h.any() and not out.v.any()


def test_flat_base_closed_form_vanishes():
    e = catalog.make("flat_torus_chart")
    rng = np.random.default_rng(21)
    x = e.sample_points(1, rng)[0]
    p = TangentPoint(x, rng.normal(size=3))
    b = curvature_bundle(e.metric, list(x))
    U, V, W = (SplitVector.from_array(v) for v in rng.normal(size=(3, 6)))
    out = lifted_curvature_closed(PRESETS["skew"], b, p, U, V, W)
    assert not out.h.any() and not out.v.any()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(PRESETS)))
def test_antisymmetry_in_first_pair(seed, preset):
    rng = np.random.default_rng(seed)
    x = S3.sample_points(1, rng)[0]
    p = TangentPoint(x, rng.normal(size=3))
    b = curvature_bundle(S3.metric, list(x))
    U, V, W = (SplitVector.from_array(v) for v in rng.normal(size=(3, 6)))
    r1 = lifted_curvature_closed(PRESETS[preset], b, p, U, V, W)
    r2 = lifted_curvature_closed(PRESETS[preset], b, p, V, U, W)
    assert np.abs((r1 + r2).as_array()).max() <= 1e-12


def test_trilinearity():
    p, rng = _point(H3, 22)
    b = curvature_bundle(H3.metric, list(p.x))
    U1, U2, V, W = (SplitVector.from_array(v) for v in rng.normal(size=(4, 6)))
    f = lambda u: lifted_curvature_closed(PRESETS["mixed"], b, p, u, V, W).as_array()
    assert f(U1 + 2.0 * U2) == pytest.approx(f(U1) + 2.0 * f(U2), abs=1e-12)


def test_hvv_even_in_fiber():
    p, rng = _point(PF, 23)
    b = curvature_bundle(PF.metric, list(p.x))
    X, Y, Z = rng.normal(size=(3, 3))
    neg = TangentPoint(p.x, -p.y)
    for preset in PRESETS.values():
        h1, v1 = case_value(preset, b, p, "hvv", X, Y, Z)
        h2, v2 = case_value(preset, b, neg, "hvv", X, Y, Z)
        assert np.abs(h1 - h2).max() <= 1e-15 and np.abs(v1 - v2).max() <= 1e-15


def test_sasaki_hvv_reduction():
    p, rng = _point(S3, 24)
    b = curvature_bundle(S3.metric, list(p.x))
    X, Y, Z = rng.normal(size=(3, 3))
    h, v = case_value(PRESETS["sasaki"], b, p, "hvv", X, Y, Z)
    rt = lambda u, w: apply_riemann(b.riemann, u, p.y, w)
    expected = 0.5 * apply_riemann(b.riemann, Z, Y, X) - 0.25 * rt(Y, rt(Z, X))
    assert h == pytest.approx(expected, abs=1e-14)
    assert not v.any()


@pytest.mark.parametrize("variant", ["printed", "adjudicated"])
def test_sasaki_b_terms_are_exact_zeros(variant):
    p, rng = _point(H3, 25)
    b = curvature_bundle(H3.metric, list(p.x))
    X, Y, Z = rng.normal(size=(3, 3))
    for case in ("vvh", "hvv", "hhv", "hhh", "hvh"):
        for term in curvature_terms(PRESETS["sasaki"], b, p, case, X, Y, Z, variant):
            if "b" in term.coefficient:
                assert term.value == 0.0
                assert not (term.value * term.vector).any()


def test_adjudication_table_is_consistent_with_homogeneity():
    # every coefficient must be invariant under (a, b, c) -> lambda (a, b, c)
    for (case, part, label), (clabel, coef) in ADJUDICATED.items():
        for a, b, c in [(2.0, -1.0, 1.0), (0.7, 0.3, 1.9)]:
            al = a * (a + c) - b * b
            lam = 3.0
            assert coef(a, b, c, al) == pytest.approx(coef(lam * a, lam * b, lam * c, lam * lam * al), rel=1e-12)


def test_variants():
    p, rng = _point(S3, 26)
    b = curvature_bundle(S3.metric, list(p.x))
    X, Y, Z = rng.normal(size=(3, 3))
    a = case_value(PRESETS["mixed"], b, p, "vvh", X, Y, Z, "printed")
    c = case_value(PRESETS["mixed"], b, p, "vvh", X, Y, Z, "adjudicated")
    # the corrected coefficient coincides with the printed one when a = 1
    assert np.allclose(a[0], c[0]) and np.allclose(a[1], c[1])
    with pytest.raises(ValueError):
        case_value(PRESETS["mixed"], b, p, "vvh", X, Y, Z, "guessed")
    assert len(ALL_CASES) == 8
