import numpy as np
import pytest

from gnatural import catalog
from gnatural.base_geometry import curvature_bundle, invariant_violations
from gnatural.calculus import derivatives
from gnatural.calculus import DiffConfig
from gnatural.lift import PRESETS, PRINTED_CASES, SplitVector, TangentPoint, adapted_frame, lifted_connection, lifted_metric_adapted
from gnatural.oracle import (
    brute_bundle,
    brute_curvature,
    brute_nabla_curvature,
    bundle_metric,
    compare_cases,
    fit_term_coefficients,
    riemann_from_adapted,
    riemann_to_adapted,
)

FD = DiffConfig(mode="finite_difference")
S3 = catalog.make("sphere_polar")
H3 = catalog.make("hyperbolic_halfspace")


def test_flat_bundle_metrics():
    e = catalog.make("euclidean")
    eye = np.eye(3)
    for preset, expected in [("sasaki", np.eye(6)), ("mixed", np.block([[2 * eye, eye], [eye, eye]]))]:
        bm = bundle_metric(e.metric, PRESETS[preset])
        for z in ([0, 0, 0, 0, 0, 0], [1.0, -0.5, 2.0, 3.0, 1.0, -2.0]):
            assert np.array_equal(bm.spec2n.matrix(z), expected)


def test_sphere_bundle_metric_positive_definite():
    s2 = catalog.make("sphere_polar", n=2)
    rng = np.random.default_rng(0)
    for preset in PRESETS.values():
        bm = bundle_metric(s2.metric, preset)
        for x in s2.sample_points(100, rng):
            z = list(x) + list(rng.uniform(-2, 2, 2))
            M = bm.spec2n.matrix(z)
            assert np.array_equal(M, M.T) and bm.spec2n.is_positive_definite(z)


def test_zero_section_reproduces_blocks():
    x = [1.0, 2.0, 0.4]
    b = curvature_bundle(S3.metric, x)
    for preset in PRESETS.values():
        M = bundle_metric(S3.metric, preset).spec2n.matrix(x + [0.0, 0.0, 0.0])
        assert M == pytest.approx(lifted_metric_adapted(preset, b), abs=1e-15)


def test_frame_round_trip_of_tensors():
    rng = np.random.default_rng(1)
    x = S3.sample_points(1, rng)[0]
    p = TangentPoint(x, rng.normal(size=3))
    fr = adapted_frame(curvature_bundle(S3.metric, list(x)), p)
    t = rng.normal(size=(6,) * 4)
    assert np.abs(riemann_from_adapted(riemann_to_adapted(t, fr), fr) - t).max() <= 1e-12


@pytest.mark.parametrize("name", ["euclidean", "flat_torus_chart"])
def test_flat_base_gives_flat_bundle(name):
    e = catalog.make(name)
    rng = np.random.default_rng(2)
    for preset in PRESETS.values():
        x = e.sample_points(1, rng)[0]
        bb = brute_bundle(bundle_metric(e.metric, preset), TangentPoint(x, rng.normal(size=3)), with_nabla=True)
        assert np.abs(bb.riemann).max() <= 1e-9
        assert np.abs(bb.nabla_riemann).max() <= 1e-9


@pytest.mark.parametrize("entry", [S3, H3, catalog.make("perturbed_flat")], ids=lambda e: e.name)
def test_oracle_self_consistency(entry):
    rng = np.random.default_rng(3)
    for preset in PRESETS.values():
        x = entry.sample_points(1, rng)[0]
        bb = brute_bundle(bundle_metric(entry.metric, preset), TangentPoint(x, rng.normal(size=3)), with_nabla=True)
        assert max(invariant_violations(bb).values()) <= 1e-8


def test_second_bianchi_on_tm_fd():
    rng = np.random.default_rng(4)
    x = S3.sample_points(1, rng)[0]
    bb = brute_bundle(bundle_metric(S3.metric, PRESETS["mixed"]), TangentPoint(x, rng.normal(size=3)), FD, with_nabla=True)
    assert invariant_violations(bb)["second_bianchi"] <= 1e-4


def test_fd_warning_when_estimate_exceeds_tolerance():
    p = TangentPoint([1.0, 1.0, 1.0], [0.5, 0.5, 0.5])
    bm = bundle_metric(S3.metric, PRESETS["sasaki"])
    with pytest.warns(RuntimeWarning, match="error estimate"):
        brute_bundle(bm, p, DiffConfig(mode="finite_difference", fd_step=1e-6), with_nabla=True)


def test_tm_of_sphere_is_not_locally_symmetric():
    # fixture: max |∇̃R̃| at this point for the Sasaki lift, dual mode (fd agrees to 5e-8)
    p = TangentPoint([1.0, 2.0, 0.5], np.array([1.0, 2.0, 2.0]) / 3)
    nb = brute_nabla_curvature(bundle_metric(S3.metric, PRESETS["sasaki"]), p)
    assert np.abs(nb).max() == pytest.approx(0.6803246805921681, abs=1e-12)


def test_connection_matches_oracle_christoffels():
    # ∇̃_U V for V with constant adapted components: U(F v) + Γ̃(U, F v) in coordinates
    rng = np.random.default_rng(5)
    for preset in PRESETS.values():
        x = H3.sample_points(1, rng)[0]
        p = TangentPoint(x, rng.normal(size=3))
        b = curvature_bundle(H3.metric, list(x))
        bb = brute_bundle(bundle_metric(H3.metric, preset), p)
        fr = adapted_frame(b, p)
        u = SplitVector(rng.normal(size=3), rng.normal(size=3))
        v = SplitVector(rng.normal(size=3), rng.normal(size=3))

        def field(z):
            q = TangentPoint(np.asarray(z[:3]), np.asarray(z[3:]))
            bq = curvature_bundle(H3.metric, list(z[:3]), with_nabla=False)
            return adapted_frame(bq, q).to_coords(v)

        _, dfield = derivatives(field, list(p.coords), 1, FD)
        uc, vc = fr.to_coords(u), fr.to_coords(v)
        brute = np.asarray(dfield, float).T @ uc + np.einsum("kij,i,j->k", bb.gamma, uc, vc)
        closed = fr.to_coords(lifted_connection(preset, b, p, u, v))
        assert np.abs(brute - closed).max() <= 1e-6


@pytest.mark.parametrize("preset", ["sasaki", "mixed"])
def test_printed_form_agrees_when_a_is_one(preset):
    rng = np.random.default_rng(6)
    for entry in (S3, H3):
        x = entry.sample_points(1, rng)[0]
        p = TangentPoint(x, rng.normal(size=3))
        b = curvature_bundle(entry.metric, list(x))
        rm = brute_curvature(bundle_metric(entry.metric, PRESETS[preset]), p)
        comp = compare_cases(PRESETS[preset], b, p, rm)
        assert max(c.max_dev for c in comp.values()) <= 1e-6


def test_term_fit_isolates_the_misprinted_coefficient():
    rng = np.random.default_rng(7)
    params = PRESETS["skew"]
    x = H3.sample_points(1, rng)[0]
    p = TangentPoint(x, rng.normal(size=3))
    b = curvature_bundle(H3.metric, list(x))
    rm = brute_curvature(bundle_metric(H3.metric, params), p)
    bad = [f for case in PRINTED_CASES[1:] for f in fit_term_coefficients(params, b, p, rm, case) if not f.agrees]
    assert [(f.case, f.part) for f in bad] == [("vvh", "h")]
    assert bad[0].ratio == pytest.approx(params.a**2, rel=1e-9)
    comp = compare_cases(params, b, p, rm, variant="adjudicated")
    assert max(c.max_dev for c in comp.values()) <= 1e-6
