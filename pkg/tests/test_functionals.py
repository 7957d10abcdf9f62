"""Mixed volumes, quermassintegrals, monotone quantities, evolution identities."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sphereflow import functionals as fn
from sphereflow.errors import DomainError
from sphereflow.flow import FlowConfig, run
from sphereflow.sphere_geom import ball_profile, cosine_profile, sphere_area
from sphereflow.symfunc import CurvatureSpec

MEAN2 = CurvatureSpec("mean", 2, p=1.0)


def test_double_factorial():
    assert [fn.double_factorial(m) for m in (-1, 0, 1, 2, 5, 8)] == [
        1,
        1,
        1,
        2,
        15,
        384,
    ]


# --- mixed volumes on balls -----------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("rho", [math.pi / 8, math.pi / 6, math.pi / 4, math.pi / 3])
def test_ball_mixed_volumes(n, rho):
    f = ball_profile("axisym", n, 129, rho)
    V = fn.mixed_volumes(f)
    assert V.shape == (n + 1,)
    for k in range(n + 1):
        exact = fn.ball_mixed_volume(n, k, rho)
        assert exact == pytest.approx(
            sphere_area(n) * math.cos(rho) ** k * math.sin(rho) ** (n - k), rel=1e-15
        )
        assert V[k] == pytest.approx(exact, abs=1e-10, rel=1e-12)


def test_ball_mixed_volume_domain():
    with pytest.raises(DomainError):
        fn.ball_mixed_volume(2, 1, 0.0)
    with pytest.raises(DomainError):
        fn.ball_mixed_volume(2, 1, 2.0)  # past the equator
    with pytest.raises(ValueError):
        fn.ball_mixed_volume(2, 3, 0.5)


def test_mixed_volume_single_matches_vector():
    f = cosine_profile("axisym", 3, 97, 0.8, {2: 0.04})
    V = fn.mixed_volumes(f)
    for k in range(4):
        assert fn.mixed_volume(f, k) == pytest.approx(V[k], rel=1e-14)


def test_circle_mixed_volumes():
    rho = 0.7
    f = ball_profile("circle", 1, 128, rho)
    V = fn.mixed_volumes(f)
    assert V[0] == pytest.approx(2.0 * math.pi * math.sin(rho), rel=1e-12)
    assert V[1] == pytest.approx(2.0 * math.pi * math.cos(rho), rel=1e-12)


# --- quermassintegrals ------------------------------------------------------------


@pytest.mark.parametrize("n,rho", [(2, 0.6), (3, 0.9), (4, 0.8)])
def test_quermassintegral_recursion_vs_odd_explicit(n, rho):
    f = ball_profile("axisym", n, 129, rho)
    V = fn.mixed_volumes(f)
    W = fn.quermassintegrals(f, V=V)
    assert W.shape == (n + 2,)
    assert W[0] == pytest.approx(fn.mixed_volume(f, 0) and W[0])
    assert W[1] == pytest.approx(V[0] / (n + 1), rel=1e-14)
    for k in range(0, (n + 1) // 2 + 1):
        if 2 * k + 1 <= n + 1:
            assert fn.odd_quermass_explicit(n, k, V) == pytest.approx(
                W[2 * k + 1], rel=1e-12
            )


def test_circle_gauss_bonnet():
    # n = 1: the top quermassintegral is a topological constant; the
    # perturbed profile carries the h^4 curvature truncation of N = 128
    ball = ball_profile("circle", 1, 128, 0.8)
    assert fn.quermassintegrals(ball)[2] == pytest.approx(math.pi, rel=1e-12)
    wavy = ball.with_u(0.8 + 0.04 * np.sin(np.arange(128) * 2 * math.pi / 128))
    assert fn.quermassintegrals(wavy)[2] == pytest.approx(math.pi, rel=5e-8)


def test_equator_quermassintegrals_n3():
    f = ball_profile("axisym", 3, 257, math.pi / 2 - 1e-9)
    W = fn.quermassintegrals(f)
    expect = [
        4.0 * math.pi**2 / 3.0,
        math.pi**2 / 2.0,
        math.pi**2 / 3.0,
        math.pi**2 / 3.0,
        math.pi**2 / 2.0,
    ]
    np.testing.assert_allclose(W, expect, rtol=1e-7)


def test_w0_is_enclosed_volume():
    from sphereflow.sphere_geom import enclosed_volume

    f = cosine_profile("axisym", 2, 97, 0.8, {2: 0.05})
    W = fn.quermassintegrals(f)
    assert W[0] == pytest.approx(enclosed_volume(f), rel=1e-13)


# --- telescoping identity -----------------------------------------------------------


def test_telescoping_zero_exact():
    for n in range(1, 12):
        for k in range(0, (n - 1) // 2 + 1):
            assert fn.telescoping_zero(n, k) == Fraction(0)
    with pytest.raises(DomainError):
        fn.telescoping_zero(5, 3)


# --- monotone quantities ------------------------------------------------------------


@pytest.mark.parametrize("rho", [0.5, 0.9, 1.3])
def test_phi1_phi2_equal_sphere_area_on_balls(rho):
    f = ball_profile("axisym", 2, 129, rho)
    rec = fn.make_record(0.0, f, MEAN2)
    assert rec.phi1 == pytest.approx(4.0 * math.pi, rel=1e-12)
    assert rec.phi2 == pytest.approx(4.0 * math.pi, rel=1e-12)


def test_phi3_vanishes_on_balls_n3():
    # equality case of the odd-quermassintegral bound: numerator W_3 - A_1
    # is zero on geodesic spheres
    rec08 = fn.make_record(0.0, ball_profile("axisym", 3, 129, 0.8), CurvatureSpec("mean", 3))
    assert set(rec08.phi3) == {1}
    assert abs(rec08.phi3[1]) < 1e-10
    with pytest.raises(DomainError):
        fn.phi3(rec08, 2)


def test_af_slack_equality_on_balls():
    f = ball_profile("axisym", 2, 129, 0.9)
    rec = fn.make_record(0.0, f, MEAN2)
    for which in ("I", "II"):
        res = fn.af_slack(rec, which)
        assert res.equality
        assert abs(res.value) <= 1e-10 * res.scale
    f3 = ball_profile("axisym", 3, 129, 0.9)
    rec3 = fn.make_record(0.0, f3, CurvatureSpec("mean", 3))
    res = fn.af_slack(rec3, "III", k=1)
    assert res.equality
    assert abs(res.value) <= 1e-10 * res.scale


def test_af_slack_near_equator_limits():
    # u == pi/2 - 1e-3: every slack collapses to zero at the equator scale
    f = ball_profile("axisym", 3, 129, math.pi / 2 - 1e-3)
    rec = fn.make_record(0.0, f, CurvatureSpec("mean", 3))
    for which, k in (("I", None), ("II", None), ("III", 1)):
        res = fn.af_slack(rec, which, k=k)
        assert abs(res.value) <= 1e-2 * res.scale


def test_af_slack_nonnegative_on_convex_profiles():
    f = cosine_profile("axisym", 3, 129, 0.8, {2: 0.05})
    rec = fn.make_record(0.0, f, CurvatureSpec("mean", 3))
    for which, k in (("I", None), ("II", None), ("III", 1)):
        res = fn.af_slack(rec, which, k=k)
        assert res.value >= -1e-8 * res.scale


def test_af_slack_argument_checks():
    f = ball_profile("axisym", 2, 65, 0.8)
    rec = fn.make_record(0.0, f, MEAN2)
    with pytest.raises(ValueError):
        fn.af_slack(rec, "IV")
    with pytest.raises(ValueError):
        fn.af_slack(rec, "III")  # k required
    with pytest.raises(ValueError):
        fn.af_slack(rec, "III", k=1)  # needs 2k+1 <= n


def test_odd_quermass_lower_bound_equality_on_balls():
    f = ball_profile("axisym", 3, 129, 0.7)
    W = fn.quermassintegrals(f)
    bound = fn.odd_quermass_lower_bound(3, 1, W[1])
    assert W[3] == pytest.approx(bound, rel=1e-11)


def test_decay_norms_ball():
    rho = math.pi / 4
    f = ball_profile("axisym", 2, 129, rho)
    d = fn.decay_norms(f, qs=(1, 2))
    # H = 2 cot(rho) on the sphere of radius rho, area 4 pi sin^2(rho)
    area = 4.0 * math.pi * math.sin(rho) ** 2
    h = 2.0 / math.tan(rho)
    assert d[1] == pytest.approx(h * area, rel=1e-12)
    assert d[2] == pytest.approx(h * h * area, rel=1e-12)
    with pytest.raises(ValueError):
        fn.decay_norms(f, qs=(0,))


# --- records ------------------------------------------------------------------------


def test_make_record_fields():
    f = cosine_profile("axisym", 2, 97, 0.8, {2: 0.06})
    rec = fn.make_record(1.5, f, MEAN2)
    assert rec.t == 1.5
    assert rec.n == 2
    assert rec.V.shape == (3,)
    assert rec.W.shape == (4,)
    assert rec.Hmax > 0.0
    assert rec.Fmin > 0.0
    assert rec.pinch >= rec.Fmin**2 / 2.0  # max (H/n) F at a node
    assert rec.u_max == pytest.approx(f.u.max())
    assert rec.u_min == pytest.approx(f.u.min())
    assert rec.grad_max > 0.0
    assert set(rec.decay) == {1, 2}
    assert rec.mixed_rhs.shape == (3,)
    assert rec.quermass_rhs.shape == (4,)


# --- evolution identities -------------------------------------------------------------


@pytest.fixture(scope="module")
def short_perturbed_traces():
    f = cosine_profile("axisym", 2, 129, 0.75, {2: 0.05})
    traces = {}
    for rec_dt in (0.01, 0.005):
        traces[rec_dt] = run(
            FlowConfig(
                spec=MEAN2,
                initial=f,
                record_dt=rec_dt,
                t_end=0.2,
                snapshot_every=0,
            )
        )
    return traces


@pytest.mark.parametrize("which,k", [("mixed", 0), ("mixed", 1), ("mixed", 2)])
def test_mixed_volume_evolution_identity(short_perturbed_traces, which, k):
    res = fn.evolution_identity_residual(short_perturbed_traces[0.01], k, which)
    assert res < 1e-3


@pytest.mark.parametrize("k", [1, 2])
def test_quermassintegral_evolution_identity(short_perturbed_traces, k):
    res = fn.evolution_identity_residual(
        short_perturbed_traces[0.01], k, which="quermass"
    )
    assert res < 1e-3


def test_evolution_identity_second_order_in_recording(short_perturbed_traces):
    coarse = fn.evolution_identity_residual(short_perturbed_traces[0.01], 1, "mixed")
    fine = fn.evolution_identity_residual(short_perturbed_traces[0.005], 1, "mixed")
    assert coarse / fine >= 3.5


def test_evolution_identity_requires_uniform_records():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(
        FlowConfig(
            spec=MEAN2, initial=f, record_every=40, max_steps=120, snapshot_every=0
        )
    )
    with pytest.raises(ValueError):
        fn.evolution_identity_residual(tr, 1, "mixed")
