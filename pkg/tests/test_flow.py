"""Flow integration: round oracle, step control, termination, recording."""

import math

import numpy as np
import pytest

import sphereflow.sphere_geom as sg
from sphereflow.errors import ConfigurationError, CurvatureDegenerateError, DomainError
from sphereflow.flow import (
    FlowConfig,
    adaptive_dt,
    equator_time,
    flow_speed,
    make_state,
    round_flow_oracle,
    run,
    step,
)
from sphereflow.sphere_geom import ball_profile, cosine_profile, shape_operator
from sphereflow.symfunc import CurvatureSpec

MEAN2 = CurvatureSpec("mean", 2, p=1.0)


# --- round oracle ---------------------------------------------------------------


def test_round_oracle_closed_form():
    u0 = 0.6
    for t in (0.0, 0.3, 0.9):
        expect = math.asin(math.sin(u0) * math.exp(t / 2.0))
        assert round_flow_oracle(2, 1.0, u0, t) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("p", [0.5, 2.0])
def test_round_oracle_consistent_with_equator_time(p):
    # time to flow u0 -> u1 is the difference of the times-to-equator
    n, u0, u1 = 2, 0.5, 1.2
    t = equator_time(n, p, u0) - equator_time(n, p, u1)
    assert round_flow_oracle(n, p, u0, t) == pytest.approx(u1, rel=1e-10)


def test_equator_time_values():
    assert equator_time(2, 1.0, math.pi / 6) == pytest.approx(
        2.0 * math.log(2.0), rel=1e-14
    )
    assert equator_time(3, 1.0, math.pi / 2) == 0.0
    assert equator_time(2, 2.0, 0.8) > 0.0


def test_round_oracle_rejects_bad_input():
    with pytest.raises(DomainError):
        round_flow_oracle(2, 1.0, 1.7, 0.1)  # u0 past the equator
    with pytest.raises(DomainError):
        round_flow_oracle(2, 1.0, 0.6, -0.1)
    with pytest.raises(DomainError):
        round_flow_oracle(2, -1.0, 0.6, 0.1)
    with pytest.raises(DomainError):
        equator_time(2, 1.0, 0.0)


# --- speed and stepping -----------------------------------------------------------


def test_flow_speed_matches_geometry():
    f = cosine_profile("axisym", 2, 65, 0.8, {2: 0.05})
    spec = CurvatureSpec("mean", 2, p=1.3)
    sd = sg.shape_data(f, spec)
    state = make_state(f, spec)
    np.testing.assert_allclose(flow_speed(state), sd.v / sd.F**1.3, rtol=1e-12)


def test_flow_speed_raises_on_nonconvex():
    f = cosine_profile("axisym", 2, 129, 1.2, {4: 0.3})
    state = make_state(f, MEAN2)
    with pytest.raises(CurvatureDegenerateError):
        flow_speed(state)


def test_step_expands_outward():
    f = ball_profile("axisym", 2, 33, 0.7)
    state = make_state(f, MEAN2)
    new = step(state, 1e-3)
    assert new.t == pytest.approx(1e-3)
    assert np.all(new.field.u > f.u)
    with pytest.raises(ConfigurationError):
        step(state, 0.0)


def test_adaptive_dt_scales_with_resolution():
    dts = []
    for nodes in (33, 65):
        f = ball_profile("axisym", 2, nodes, 0.7)
        dts.append(adaptive_dt(make_state(f, MEAN2)))
    assert dts[0] > 0.0
    # diffusion-limited: halving h quarters the step
    assert dts[0] / dts[1] == pytest.approx(4.0, rel=0.2)


def test_rk4_temporal_order():
    # round data is spatially exact, so the error against the closed-form
    # oracle isolates the time integrator
    errs = []
    for dt in (0.02, 0.01, 0.005):
        f = ball_profile("axisym", 2, 16, 0.6)
        cfg = FlowConfig(
            spec=MEAN2, initial=f, dt_fixed=dt, t_end=0.2, snapshot_every=0
        )
        tr = run(cfg)
        exact = round_flow_oracle(2, 1.0, 0.6, 0.2)
        errs.append(np.max(np.abs(tr.final.u - exact)))
    assert math.log2(errs[0] / errs[1]) > 3.7
    assert math.log2(errs[1] / errs[2]) > 3.7


# --- termination -----------------------------------------------------------------


def test_round_run_reaches_equator():
    u0 = 0.6
    f = ball_profile("axisym", 2, 64, u0)
    tr = run(FlowConfig(spec=MEAN2, initial=f, snapshot_every=0))
    assert tr.termination == "ReachedEquator"
    assert tr.detail is None
    # trace stays round and lands on the closed-form trajectory
    assert float(np.ptp(tr.final.u)) < 1e-12
    t_star = equator_time(2, 1.0, u0)
    assert abs(tr.t_star_estimate - t_star) < 1e-9
    for rec in tr.records:
        assert rec.u_max == pytest.approx(
            round_flow_oracle(2, 1.0, u0, rec.t), abs=1e-10
        )


def test_tilted_equator_stop():
    # a mode-1 perturbation parametrizes nearby great spheres; the limit is
    # an equator tilted against the chart axis, so the stop must trigger on
    # vanishing curvature, not on the chart radius
    f = cosine_profile("axisym", 2, 96, 0.7, {1: 0.05})
    tr = run(FlowConfig(spec=MEAN2, initial=f, snapshot_every=0))
    assert tr.termination == "ReachedEquator"
    assert np.max(np.abs(tr.final.u - math.pi / 2)) > 0.02  # genuinely tilted
    km, ka = shape_operator(tr.final)
    assert max(km.max(), ka.max()) < 1e-2


def test_time_limit():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(FlowConfig(spec=MEAN2, initial=f, t_end=0.05, snapshot_every=0))
    assert tr.termination == "TimeLimit"
    assert tr.t_stop == pytest.approx(0.05, rel=1e-12)
    # tail estimate from the round comparison completes the time horizon
    assert tr.t_star_estimate == pytest.approx(equator_time(2, 1.0, 0.6), abs=1e-9)


def test_step_limit():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(FlowConfig(spec=MEAN2, initial=f, max_steps=7, snapshot_every=0))
    assert tr.termination == "StepLimit"
    assert tr.steps == 7


def test_degenerate_start_is_status_not_error():
    f = cosine_profile("axisym", 2, 129, 1.2, {4: 0.3})
    tr = run(FlowConfig(spec=MEAN2, initial=f, snapshot_every=0))
    assert tr.termination == "CurvatureDegenerate"
    assert "principal curvature" in tr.detail
    assert tr.steps == 0


def test_degenerate_mid_run_clean_termination():
    # strictly convex at t = 0, but a fixed step beyond the parabolic
    # stability limit amplifies the high mode until curvature crosses zero
    f = cosine_profile("axisym", 2, 64, 0.9, {6: 0.01})
    assert sg.shape_data(f).strictly_convex
    tr = run(
        FlowConfig(
            spec=MEAN2, initial=f, dt_fixed=0.002, max_steps=3000, snapshot_every=0
        )
    )
    assert tr.termination == "CurvatureDegenerate"
    assert "curvature" in tr.detail
    assert np.all(np.isfinite(tr.final.u))
    assert np.all(np.isfinite(tr.final_record.V))


# --- recording --------------------------------------------------------------------


def test_record_clamping_uniform():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(
        FlowConfig(spec=MEAN2, initial=f, record_dt=0.02, t_end=0.1, snapshot_every=0)
    )
    np.testing.assert_allclose(tr.times, np.arange(6) * 0.02, atol=1e-15)
    assert [rec.t for rec in tr.records] == list(tr.times)


def test_record_every_mode():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(
        FlowConfig(
            spec=MEAN2, initial=f, record_every=50, max_steps=200, snapshot_every=0
        )
    )
    assert tr.termination == "StepLimit"
    # t=0 record plus one record per 50 steps; the last one lands on the
    # stop itself, so no extra partial record is appended
    assert len(tr.records) == 5
    assert np.all(np.diff(tr.times) > 0.0)


def test_snapshots_cover_final_state():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(
        FlowConfig(
            spec=MEAN2,
            initial=f,
            record_dt=0.02,
            t_end=0.1,
            snapshot_every=2,
        )
    )
    snap_times = [t for t, _ in tr.snapshots]
    assert snap_times[0] == 0.0
    assert snap_times[-1] == tr.t_stop
    rec_times = set(tr.times)
    assert all(t in rec_times for t in snap_times)
    for _, fld in tr.snapshots:
        assert isinstance(fld, sg.GraphField)


def test_final_record_matches_stop_time():
    f = ball_profile("axisym", 2, 48, 0.6)
    tr = run(FlowConfig(spec=MEAN2, initial=f, t_end=0.037, snapshot_every=0))
    assert tr.final_record.t == pytest.approx(tr.t_stop, rel=1e-12)
    assert tr.times[-1] == tr.final_record.t


# --- configuration -----------------------------------------------------------------


def test_config_validation():
    f = ball_profile("axisym", 2, 48, 0.6)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=CurvatureSpec("mean", 3), initial=f)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=MEAN2, initial=f, cfl=0.0)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=MEAN2, initial=f, record_dt=-0.1)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=MEAN2, initial=f, t_end=0.0)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=MEAN2, initial=f, max_steps=0)
    with pytest.raises(ConfigurationError):
        FlowConfig(spec=MEAN2, initial=f, stop_eps_equator=0.0)


def test_hmax_monotone_on_perturbed_run():
    f = cosine_profile("axisym", 2, 96, 0.75, {2: 0.05})
    tr = run(FlowConfig(spec=MEAN2, initial=f, record_dt=0.05, snapshot_every=0))
    assert tr.termination == "ReachedEquator"
    h0 = tr.records[0].Hmax
    assert max(rec.Hmax for rec in tr.records) <= (1.0 + 1e-3) * h0
