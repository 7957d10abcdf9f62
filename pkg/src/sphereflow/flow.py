"""Time integration of the expanding flow u_t = v / F^p.

The profile u(theta, t) is a graph in geodesic polar coordinates; v = W/sin u
is the gradient factor and F the normalized curvature function evaluated at
the principal curvatures.  Classic RK4 in time over the fourth-order spatial
stencils from sphere_geom, with an adaptive step bounded by parabolic and
advective CFL numbers.

Step control.  Writing the linearization of the right-hand side as
a(theta) u_tt-coefficient plus c(theta) u_t-coefficient, the per-node bounds

  a = p (F_m / v^2 + (n-1) F_a [poles]) / (sin^2 u F^{p+1})
  c = p (n-1) F_a |cot theta| / (sin^2 u F^{p+1})

give dt = min(cfl h^2 / max a, cfl h / max c, h / max speed).

Termination statuses: ReachedEquator (all nodes within stop_eps_equator of
pi/2, or every principal curvature below stop_eps_equator, which detects
convergence to a great sphere tilted against the chart axis),
CurvatureDegenerate (a principal curvature hit zero, or F fell below
stop_F_min), TimeLimit (t_end reached), StepLimit (max_steps reached).
Checks run in that order at the top of each step; a degeneracy inside an RK
stage terminates at the pre-step state.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import _kernels, functionals, sphere_geom
from .errors import ConfigurationError, CurvatureDegenerateError, DomainError
from .sphere_geom import GraphField
from .symfunc import CurvatureSpec

_FAM_CODES = {
    "mean": _kernels.FAM_MEAN,
    "root_k": _kernels.FAM_ROOT,
    "power_mean": _kernels.FAM_POWER,
    "quotient": _kernels.FAM_QUOTIENT,
}

HALF_PI = 0.5 * math.pi


def _spec_codes(spec):
    fam = _FAM_CODES[spec.family]
    k = spec.k if spec.k is not None else 0
    l = spec.l if spec.l is not None else 0
    r = spec.r if spec.r is not None else 0.0
    return fam, k, l, r


@dataclass(frozen=True)
class Diagnostics:
    """Step-control maxima and degeneracy witnesses for one speed evaluation."""

    max_adiff: float
    max_cadv: float
    max_speed: float
    min_kappa: float
    min_kappa_node: int
    min_F: float
    max_kappa: float


class _Engine:
    """Bound kernel call for a fixed chart, dimension and curvature spec."""

    def __init__(self, chart, n, nodes, spacing, spec):
        self.chart = chart
        self.n = n
        self.h = spacing
        self.fam, self.k, self.l, self.r = _spec_codes(spec)
        self.p = spec.p
        if chart == "axisym":
            thetas = np.linspace(0.0, math.pi, nodes)
            cot = np.zeros(nodes)
            cot[1:-1] = np.cos(thetas[1:-1]) / np.sin(thetas[1:-1])
            self.cot_t = cot
        else:
            self.cot_t = None

    def speed_raw(self, u, out, want_diag):
        if self.chart == "axisym":
            return _kernels.axisym_speed(
                u, self.cot_t, self.n, self.h, self.fam, self.k, self.l,
                self.r, self.p, 1 if want_diag else 0, out,
            )
        return _kernels.circle_speed(
            u, self.h, self.fam, self.k, self.l, self.r, self.p,
            1 if want_diag else 0, out,
        )

    def speed(self, u, out, want_diag):
        return Diagnostics(*self.speed_raw(u, out, want_diag))


@dataclass(frozen=True)
class FlowState:
    """One time slice of a flow: profile plus assembled pointwise shape data."""

    t: float
    field: GraphField
    spec: CurvatureSpec
    shape: sphere_geom.ShapeData


def make_state(field, spec, t=0.0):
    if spec.n != field.n:
        raise ConfigurationError("curvature spec dimension does not match field")
    return FlowState(t=t, field=field, spec=spec, shape=sphere_geom.shape_data(field, spec))


def _engine_for(field, spec):
    return _Engine(field.chart, field.n, field.u.shape[0], field.spacing, spec)


def flow_speed(state):
    """Normal speed v/F^p per node.  Raises CurvatureDegenerateError if the
    profile is not strictly convex."""
    engine = _engine_for(state.field, state.spec)
    out = np.empty_like(state.field.u)
    diag = engine.speed(state.field.u, out, want_diag=False)
    if not diag.min_kappa > 0.0:
        raise CurvatureDegenerateError(
            f"principal curvature {diag.min_kappa:.3e} at node {diag.min_kappa_node}",
            node=diag.min_kappa_node,
        )
    return out


def adaptive_dt(state, cfl=0.2):
    """CFL-bounded step size at the current state."""
    if not 0.0 < cfl <= 1.0:
        raise ConfigurationError("cfl must lie in (0, 1]")
    engine = _engine_for(state.field, state.spec)
    out = np.empty_like(state.field.u)
    diag = engine.speed(state.field.u, out, want_diag=True)
    if not diag.min_kappa > 0.0:
        raise CurvatureDegenerateError(
            f"principal curvature {diag.min_kappa:.3e} at node {diag.min_kappa_node}",
            node=diag.min_kappa_node,
        )
    return _dt_from_diag(diag, engine.h, cfl)


def _dt_from_diag(diag, h, cfl):
    dt = cfl * h * h / diag.max_adiff
    if diag.max_cadv > 0.0:
        dt = min(dt, cfl * h / diag.max_cadv)
    dt = min(dt, h / diag.max_speed)
    if not math.isfinite(dt) or dt <= 0.0:
        raise CurvatureDegenerateError(f"step size collapsed (dt={dt!r})")
    return dt


def _stage(engine, u, out):
    res = engine.speed_raw(u, out, 0)
    if not res[3] > 0.0:
        raise CurvatureDegenerateError(
            f"stage curvature {res[3]:.3e} at node {int(res[4])}", node=int(res[4])
        )


def _rk4(engine, u, dt, scratch, k1_pre=None):
    """One RK4 step.  Returns the new profile or raises on a degenerate stage.

    k1_pre, when given, is the already validated speed at u (the step-control
    diagnostic pass computes it anyway), saving one kernel evaluation."""
    k1, k2, k3, k4, utmp = scratch
    if k1_pre is None:
        _stage(engine, u, k1)
    else:
        k1 = k1_pre
    np.multiply(k1, 0.5 * dt, out=utmp)
    utmp += u
    _stage(engine, utmp, k2)
    np.multiply(k2, 0.5 * dt, out=utmp)
    utmp += u
    _stage(engine, utmp, k3)
    np.multiply(k3, dt, out=utmp)
    utmp += u
    _stage(engine, utmp, k4)
    k2 += k3
    k2 *= 2.0
    k2 += k1
    k2 += k4
    return u + (dt / 6.0) * k2


def step(state, dt):
    """Advance one RK4 step of size dt, returning the new state."""
    if not dt > 0.0 or not math.isfinite(dt):
        raise ConfigurationError("dt must be a positive finite number")
    engine = _engine_for(state.field, state.spec)
    u = state.field.u
    scratch = tuple(np.empty_like(u) for _ in range(5))
    u_new = _rk4(engine, u, dt, scratch)
    return make_state(state.field.with_u(u_new), state.spec, t=state.t + dt)


@dataclass(frozen=True)
class FlowConfig:
    """Run parameters.  record_dt records at exact time multiples (steps are
    clamped to land on them); otherwise every record_every-th step is
    recorded.  t_end, when set, stops the run at that time with status
    TimeLimit.  dt_fixed disables adaptive step control (testing hook)."""

    spec: CurvatureSpec
    initial: GraphField
    cfl: float = 0.2
    stop_eps_equator: float = 1e-2
    stop_F_min: float = 1e-4
    max_steps: int = 2_000_000
    record_every: int = 100
    record_dt: Optional[float] = None
    t_end: Optional[float] = None
    snapshot_every: int = 10
    dt_fixed: Optional[float] = None

    def __post_init__(self):
        if self.spec.n != self.initial.n:
            raise ConfigurationError("curvature spec dimension does not match field")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigurationError("cfl must lie in (0, 1]")
        if not self.stop_eps_equator > 0.0:
            raise ConfigurationError("stop_eps_equator must be positive")
        if self.stop_F_min < 0.0:
            raise ConfigurationError("stop_F_min must be nonnegative")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be at least 1")
        if self.record_every < 1:
            raise ConfigurationError("record_every must be at least 1")
        if self.record_dt is not None and not self.record_dt > 0.0:
            raise ConfigurationError("record_dt must be positive")
        if self.t_end is not None and not self.t_end > 0.0:
            raise ConfigurationError("t_end must be positive")
        if self.dt_fixed is not None and not self.dt_fixed > 0.0:
            raise ConfigurationError("dt_fixed must be positive")
        if self.snapshot_every < 0:
            raise ConfigurationError("snapshot_every must be nonnegative")


@dataclass
class FlowTrace:
    """Result of a run: records along the way plus the termination report."""

    config: FlowConfig
    times: np.ndarray
    records: list
    snapshots: list
    termination: str
    detail: Optional[str]
    t_stop: float
    steps: int
    t_star_estimate: float
    final: GraphField

    @property
    def final_record(self):
        return self.records[-1]


def run(config):
    """Integrate the flow from config.initial until a termination condition.

    Returns a FlowTrace; never raises for in-flow degeneracy (that is a
    termination status, not an error).
    """
    field0 = config.initial
    spec = config.spec
    u = field0.u.copy()
    nodes = u.shape[0]
    engine = _Engine(field0.chart, field0.n, nodes, field0.spacing, spec)
    h = field0.spacing
    scratch = tuple(np.empty_like(u) for _ in range(5))
    diag_out = np.empty_like(u)

    t = 0.0
    steps = 0
    records = []
    rec_times = []
    snapshots = []
    rec_index = 0

    def do_record():
        nonlocal rec_index
        fld = field0.with_u(u)
        records.append(functionals.make_record(t, fld, spec))
        rec_times.append(t)
        if config.snapshot_every and rec_index % config.snapshot_every == 0:
            snapshots.append((t, fld))
        rec_index += 1

    do_record()
    next_rec = config.record_dt if config.record_dt is not None else None

    status = None
    detail = None
    while True:
        diag = engine.speed(u, diag_out, want_diag=True)
        if not diag.min_kappa > 0.0:
            status = "CurvatureDegenerate"
            detail = (
                f"principal curvature {diag.min_kappa:.6e} at node "
                f"{diag.min_kappa_node}"
            )
            break
        # either the chart-centered equator is reached, or the surface is
        # totally geodesic to tolerance (the limit can be a great sphere
        # tilted against the chart axis; curvature sees that, the chart
        # radius does not)
        if (
            np.max(np.abs(u - HALF_PI)) < config.stop_eps_equator
            or diag.max_kappa < config.stop_eps_equator
        ):
            status = "ReachedEquator"
            break
        if diag.min_F < config.stop_F_min:
            status = "CurvatureDegenerate"
            detail = f"curvature function {diag.min_F:.6e} below floor"
            break
        if config.t_end is not None and t >= config.t_end * (1.0 - 1e-14):
            status = "TimeLimit"
            break
        if steps >= config.max_steps:
            status = "StepLimit"
            break

        if config.dt_fixed is not None:
            dt = config.dt_fixed
        else:
            dt = _dt_from_diag(diag, h, config.cfl)
        hit_rec = False
        if next_rec is not None and t + dt >= next_rec - 1e-12 * max(1.0, next_rec):
            dt = next_rec - t
            hit_rec = True
        if config.t_end is not None and t + dt > config.t_end:
            dt = config.t_end - t
            hit_rec = False

        try:
            # diag_out already holds the validated speed at u, so the first
            # RK4 stage can reuse it
            u_new = _rk4(engine, u, dt, scratch, k1_pre=diag_out)
        except CurvatureDegenerateError as exc:
            status = "CurvatureDegenerate"
            detail = str(exc)
            break
        u = u_new
        steps += 1
        if hit_rec:
            t = next_rec
            next_rec += config.record_dt
            do_record()
        else:
            t += dt
            if config.record_dt is None and steps % config.record_every == 0:
                do_record()

    if t > rec_times[-1] + 1e-15:
        do_record()
    final_field = field0.with_u(u)
    if config.snapshot_every and (not snapshots or snapshots[-1][0] != t):
        snapshots.append((t, final_field))

    u_max = float(u.max())
    if u_max < HALF_PI:
        t_star = t + equator_time(field0.n, spec.p, u_max)
    else:
        t_star = t
    return FlowTrace(
        config=config,
        times=np.asarray(rec_times),
        records=records,
        snapshots=snapshots,
        termination=status,
        detail=detail,
        t_stop=t,
        steps=steps,
        t_star_estimate=t_star,
        final=final_field,
    )


def equator_time(n, p, u0):
    """Time for the round solution of radius u0 to reach the equator."""
    if not 0.0 < u0 < math.pi:
        raise DomainError("radius must lie in (0, pi)")
    if u0 >= HALF_PI:
        return 0.0
    if p == 1.0:
        return -n * math.log(math.sin(u0))
    val, _ = quad(lambda s: (n / math.tan(s)) ** p, u0, HALF_PI)
    return val


def round_flow_oracle(n, p, u0, t):
    """Radius at time t of the round solution starting at radius u0 < pi/2.

    p = 1 has the closed form sin u(t) = sin(u0) e^{t/n}; other powers are
    integrated with a high-order adaptive ODE solver at rtol 1e-12.
    """
    if not 0.0 < u0 < HALF_PI:
        raise DomainError("u0 must lie in (0, pi/2)")
    if t < 0.0:
        raise DomainError("t must be nonnegative")
    if not p > 0.0:
        raise DomainError("p must be positive")
    t_star = equator_time(n, p, u0)
    if t > t_star * (1.0 - 1e-13):
        raise DomainError(f"t={t} is not before the equator time {t_star}")
    if t == 0.0:
        return u0
    if p == 1.0:
        return math.asin(min(1.0, math.sin(u0) * math.exp(t / n)))
    sol = solve_ivp(
        lambda s, y: (np.tan(y) / n) ** p,
        (0.0, t),
        [u0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise RuntimeError(f"round flow integration failed: {sol.message}")
    return float(sol.y[0, -1])
