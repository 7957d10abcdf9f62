"""Curvature integrals, quermassintegrals and monotone quantities.

Mixed volumes are V_k = integral of the normalized symmetric function
H-tilde_k over the hypersurface.  Quermassintegrals follow from W_0 =
enclosed volume, W_1 = V_0/(n+1) and the spherical recursion

  W_{k+1} = V_k/(n+1) + k/(n+2-k) W_{k-1},   k = 1..n,

which for odd index also telescopes to an explicit double-factorial sum over
even-index mixed volumes.  The monotone combinations phi1, phi2, phi3 and
the inequality slacks I/II/III are normalized so that balls give exact
equality.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import sphere_geom
from .errors import DomainError
from .sphere_geom import sphere_area


def double_factorial(m):
    """m!! with the conventions 0!! = (-1)!! = 1."""
    if m < -1:
        raise DomainError("double factorial needs m >= -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def _h_tilde_stack(field, shape):
    """Rows k = 0..n of H-tilde_k(kappa) per node."""
    n = field.n
    nodes = field.u.shape[0]
    out = np.empty((n + 1, nodes))
    out[0] = 1.0
    if field.chart == "circle":
        out[1] = shape.shape[0]
        return out
    km, ka = shape.shape
    for k in range(1, n + 1):
        hk = math.comb(n - 1, k) * ka**k
        hk = hk + math.comb(n - 1, k - 1) * ka ** (k - 1) * km
        out[k] = hk / math.comb(n, k)
    return out


def mixed_volumes(field, spec=None, shape=None):
    """All V_k, k = 0..n, as one array."""
    if shape is None:
        shape = sphere_geom.shape_data(field, spec)
    stack = _h_tilde_stack(field, shape)
    return stack @ shape.weight


def mixed_volume(field, k, spec=None, shape=None):
    if not 0 <= k <= field.n:
        raise DomainError(f"mixed volume index {k} outside 0..{field.n}")
    return float(mixed_volumes(field, spec, shape)[k])


def ball_mixed_volume(n, k, rho):
    """V_k of the geodesic ball of radius rho, omega_n cos^k sin^{n-k}."""
    if not 0.0 < rho <= 0.5 * math.pi:
        raise DomainError("ball radius must lie in (0, pi/2]")
    if not 0 <= k <= n:
        raise DomainError(f"mixed volume index {k} outside 0..{n}")
    return sphere_area(n) * math.cos(rho) ** k * math.sin(rho) ** (n - k)


def quermassintegrals(field, spec=None, shape=None, V=None):
    """W_0 .. W_{n+1} via the enclosed volume and the spherical recursion."""
    n = field.n
    if V is None:
        V = mixed_volumes(field, spec, shape)
    W = np.empty(n + 2)
    W[0] = sphere_geom.enclosed_volume(field)
    W[1] = V[0] / (n + 1)
    for k in range(1, n + 1):
        W[k + 1] = V[k] / (n + 1) + (k / (n + 2 - k)) * W[k - 1]
    return W


def odd_quermass_explicit(n, k, V):
    """W_{2k+1} written directly as a sum over even mixed volumes.

    Requires 2k+1 <= n+1 and V complete up to index 2k.
    """
    if k < 0 or 2 * k + 1 > n + 1:
        raise DomainError(f"odd quermassintegral index 2k+1={2 * k + 1} outside 1..{n + 1}")
    total = 0.0
    for i in range(k + 1):
        num = double_factorial(2 * k) * double_factorial(n - 2 * k)
        den = double_factorial(2 * k - 2 * i) * double_factorial(n - 2 * k + 2 * i)
        total += (num / den) * V[2 * k - 2 * i]
    return total / (n + 1)


def odd_quermass_lower_bound(n, k, W1):
    """Sharp lower bound A_k(W_1) for W_{2k+1}; equality on geodesic balls."""
    if k < 0 or 2 * k + 1 > n:
        raise DomainError(f"lower bound needs 2k+1 <= n, got k={k}, n={n}")
    if not W1 > 0.0:
        raise DomainError("W_1 must be positive")
    omega = sphere_area(n)
    x = (n + 1) * W1 / omega
    total = 0.0
    for i in range(k + 1):
        coeff = (n - 2 * k) / (n - 2 * k + 2 * i) * math.comb(k, i)
        total += (-1) ** i * coeff * x ** ((n - 2 * k + 2 * i) / n)
    return omega / (n + 1) * total


def telescoping_zero(n, k):
    """Exact rational gap in the double-factorial telescoping identity.

    Returns (2k)!!(n-2k)!!/n!! minus the alternating binomial sum; zero for
    every admissible pair 2k+1 <= n.
    """
    if k < 0 or 2 * k + 1 > n:
        raise DomainError(f"telescoping identity needs 2k+1 <= n, got k={k}, n={n}")
    lhs = Fraction(
        double_factorial(2 * k) * double_factorial(n - 2 * k), double_factorial(n)
    )
    rhs = Fraction(0)
    for i in range(k + 1):
        rhs += (
            (-1) ** i
            * Fraction(n - 2 * k, n - 2 * k + 2 * i)
            * math.comb(k, i)
        )
    return lhs - rhs


def _phi1(V, n):
    return V[1] ** 2 / V[0] ** (2.0 * (n - 1) / n) + V[0] ** (2.0 / n)


def _phi2(V, n):
    return (V[2] + V[0]) / V[0] ** ((n - 2.0) / n)


def _phi3(W, n, k):
    a = odd_quermass_lower_bound(n, k, W[1])
    return (W[2 * k + 1] - a) / W[1] ** ((n - 2.0 * k) / n)


def phi1(record):
    """Isoperimetric-type combination of V_1 and V_0; 4*pi on balls for n=2."""
    if record.n < 2:
        raise DomainError("phi1 needs n >= 2")
    return _phi1(record.V, record.n)


def phi2(record):
    if record.n < 2:
        raise DomainError("phi2 needs n >= 2")
    return _phi2(record.V, record.n)


def phi3(record, k):
    if k < 1 or 2 * k + 1 > record.n:
        raise DomainError(f"phi3 needs 1 <= k with 2k+1 <= n, got k={k}, n={record.n}")
    return _phi3(record.W, record.n, k)


class SlackResult(NamedTuple):
    value: float
    equality: bool
    scale: float


_EQ_TOL = 1e-8


def af_slack(record, which, k=None):
    """Nonnegative slack of one of the sharp inequalities.

    which = "I":  (V_1/omega)^2 - (V_0/omega)^{2(n-1)/n} + (V_0/omega)^2
    which = "II": V_2/omega - (V_0/omega)^{(n-2)/n} + V_0/omega
    which = "III" (with k): W_{2k+1} - A_k(W_1)

    All three vanish exactly on geodesic balls; the equality flag tests
    |slack| <= 1e-8 * scale.
    """
    n = record.n
    if which == "I":
        if n < 2:
            raise DomainError("slack I needs n >= 2")
        omega = sphere_area(n)
        v0 = record.V[0] / omega
        v1 = record.V[1] / omega
        value = v1**2 - v0 ** (2.0 * (n - 1) / n) + v0**2
        scale = v1**2 + v0 ** (2.0 * (n - 1) / n)
    elif which == "II":
        if n < 2:
            raise DomainError("slack II needs n >= 2")
        omega = sphere_area(n)
        v0 = record.V[0] / omega
        v2 = record.V[2] / omega
        value = v2 - v0 ** ((n - 2.0) / n) + v0
        scale = abs(v2) + v0 ** ((n - 2.0) / n)
    elif which == "III":
        if k is None:
            raise DomainError("slack III needs the index k")
        if k < 1 or 2 * k + 1 > n:
            raise DomainError(f"slack III needs 1 <= k with 2k+1 <= n, got k={k}, n={n}")
        a = odd_quermass_lower_bound(n, k, record.W[1])
        value = record.W[2 * k + 1] - a
        scale = max(abs(record.W[2 * k + 1]), abs(a))
    else:
        raise DomainError(f"unknown slack selector {which!r}")
    return SlackResult(float(value), bool(abs(value) <= _EQ_TOL * scale), float(scale))


def decay_norms(field, qs=(1, 2), spec=None, shape=None):
    """Integrals of H^q over the hypersurface, H the unnormalized mean
    curvature.  These decay to zero as the flow approaches the equator."""
    if shape is None:
        shape = sphere_geom.shape_data(field, spec)
    if field.chart == "circle":
        H = shape.shape[0]
    else:
        km, ka = shape.shape
        H = km + (field.n - 1) * ka
    out = {}
    for q in qs:
        if q < 1:
            raise DomainError("decay norm exponent must be >= 1")
        out[q] = float(np.sum(shape.weight * H**q))
    return out


@dataclass(frozen=True)
class FunctionalRecord:
    """All scalar functionals of one time slice, plus the exact evolution
    right-hand sides used by the identity residual checks."""

    t: float
    n: int
    V: np.ndarray
    W: np.ndarray
    phi1: float
    phi2: float
    phi3: dict
    Hmax: float
    Fmin: float
    pinch: float
    decay: dict
    mixed_rhs: np.ndarray
    quermass_rhs: np.ndarray
    grad_max: float
    u_max: float
    u_min: float


def make_record(t, field, spec, shape=None):
    """Evaluate every tracked functional on one profile."""
    if shape is None:
        shape = sphere_geom.shape_data(field, spec)
    n = field.n
    w = shape.weight
    stack = _h_tilde_stack(field, shape)
    V = stack @ w
    W = quermassintegrals(field, spec=spec, shape=shape, V=V)

    p1 = _phi1(V, n) if n >= 2 else math.nan
    p2 = _phi2(V, n) if n >= 2 else math.nan
    p3 = {k: _phi3(W, n, k) for k in range(1, (n - 1) // 2 + 1)}

    H = n * stack[1]
    F = shape.F
    fp = F ** (-spec.p)
    decay = {q: float(np.sum(w * H**q)) for q in (1, 2)}

    # d/dt of C(n,k) V_k and of W_k along u_t = v/F^p
    Hk = np.array([math.comb(n, k) for k in range(n + 1)])[:, None] * stack
    mixed_rhs = np.empty(n + 1)
    for k in range(n + 1):
        up = (k + 1) * Hk[k + 1] if k + 1 <= n else 0.0
        down = (n + 1 - k) * Hk[k - 1] if k >= 1 else 0.0
        mixed_rhs[k] = np.sum(w * (up - down) * fp)
    quermass_rhs = np.empty(n + 2)
    for k in range(n + 1):
        quermass_rhs[k] = (n + 1 - k) / (n + 1) * np.sum(w * stack[k] * fp)
    quermass_rhs[n + 1] = 0.0

    return FunctionalRecord(
        t=float(t),
        n=n,
        V=V,
        W=W,
        phi1=p1,
        phi2=p2,
        phi3=p3,
        Hmax=float(H.max()),
        Fmin=float(F.min()),
        pinch=float((stack[1] * F).max()),
        decay=decay,
        mixed_rhs=mixed_rhs,
        quermass_rhs=quermass_rhs,
        grad_max=float(np.abs(shape.Du).max()),
        u_max=float(field.u.max()),
        u_min=float(field.u.min()),
    )


def evolution_identity_residual(trace, k, which="mixed"):
    """Relative residual of an exact evolution identity along a trace.

    Central time differences of C(n,k) V_k (which="mixed") or W_k
    (which="quermass") are compared against the recorded right-hand sides.
    Uses the longest uniformly spaced prefix of the record times; needs at
    least three records.
    """
    times = np.asarray(trace.times)
    if times.shape[0] < 3:
        raise DomainError("need at least three records for the residual")
    dts = np.diff(times)
    dt0 = dts[0]
    m = 1
    while m < dts.shape[0] and abs(dts[m] - dt0) <= 1e-9 * dt0:
        m += 1
    if m < 2:
        raise DomainError("record times are not uniformly spaced")
    records = trace.records[: m + 1]
    n = records[0].n
    if which == "mixed":
        if not 0 <= k <= n:
            raise DomainError(f"mixed identity index {k} outside 0..{n}")
        y = np.array([math.comb(n, k) * rec.V[k] for rec in records])
        z = np.array([rec.mixed_rhs[k] for rec in records])
    elif which == "quermass":
        if not 0 <= k <= n + 1:
            raise DomainError(f"quermass identity index {k} outside 0..{n + 1}")
        y = np.array([rec.W[k] for rec in records])
        z = np.array([rec.quermass_rhs[k] for rec in records])
    else:
        raise DomainError(f"unknown identity selector {which!r}")
    lhs = (y[2:] - y[:-2]) / (2.0 * dt0)
    resid = np.abs(lhs - z[1:-1]).max()
    scale = np.abs(z).max()
    if scale == 0.0:
        return float(resid)
    return float(resid / scale)
