"""Radial graph hypersurfaces over a geodesic polar chart of the round sphere.

A hypersurface M = graph u sits inside S^{n+1} with polar metric
dr^2 + sin^2 r sigma.  Two charts are supported:

  circle  n = 1, u(theta) on the uniform periodic grid theta in [0, 2pi)
  axisym  n >= 2, u(theta) on the uniform closed grid theta in [0, pi],
          rotationally symmetric about the polar axis of S^n

Derivatives are 4th-order central differences; the axisymmetric chart uses
even-reflection ghost nodes at both poles, so the discrete odd derivative
vanishes there identically.  Quadrature weights are exact for integrands of
the form (cosine polynomial) * sin^{n-1}(theta), which makes geodesic-ball
functionals exact to rounding and smooth profiles spectrally accurate.

Principal curvatures of the graph, with respect to the outward normal
(geodesic spheres about the chart origin get cot u > 0):

  kappa_merid = (sin^2 u cos u + 2 u_t^2 cos u - sin u u_tt) / W^3
  kappa_azim  = (sin u cos u - cot(theta) u_t) / (sin u W),   W^2 = sin^2 u + u_t^2

with the umbilic limit kappa_azim -> kappa_merid at the poles.  These come
from the graph shape operator
h^i_j = (cos u/(v sin u)) delta^i_j + (cos u/(v^3 sin^3 u)) u^i u_j
        - sigma~^{ik} u_{kj} / (v sin^2 u),
where u_{kj} is the covariant Hessian of the round chart metric
(Gamma^theta_{phi phi} = -sin theta cos theta, Gamma^phi_{theta phi} = cot theta)
and sigma~_ik = u_i u_k / sin^2 u + sigma_ik.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError, ProfileFormatError

__all__ = [
    "GraphField",
    "ShapeData",
    "ball_profile",
    "cosine_profile",
    "chart_derivatives",
    "gradient_factor",
    "shape_operator",
    "principal_curvatures",
    "area_measure",
    "enclosed_volume",
    "shape_data",
    "sphere_area",
    "sin_power_integral",
    "embedding_curvature_oracle",
    "read_profile",
    "write_profile",
]

CHARTS = ("circle", "axisym")


def sphere_area(m: int) -> float:
    """Surface measure of the unit m-sphere, 2 pi^{(m+1)/2} / Gamma((m+1)/2)."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


@dataclass(frozen=True)
class GraphField:
    """Discretized radial graph u over one chart of S^n."""

    chart: str
    n: int
    u: np.ndarray

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ConfigurationError(f"unknown chart {self.chart!r}")
        if self.chart == "circle" and self.n != 1:
            raise ConfigurationError("circle chart requires n = 1")
        if self.chart == "axisym" and self.n < 2:
            raise ConfigurationError("axisym chart requires n >= 2")
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 1 or u.size < 4:
            raise ConfigurationError("u must be a 1-d array with at least 4 nodes")
        if not np.all(np.isfinite(u)):
            raise ConfigurationError("u contains non-finite values")
        if u.min() <= 0.0 or u.max() >= math.pi:
            raise ConfigurationError("u must stay strictly inside (0, pi)")
        u = u.copy()
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def nodes(self) -> int:
        return self.u.size

    @property
    def spacing(self) -> float:
        if self.chart == "circle":
            return 2.0 * math.pi / self.nodes
        return math.pi / (self.nodes - 1)

    @property
    def thetas(self) -> np.ndarray:
        if self.chart == "circle":
            return np.arange(self.nodes) * self.spacing
        return np.linspace(0.0, math.pi, self.nodes)

    def with_u(self, u) -> "GraphField":
        return GraphField(self.chart, self.n, u)


def ball_profile(chart: str, n: int, nodes: int, rho: float) -> GraphField:
    """Geodesic sphere of radius rho about the chart origin."""
    if not 0.0 < rho < math.pi:
        raise DomainError("rho must lie in (0, pi)")
    return GraphField(chart, n, np.full(nodes, float(rho)))


def cosine_profile(chart: str, n: int, nodes: int, base: float, amplitudes: dict) -> GraphField:
    """u(theta) = base + sum_m amplitudes[m] cos(m theta)."""
    field = ball_profile(chart, n, nodes, base)
    th = field.thetas
    u = np.full(nodes, float(base))
    for mode, amp in amplitudes.items():
        u = u + float(amp) * np.cos(int(mode) * th)
    return GraphField(chart, n, u)


# --- finite differences ------------------------------------------------------


def fd4_periodic(u: np.ndarray, h: float):
    """4th-order first and second derivative on a uniform periodic grid."""
    up = np.concatenate([u[-2:], u, u[:2]])
    d1 = (up[:-4] - 8.0 * up[1:-3] + 8.0 * up[3:-1] - up[4:]) / (12.0 * h)
    d2 = (-up[:-4] + 16.0 * up[1:-3] - 30.0 * up[2:-2] + 16.0 * up[3:-1] - up[4:]) / (
        12.0 * h * h
    )
    return d1, d2


def fd4_reflect(u: np.ndarray, h: float):
    """4th-order derivatives on [0, pi] with even reflection at both ends.

    The ghost values u[-j] = u[j] and u[N-1+j] = u[N-1-j] encode smooth
    axisymmetric extension through the poles; the first derivative is then
    exactly zero at both endpoints.
    """
    up = np.concatenate([u[2:0:-1], u, u[-2:-4:-1]])
    d1 = (up[:-4] - 8.0 * up[1:-3] + 8.0 * up[3:-1] - up[4:]) / (12.0 * h)
    d2 = (-up[:-4] + 16.0 * up[1:-3] - 30.0 * up[2:-2] + 16.0 * up[3:-1] - up[4:]) / (
        12.0 * h * h
    )
    d1[0] = 0.0
    d1[-1] = 0.0
    return d1, d2


def chart_derivatives(field: GraphField):
    """Per-node (Du, D2u) of the chart coordinate derivative."""
    if field.nodes < 16:
        raise ConfigurationError("need at least 16 grid nodes")
    if field.chart == "circle":
        return fd4_periodic(field.u, field.spacing)
    return fd4_reflect(field.u, field.spacing)


def gradient_factor(field: GraphField, deriv=None) -> np.ndarray:
    """Graph gradient factor v = sqrt(1 + u_t^2 / sin^2 u) >= 1."""
    d1 = chart_derivatives(field)[0] if deriv is None else deriv[0]
    su = np.sin(field.u)
    return np.sqrt(1.0 + (d1 / su) ** 2)


def _curvatures(field: GraphField, d1: np.ndarray, d2: np.ndarray):
    u = field.u
    su = np.sin(u)
    cu = np.cos(u)
    w2 = su * su + d1 * d1
    w = np.sqrt(w2)
    kap_m = (su * su * cu + 2.0 * d1 * d1 * cu - su * d2) / (w2 * w)
    if field.chart == "circle":
        return kap_m, None
    th = field.thetas
    kap_a = np.empty_like(kap_m)
    # interior: cot(theta) u_t; poles: the limit cot(theta) u_t -> u_tt
    # together with u_t = 0 makes the pole umbilic, kappa_azim = kappa_merid
    cot = np.cos(th[1:-1]) / np.sin(th[1:-1])
    kap_a[1:-1] = (su[1:-1] * cu[1:-1] - cot * d1[1:-1]) / (su[1:-1] * w[1:-1])
    kap_a[0] = kap_m[0]
    kap_a[-1] = kap_m[-1]
    return kap_m, kap_a


def shape_operator(field: GraphField, deriv=None, v=None):
    """Diagonal shape-operator entries with respect to the outward normal.

    circle: (kappa,) once per node.  axisym: (kappa_merid, kappa_azim) with
    kappa_azim carrying multiplicity n - 1.
    """
    d1, d2 = chart_derivatives(field) if deriv is None else deriv
    kap_m, kap_a = _curvatures(field, d1, d2)
    if field.chart == "circle":
        return (kap_m,)
    return kap_m, kap_a


def principal_curvatures(shape, n: int) -> np.ndarray:
    """Per-node principal curvature vectors, shape (nodes, n)."""
    if len(shape) == 1:
        return shape[0][:, None]
    kap_m, kap_a = shape
    return np.column_stack([kap_m] + [kap_a] * (n - 1))


# --- quadrature --------------------------------------------------------------


def _sin_power_cos_moment(q: int, m: int) -> float:
    """I(q, m) = int_0^pi sin^q(theta) cos(m theta) dtheta, exact recurrence."""
    if q < 0:
        raise ValueError("q must be >= 0")
    if m == q:
        if q % 2 == 0:
            return (-1.0) ** (q // 2) * math.pi / 2.0**q
        return 0.0
    if q == 0:
        return math.pi if m == 0 else 0.0
    if q == 1:
        if m == 1:
            return 0.0
        return (1.0 + math.cos(m * math.pi)) / (1.0 - m * m)
    return q * (q - 1.0) / (q * q - m * m) * _sin_power_cos_moment(q - 2, m)


def sin_power_integral(q: int) -> float:
    """int_0^pi sin^q(theta) dtheta."""
    return _sin_power_cos_moment(q, 0)


@lru_cache(maxsize=64)
def _modal_weights(nodes: int, q: int) -> np.ndarray:
    """Nodal weights w_j on the closed uniform grid with
    sum_j w_j f(theta_j) = int_0^pi f(theta) sin^q(theta) dtheta
    exact whenever f is a cosine polynomial of degree <= nodes - 1."""
    mom = np.array([_sin_power_cos_moment(q, m) for m in range(nodes)])
    eps = np.full(nodes, 2.0)
    eps[0] = eps[-1] = 1.0
    j = np.arange(nodes)
    cosmat = np.cos(np.pi * np.outer(np.arange(nodes), j) / (nodes - 1))
    w = (eps / (2.0 * (nodes - 1))) * ((eps * mom) @ cosmat)
    w.flags.writeable = False
    return w


def chart_weights(field: GraphField) -> np.ndarray:
    """Chart quadrature weights against d(theta), including sin^{n-1}(theta)."""
    if field.chart == "circle":
        return np.full(field.nodes, field.spacing)
    return np.array(_modal_weights(field.nodes, field.n - 1))


def area_measure(field: GraphField, deriv=None):
    """Per-node area weights and the total area V_0 = integral of dmu.

    dmu = W (sin u sin theta)^{n-1} dtheta dOmega_{n-1} on the axisym chart
    and W dtheta on the circle, with W = sqrt(sin^2 u + u_t^2).
    """
    d1 = chart_derivatives(field)[0] if deriv is None else deriv[0]
    su = np.sin(field.u)
    w = np.sqrt(su * su + d1 * d1)
    if field.chart == "circle":
        weights = field.spacing * w
    else:
        weights = (
            sphere_area(field.n - 1)
            * chart_weights(field)
            * w
            * su ** (field.n - 1)
        )
    return weights, float(np.sum(weights))


def _sin_antiderivative(n: int, x: np.ndarray) -> np.ndarray:
    """J_n(x) = int_0^x sin^n r dr by the exact recursion."""
    if n == 0:
        return np.asarray(x, dtype=float)
    if n == 1:
        return 1.0 - np.cos(x)
    return ((n - 1.0) * _sin_antiderivative(n - 2, x) - np.cos(x) * np.sin(x) ** (n - 1)) / n


def enclosed_volume(field: GraphField) -> float:
    """Volume of the enclosed body {0 <= r <= u(x)}."""
    j = _sin_antiderivative(field.n, field.u)
    if field.chart == "circle":
        return float(np.sum(np.full(field.nodes, field.spacing) * j))
    return sphere_area(field.n - 1) * float(np.sum(chart_weights(field) * j))


# --- assembled per-node state ------------------------------------------------


@dataclass(frozen=True)
class ShapeData:
    """Per-node geometric state of a graph hypersurface."""

    Du: np.ndarray
    D2u: np.ndarray
    v: np.ndarray
    shape: tuple
    kappa: np.ndarray  # (nodes, n)
    F: np.ndarray | None
    weight: np.ndarray

    @property
    def min_kappa(self) -> float:
        return float(self.kappa.min())

    @property
    def strictly_convex(self) -> bool:
        return self.min_kappa > 0.0


def shape_data(field: GraphField, spec=None) -> ShapeData:
    """Assemble derivatives, curvatures, F values and area weights."""
    d1, d2 = chart_derivatives(field)
    v = gradient_factor(field, (d1, d2))
    shape = shape_operator(field, (d1, d2), v)
    kappa = principal_curvatures(shape, field.n)
    weight, _total = area_measure(field, (d1, d2))
    f = None
    if spec is not None:
        from . import symfunc

        if field.chart == "circle":
            f = np.asarray(shape[0], dtype=float).copy()
        else:
            f, _, _ = symfunc.axisym_family_eval(spec, shape[0], shape[1])
    return ShapeData(Du=d1, D2u=d2, v=v, shape=shape, kappa=kappa, F=f, weight=weight)


# --- independent embedding oracle (n = 2) ------------------------------------


def embedding_curvature_oracle(u_of_theta, thetas, delta: float = 1e-4):
    """Brute-force principal curvatures from the explicit embedding in R^4.

    For n = 2: X(theta, phi) = (sin u m, cos u), m = (sin th cos ph,
    sin th sin ph, cos th).  The metric and second fundamental form are
    assembled by central finite differences of X alone, so this path is
    independent of the graph shape-operator formula.  Returns the per-node
    principal curvature pairs, sorted ascending, at the given interior
    thetas (keep them away from the poles by a few delta).
    """

    def x_of(th, ph):
        u = u_of_theta(th)
        su, cu = math.sin(u), math.cos(u)
        st, ct = math.sin(th), math.cos(th)
        return np.array([su * st * math.cos(ph), su * st * math.sin(ph), su * ct, cu])

    out = np.empty((len(thetas), 2))
    for i, th in enumerate(thetas):
        xc = x_of(th, 0.0)
        xt = (x_of(th + delta, 0.0) - x_of(th - delta, 0.0)) / (2 * delta)
        xp = (x_of(th, delta) - x_of(th, -delta)) / (2 * delta)
        xtt = (x_of(th + delta, 0.0) - 2 * xc + x_of(th - delta, 0.0)) / delta**2
        xpp = (x_of(th, delta) - 2 * xc + x_of(th, -delta)) / delta**2
        xtp = (
            x_of(th + delta, delta)
            - x_of(th + delta, -delta)
            - x_of(th - delta, delta)
            + x_of(th - delta, -delta)
        ) / (4 * delta**2)

        # unit normal in T_x S^3, orthogonal to X, X_t, X_p, outward sign
        mat = np.vstack([xc, xt, xp])
        _, _, vt = np.linalg.svd(mat)
        nu = vt[-1]
        u = u_of_theta(th)
        d_r = np.array(
            [
                math.cos(u) * math.sin(th),
                0.0,
                math.cos(u) * math.cos(th),
                -math.sin(u),
            ]
        )
        if np.dot(nu, d_r) < 0:
            nu = -nu

        g = np.array([[np.dot(xt, xt), np.dot(xt, xp)], [np.dot(xp, xt), np.dot(xp, xp)]])
        # second fundamental form with the sign that makes geodesic spheres
        # about the origin positively curved
        b = -np.array(
            [[np.dot(xtt, nu), np.dot(xtp, nu)], [np.dot(xtp, nu), np.dot(xpp, nu)]]
        )
        out[i] = np.sort(np.linalg.eigvals(np.linalg.solve(g, b)).real)
    return out


# --- profile file format ------------------------------------------------------


def write_profile(field: GraphField, path):
    """Flat text format: header "chart n N", then N lines "theta u"."""
    th = field.thetas
    with open(path, "w") as fh:
        fh.write(f"{field.chart} {field.n} {field.nodes}\n")
        for t, val in zip(th, field.u):
            fh.write(f"{t:.17g} {val:.17g}\n")


def read_profile(path) -> GraphField:
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ProfileFormatError(f"cannot read profile: {exc}") from exc
    if not lines:
        raise ProfileFormatError("empty profile file")
    head = lines[0].split()
    if len(head) != 3:
        raise ProfileFormatError("header must be 'chart n N'")
    chart, n_s, nodes_s = head
    try:
        n, nodes = int(n_s), int(nodes_s)
    except ValueError as exc:
        raise ProfileFormatError("header must be 'chart n N'") from exc
    if len(lines) - 1 != nodes:
        raise ProfileFormatError(f"expected {nodes} data lines, found {len(lines) - 1}")
    u = np.empty(nodes)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 2:
            raise ProfileFormatError(f"bad data line {i + 2}")
        try:
            u[i] = float(parts[1])
        except ValueError as exc:
            raise ProfileFormatError(f"bad data line {i + 2}") from exc
    try:
        return GraphField(chart, n, u)
    except ConfigurationError as exc:
        raise ProfileFormatError(str(exc)) from exc
