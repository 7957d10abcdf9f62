"""Stereographic projection to Euclidean space and convexity certificates.

Projecting S^{n+1} minus the antipode of the chart origin onto R^{n+1}
sends the geodesic radius r to rho = 2 tan(r/2); the round metric is
e^{2 psi} times the Euclidean one with e^psi = 1 / (1 + rho^2/4).  Principal
curvatures transfer by

  e^psi kappa_i = kappa-hat_i + psi_nu,
  psi_nu = -(rho-hat^2 / W-hat) e^psi / 2,

where kappa-hat are the Euclidean curvatures of the projected radial graph
rho-hat(theta) = 2 tan(u(theta)/2) and W-hat^2 = rho-hat^2 + rho-hat_theta^2.
The residual check below evaluates both sides from their own finite
difference stencils, so it cross-validates the spherical curvature formulas
against the Euclidean ones.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import sphere_geom
from .errors import DomainError

_CONVEX_TOL = 1e-12


def project_radius(r):
    """Stereographic radius rho = 2 tan(r/2) for geodesic radius r in [0, pi)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r >= math.pi):
        raise DomainError("geodesic radius must lie in [0, pi)")
    out = 2.0 * np.tan(0.5 * r)
    return float(out) if out.ndim == 0 else out


def unproject_radius(rho):
    """Inverse of project_radius."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise DomainError("stereographic radius must be nonnegative")
    out = 2.0 * np.arctan(0.5 * rho)
    return float(out) if out.ndim == 0 else out


def conformal_factor(rho):
    """e^psi with round metric = e^{2 psi} * Euclidean."""
    rho = np.asarray(rho, dtype=float)
    out = 1.0 / (1.0 + 0.25 * rho * rho)
    return float(out) if out.ndim == 0 else out


def _euclid_curvatures(field):
    """Euclidean principal curvatures of the projected radial graph.

    Returns (kap_m, kap_a, rho, What); kap_a is None on the circle chart.
    Derivatives are taken of the projected nodal values directly, not by the
    chain rule, so this path shares no curvature algebra with sphere_geom.
    """
    rho = 2.0 * np.tan(0.5 * field.u)
    h = field.spacing
    if field.chart == "circle":
        d1, d2 = sphere_geom.fd4_periodic(rho, h)
    else:
        d1, d2 = sphere_geom.fd4_reflect(rho, h)
    w2 = rho * rho + d1 * d1
    what = np.sqrt(w2)
    kap_m = (rho * rho + 2.0 * d1 * d1 - rho * d2) / (w2 * what)
    if field.chart == "circle":
        return kap_m, None, rho, what
    th = field.thetas
    kap_a = np.empty_like(kap_m)
    cot = np.cos(th[1:-1]) / np.sin(th[1:-1])
    kap_a[1:-1] = (rho[1:-1] - cot * d1[1:-1]) / (rho[1:-1] * what[1:-1])
    kap_a[0] = kap_m[0]
    kap_a[-1] = kap_m[-1]
    return kap_m, kap_a, rho, what


def curvature_transfer_residual(field):
    """Max deviation from the conformal curvature transfer law across nodes.

    Spherical curvatures come from the graph stencils, Euclidean ones from
    stencils of the projected profile; for the exact law the two sides agree
    to the truncation error of the differences.
    """
    sph = sphere_geom.shape_operator(field)
    kap_m_e, kap_a_e, rho, what = _euclid_curvatures(field)
    e_psi = 1.0 / (1.0 + 0.25 * rho * rho)
    psi_nu = -0.5 * (rho * rho / what) * e_psi
    resid = np.abs(e_psi * sph[0] - kap_m_e - psi_nu)
    if field.chart == "axisym":
        resid_a = np.abs(e_psi * sph[1] - kap_a_e - psi_nu)
        resid = np.maximum(resid, resid_a)
    return float(resid.max())


@dataclass(frozen=True)
class Certificate:
    """Outcome of the initial-data checks run before a flow."""

    strictly_convex: bool
    kappa_min: float
    violating_node: Optional[int]
    hemisphere: bool
    u_max: float
    u_min: float
    inball_radius: float

    def to_dict(self):
        return {
            "strictly_convex": self.strictly_convex,
            "kappa_min": self.kappa_min,
            "violating_node": self.violating_node,
            "hemisphere": self.hemisphere,
            "u_max": self.u_max,
            "u_min": self.u_min,
            "inball_radius": self.inball_radius,
        }


def certify(field):
    """Convexity and hemisphere certificate for initial data.

    strictly_convex requires every principal curvature above 1e-12 (an exact
    equator has kappa = cot(pi/2), which rounds to ~6e-17, not zero).  The
    inball radius is the Euclidean rolling-ball bound 1/max kappa-hat of the
    projected body.
    """
    shape = sphere_geom.shape_data(field)
    kap = shape.kappa
    node = int(np.argmin(kap.min(axis=1)))
    kap_min = float(kap.min())
    convex = kap_min > _CONVEX_TOL
    kap_m_e, kap_a_e, _rho, _what = _euclid_curvatures(field)
    kap_e_max = float(kap_m_e.max())
    if kap_a_e is not None:
        kap_e_max = max(kap_e_max, float(kap_a_e.max()))
    inball = 1.0 / kap_e_max if kap_e_max > 0.0 else math.nan
    return Certificate(
        strictly_convex=convex,
        kappa_min=kap_min,
        violating_node=None if convex else node,
        hemisphere=bool(field.u.max() < 0.5 * math.pi),
        u_max=float(field.u.max()),
        u_min=float(field.u.min()),
        inball_radius=inball,
    )
