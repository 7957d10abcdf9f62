"""Stereographic transfer law and the convexity certificate."""

import math

import numpy as np
import pytest

from sphereflow.errors import DomainError
from sphereflow.sphere_geom import ball_profile, cosine_profile
from sphereflow.stereo import (
    certify,
    conformal_factor,
    curvature_transfer_residual,
    project_radius,
    unproject_radius,
)


def test_radius_projection_values():
    assert project_radius(0.0) == 0.0
    assert project_radius(math.pi / 2) == pytest.approx(2.0, rel=1e-15)
    assert project_radius(math.pi / 3) == pytest.approx(
        2.0 * math.tan(math.pi / 6), rel=1e-15
    )


def test_radius_roundtrip():
    r = np.linspace(0.0, 3.0, 40)
    np.testing.assert_allclose(unproject_radius(project_radius(r)), r, atol=1e-14)
    assert isinstance(project_radius(0.5), float)


def test_radius_domain():
    with pytest.raises(DomainError):
        project_radius(math.pi)
    with pytest.raises(DomainError):
        project_radius(-0.1)
    with pytest.raises(DomainError):
        unproject_radius(-1.0)


def test_conformal_factor():
    # e^psi = cos^2(r/2) along the stereographic ray
    r = np.linspace(0.0, 2.5, 30)
    np.testing.assert_allclose(
        conformal_factor(project_radius(r)), np.cos(0.5 * r) ** 2, atol=1e-14
    )


# --- transfer law ------------------------------------------------------------------


@pytest.mark.parametrize("n,rho", [(2, 0.6), (2, math.pi / 3), (3, 0.9)])
def test_transfer_residual_balls(n, rho):
    f = ball_profile("axisym", n, 256, rho)
    assert curvature_transfer_residual(f) < 1e-8


def test_transfer_residual_circle():
    f = ball_profile("circle", 1, 256, 0.8)
    assert curvature_transfer_residual(f) < 1e-8
    wavy = f.with_u(0.8 + 0.03 * np.sin(f.thetas))
    assert curvature_transfer_residual(wavy) < 1e-5


def test_transfer_residual_perturbed_and_order():
    errs = []
    for nodes in (65, 129, 257):
        f = cosine_profile("axisym", 2, nodes, 0.8, {2: 0.06, 3: 0.02})
        errs.append(curvature_transfer_residual(f))
    assert errs[-1] < 1e-5
    # two curvature paths share only the exact law; agreement sharpens at
    # 3rd order or better under refinement
    assert math.log2(errs[0] / errs[1]) >= 3.0
    assert math.log2(errs[1] / errs[2]) >= 3.0


# --- certificate -------------------------------------------------------------------


def test_certify_ball():
    f = ball_profile("axisym", 2, 129, math.pi / 4)
    cert = certify(f)
    assert cert.strictly_convex
    assert cert.hemisphere
    assert cert.violating_node is None
    assert cert.kappa_min == pytest.approx(1.0, rel=1e-10)  # cot(pi/4)
    # inball radius of the projected body: rho_hat = 2 tan(pi/8)
    assert cert.inball_radius == pytest.approx(2.0 * math.tan(math.pi / 8), rel=1e-10)
    assert cert.u_max == pytest.approx(math.pi / 4)
    d = cert.to_dict()
    assert set(d) == {
        "strictly_convex",
        "kappa_min",
        "violating_node",
        "hemisphere",
        "u_max",
        "u_min",
        "inball_radius",
    }


def test_certify_near_equator_not_strict():
    f = ball_profile("axisym", 2, 129, math.pi / 2 - 1e-14)
    cert = certify(f)
    assert not cert.strictly_convex  # curvature at roundoff scale


def test_certify_nonconvex_names_witness():
    f = cosine_profile("axisym", 2, 129, 1.2, {4: 0.3})
    cert = certify(f)
    assert not cert.strictly_convex
    assert cert.kappa_min < 0.0
    assert cert.violating_node is not None
    assert 0 <= cert.violating_node < f.nodes


def test_certify_hemisphere_flag():
    f = ball_profile("axisym", 2, 129, 1.8)
    cert = certify(f)
    assert not cert.hemisphere
    assert certify(ball_profile("axisym", 2, 129, 1.5)).hemisphere


def test_certify_circle():
    f = ball_profile("circle", 1, 128, 0.7)
    cert = certify(f)
    assert cert.strictly_convex
    assert cert.hemisphere
    assert cert.inball_radius == pytest.approx(2.0 * math.tan(0.35), rel=1e-10)
