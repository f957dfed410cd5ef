import math

import numpy as np
import pytest

from sl2mag.geometry import curve_kinematics
from sl2mag.hopf_tube import (
    HopfTube,
    SplineBase,
    TubeClass,
    brioschi_curvature,
    classify_cmc_tube,
    f1_metric,
    flat_circle_in_tube,
    horizontal_lift,
    tube_geodesic_residual,
    tube_mean_curvature,
)
from sl2mag.hyperbolic import riemannian_circle, speed
from sl2mag.numdiff import jet
from sl2mag.trajectories import MagneticParams, integrate_oracle, reconstruct_curve, TrajectoryState

CURVATURES = [0.0, 1.0, 2.0, 3.0, -2.5]


def test_lift_of_vertical_geodesic_has_constant_theta():
    lift = horizontal_lift(riemannian_circle(0.0, 1.0), theta0=0.4)
    pts = lift(np.linspace(-1, 1, 9))
    assert np.allclose(pts[:, 0], 0.0) and np.allclose(pts[:, 2], 0.4)
    assert np.allclose(pts[:, 1], np.exp(2 * np.linspace(-1, 1, 9)))


def test_lift_of_horizontal_line():
    lift = horizontal_lift(riemannian_circle(2.0, 1.0), theta0=0.3)
    s = np.linspace(0, 2, 5)
    pts = lift(s)
    assert np.allclose(pts[:, 0], 2 * s) and np.allclose(pts[:, 1], 1.0)
    assert np.allclose(pts[:, 2], 0.3 - s)


@pytest.mark.parametrize("k", CURVATURES)
def test_lift_is_horizontal(k):
    lift = horizontal_lift(riemannian_circle(k, 1.0))
    v, _ = curve_kinematics(*jet(lift, np.linspace(-0.5, 0.5, 11)))
    assert np.abs(v[:, 2]).max() < 1e-9
    assert np.allclose(np.sum(v * v, axis=1), 1.0, atol=1e-9)


def test_spline_lift_matches_analytic():
    circ = riemannian_circle(3.0, 1.0)
    u = np.linspace(-1, 1, 401)
    pts = circ(u)
    spl = SplineBase(u, pts[:, 0], pts[:, 1])
    a = horizontal_lift(circ)(np.array([0.3, 0.7]))
    b = horizontal_lift(spl)(np.array([0.3, 0.7]))
    assert np.abs(a - b).max() < 1e-8
    assert np.abs(spl.curvature(np.array([0.0, 0.5])) - 3.0).max() < 1e-4


@pytest.mark.parametrize("k, H", [(0.0, 0.0), (2.0, 1.0), (3.0, 1.5), (-1.0, -0.5)])
def test_mean_curvature(k, H):
    tube = HopfTube(riemannian_circle(k, 1.0))
    assert tube_mean_curvature(tube, np.array([0.0, 0.4]))[0] == pytest.approx(H)
    assert tube.mean_curvature_numeric(0.1, 0.2) == pytest.approx(H, abs=1e-6)


@pytest.mark.parametrize(
    "k, cls",
    [(0.0, TubeClass.MINIMAL_OVER_GEODESIC), (1.0, TubeClass.OVER_EQUIDISTANT),
     (2.0, TubeClass.OVER_HOROCYCLE), (-2.0, TubeClass.OVER_HOROCYCLE), (3.0, TubeClass.HOPF_TORUS)],
)
def test_classify_cmc_tube(k, cls):
    assert classify_cmc_tube(k) is cls


@pytest.mark.parametrize("k", CURVATURES)
def test_second_fundamental_form(k):
    tube = HopfTube(riemannian_circle(k, 1.0))
    hTT, hTx, hxx = tube.second_fundamental_form(0.3, 0.25)
    assert hTT == pytest.approx(k, abs=1e-6)
    assert hTx == pytest.approx(1.0, abs=1e-6)
    assert hxx == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("k", CURVATURES)
def test_induced_metric_is_euclidean(k):
    tube = HopfTube(riemannian_circle(k, 1.0))
    assert tube.induced_metric(0.5, 0.1) == pytest.approx((1.0, 0.0, 1.0), abs=1e-9)


@pytest.mark.parametrize("k", CURVATURES)
def test_f1_chart_is_flat(k):
    base = riemannian_circle(k, 1.0)
    K = brioschi_curvature(lambda u, v: tuple(a[0] for a in f1_metric(base, u)), 0.3, 0.0)
    assert abs(K) < 1e-7


def test_brioschi_detects_curvature():
    # round sphere of radius 1 in (u, v) = (polar, azimuth): K = 1
    K = brioschi_curvature(lambda u, v: (1.0, 0.0, math.sin(u) ** 2), 1.0, 0.0, h=1e-4)
    assert K == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("q, sigma", [(3.0, math.pi / 2), (2.5, 1.0), (-2.0, 2.3), (0.5, 1.0)])
def test_magnetic_curves_are_tube_geodesics(q, sigma):
    p = MagneticParams(q, sigma)
    c = reconstruct_curve(p)
    rep = tube_geodesic_residual(c.jet, np.linspace(0.0, 3.0, 31))
    assert rep.ok
    assert rep.normal_min == pytest.approx(rep.normal_max, abs=1e-6)


def test_tube_geodesic_on_oracle_jets():
    p = MagneticParams(1.7, 0.6)
    o = integrate_oracle(TrajectoryState(0.0, 1.0, 0.0, 0.2), p, 5.0)
    assert tube_geodesic_residual(o.jet, np.linspace(0, 5, 51)).tangential < 1e-9


def test_reeb_fibre_residual_is_zero():
    def fibre(s):
        s = np.atleast_1d(s)
        n = len(s)
        return (np.column_stack([np.zeros(n), np.ones(n), s]), np.tile([0, 0, 1.0], (n, 1)), np.zeros((n, 3)))

    assert tube_geodesic_residual(fibre, np.linspace(0, 1, 5)).tangential == 0.0


def test_non_geodesic_curve_in_tube_is_rejected():
    tube = HopfTube(riemannian_circle(3.0, 1.0))
    fn = flat_circle_in_tube(tube, 2.0)
    rep = tube_geodesic_residual(lambda s: jet(fn, s), np.linspace(0, 2, 11))
    assert rep.tangential > 10 * rep.tol
    assert rep.tangential == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("q, sigma", [(3.0, 0.7), (-1.2, 2.0)])
def test_projection_speed_is_sin_sigma(q, sigma):
    c = reconstruct_curve(MagneticParams(q, sigma))
    pos, d1, _ = c.analytic_jet(np.linspace(0, 2, 9))
    assert np.allclose(speed(pos[:, 0], pos[:, 1], d1[:, 0], d1[:, 1]), math.sin(sigma), atol=1e-12)
