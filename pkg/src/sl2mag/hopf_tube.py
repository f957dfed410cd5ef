"""Hopf tubes: preimages of plane curves under the fibering SL(2,R) -> H^2(-4)."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .geometry import coord_to_frame_arrays, curve_kinematics, phi_array
from .hyperbolic import curvature_of_parametrized
from .numdiff import jet


class SplineBase:
    """Base curve interpolating samples ``(x_i, y_i)`` at parameters ``u_i``."""

    def __init__(self, u, x, y):
        self._x = CubicSpline(u, x)
        self._y = CubicSpline(u, y)

    def __call__(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.stack([self._x(u), self._y(u)], axis=-1)

    def derivatives(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        d1 = np.stack([self._x(u, 1), self._y(u, 1)], axis=-1)
        d2 = np.stack([self._x(u, 2), self._y(u, 2)], axis=-1)
        return d1, d2

    def curvature(self, u):
        p = self(u)
        d1, d2 = self.derivatives(u)
        return curvature_of_parametrized(p[:, 0], p[:, 1], d1[:, 0], d1[:, 1], d2[:, 0], d2[:, 1])


@dataclass(frozen=True)
class HorizontalLift:
    """``u -> (x(u), y(u), theta(u))`` with ``theta' = -x'/(2y)``."""

    base: object
    theta0: float = 0.0

    def theta(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if hasattr(self.base, "lift_theta"):
            return self.base.lift_theta(u, self.theta0)

        def integrand(t):
            p = self.base(t)[0]
            return self.base.derivatives(t)[0][0, 0] / (2.0 * p[1])

        return np.array([self.theta0 - quad(integrand, 0.0, ui, epsabs=1e-10, epsrel=1e-10, limit=400)[0] for ui in u])

    def __call__(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.column_stack([self.base(u), self.theta(u)])


def horizontal_lift(beta, theta0: float = 0.0) -> HorizontalLift:
    return HorizontalLift(beta, theta0)


@dataclass(frozen=True)
class HopfTube:
    """``F(t, u) = (x(u), y(u), theta(u) + t)`` over an arclength base curve."""

    base: object
    theta0: float = 0.0

    @property
    def lift(self) -> HorizontalLift:
        return HorizontalLift(self.base, self.theta0)

    def __call__(self, t, u):
        t, u = np.broadcast_arrays(np.atleast_1d(np.asarray(t, dtype=float)),
                                   np.atleast_1d(np.asarray(u, dtype=float)))
        pts = self.lift(u.ravel())
        pts[:, 2] += t.ravel()
        return pts

    def tangent_frame(self, u):
        """Frame components of ``T`` (horizontal unit tangent), ``xi`` and ``N = phi T``."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        p = self.base(u)
        d1, _ = self.base.derivatives(u)
        w1, w2 = d1[:, 0] / (2.0 * p[:, 1]), d1[:, 1] / (2.0 * p[:, 1])
        T = np.stack([w1, w2, np.zeros_like(w1)], axis=-1)
        xi = np.tile([0.0, 0.0, 1.0], (u.size, 1))
        return T, xi, phi_array(T)

    def induced_metric(self, t, u, h: float = 1e-3):
        """``(E, F, G)`` for the (t, u) chart from numerical partials of ``F``."""
        t, u = float(t), float(u)
        _, Fu, _ = jet(lambda v: self(t, v), np.array([u]), h)
        _, Ft, _ = jet(lambda v: self(v, u), np.array([t]), h)
        y = self(t, u)[0, 1]
        vt = coord_to_frame_arrays(np.array([y]), Ft[:, 0], Ft[:, 1], Ft[:, 2])[0]
        vu = coord_to_frame_arrays(np.array([y]), Fu[:, 0], Fu[:, 1], Fu[:, 2])[0]
        return float(vt @ vt), float(vt @ vu), float(vu @ vu)

    def second_fundamental_form(self, t: float, u: float, h: float = 1e-3):
        """``h(T,T)``, ``h(T,xi)``, ``h(xi,xi)`` from accelerations of curves in the tube.

        ``h(T, xi)`` is obtained by polarisation along the diagonal ``s -> F(t+s, u+s)``.
        """
        _, _, N = self.tangent_frame(np.array([u]))
        N = N[0]

        def normal_acc(fn):
            v, a = curve_kinematics(*jet(fn, np.array([0.0]), h))
            return float(a[0] @ N), float(v[0] @ v[0])

        hTT, _ = normal_acc(lambda s: self(t, u + s))
        hxx, _ = normal_acc(lambda s: self(t + s, u))
        hdd, _ = normal_acc(lambda s: self(t + s, u + s))
        return hTT, 0.5 * (hdd - hTT - hxx), hxx

    def mean_curvature_numeric(self, t: float, u: float) -> float:
        hTT, _, hxx = self.second_fundamental_form(t, u)
        return 0.5 * (hTT + hxx)


def tube_mean_curvature(tube: HopfTube, u):
    return 0.5 * np.asarray(tube.base.curvature(u), dtype=float)


class TubeClass(enum.Enum):
    MINIMAL_OVER_GEODESIC = "minimal tube over a geodesic"
    OVER_EQUIDISTANT = "tube over an open circle or a line segment"
    OVER_HOROCYCLE = "tube over a horocycle or a horizontal line"
    HOPF_TORUS = "embedded Hopf torus over a closed circle"


def classify_cmc_tube(kappa: float, tol: float = 1e-9) -> TubeClass:
    k2 = kappa * kappa
    if abs(kappa) <= tol:
        return TubeClass.MINIMAL_OVER_GEODESIC
    if abs(k2 - 4.0) <= tol:
        return TubeClass.OVER_HOROCYCLE
    return TubeClass.HOPF_TORUS if k2 > 4.0 else TubeClass.OVER_EQUIDISTANT


def f1_metric(base, u):
    """``(E, F, G)`` of the chart ``(u, v) -> (x(u), y(u), v)``: ``(1 + w^2, w, 1)``, ``w = x'/(2y)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = base.derivatives(u)[0][:, 0] / (2.0 * base(u)[:, 1])
    return 1.0 + w * w, w, np.ones_like(w)


def brioschi_curvature(metric, u: float, v: float, h: float = 1e-3) -> float:
    """Gauss curvature from ``metric(u, v) -> (E, F, G)`` by the Brioschi formula."""

    def m(du, dv):
        return np.array(metric(u + du, v + dv), dtype=float)

    c = m(0, 0)
    mu = (m(h, 0) - m(-h, 0)) / (2 * h)
    mv = (m(0, h) - m(0, -h)) / (2 * h)
    muu = (m(h, 0) - 2 * c + m(-h, 0)) / h ** 2
    mvv = (m(0, h) - 2 * c + m(0, -h)) / h ** 2
    muv = (m(h, h) - m(h, -h) - m(-h, h) + m(-h, -h)) / (4 * h * h)
    E, F, G = c
    Eu, Fu, Gu = mu
    Ev, Fv, Gv = mv
    A = np.array([
        [-0.5 * mvv[0] + muv[1] - 0.5 * muu[2], 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ])
    B = np.array([[0.0, 0.5 * Ev, 0.5 * Gu], [0.5 * Ev, E, F], [0.5 * Gu, F, G]])
    return float((np.linalg.det(A) - np.linalg.det(B)) / (E * G - F * F) ** 2)


@dataclass(frozen=True)
class TubeGeodesicReport:
    tangential: float
    normal_min: float
    normal_max: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.tangential < self.tol


def tube_geodesic_residual(jetfn, s, tol: float = 1e-7) -> TubeGeodesicReport:
    """Split ``nabla_T T`` of a curve into parts tangent and normal to its Hopf tube.

    The tube through the curve is spanned by ``xi`` and the horizontal unit
    vector ``T_hat`` along the projected velocity; its normal is ``phi T_hat``.
    """
    pos, d1, d2 = jetfn(np.atleast_1d(np.asarray(s, dtype=float)))
    v, acc = curve_kinematics(pos, d1, d2)
    hor = v.copy()
    hor[:, 2] = 0.0
    nh = np.linalg.norm(hor, axis=1)
    if np.any(nh < 1e-12):
        # fibre direction: every tube through the point contains it
        return TubeGeodesicReport(float(np.max(np.abs(acc))), 0.0, 0.0, tol)
    That = hor / nh[:, None]
    N = phi_array(That)
    tang = np.maximum(np.abs(np.sum(acc * That, axis=1)), np.abs(acc[:, 2]))
    nrm = np.sum(acc * N, axis=1)
    return TubeGeodesicReport(float(tang.max()), float(nrm.min()), float(nrm.max()), tol)


def flat_circle_in_tube(tube: HopfTube, radius: float, t0: float = 0.0, u0: float = 0.0):
    """Unit-speed curve tracing a circle of the given radius in the flat (t, u) chart.

    Returns a coordinate function of arclength; its geodesic curvature inside
    the tube is ``1/radius``.
    """

    def fn(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return tube(t0 + radius * np.cos(s / radius), u0 + radius * np.sin(s / radius))

    return fn
