"""Curves in the hyperbolic plane H^2(-4) (upper half plane, metric (dx^2+dy^2)/(4y^2)).

Covers the signed curvature of plane curves, Riemannian circles (curves of
constant signed curvature ``k``), Kähler magnetic curves and the Cayley map to
the unit disk.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRadius, NonpositiveY, NotUnitSpeed

HOROCYCLE_TOL = 1e-9


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise NonpositiveY(f"y = {self.y!r} must be positive")


class CircleKind(enum.Enum):
    CLOSED_CIRCLE = "closed circle"
    HOROCYCLE = "horocycle"
    EQUIDISTANT = "equidistant"
    GEODESIC = "geodesic"


def classify_curvature(k: float, tol: float = HOROCYCLE_TOL) -> CircleKind:
    ak = abs(k)
    if abs(ak - 2.0) <= tol:
        return CircleKind.HOROCYCLE
    if ak > 2.0:
        return CircleKind.CLOSED_CIRCLE
    if ak <= tol:
        return CircleKind.GEODESIC
    return CircleKind.EQUIDISTANT


def speed(x, y, dx, dy):
    return np.hypot(dx, dy) / (2.0 * np.asarray(y))


def signed_curvature(x, y, dx, dy, ddx, ddy, speed_tol: float = 1e-8):
    """Signed curvature of an arclength-parametrised curve.

    Orientation: ``J d/dx = d/dy``, so a horizontal line traversed to the right
    has curvature +2.
    """
    y = np.asarray(y, dtype=float)
    v = speed(x, y, dx, dy)
    if np.any(np.abs(v - 1.0) > speed_tol):
        raise NotUnitSpeed(f"speed deviates from 1 by {np.max(np.abs(v - 1.0)):.3e}")
    return (dx * ddy - ddx * dy) / (4.0 * y ** 2) + dx / y


def curvature_of_parametrized(x, y, dx, dy, ddx, ddy):
    """Signed curvature for an arbitrary regular parametrisation."""
    y = np.asarray(y, dtype=float)
    v = speed(x, y, dx, dy)
    return (dx * ddy - ddx * dy) / (4.0 * y ** 2 * v ** 3) + dx / (v * y)


# -- the angle equation u' = Q - 2 S cos u ----------------------------------

def _wrap(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def angle_flow(Q: float, S: float, s, u0: float = 0.0):
    """Continuous solution of ``u' = Q - 2 S cos u`` with ``u(0) = u0``.

    With ``t = tan(u/2)`` the equation is the Riccati equation
    ``2 t' = (Q + 2S) t^2 + (Q - 2S)``, linearised by ``t = p/r``:
    ``p' = (Q-2S)/2 r``, ``r' = -(Q+2S)/2 p``.  ``u/2`` is the polar angle of
    ``(p, r)``.  In the rotational regime ``Q^2 > 4S^2`` the angle is lifted by
    counting turns of the inner tangent argument; otherwise it turns by less
    than pi in total and a single wrap suffices.
    """
    s = np.asarray(s, dtype=float)
    A = Q + 2.0 * S
    B = Q - 2.0 * S
    D = A * B
    half = 0.5 * u0
    if D > 1e-13 * (Q * Q + 4.0 * S * S):
        c = math.copysign(math.sqrt(B / A), A)
        sg = math.copysign(1.0, c)
        omega = math.sqrt(D)
        phi0 = math.atan2(math.sin(half) / c, math.cos(half))

        def lift(phi):
            psi = np.arctan2(c * np.sin(phi), np.cos(phi))
            return psi + 2.0 * np.pi * np.round((sg * phi - psi) / (2.0 * np.pi))

        return u0 + 2.0 * (lift(phi0 + 0.5 * omega * s) - lift(phi0))
    p0, r0 = math.sin(half), math.cos(half)
    if D < -1e-13 * (Q * Q + 4.0 * S * S):
        lam = 0.5 * math.sqrt(-D)
        # exp(sM) with the common factor e^{lam|s|} removed
        e = np.exp(-2.0 * lam * np.abs(s))
        ch = 0.5 * (1.0 + e)
        sh = 0.5 * np.sign(s) * (1.0 - e) / lam
    else:
        ch = np.ones_like(s)
        sh = s
    p = ch * p0 + sh * 0.5 * B * r0
    r = ch * r0 - sh * 0.5 * A * p0
    return u0 + 2.0 * _wrap(np.arctan2(p, r) - half)


# -- Riemannian circles --------------------------------------------------------

@dataclass(frozen=True)
class RiemannianCircle:
    """Unit-speed curve of constant signed curvature ``k`` in H^2(-4).

    The unit tangent is ``cos(mu) e1 + sin(mu) e2`` with ``mu' = k - 2 cos mu``.
    When ``mu`` is not an equilibrium the curve is the Euclidean circle
    ``x = 2 rho sin(mu) + a``, ``y = rho (k - 2 cos mu)`` (``rho`` signed so that
    ``y > 0``).  At an equilibrium (``2 cos mu0 = k``) it is the Euclidean ray
    through ``(x0, y0)`` with slope angle ``mu0``.
    """

    k: float
    mu0: float
    rho: float = 0.0
    a: float = 0.0
    x0: float = 0.0
    y0: float = 1.0
    is_line: bool = False

    @classmethod
    def through(cls, k: float, x0: float, y0: float, mu0: float) -> "RiemannianCircle":
        """The circle through ``(x0, y0)`` with initial direction angle ``mu0``."""
        if not y0 > 0:
            raise NonpositiveY(f"y0 = {y0!r}")
        denom = k - 2.0 * math.cos(mu0)
        if abs(denom) < 1e-14:
            return cls(k=k, mu0=mu0, x0=x0, y0=y0, is_line=True)
        rho = y0 / denom
        return cls(k=k, mu0=mu0, rho=rho, a=x0 - 2.0 * rho * math.sin(mu0), x0=x0, y0=y0)

    @property
    def kind(self) -> CircleKind:
        return classify_curvature(self.k)

    @property
    def closed(self) -> bool:
        return self.kind is CircleKind.CLOSED_CIRCLE

    @property
    def period(self) -> float:
        """Arclength period (only for closed circles)."""
        if not self.closed:
            return math.inf
        return 2.0 * math.pi / math.sqrt(self.k ** 2 - 4.0)

    @property
    def center(self):
        return (self.a, self.rho * self.k)

    @property
    def radius(self) -> float:
        return 2.0 * abs(self.rho)

    def mu(self, s):
        s = np.asarray(s, dtype=float)
        if self.is_line:
            return np.full_like(s, self.mu0)
        return angle_flow(self.k, 1.0, s, self.mu0)

    def __call__(self, s):
        """Points ``(x(s), y(s))`` as an array of shape (n, 2)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.is_line:
            sm, cm = math.sin(self.mu0), math.cos(self.mu0)
            y = self.y0 * np.exp(2.0 * sm * s)
            if abs(sm) > 1e-15:
                x = self.x0 + (cm / sm) * (y - self.y0)
            else:
                x = self.x0 + 2.0 * self.y0 * cm * s
            return np.stack([x, y], axis=-1)
        mu = self.mu(s)
        return np.stack([2.0 * self.rho * np.sin(mu) + self.a, self.rho * (self.k - 2.0 * np.cos(mu))], axis=-1)

    def derivatives(self, s):
        """Analytic first and second derivatives, each of shape (n, 2)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        pts = self(s)
        y = pts[:, 1]
        mu = self.mu(s)
        dmu = self.k - 2.0 * np.cos(mu)
        cm, sm = np.cos(mu), np.sin(mu)
        dx, dy = 2.0 * y * cm, 2.0 * y * sm
        ddx = 2.0 * dy * cm - 2.0 * y * sm * dmu
        ddy = 2.0 * dy * sm + 2.0 * y * cm * dmu
        return np.stack([dx, dy], axis=-1), np.stack([ddx, ddy], axis=-1)

    def curvature(self, s):
        return np.full_like(np.atleast_1d(np.asarray(s, dtype=float)), self.k)

    def lift_theta(self, s, theta0: float = 0.0):
        """Fibre coordinate of the horizontal lift: ``theta' = -x'/(2y) = -cos mu``."""
        s = np.asarray(s, dtype=float)
        return theta0 + 0.5 * (self.mu(s) - self.mu0) - 0.5 * self.k * s

    def implicit_residual(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.is_line:
            return (pts[:, 0] - self.x0) * math.sin(self.mu0) - (pts[:, 1] - self.y0) * math.cos(self.mu0)
        cx, cy = self.center
        return (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2 - self.radius ** 2


def riemannian_circle(k: float, r: float = 1.0, a: float = 0.0, mu0: float | None = None) -> RiemannianCircle:
    """Riemannian circle of curvature ``k`` with Euclidean scale ``r``.

    With the default ``mu0`` a closed circle (``|k| > 2``) starts at its lowest
    point; for ``|k| <= 2`` the equilibrium direction ``mu0 = arccos(k/2)`` is
    used, giving the horizontal line (``k = 2``), the vertical geodesic
    (``k = 0``) or a slanted equidistant ray, each starting at ``(a, r)``.
    """
    if not r > 0:
        raise InvalidRadius(f"r = {r!r} must be positive")
    if mu0 is None:
        mu0 = 0.0 if abs(k) > 2.0 else math.acos(max(-1.0, min(1.0, k / 2.0)))
        if abs(k) > 2.0 and k < 0:
            mu0 = math.pi
    denom = k - 2.0 * math.cos(mu0)
    if abs(denom) < 1e-14:
        return RiemannianCircle(k=k, mu0=mu0, x0=a, y0=r, is_line=True)
    rho = math.copysign(r, denom)
    y0 = rho * denom
    return RiemannianCircle(k=k, mu0=mu0, rho=rho, a=a, x0=2.0 * rho * math.sin(mu0) + a, y0=y0)


def kahler_magnetic_project(qbar: float, init: HalfPlanePoint, direction: float) -> RiemannianCircle:
    """Kähler magnetic curve ``nabla_b' b' = qbar J b'`` through ``init``.

    ``direction`` is the angle of the initial unit tangent in the orthonormal
    frame ``(2y d/dx, 2y d/dy)``.
    """
    return RiemannianCircle.through(qbar, init.x, init.y, direction)


def cayley_to_disk(x, y):
    """Image of ``z = x + iy`` under ``z -> (z - i)/(z + i)``; returns ``(u, v)``."""
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    w = (z - 1j) / (z + 1j)
    return w.real, w.imag


def returns_to_start(curve, length: float) -> float:
    """Euclidean distance between ``curve(0)`` and ``curve(length)``."""
    p = curve(np.array([0.0, length]))
    return float(np.hypot(*(p[1] - p[0])))
