"""Trajectories that are one-parameter subgroups ``t -> exp(tX)``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjection, ZeroVector
from .geometry import curve_kinematics, phi_array, u_tensor
from .hyperbolic import CircleKind, classify_curvature
from .lie_core import SQRT2, AlgebraVector, exp_curve, iwasawa_arrays
from .numdiff import jet

CRITERION_TOL = 1e-9


def _nonzero(X: AlgebraVector) -> float:
    n = X.norm()
    if n == 0.0:
        raise ZeroVector("X must be nonzero")
    return n


def is_homogeneous_geodesic(X: AlgebraVector, tol: float = CRITERION_TOL) -> bool:
    """``exp(tX)`` is a geodesic iff ``a = b`` or (``c = 0`` and ``a = -b``)."""
    n = _nonzero(X)
    a, b, c = X.a / n, X.b / n, X.c / n
    by_components = abs(a - b) <= tol or (abs(c) <= tol and abs(a + b) <= tol)
    U = u_tensor(X, X)
    by_tensor = max(abs(U.a), abs(U.b), abs(U.c)) <= tol * n * n
    if by_components != by_tensor:
        raise AssertionError("component test and U(X, X) disagree")
    return by_components


def is_reeb_direction(X: AlgebraVector, tol: float = CRITERION_TOL) -> bool:
    n = _nonzero(X)
    return abs(X.c) <= tol * n and abs(X.a + X.b) <= tol * n


def is_homogeneous_magnetic(X: AlgebraVector, q: float, normalize: bool = True,
                            tol: float = CRITERION_TOL) -> bool:
    """Whether ``exp(sX)`` (arclength when ``normalize``) solves the Lorentz equation.

    The condition is ``a - b = q / (2 sqrt 2)``.  Multiples of the Reeb
    direction are also accepted since ``phi xi = 0`` makes them magnetic for
    every strength.
    """
    n = _nonzero(X)
    if q == 0:
        raise ValueError("q must be nonzero; use is_homogeneous_geodesic")
    s = n if normalize else 1.0
    if is_reeb_direction(X, tol):
        return True
    return abs((X.a - X.b) / s - q / (2.0 * SQRT2)) <= tol


def contact_angle(X: AlgebraVector) -> float:
    n = _nonzero(X)
    return math.acos(max(-1.0, min(1.0, (X.a - X.b) / (SQRT2 * n))))


def magnetic_strength_for(X: AlgebraVector) -> float:
    """The strength for which the unit-speed ``exp(sX)`` is magnetic."""
    n = _nonzero(X)
    return 2.0 * SQRT2 * (X.a - X.b) / n


def projection_curvature(X: AlgebraVector) -> float:
    """Signed curvature ``2(a - b)/sqrt((a + b)^2 + 2c^2)`` of ``t -> pi(exp(tX))``."""
    _nonzero(X)
    d = math.sqrt((X.a + X.b) ** 2 + 2.0 * X.c ** 2)
    if d == 0.0:
        raise DegenerateProjection("X is a multiple of the Reeb direction")
    return 2.0 * (X.a - X.b) / d


@dataclass(frozen=True)
class ProjectionConic:
    """Euclidean circle or line containing ``pi(exp(tX))``.

    ``kind`` is "circle" (``center``, ``radius``) or "line"
    (``line = (A, B, C)`` with ``A x + B y + C = 0``).
    """

    kind: str
    classification: CircleKind
    curvature: float
    source: str
    center: tuple | None = None
    radius: float | None = None
    line: tuple | None = None

    def residual(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.kind == "circle":
            return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 - self.radius ** 2
        A, B, C = self.line
        return (A * x + B * y + C) / math.hypot(A, B)


def _source(X: AlgebraVector, tol: float) -> str:
    n = X.norm()
    d = X.det / (n * n)
    if abs(d) <= tol:
        return "det X = 0"
    if d < 0:
        return "det X < 0"
    if abs(X.a + X.b) <= tol * n or abs(X.c) <= tol * n:
        return "det X > 0"
    return "det X > 0, general (orbit formula)"


def project_exp_curve(X: AlgebraVector, tol: float = 1e-12) -> ProjectionConic:
    """Implicit equation of the projection of ``exp(tX)`` to the half plane.

    The projection is the orbit of ``i`` under the Möbius flow of ``X``.  For
    ``b != 0`` it lies on the circle with center ``(c/(b sqrt2), (b-a)/(2b))``
    and squared radius ``((a+b)^2 + 2c^2)/(4 b^2)``; for ``b = 0`` on the line
    ``sqrt2 c x + a (1 - y) = 0``.  These reduce to each of the special
    families (``det X`` zero, positive, negative).
    """
    n = _nonzero(X)
    if is_reeb_direction(X, tol):
        raise DegenerateProjection("exp(t xi) projects to the single point (0, 1)")
    a, b, c = X.a / n, X.b / n, X.c / n
    kappa = projection_curvature(X)
    cls = classify_curvature(kappa)
    src = _source(X, tol)
    if abs(b) <= tol:
        return ProjectionConic("line", cls, kappa, src, line=(SQRT2 * c, -a, a))
    center = (c / (b * SQRT2), (b - a) / (2.0 * b))
    radius = math.sqrt((a + b) ** 2 + 2.0 * c * c) / (2.0 * abs(b))
    return ProjectionConic("circle", cls, kappa, src, center=center, radius=radius)


def fit_circle(x, y):
    """Least-squares (algebraic) circle fit; returns ``(center, radius)``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    A = np.column_stack([x, y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
    cx, cy = sol[0] / 2.0, sol[1] / 2.0
    return (cx, cy), math.sqrt(sol[2] + cx * cx + cy * cy)


def sample_projection(X: AlgebraVector, t):
    x, y, _ = iwasawa_arrays(exp_curve(X, t))
    return x, y


def exp_coordinates(X: AlgebraVector):
    """Arclength-parametrised ``s -> (x, y, theta)(exp(s X/|X|))``."""
    n = _nonzero(X)
    Xu = X * (1.0 / n)

    def fn(s):
        return np.stack(iwasawa_arrays(exp_curve(Xu, s)), axis=-1)

    return fn


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_residual < self.tol


def exp_trajectory_check(X: AlgebraVector, q: float, s_span=(-1.0, 1.0), tol: float = 1e-7,
                         samples: int = 21, h: float = 1e-3) -> ResidualReport:
    """Finite-difference residual of ``nabla_T T - q phi T`` along unit-speed ``exp(sX)``."""
    fn = exp_coordinates(X)
    s = np.linspace(s_span[0], s_span[1], samples)
    pos, d1, d2 = jet(fn, s, h, angle_index=2)
    v, acc = curve_kinematics(pos, d1, d2)
    return ResidualReport(float(np.max(np.abs(acc - q * phi_array(v)))), tol)
