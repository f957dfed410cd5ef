"""SL(2,R) elements, the sl(2,R) algebra, exponentials and the Iwasawa decomposition.

Algebra elements are stored as coefficients ``(a, b, c)`` in the orthonormal
basis ``E1 = sqrt(2) E``, ``E2 = sqrt(2) F``, ``E3 = H`` so that
``a E1 + b E2 + c E3`` is the matrix ``[[c, sqrt(2) a], [sqrt(2) b, -c]]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import NonpositiveY, NonUnitDeterminant

SQRT2 = math.sqrt(2.0)

DET_TOL = 1e-12
# |trace| within this of 2 is treated as parabolic
TRACE_TOL = 1e-9
EXP_DET_REL_TOL = 1e-12


@dataclass(frozen=True)
class Sl2Matrix:
    p11: float
    p12: float
    p21: float
    p22: float

    @classmethod
    def from_array(cls, m, check: bool = True) -> "Sl2Matrix":
        m = np.asarray(m, dtype=float)
        out = cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))
        if check:
            out.check()
        return out

    @classmethod
    def identity(cls) -> "Sl2Matrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    def as_array(self) -> np.ndarray:
        return np.array([[self.p11, self.p12], [self.p21, self.p22]])

    @property
    def det(self) -> float:
        return self.p11 * self.p22 - self.p12 * self.p21

    @property
    def trace(self) -> float:
        return self.p11 + self.p22

    def check(self, tol: float = DET_TOL) -> "Sl2Matrix":
        # scale-aware: entries of size ~1e6 cannot resolve det to 1e-12 absolutely
        scale = max(1.0, float(np.max(np.abs(self.as_array()))) ** 2)
        if abs(self.det - 1.0) > tol * scale:
            raise NonUnitDeterminant(f"det = {self.det!r} is not 1")
        return self

    def inverse(self) -> "Sl2Matrix":
        return Sl2Matrix(self.p22, -self.p12, -self.p21, self.p11)

    def __matmul__(self, other: "Sl2Matrix") -> "Sl2Matrix":
        return Sl2Matrix.from_array(self.as_array() @ other.as_array(), check=False)


@dataclass(frozen=True)
class AlgebraVector:
    """Element ``a E1 + b E2 + c E3`` of sl(2,R)."""

    a: float
    b: float
    c: float

    @classmethod
    def from_matrix(cls, m) -> "AlgebraVector":
        m = np.asarray(m, dtype=float)
        if abs(m[0, 0] + m[1, 1]) > 1e-12 * max(1.0, np.abs(m).max()):
            raise ValueError("matrix is not trace-free")
        return cls(m[0, 1] / SQRT2, m[1, 0] / SQRT2, m[0, 0])

    def matrix(self) -> np.ndarray:
        return np.array([[self.c, SQRT2 * self.a], [SQRT2 * self.b, -self.c]])

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def det(self) -> float:
        """Determinant of the matrix form, ``-(c^2 + 2ab)``."""
        return -(self.c * self.c + 2.0 * self.a * self.b)

    def norm(self) -> float:
        return math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2)

    def inner(self, other: "AlgebraVector") -> float:
        """``<X, Y> = tr(X^T Y) / 2``; the basis E1, E2, E3 is orthonormal."""
        return self.a * other.a + self.b * other.b + self.c * other.c

    def normalized(self) -> "AlgebraVector":
        n = self.norm()
        return AlgebraVector(self.a / n, self.b / n, self.c / n)

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        return AlgebraVector(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "AlgebraVector") -> "AlgebraVector":
        return AlgebraVector(self.a - other.a, self.b - other.b, self.c - other.c)

    def __mul__(self, s: float) -> "AlgebraVector":
        return AlgebraVector(s * self.a, s * self.b, s * self.c)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraVector":
        return AlgebraVector(-self.a, -self.b, -self.c)


E1 = AlgebraVector(1.0, 0.0, 0.0)
E2 = AlgebraVector(0.0, 1.0, 0.0)
E3 = AlgebraVector(0.0, 0.0, 1.0)


def bracket(x: AlgebraVector, y: AlgebraVector) -> AlgebraVector:
    """Lie bracket, bilinear extension of [E1,E2]=2E3, [E2,E3]=2E2, [E3,E1]=2E1."""
    return AlgebraVector(
        2.0 * (x.c * y.a - x.a * y.c),
        2.0 * (x.b * y.c - x.c * y.b),
        2.0 * (x.a * y.b - x.b * y.a),
    )


@dataclass(frozen=True)
class IwasawaCoord:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not self.y > 0:
            raise NonpositiveY(f"y = {self.y!r} must be positive")

    def to_matrix(self) -> Sl2Matrix:
        return compose(self.x, self.y, self.theta)


def n_part(x: float) -> np.ndarray:
    return np.array([[1.0, x], [0.0, 1.0]])


def a_part(y: float) -> np.ndarray:
    r = math.sqrt(y)
    return np.array([[r, 0.0], [0.0, 1.0 / r]])


def k_part(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def compose(x: float, y: float, theta: float) -> Sl2Matrix:
    """The group element ``n(x) a(y) k(theta)``."""
    return Sl2Matrix.from_array(n_part(x) @ a_part(y) @ k_part(theta), check=False)


def iwasawa_decompose(p: Sl2Matrix, tol: float = DET_TOL) -> IwasawaCoord:
    """Global coordinates ``(x, y, theta)`` of ``p = n(x) a(y) k(theta)``.

    ``theta`` is the principal value in (-pi, pi]; unwrapping along a curve is
    left to the caller.
    """
    p.check(tol)
    rho2 = p.p21 ** 2 + p.p22 ** 2
    x = (p.p11 * p.p21 + p.p12 * p.p22) / rho2
    y = 1.0 / rho2
    theta = math.atan2(-p.p21, p.p22)
    return IwasawaCoord(x, y, theta)


def iwasawa_arrays(mats: np.ndarray):
    """Vectorised decomposition of a stack of matrices of shape (..., 2, 2)."""
    p11, p12 = mats[..., 0, 0], mats[..., 0, 1]
    p21, p22 = mats[..., 1, 0], mats[..., 1, 1]
    rho2 = p21 ** 2 + p22 ** 2
    return (p11 * p21 + p12 * p22) / rho2, 1.0 / rho2, np.arctan2(-p21, p22)


def exp_algebra(X: AlgebraVector, t: float) -> Sl2Matrix:
    """``exp(tX)`` in closed form, by the sign of ``det X``."""
    M = X.matrix()
    d = X.det
    if abs(d) < EXP_DET_REL_TOL * X.norm() ** 2 or d == 0.0:
        out = np.eye(2) + t * M
    elif d > 0:
        delta = math.sqrt(d)
        out = math.cos(delta * t) * np.eye(2) + (math.sin(delta * t) / delta) * M
    else:
        delta = math.sqrt(-d)
        out = math.cosh(delta * t) * np.eye(2) + (math.sinh(delta * t) / delta) * M
    return Sl2Matrix.from_array(out, check=False)


def exp_curve(X: AlgebraVector, t) -> np.ndarray:
    """Vectorised ``exp(tX)`` for an array of ``t``; returns shape (n, 2, 2)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    M = X.matrix()
    d = X.det
    if abs(d) < EXP_DET_REL_TOL * X.norm() ** 2 or d == 0.0:
        c0, c1 = np.ones_like(t), t
    elif d > 0:
        delta = math.sqrt(d)
        c0, c1 = np.cos(delta * t), np.sin(delta * t) / delta
    else:
        delta = math.sqrt(-d)
        c0, c1 = np.cosh(delta * t), np.sinh(delta * t) / delta
    return c0[:, None, None] * np.eye(2) + c1[:, None, None] * M


def _series_exp(A, eps):
    term = mpmath.eye(2)
    out = mpmath.eye(2)
    for n in range(1, 200):
        term = term * A / n
        out = out + term
        if mpmath.mnorm(term, 1) < eps:
            break
    return out


def exp_oracle(X: AlgebraVector, t: float, extra_squarings: int = 0, dps: int = 40) -> Sl2Matrix:
    """Matrix exponential of ``tX`` by Taylor series with scaling and squaring.

    Runs in ``dps`` decimal digits so that the float64 closed forms in
    :func:`exp_algebra` can be checked without the oracle's own rounding
    dominating. Shares no code with the closed forms.
    """
    with mpmath.workdps(dps):
        A = mpmath.matrix(X.matrix().tolist()) * mpmath.mpf(t)
        nrm = mpmath.mnorm(A, 1)
        squarings = int(mpmath.ceil(mpmath.log(nrm / 0.25, 2))) if nrm > 0.25 else 0
        squarings += extra_squarings
        out = _series_exp(A / mpmath.mpf(2) ** squarings, mpmath.mpf(10) ** (-dps - 5))
        for _ in range(squarings):
            out = out * out
        return Sl2Matrix.from_array(np.array(out.tolist(), dtype=float), check=False)


class MobiusClass(enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def classify_mobius(p: Sl2Matrix, tol: float = TRACE_TOL) -> MobiusClass:
    """Type of the linear fractional transformation induced by ``p``."""
    m = p.as_array()
    if np.abs(m - np.eye(2)).max() < tol or np.abs(m + np.eye(2)).max() < tol:
        return MobiusClass.IDENTITY
    tr = abs(p.trace)
    if abs(tr - 2.0) <= tol:
        return MobiusClass.PARABOLIC
    return MobiusClass.ELLIPTIC if tr < 2.0 else MobiusClass.HYPERBOLIC


def mobius_action(p: Sl2Matrix, z: complex) -> complex:
    return (p.p11 * z + p.p12) / (p.p21 * z + p.p22)
