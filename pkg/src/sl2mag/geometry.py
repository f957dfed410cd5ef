"""Riemannian and Sasakian structure of (SL(2,R), g).

Two tangent representations are used and never mixed implicitly:

* :class:`FrameVector` -- components in the orthonormal frame
  ``e1 = 2y d/dx - d/dtheta``, ``e2 = 2y d/dy``, ``e3 = d/dtheta`` (not left
  invariant, but with constant connection coefficients);
* :class:`~sl2mag.lie_core.AlgebraVector` -- left-invariant fields in the
  basis ``E1, E2, E3``.

:func:`algebra_to_frame` / :func:`frame_to_algebra` convert between them at a
given ``theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, NonpositiveY
from .lie_core import SQRT2, AlgebraVector, IwasawaCoord, bracket

PHI_SECTIONAL_CURVATURE = -7


@dataclass(frozen=True)
class FrameVector:
    v1: float
    v2: float
    v3: float

    @classmethod
    def from_array(cls, arr) -> "FrameVector":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=float)

    def __add__(self, other: "FrameVector") -> "FrameVector":
        return FrameVector(self.v1 + other.v1, self.v2 + other.v2, self.v3 + other.v3)

    def __sub__(self, other: "FrameVector") -> "FrameVector":
        return FrameVector(self.v1 - other.v1, self.v2 - other.v2, self.v3 - other.v3)

    def __mul__(self, s: float) -> "FrameVector":
        return FrameVector(s * self.v1, s * self.v2, s * self.v3)

    __rmul__ = __mul__

    def __neg__(self) -> "FrameVector":
        return FrameVector(-self.v1, -self.v2, -self.v3)


XI = FrameVector(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class TangentAtPoint:
    base: IwasawaCoord
    vec: FrameVector

    def coordinates(self):
        """Coordinate components ``(dx, dy, dtheta)``."""
        return frame_to_coord(self.base, self.vec)


def g(v, w) -> float:
    """Metric in the orthonormal frame (accepts FrameVector or arrays)."""
    return float(np.dot(_arr(v), _arr(w)))


def eta(v) -> float:
    return float(_arr(v)[2])


def _arr(v) -> np.ndarray:
    return v.as_array() if isinstance(v, FrameVector) else np.asarray(v, dtype=float)


# -- coordinates <-> frame -------------------------------------------------

def coord_to_frame(base: IwasawaCoord, dx: float, dy: float, dtheta: float) -> FrameVector:
    """Frame components of the coordinate vector ``(dx, dy, dtheta)`` at ``base``."""
    y = base.y
    if not y > 0:
        raise NonpositiveY(f"y = {y!r}")
    w = dx / (2.0 * y)
    return FrameVector(w, dy / (2.0 * y), dtheta + w)


def frame_to_coord(base: IwasawaCoord, v: FrameVector):
    y = base.y
    if not y > 0:
        raise NonpositiveY(f"y = {y!r}")
    return 2.0 * y * v.v1, 2.0 * y * v.v2, v.v3 - v.v1


def coord_to_frame_arrays(y, dx, dy, dtheta) -> np.ndarray:
    """Vectorised :func:`coord_to_frame`; returns an array of shape (n, 3)."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise NonpositiveY("y must be positive")
    w = np.asarray(dx) / (2.0 * y)
    return np.stack([w, np.asarray(dy) / (2.0 * y), np.asarray(dtheta) + w], axis=-1)


# -- e-frame tables ----------------------------------------------------------

# CONNECTION[i, j] = nabla_{e_{i+1}} e_{j+1}
CONNECTION = np.array(
    [
        [[0, 2, 0], [-2, 0, -1], [0, 1, 0]],
        [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        [[0, 1, 0], [-1, 0, 0], [0, 0, 0]],
    ],
    dtype=np.int64,
)

# FRAME_BRACKET[i, j] = [e_{i+1}, e_{j+1}]
FRAME_BRACKET = np.zeros((3, 3, 3), dtype=np.int64)
FRAME_BRACKET[0, 1] = [-2, 0, -2]
FRAME_BRACKET[1, 0] = [2, 0, 2]

# Listed components of R(e_i, e_j) e_k; the rest follow from antisymmetry in
# (i, j) or vanish.
_CURVATURE_LISTED = {
    (1, 2, 1): (0, 7, 0),
    (1, 2, 2): (-7, 0, 0),
    (1, 3, 1): (0, 0, -1),
    (1, 3, 3): (1, 0, 0),
    (2, 3, 2): (0, 0, -1),
    (2, 3, 3): (0, 1, 0),
}


def _build_curvature_table() -> np.ndarray:
    R = np.zeros((3, 3, 3, 3), dtype=np.int64)
    for (i, j, k), val in _CURVATURE_LISTED.items():
        R[i - 1, j - 1, k - 1] = val
        R[j - 1, i - 1, k - 1] = [-v for v in val]
    return R


CURVATURE = _build_curvature_table()


def _check_index(*idx):
    for i in idx:
        if i not in (1, 2, 3):
            raise IndexOutOfRange(f"frame index {i!r} not in 1..3")


def nabla_frame(i: int, j: int) -> FrameVector:
    """``nabla_{e_i} e_j`` (1-based indices)."""
    _check_index(i, j)
    return FrameVector.from_array(CONNECTION[i - 1, j - 1])


def curvature_frame(i: int, j: int, k: int) -> FrameVector:
    """``R(e_i, e_j) e_k`` with ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``."""
    _check_index(i, j, k)
    return FrameVector.from_array(CURVATURE[i - 1, j - 1, k - 1])


def christoffel_term(v, w, table=None) -> np.ndarray:
    """``sum_ij v_i w_j nabla_{e_i} e_j`` for constant-component fields."""
    table = CONNECTION if table is None else table
    return np.einsum("...i,...j,ijk->...k", _arr(v), _arr(w), table)


def covariant_derivative(v, w, dw) -> np.ndarray:
    """``nabla_v W`` where ``W`` has frame components ``w`` and ``dw = v(w)``."""
    return np.asarray(dw, dtype=float) + christoffel_term(v, w)


def curve_kinematics(pos, d1, d2):
    """Frame velocity and covariant acceleration of a curve from coordinate jets.

    ``pos``, ``d1``, ``d2`` hold ``(x, y, theta)`` and its first two parameter
    derivatives, shape (n, 3).  Returns ``(v, a)`` with ``a = nabla_v v``, both
    in e-frame components.
    """
    pos, d1, d2 = (np.atleast_2d(np.asarray(t, dtype=float)) for t in (pos, d1, d2))
    y = pos[:, 1]
    v = coord_to_frame_arrays(y, d1[:, 0], d1[:, 1], d1[:, 2])
    dv1 = (d2[:, 0] * y - d1[:, 0] * d1[:, 1]) / (2.0 * y ** 2)
    dv2 = (d2[:, 1] * y - d1[:, 1] ** 2) / (2.0 * y ** 2)
    dv = np.stack([dv1, dv2, d2[:, 2] + dv1], axis=-1)
    return v, dv + christoffel_term(v, v)


def lorentz_residual(pos, d1, d2, q: float) -> np.ndarray:
    """``nabla_v v - q phi v`` at each sample, shape (n, 3)."""
    v, acc = curve_kinematics(pos, d1, d2)
    return acc - q * phi_array(v)


def curvature_operator(X, Y, Z) -> np.ndarray:
    """``R(X,Y)Z`` for frame vectors, by trilinear extension of the table."""
    return np.einsum("i,j,k,ijkl->l", _arr(X), _arr(Y), _arr(Z), CURVATURE)


# -- structure tensors ---------------------------------------------------------

def phi_frame(v: FrameVector) -> FrameVector:
    return FrameVector(-v.v2, v.v1, 0.0)


def phi_array(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0], np.zeros_like(v[..., 0])], axis=-1)


PHI_MATRIX = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=np.int64)


def phi_algebra(X: AlgebraVector) -> AlgebraVector:
    s = (X.a + X.b) / SQRT2
    return AlgebraVector(-X.c / SQRT2, -X.c / SQRT2, s)


XI_ALGEBRA = AlgebraVector(1.0 / SQRT2, -1.0 / SQRT2, 0.0)


def eta_algebra(X: AlgebraVector) -> float:
    return X.inner(XI_ALGEBRA)


# -- the bi-invariance obstruction and left-invariant connection -------------

# U_TABLE[i, j] = U(E_{i+1}, E_{j+1}) in (a, b, c) components
U_TABLE = np.array(
    [
        [[0, 0, 2], [0, 0, 0], [-1, -1, 0]],
        [[0, 0, 0], [0, 0, -2], [1, 1, 0]],
        [[-1, -1, 0], [1, 1, 0], [0, 0, 0]],
    ],
    dtype=np.int64,
)


def u_tensor(X: AlgebraVector, Y: AlgebraVector) -> AlgebraVector:
    out = np.einsum("i,j,ijk->k", X.as_array(), Y.as_array(), U_TABLE)
    return AlgebraVector(*out)


def nabla_leftinvariant(X: AlgebraVector, Y: AlgebraVector) -> AlgebraVector:
    """Levi-Civita connection on left-invariant fields, ``[X,Y]/2 + U(X,Y)``."""
    return bracket(X, Y) * 0.5 + u_tensor(X, Y)


def algebra_to_frame(X: AlgebraVector, theta: float) -> FrameVector:
    """Frame components of the left-invariant field ``X`` at a point with angle ``theta``."""
    p = (X.a + X.b) / SQRT2
    c2, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return FrameVector(p * c2 - X.c * s2, p * s2 + X.c * c2, (X.a - X.b) / SQRT2)


def frame_to_algebra(v: FrameVector, theta: float) -> AlgebraVector:
    c2, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
    p = v.v1 * c2 + v.v2 * s2
    c = -v.v1 * s2 + v.v2 * c2
    return AlgebraVector((p + v.v3) / SQRT2, (p - v.v3) / SQRT2, c)


# -- re-derivations used to guard the tables -----------------------------------

def koszul_frame_connection(brackets: np.ndarray = FRAME_BRACKET) -> np.ndarray:
    """Connection coefficients of an orthonormal frame with constant brackets.

    ``2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)``.
    """
    B = np.asarray(brackets)
    out = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                out[i, j, k] = 0.5 * (B[i, j, k] - B[j, k, i] + B[k, i, j])
    return out


def koszul_algebra_connection() -> np.ndarray:
    """Left-invariant connection in the E-basis from the Lie brackets."""
    basis = [AlgebraVector(*row) for row in np.eye(3)]
    out = np.zeros((3, 3, 3))
    for i, X in enumerate(basis):
        for j, Y in enumerate(basis):
            for k, Z in enumerate(basis):
                out[i, j, k] = 0.5 * (
                    -X.inner(bracket(Y, Z)) + Y.inner(bracket(Z, X)) + Z.inner(bracket(X, Y))
                )
    return out


def curvature_from_connection(conn=CONNECTION, brackets=FRAME_BRACKET) -> np.ndarray:
    """``R(e_i,e_j)e_k`` computed from constant connection coefficients."""
    G = np.asarray(conn, dtype=float)
    B = np.asarray(brackets, dtype=float)
    R = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                # nabla_i (nabla_j e_k) = sum_l G[j,k,l] nabla_i e_l
                term = G[j, k] @ G[i] - G[i, k] @ G[j]
                term -= np.einsum("l,lm->m", B[i, j], G[:, k, :])
                R[i, j, k] = term
    return R


def curvature_formula(X, Y, Z) -> np.ndarray:
    """Closed-form curvature in terms of (phi, xi, eta, g)."""
    X, Y, Z = _arr(X), _arr(Y), _arr(Z)
    xi = np.array([0.0, 0.0, 1.0])
    pX, pY, pZ = phi_array(X), phi_array(Y), phi_array(Z)
    eX, eY, eZ = X[2], Y[2], Z[2]
    gyz, gzx = Y @ Z, Z @ X
    brace = (
        eZ * eX * Y
        - eY * eZ * X
        + gzx * eY * xi
        - gyz * eX * xi
        - (Y @ pZ) * pX
        - (Z @ pX) * pY
        + 2.0 * (X @ pY) * pZ
    )
    return -gyz * X + gzx * Y - 2.0 * brace


def frame_fields_coord(x: float, y: float, theta: float) -> np.ndarray:
    """Coordinate components of e1, e2, e3 at a point (rows)."""
    return np.array([[2.0 * y, 0.0, -1.0], [0.0, 2.0 * y, 0.0], [0.0, 0.0, 1.0]])


def frame_bracket_numeric(point, h: float = 1e-5) -> np.ndarray:
    """Brackets of the e-frame by central differences of coordinate components."""
    p = np.asarray(point, dtype=float)
    F = frame_fields_coord(*p)
    dF = np.zeros((3, 3, 3))  # dF[m, i, k] = d_m (e_i)^k
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        dF[m] = (frame_fields_coord(*(p + e)) - frame_fields_coord(*(p - e))) / (2 * h)
    out = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            coord = F[i] @ dF[:, j, :] - F[j] @ dF[:, i, :]
            dx, dy, dth = coord
            out[i, j] = [dx / (2 * p[1]), dy / (2 * p[1]), dth + dx / (2 * p[1])]
    return out


def _eta_coord(p) -> np.ndarray:
    return np.array([1.0 / (2.0 * p[1]), 0.0, 1.0])


def d_eta_numeric(point, X, Y, h: float = 1e-5) -> float:
    """``d eta(X, Y)`` (with the 1/2 convention) by finite differences of ``eta``.

    ``X`` and ``Y`` are frame vectors at ``point``.
    """
    p = np.asarray(point, dtype=float)
    D = np.zeros((3, 3))  # D[m, j] = d_m eta_j
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        D[m] = (_eta_coord(p + e) - _eta_coord(p - e)) / (2 * h)
    base = IwasawaCoord(*p)
    Xc = np.array(frame_to_coord(base, FrameVector.from_array(_arr(X))))
    Yc = np.array(frame_to_coord(base, FrameVector.from_array(_arr(Y))))
    # (d eta)_{mj} = d_m eta_j - d_j eta_m
    deta = D - D.T
    return 0.5 * float(Xc @ deta @ Yc)


@dataclass
class SasakianReport:
    residuals: dict
    fd_residual: float
    fd_tol: float = 1e-7

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_residual < tol and self.fd_residual < self.fd_tol


def verify_sasakian(point_samples: int = 1000, seed: int = 0, fd_tol: float = 1e-7) -> SasakianReport:
    """Evaluate the Sasakian identities at random points and frame vectors.

    Returns the max residual per identity. The finite-difference ``d eta``
    cross-check is reported separately as ``fd_residual``; its accuracy is
    limited by the step, hence its own tolerance ``fd_tol``.
    """
    if point_samples < 1:
        raise ValueError("point_samples must be >= 1")
    rng = np.random.default_rng(seed)
    res = dict.fromkeys(
        ["phi_squared", "d_eta", "compatibility", "nabla_xi", "nabla_phi", "eta_xi"], 0.0
    )
    fd = 0.0
    xi = np.array([0.0, 0.0, 1.0])
    for _ in range(point_samples):
        point = (rng.uniform(-5, 5), math.exp(rng.uniform(-2, 2)), rng.uniform(-math.pi, math.pi))
        X, Y = rng.normal(size=3), rng.normal(size=3)
        eX, eY = X[2], Y[2]
        pX, pY = phi_array(X), phi_array(Y)
        res["phi_squared"] = max(res["phi_squared"], np.abs(phi_array(pX) - (-X + eX * xi)).max())
        res["d_eta"] = max(res["d_eta"], abs(_d_eta_frame(X, Y) - pX @ Y))
        res["compatibility"] = max(res["compatibility"], abs(pX @ pY - (X @ Y - eX * eY)))
        res["nabla_xi"] = max(res["nabla_xi"], np.abs(christoffel_term(X, xi) - pX).max())
        # (nabla_X phi) Y for Y with constant frame components
        lhs = christoffel_term(X, pY) - phi_array(christoffel_term(X, Y))
        rhs = -(X @ Y) * xi + eY * X
        res["nabla_phi"] = max(res["nabla_phi"], np.abs(lhs - rhs).max())
        res["eta_xi"] = max(res["eta_xi"], abs(xi[2] - 1.0))
        fd = max(fd, abs(d_eta_numeric(point, X, Y) - pX @ Y))
    return SasakianReport({k: float(v) for k, v in res.items()}, float(fd), fd_tol)


def _d_eta_frame(X, Y) -> float:
    """``d eta(X,Y) = (X eta(Y) - Y eta(X) - eta([X,Y]))/2`` for constant frame fields."""
    br = np.einsum("i,j,ijk->k", X, Y, FRAME_BRACKET)
    return -0.5 * br[2]
