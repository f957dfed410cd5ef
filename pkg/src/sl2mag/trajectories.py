"""Contact magnetic trajectories of SL(2,R): closed forms and a numerical oracle.

A unit-speed trajectory with contact angle ``sigma`` (``eta(T) = cos sigma``)
and strength ``q`` has frame velocity
``(sin sigma cos U, sin sigma sin U, cos sigma)`` where the phase obeys
``U' = qbar - 2 sin sigma cos U`` with ``qbar = q - 2 cos sigma``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CaseMismatch, NonpositiveY, NonpositiveYReached, StepUnderflow, StrengthTooSmall
from .geometry import christoffel_term, curve_kinematics, phi_array
from .hyperbolic import angle_flow
from .numdiff import jet

CASE_TOL = 1e-10
EQUILIBRIUM_TOL = 1e-8


@dataclass(frozen=True)
class MagneticParams:
    q: float
    sigma: float

    def __post_init__(self):
        if not (0.0 <= self.sigma <= math.pi):
            raise ValueError(f"contact angle {self.sigma!r} outside [0, pi]")

    @property
    def qbar(self) -> float:
        return self.q - 2.0 * math.cos(self.sigma)

    @property
    def sin_sigma(self) -> float:
        return math.sin(self.sigma)

    @property
    def cos_sigma(self) -> float:
        return math.cos(self.sigma)

    @property
    def discriminant(self) -> float:
        """``qbar^2 - 4 sin^2 sigma``; positive in the rotational regime."""
        return self.qbar ** 2 - 4.0 * self.sin_sigma ** 2


@dataclass(frozen=True)
class TrajectoryState:
    x: float
    y: float
    theta: float
    U: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if not self.y > 0:
            raise NonpositiveY(f"y = {self.y!r} must be positive")


@dataclass(frozen=True)
class ReconstructionParams:
    rbar: float = 1.0
    x0: float = 0.0
    theta0: float = 0.0


class PhaseCase(enum.Enum):
    REEB = "reeb"
    CASE1 = "qbar + 2 sin(sigma) = 0"
    CASE2 = "qbar - 2 sin(sigma) = 0"
    CASE3 = "rotational"
    CASE4 = "hyperbolic"


def classify_case(params: MagneticParams, tol: float = CASE_TOL) -> PhaseCase:
    S = params.sin_sigma
    if S <= tol:
        return PhaseCase.REEB
    qb = params.qbar
    if abs(qb + 2.0 * S) <= tol:
        return PhaseCase.CASE1
    if abs(qb - 2.0 * S) <= tol:
        return PhaseCase.CASE2
    return PhaseCase.CASE3 if params.discriminant > 0 else PhaseCase.CASE4


def case_initial_phase(case: PhaseCase) -> float:
    """Initial phase used by the closed forms: ``pi/2`` for Case 2, otherwise 0."""
    return 0.5 * math.pi if case is PhaseCase.CASE2 else 0.0


def lorentz_rhs(state, params: MagneticParams):
    """Derivative of ``(x, y, theta, U)`` along the trajectory."""
    x, y, theta, U = state
    S, C = params.sin_sigma, params.cos_sigma
    return np.array([
        2.0 * y * S * math.cos(U),
        2.0 * y * S * math.sin(U),
        C - S * math.cos(U),
        params.qbar - 2.0 * S * math.cos(U),
    ])


def phase_solution(params: MagneticParams, s, case: PhaseCase | None = None):
    """Closed-form phase ``U(s)`` for Cases 1-4, continuous in ``s``.

    Cases 1, 3 and 4 start at ``U(0) = 0`` and Case 2 at ``U(0) = pi/2``.
    Branches of the arctangent are tracked so that ``U`` is continuous.
    """
    actual = classify_case(params)
    if case is not None and case is not actual:
        raise CaseMismatch(f"parameters fall in {actual.name}, not {case.name}")
    if actual is PhaseCase.REEB:
        raise CaseMismatch("Reeb trajectories have no phase")
    s = np.asarray(s, dtype=float)
    S, qb = params.sin_sigma, params.qbar
    if actual is PhaseCase.CASE1:
        return -2.0 * np.arctan(2.0 * s * S)
    if actual is PhaseCase.CASE2:
        d = 1.0 - 2.0 * s * S
        with np.errstate(divide="ignore"):
            base = 2.0 * np.arctan(1.0 / d)
        return np.where(d > 0, base, np.where(d < 0, base + 2.0 * np.pi, np.pi))
    if actual is PhaseCase.CASE3:
        omega = math.sqrt(params.discriminant)
        ratio = math.sqrt((qb - 2.0 * S) / (qb + 2.0 * S))
        sg = math.copysign(1.0, qb)
        branch = np.round(omega * s / (2.0 * np.pi))
        return 2.0 * np.arctan(sg * ratio * np.tan(0.5 * omega * s)) + 2.0 * np.pi * sg * branch
    lam = math.sqrt(-params.discriminant)
    ratio = math.sqrt((2.0 * S - qb) / (2.0 * S + qb))
    return -2.0 * np.arctan(ratio * np.tanh(0.5 * lam * s))


def phase_general(params: MagneticParams, s, u0: float = 0.0):
    """Phase with an arbitrary initial value, valid in every case."""
    return angle_flow(params.qbar, params.sin_sigma, s, u0)


def default_rbar(params: MagneticParams, u0: float = 0.0, y0: float = 1.0) -> float:
    """The ``rbar`` giving ``y(0) = y0``; negative when ``qbar - 2 sin sigma cos u0 < 0``."""
    d = params.qbar - 2.0 * params.sin_sigma * math.cos(u0)
    # near an equilibrium rbar blows up and x = 2 rbar sin(sigma) sin U + x0 cancels badly
    if abs(d) < EQUILIBRIUM_TOL * max(1.0, abs(params.qbar)):
        raise StrengthTooSmall("phase at an equilibrium; the projection is a line, use integrate_oracle")
    return y0 / d


@dataclass(frozen=True)
class ClosedFormTrajectory:
    """Trajectory ``(x, y, theta)(s)`` assembled from a phase function.

    ``y = rbar (qbar - 2 sin sigma cos U)``, ``x = 2 rbar sin sigma sin U + x0``
    and ``theta = theta0 + (cos sigma - qbar/2) s + (U - U(0))/2``.
    """

    params: MagneticParams
    recon: ReconstructionParams
    phase: object = field(repr=False)
    u0: float = 0.0

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        p, r = self.params, self.recon
        U = self.phase(s)
        S = p.sin_sigma
        y = r.rbar * (p.qbar - 2.0 * S * np.cos(U))
        x = 2.0 * r.rbar * S * np.sin(U) + r.x0
        theta = r.theta0 + (p.cos_sigma - 0.5 * p.qbar) * s + 0.5 * (U - self.u0)
        return np.stack([x, y, theta], axis=-1)

    def jet(self, s, h: float = 1e-3):
        return jet(self, s, h)

    def analytic_jet(self, s):
        """Derivatives from the first-order system (not independent of the ODE)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        pos = self(s)
        p = self.params
        S, y = p.sin_sigma, pos[:, 1]
        U = self.phase(s)
        cU, sU = np.cos(U), np.sin(U)
        dU = p.qbar - 2.0 * S * cU
        dx, dy = 2.0 * y * S * cU, 2.0 * y * S * sU
        d1 = np.stack([dx, dy, p.cos_sigma - S * cU], axis=-1)
        d2 = np.stack([
            2.0 * dy * S * cU - 2.0 * y * S * sU * dU,
            2.0 * dy * S * sU + 2.0 * y * S * cU * dU,
            S * sU * dU,
        ], axis=-1)
        return pos, d1, d2

    def initial_state(self) -> TrajectoryState:
        x, y, theta = self(np.array([0.0]))[0]
        return TrajectoryState(x, y, theta, self.u0)

    def check_positive(self, s) -> None:
        y = self(s)[:, 1]
        if np.any(y <= 0):
            raise NonpositiveYReached(f"y reaches {y.min():.3e}; rbar has the wrong sign for this case")


def reconstruct_curve(params: MagneticParams, recon: ReconstructionParams | None = None,
                      case: PhaseCase | None = None, s_check=None) -> ClosedFormTrajectory:
    """Closed-form trajectory for the case determined by ``params``.

    When ``recon`` is omitted ``rbar`` is chosen so that ``y(0) = 1``.
    ``s_check`` (optional samples) is used to confirm ``y > 0``.
    """
    actual = classify_case(params)
    if case is not None and case is not actual:
        raise CaseMismatch(f"parameters fall in {actual.name}, not {case.name}")
    u0 = case_initial_phase(actual)
    if recon is None:
        recon = ReconstructionParams(rbar=default_rbar(params, u0))
    traj = ClosedFormTrajectory(params, recon, lambda s: phase_solution(params, s, actual), u0)
    traj.check_positive(np.array([0.0]) if s_check is None else s_check)
    return traj


def general_trajectory(params: MagneticParams, init: TrajectoryState) -> ClosedFormTrajectory:
    """Closed-form trajectory through an arbitrary initial state."""
    rbar = default_rbar(params, init.U, init.y)
    S = params.sin_sigma
    recon = ReconstructionParams(rbar=rbar, x0=init.x - 2.0 * rbar * S * math.sin(init.U), theta0=init.theta)
    return ClosedFormTrajectory(params, recon, lambda s: phase_general(params, s, init.U), init.U)


# -- Legendre and Reeb ---------------------------------------------------------

def legendre_mu(q: float, s):
    """Phase of a Legendre trajectory with ``|q| > 2`` and ``mu(0) = 0``."""
    aq = abs(q)
    if aq <= 2.0:
        raise StrengthTooSmall(f"|q| = {aq!r} must exceed 2")
    s = np.asarray(s, dtype=float)
    w = math.sqrt(q * q - 4.0)
    h = np.round(w * s / (2.0 * np.pi))
    return 2.0 * np.arctan(math.sqrt((aq - 2.0) / (aq + 2.0)) * np.tan(0.5 * w * s)) + 2.0 * np.pi * h


@dataclass(frozen=True)
class LegendreTrajectory:
    """Horizontal lift of a closed Riemannian circle of curvature ``|q|``.

    For ``q < 0`` the curve is the ``|q|`` solution traversed backwards.
    """

    q: float
    r: float = 1.0
    x0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self):
        if abs(self.q) <= 2.0:
            raise StrengthTooSmall(f"|q| = {abs(self.q)!r} must exceed 2")
        if not self.r > 0:
            raise ValueError("r must be positive")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / math.sqrt(self.q ** 2 - 4.0)

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = s if self.q > 0 else -s
        aq = abs(self.q)
        mu = legendre_mu(aq, t)
        x = self.r * np.sin(mu) + self.x0
        y = self.r * (0.5 * aq - np.cos(mu))
        theta = 0.5 * mu - 0.5 * aq * t + self.theta0
        return np.stack([x, y, theta], axis=-1)

    def jet(self, s, h: float = 1e-3):
        return jet(self, s, h)


def legendre_trajectory(q: float, r: float = 1.0, x0: float = 0.0, theta0: float = 0.0) -> LegendreTrajectory:
    return LegendreTrajectory(q, r, x0, theta0)


def reeb_trajectory(x0: float, y0: float, theta0: float, direction: int = 1):
    """Fibre line ``(x0, y0, theta0 + direction * s)``, ``direction`` in {1, -1}."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not y0 > 0:
        raise NonpositiveY(f"y0 = {y0!r}")

    def curve(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.stack([np.full_like(s, x0), np.full_like(s, y0), theta0 + direction * s], axis=-1)

    return curve


# -- numerical oracle ----------------------------------------------------------

def _coord_rhs(q: float):
    def rhs(_s, z):
        x, y, th, dx, dy, dth = z
        eta = dth + dx / (2.0 * y)
        ddx = 2.0 * dx * dy / y + 2.0 * dy * eta - q * dy
        ddy = (dy * dy - dx * dx) / y - 2.0 * dx * eta + q * dx
        ddth = -(ddx * y - dx * dy) / (2.0 * y * y)
        return [dx, dy, dth, ddx, ddy, ddth]

    return rhs


@dataclass
class OracleTrajectory:
    """Dense numerical solution of the second-order magnetic equation."""

    q: float
    sol: object = field(repr=False)
    s_end: float = 0.0

    def state(self, s) -> np.ndarray:
        return np.atleast_2d(self.sol(np.atleast_1d(np.asarray(s, dtype=float))).T)

    def __call__(self, s) -> np.ndarray:
        return self.state(s)[:, :3]

    def jet(self, s):
        z = self.state(s)
        rhs = _coord_rhs(self.q)
        d2 = np.array([rhs(0.0, row)[3:] for row in z])
        return z[:, :3], z[:, 3:], d2

    def invariants(self, s):
        """Speed squared and ``eta(gamma')`` at the samples."""
        pos, d1, _ = self.jet(s)
        v = curve_kinematics(pos, d1, np.zeros_like(d1))[0]
        return np.sum(v * v, axis=1), v[:, 2]


def integrate_oracle(init: TrajectoryState, params: MagneticParams, s_end: float,
                     rtol: float = 1e-12, atol: float = 1e-12) -> OracleTrajectory:
    """Integrate the coordinate form of ``nabla_T T = q phi T`` with DOP853.

    The initial velocity is built from ``(sigma, U)`` of ``init``; the
    right-hand side involves only ``q``, so the phase reduction is not used.
    """
    S, C = params.sin_sigma, params.cos_sigma
    y = init.y
    dx = 2.0 * y * S * math.cos(init.U)
    dy = 2.0 * y * S * math.sin(init.U)
    dth = C - S * math.cos(init.U)
    z0 = [init.x, y, init.theta, dx, dy, dth]

    def hit_boundary(_s, z):
        return z[1]

    hit_boundary.terminal = True
    sol = solve_ivp(_coord_rhs(params.q), (0.0, s_end), z0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, events=hit_boundary)
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    if sol.status == 1:
        raise StepUnderflow(f"y reached 0 at s = {sol.t_events[0][0]!r}")
    return OracleTrajectory(params.q, sol.sol, s_end)


# -- checks --------------------------------------------------------------------

def frenet_curvatures(jetfn, s, h: float = 1e-3):
    """Numerical ``(kappa1, kappa2)`` of a unit-speed curve.

    ``jetfn(s)`` returns coordinates and their first two derivatives.  The
    principal normal is differentiated by central differences.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))

    def normal(t):
        v, a = curve_kinematics(*jetfn(t))
        return v, a, a / np.linalg.norm(a, axis=1)[:, None]

    v, a, N = normal(s)
    k1 = np.linalg.norm(a, axis=1)
    dN = (8.0 * (normal(s + h)[2] - normal(s - h)[2]) - (normal(s + 2 * h)[2] - normal(s - 2 * h)[2])) / (12.0 * h)
    covN = dN + christoffel_term(v, N)
    k2 = np.linalg.norm(covN + k1[:, None] * v, axis=1)
    return k1, k2


def expected_frenet(params: MagneticParams):
    """Curvatures of a contact magnetic trajectory: ``|q sin sigma|`` and ``|q cos sigma - 1|``."""
    return abs(params.q * params.sin_sigma), abs(params.q * params.cos_sigma - 1.0)


def magnetic_residual(jetfn, s, q: float) -> float:
    pos, d1, d2 = jetfn(np.atleast_1d(np.asarray(s, dtype=float)))
    v, acc = curve_kinematics(pos, d1, d2)
    return float(np.max(np.abs(acc - q * phi_array(v))))
