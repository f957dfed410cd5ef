"""Quantized strengths and closure of contact magnetic trajectories.

A trajectory in the rotational regime (``qbar^2 > 4 sin^2 sigma``) has a phase
``U`` that moves by ``2 pi sgn(qbar)`` every ``T = 2 pi / omega`` with
``omega = sqrt(qbar^2 - 4 sin^2 sigma)``.  Over one such period ``x`` and ``y``
return and ``theta`` advances by ``(cos sigma - qbar/2) T + pi`` (mod 2 pi), so
the curve closes after ``n`` phase periods exactly when ``n`` times that
advance is a multiple of ``2 pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateDenominator, InvalidRatio, NonRotationalPhase
from .trajectories import MagneticParams

CLOSURE_TOL = 1e-8
RELATION_TOL = 1e-10


def _check_pair(m: int, k: int) -> None:
    if not (isinstance(m, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise InvalidRatio("m and k must be integers")
    if m <= 0 or k <= 0:
        raise InvalidRatio(f"m = {m}, k = {k} must be positive")
    if math.gcd(int(m), int(k)) != 1:
        raise InvalidRatio(f"m = {m} and k = {k} are not coprime")


def ratio_parameter(m: int, k: int) -> Fraction:
    """``a = 1 - 2 (m/k)^2`` as an exact rational."""
    _check_pair(m, k)
    return 1 - 2 * Fraction(m, k) ** 2


def ratio_from_parameter(a: Fraction) -> Fraction:
    """Inverse of :func:`ratio_parameter` on the squares: ``(m/k)^2 = (1 - a)/2``."""
    return (1 - Fraction(a)) / 2


def phase_frequency(params: MagneticParams) -> float:
    d = params.discriminant
    if d <= 0:
        raise NonRotationalPhase(f"qbar^2 - 4 sin^2 sigma = {d!r} is not positive")
    return math.sqrt(d)


def phase_period(params: MagneticParams) -> float:
    return 2.0 * math.pi / phase_frequency(params)


def theta_advance(params: MagneticParams) -> float:
    """Change of ``theta`` over one phase period (unreduced).

    ``U`` moves by ``2 pi sgn(qbar)`` per period, contributing ``pi sgn(qbar)``.
    """
    return (params.cos_sigma - 0.5 * params.qbar) * phase_period(params) + math.copysign(math.pi, params.qbar)


def relation_residual(q: float, m: int, k: int, sigma: float) -> float:
    """``omega - (m/k)(qbar - 2 cos sigma)``; zero for a quantized strength."""
    p = MagneticParams(q, sigma)
    return math.sqrt(max(p.discriminant, 0.0)) - (m / k) * (p.qbar - 2.0 * p.cos_sigma)


def _wrap(a):
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def closure_defects(params: MagneticParams, max_phase_periods: int) -> np.ndarray:
    """``|n dtheta mod 2 pi|`` for ``n = 1 .. max_phase_periods``."""
    n = np.arange(1, max_phase_periods + 1)
    return np.abs(_wrap(n * theta_advance(params)))


@dataclass(frozen=True)
class Closure:
    n_periods: int
    defect: float


def detect_closure(params: MagneticParams, max_phase_periods: int = 48, tol: float = CLOSURE_TOL):
    """Smallest number of phase periods after which the trajectory closes, or None."""
    d = closure_defects(params, max_phase_periods)
    hits = np.nonzero(d < tol)[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    return Closure(i + 1, float(d[i]))


def expected_periods(m: int, k: int) -> int:
    """Closing count for a quantized strength: ``m`` if ``k - m`` is even, else ``2m``."""
    return m if (k - m) % 2 == 0 else 2 * m


@dataclass(frozen=True)
class RejectedRoot:
    q: float
    reason: str


@dataclass
class PeriodicityCert:
    m: int
    k: int
    sigma: float
    a: Fraction
    q_values: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    T_phase: list = field(default_factory=list)
    T_total: list = field(default_factory=list)
    h: int | None = None
    beyond_qbar_two: list = field(default_factory=list)

    def __post_init__(self):
        _check_pair(self.m, self.k)
        if self.a != ratio_parameter(self.m, self.k):
            raise ValueError("a is inconsistent with (m, k)")


def quantized_roots(m: int, k: int, sigma: float):
    """The real roots of the quantization formula, without filtering."""
    a = ratio_parameter(m, k)
    if a == -1:
        raise DegenerateDenominator("m/k = 1 makes (1 + a)/2 vanish")
    if abs(math.sin(sigma)) < 1e-15:
        raise ValueError("sin(sigma) must be nonzero")
    af = float(a)
    disc = 2.0 * (1.0 - af * math.cos(2.0 * sigma))
    if disc < 0:
        return []
    root = math.sqrt(disc)
    den = 0.5 * (1.0 + af)
    base = 2.0 * af * math.cos(sigma)
    return [(base + root) / den, (base - root) / den] if root > 0 else [base / den]


def quantized_strength(m: int, k: int, sigma: float, max_phase_periods: int | None = None) -> PeriodicityCert:
    """Quantized strengths for the ratio ``m/k`` at contact angle ``sigma``.

    Roots of the squared relation are accepted only if they satisfy
    ``omega = (m/k)(qbar - 2 cos sigma)`` itself, lie in the rotational regime
    and close under :func:`detect_closure`; the others are returned in
    ``rejected`` with a reason.
    """
    if m == k:
        raise DegenerateDenominator("m/k = 1 makes (1 + a)/2 vanish")
    cert = PeriodicityCert(m, k, sigma, ratio_parameter(m, k))
    window = 4 * k if max_phase_periods is None else max_phase_periods
    S = math.sin(sigma)
    for q in quantized_roots(m, k, sigma):
        p = MagneticParams(q, sigma)
        if p.discriminant <= 0 or abs(p.qbar) <= 2.0 * S:
            cert.rejected.append(RejectedRoot(q, "not rotational: |qbar| <= 2 sin(sigma)"))
            continue
        res = relation_residual(q, m, k, sigma)
        scale = max(1.0, abs(p.qbar))
        if abs(res) > RELATION_TOL * scale:
            cert.rejected.append(RejectedRoot(
                q, "extraneous: satisfies the relation only with m/k replaced by -m/k"))
            continue
        closure = detect_closure(p, window)
        if closure is None:
            cert.rejected.append(RejectedRoot(q, f"no closure within {window} phase periods"))
            continue
        cert.q_values.append(q)
        T = phase_period(p)
        cert.T_phase.append(T)
        cert.T_total.append(closure.n_periods * T)
        if abs(p.qbar) <= 2.0:
            cert.beyond_qbar_two.append(q)
    if abs(math.cos(sigma)) < 1e-12 and m < k:
        cert.h = legendre_branch_count(m, k)
    return cert


def kajigaya_strength(m: int, k: int) -> float:
    """``|q| = 2 / sqrt(1 - (m/k)^2)`` for coprime ``0 < m < k``."""
    _check_pair(m, k)
    if not m < k:
        raise InvalidRatio(f"need m < k, got {m}/{k}")
    r = m / k
    return 2.0 / math.sqrt(1.0 - r * r)


def legendre_branch_count(m: int, k: int) -> int:
    """Smallest ``h >= 0`` with ``(h + 1)(k - m)/m`` an even integer."""
    _check_pair(m, k)
    if not m < k:
        raise InvalidRatio(f"need m < k, got {m}/{k}")
    h = 0
    while True:
        v = Fraction((h + 1) * (k - m), m)
        if v.denominator == 1 and v.numerator % 2 == 0:
            return h
        h += 1


def legendre_branch_count_literal(m: int, k: int) -> int:
    """Same count read directly as ``(h + 1)(1 - k/m)`` even (a non-positive rational)."""
    _check_pair(m, k)
    h = 0
    while True:
        v = (h + 1) * (1 - Fraction(k, m))
        if v.denominator == 1 and v.numerator % 2 == 0:
            return h
        h += 1


def min_defect(params: MagneticParams, max_phase_periods: int) -> float:
    return float(closure_defects(params, max_phase_periods).min())
