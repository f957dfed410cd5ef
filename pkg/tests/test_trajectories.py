import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2mag.errors import (
    CaseMismatch,
    NonpositiveY,
    NonpositiveYReached,
    StepUnderflow,
    StrengthTooSmall,
)
from sl2mag.hyperbolic import signed_curvature
from sl2mag.lie_core import E3, exp_curve, iwasawa_arrays
from sl2mag.numdiff import derivative
from sl2mag.trajectories import (
    ClosedFormTrajectory,
    MagneticParams,
    PhaseCase,
    ReconstructionParams,
    TrajectoryState,
    classify_case,
    expected_frenet,
    frenet_curvatures,
    general_trajectory,
    integrate_oracle,
    legendre_mu,
    legendre_trajectory,
    lorentz_rhs,
    magnetic_residual,
    phase_general,
    phase_solution,
    reconstruct_curve,
    reeb_trajectory,
)

SIG = 1.0
S1, C1 = math.sin(SIG), math.cos(SIG)
CASE_PARAMS = {
    PhaseCase.CASE1: MagneticParams(2 * C1 - 2 * S1, SIG),
    PhaseCase.CASE2: MagneticParams(2 * C1 + 2 * S1, SIG),
    PhaseCase.CASE3: MagneticParams(3.0, math.pi / 2),
    PhaseCase.CASE4: MagneticParams(0.5, SIG),
}


def test_params_validation_and_qbar():
    p = MagneticParams(1.5, math.pi / 3)
    assert p.qbar == pytest.approx(0.5)
    with pytest.raises(ValueError):
        MagneticParams(1.0, -0.1)
    with pytest.raises(ValueError):
        MagneticParams(1.0, 3.2)


def test_state_requires_positive_y():
    with pytest.raises(NonpositiveY):
        TrajectoryState(0.0, -1.0, 0.0)


def test_lorentz_rhs_examples():
    reeb = lorentz_rhs((0.0, 2.0, 0.0, 0.7), MagneticParams(1.0, 0.0))
    assert reeb[:3] == pytest.approx((0.0, 0.0, 1.0))
    leg = lorentz_rhs((0.0, 1.5, 0.0, math.pi / 2), MagneticParams(2.5, math.pi / 2))
    assert leg == pytest.approx((0.0, 3.0, 0.0, 2.5), abs=1e-15)


@given(st.floats(-5, 5), st.floats(0, math.pi), st.floats(-10, 10))
def test_lorentz_rhs_phase_identity(q, sigma, U):
    p = MagneticParams(q, sigma)
    dU = lorentz_rhs((0.0, 1.0, 0.0, U), p)[3]
    assert dU + 2 * p.sin_sigma * math.cos(U) - p.qbar == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_classify_case(case, params):
    assert classify_case(params) is case


def test_classify_reeb():
    assert classify_case(MagneticParams(4.0, 0.0)) is PhaseCase.REEB
    assert classify_case(MagneticParams(4.0, math.pi)) is PhaseCase.REEB


def test_case_mismatch():
    with pytest.raises(CaseMismatch):
        phase_solution(CASE_PARAMS[PhaseCase.CASE3], 1.0, PhaseCase.CASE4)
    with pytest.raises(CaseMismatch):
        reconstruct_curve(CASE_PARAMS[PhaseCase.CASE4], case=PhaseCase.CASE1)


def test_case1_and_case2_literal_formulas():
    s = np.array([0.0, 0.3, 1.0, 4.0])
    assert phase_solution(CASE_PARAMS[PhaseCase.CASE1], s) == pytest.approx(-2 * np.arctan(2 * s * S1))
    s2 = np.array([0.0, 0.2, 0.4])  # before the pole at 1/(2 sin sigma)
    assert phase_solution(CASE_PARAMS[PhaseCase.CASE2], s2) == pytest.approx(2 * np.arctan(1 / (1 - 2 * s2 * S1)))


def test_case4_formula_and_limit():
    p = CASE_PARAMS[PhaseCase.CASE4]
    lam = math.sqrt(-p.discriminant)
    s = np.linspace(-5, 5, 11)
    ratio = math.sqrt((2 * S1 - p.qbar) / (2 * S1 + p.qbar))
    assert phase_solution(p, s) == pytest.approx(-2 * np.arctan(ratio * np.tanh(0.5 * lam * s)))
    far = phase_solution(p, np.array([40.0, 80.0, -80.0]))
    assert far[0] == pytest.approx(far[1], abs=1e-12)
    assert far[1] == pytest.approx(-2 * math.atan(ratio)) and far[2] == pytest.approx(2 * math.atan(ratio))


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_phase_solves_its_ode(case, params):
    s = np.linspace(0.05, 8.0, 60)
    U = phase_solution(params, s)
    dU = derivative(lambda t: phase_solution(params, t)[:, None], s)[:, 0]
    assert np.abs(dU - (params.qbar - 2 * params.sin_sigma * np.cos(U))).max() < 1e-7
    assert np.abs(np.diff(phase_solution(params, np.linspace(0, 8, 4001)))).max() < 0.1


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_phase_general_agrees_with_case_formula(case, params):
    s = np.linspace(-3, 9, 97)
    u0 = math.pi / 2 if case is PhaseCase.CASE2 else 0.0
    assert np.abs(phase_general(params, s, u0) - phase_solution(params, s)).max() < 1e-9


def test_case3_negative_qbar_runs_backwards():
    p = MagneticParams(-3.0, 1.0)
    U = phase_solution(p, np.linspace(0, 10, 200))
    assert classify_case(p) is PhaseCase.CASE3 and np.all(np.diff(U) < 0)


def test_reconstruction_example_circle():
    c = reconstruct_curve(MagneticParams(3.0, math.pi / 2))
    assert c.recon.rbar == 1.0
    pts = c(np.linspace(0, 10, 2001))
    assert pts[:, 1].min() == pytest.approx(1.0) and pts[:, 1].max() == pytest.approx(5.0, abs=1e-5)
    assert np.abs(pts[:, 0] ** 2 + (pts[:, 1] - 3) ** 2 - 4).max() < 1e-12


def test_reconstruction_initial_point():
    p = MagneticParams(2.7, 0.9)
    c = ClosedFormTrajectory(p, ReconstructionParams(0.8, 1.5, -0.3), lambda s: phase_solution(p, s))
    x, y, th = c(0.0)[0]
    assert (x, y, th) == pytest.approx((1.5, 0.8 * (p.qbar - 2 * p.sin_sigma), -0.3))


def test_wrong_rbar_sign_detected():
    p = CASE_PARAMS[PhaseCase.CASE1]
    with pytest.raises(NonpositiveYReached):
        reconstruct_curve(p, ReconstructionParams(rbar=1.0), s_check=np.linspace(0, 1, 5))


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_closed_form_invariants_and_lorentz(case, params):
    c = reconstruct_curve(params)
    s = np.linspace(0.0, 3.0, 31)
    pos, d1, _ = c.analytic_jet(s)
    from sl2mag.geometry import curve_kinematics

    v, _ = curve_kinematics(pos, d1, np.zeros_like(d1))
    assert np.abs(np.sum(v * v, axis=1) - 1).max() < 1e-12
    assert np.abs(v[:, 2] - params.cos_sigma).max() < 1e-12
    assert magnetic_residual(c.jet, s, params.q) < 1e-7


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_closed_form_matches_oracle(case, params):
    c = reconstruct_curve(params)
    o = integrate_oracle(c.initial_state(), params, 10.0)
    s = np.linspace(0, 10, 401)
    assert np.abs(c(s) - o(s)).max() < 1e-6
    sp, eta = o.invariants(s)
    assert np.abs(sp - 1).max() < 1e-8 and np.abs(eta - params.cos_sigma).max() < 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(-4, 4), st.floats(0.15, math.pi - 0.15), st.floats(-math.pi, math.pi),
       st.floats(-2, 2), st.floats(0.2, 3.0))
def test_general_trajectory_matches_oracle(q, sigma, u0, x0, y0):
    p = MagneticParams(q, sigma)
    init = TrajectoryState(x0, y0, 0.4, u0)
    try:
        c = general_trajectory(p, init)
    except StrengthTooSmall:
        return
    o = integrate_oracle(init, p, 4.0)
    s = np.linspace(0, 4, 81)
    scale = max(1.0, np.abs(o(s)).max())
    assert np.abs(c(s) - o(s)).max() < 1e-7 * scale


def test_frenet_curvatures_along_oracle():
    for q, sigma in [(2.5, 0.8), (-1.7, 2.0), (3.0, math.pi / 2), (0.6, 1.2)]:
        p = MagneticParams(q, sigma)
        o = integrate_oracle(TrajectoryState(0.0, 1.0, 0.0, 0.3), p, 4.0)
        k1, k2 = frenet_curvatures(o.jet, np.linspace(0.5, 3.5, 7))
        e1, e2 = expected_frenet(p)
        assert np.abs(k1 - e1).max() < 1e-6 and np.abs(k2 - e2).max() < 1e-6


@pytest.mark.parametrize("case, params", list(CASE_PARAMS.items()))
def test_projection_has_constant_curvature(case, params):
    c = reconstruct_curve(params)
    s = np.linspace(0.0, 3.0, 41)
    pos, d1, d2 = c.analytic_jet(s)
    S = params.sin_sigma
    kap = signed_curvature(pos[:, 0], pos[:, 1], d1[:, 0] / S, d1[:, 1] / S, d2[:, 0] / S ** 2, d2[:, 1] / S ** 2)
    assert np.abs(kap - params.qbar / S).max() < 1e-7


def test_legendre_examples():
    q = 3.0
    w = math.sqrt(q * q - 4)
    s = np.linspace(0, 6, 301)
    mu = legendre_mu(q, s)
    assert np.sin(mu) == pytest.approx(w * np.sin(w * s) / (q + 2 * np.cos(w * s)), abs=1e-12)
    L = legendre_trajectory(q, r=1.5, x0=0.4, theta0=0.2)
    assert L.period == pytest.approx(2 * math.pi / w)
    assert L(0.0)[0] == pytest.approx((0.4, 1.5 * (q / 2 - 1), 0.2))
    with pytest.raises(StrengthTooSmall):
        legendre_trajectory(2.0)


@pytest.mark.parametrize("q", [2.2, 3.0, -2.6])
def test_legendre_is_horizontal_and_magnetic(q):
    L = legendre_trajectory(q)
    s = np.linspace(0.1, 5.0, 25)
    from sl2mag.geometry import curve_kinematics

    v, _ = curve_kinematics(*L.jet(s))
    assert np.abs(v[:, 2]).max() < 1e-9
    assert magnetic_residual(L.jet, s, q) < 1e-7


@pytest.mark.parametrize("q", [2.4, 3.0])
def test_legendre_agrees_with_generic_path(q):
    p = MagneticParams(q, math.pi / 2)
    c = reconstruct_curve(p)
    L = legendre_trajectory(q, r=2 * c.recon.rbar)
    s = np.linspace(0, 9, 181)
    assert np.abs(L(s) - c(s)).max() < 1e-12


@pytest.mark.parametrize("q", [-2.3, -3.5])
def test_negative_legendre_agrees_with_generic_path(q):
    # the |q| curve run backwards starts at the bottom of its circle with phase pi
    L = legendre_trajectory(q, r=1.2, x0=0.3, theta0=0.1)
    x, y, th = L(0.0)[0]
    c = general_trajectory(MagneticParams(q, math.pi / 2), TrajectoryState(x, y, th, math.pi))
    s = np.linspace(0, 9, 181)
    assert np.abs(L(s) - c(s)).max() < 1e-11


def test_reeb_trajectory():
    R = reeb_trajectory(0.5, 2.0, 1.0, 1)
    pts = R(np.array([0.0, 2 * math.pi]))
    assert pts[0] == pytest.approx((0.5, 2.0, 1.0))
    assert pts[1][2] - pts[0][2] == pytest.approx(2 * math.pi)
    s = np.linspace(0, 1, 5)
    assert magnetic_residual(lambda t: (R(t), np.tile([0, 0, 1.0], (len(t), 1)), np.zeros((len(t), 3))), s, 7.0) == 0
    with pytest.raises(ValueError):
        reeb_trajectory(0, 1, 0, 2)


def test_oracle_reeb_and_geodesic():
    o = integrate_oracle(TrajectoryState(0.3, 2.0, 0.0), MagneticParams(1.3, 0.0), 5.0)
    pts = o(np.linspace(0, 5, 11))
    assert np.allclose(pts[:, :2], [0.3, 2.0], atol=1e-12)
    assert np.allclose(pts[:, 2], np.linspace(0, 5, 11), atol=1e-10)
    g = integrate_oracle(TrajectoryState(0.0, 1.0, 0.0, math.pi / 2), MagneticParams(0.0, math.pi / 2), 2.0)
    s = np.linspace(0, 2, 9)
    x, y, th = iwasawa_arrays(exp_curve(E3, s))
    assert np.abs(g(s) - np.column_stack([x, y, th])).max() < 1e-9


def test_oracle_detects_boundary():
    with pytest.raises(StepUnderflow):
        integrate_oracle(TrajectoryState(0, 1, 0, -math.pi / 2), MagneticParams(0, math.pi / 2), 400.0)


def test_equilibrium_phase_has_no_closed_form():
    # qbar = 2 sin(sigma) with U = 0 is a fixed point of the phase equation
    with pytest.raises(StrengthTooSmall):
        general_trajectory(MagneticParams(2.0, math.pi / 2), TrajectoryState(0, 1, 0, 0.0))
