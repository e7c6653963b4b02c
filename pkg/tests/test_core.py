"""Tests of the abstract system contract, integrators, and the central
extension, exercised mostly through the circle realization."""

import numpy as np
import pytest

from magflow import (
    FlowSystem,
    IntegratorConfig,
    energy,
    evolve,
    extend_central,
    extended_state,
    momentum_system,
    pairing_identity_residual,
    rhs_eulerian,
    rhs_momentum,
    rk4_step,
    split_extended_state,
)
from magflow.errors import (
    ContractViolationError,
    DivergenceError,
    UnsupportedSchemeError,
)
from magflow.integrators import if_rk4_step
from magflow import circle


def _kdv(K=32, a=1.0):
    return circle.preset_system("kdv", a=a, K=K)


def test_rhs_zero_state_is_zero():
    sys = _kdv()
    u = np.zeros(33, dtype=complex)
    assert np.all(rhs_eulerian(sys, u) == 0)


def test_rhs_constant_is_steady_for_kdv():
    sys = _kdv(a=2.5)
    u = np.zeros(33, dtype=complex)
    u[0] = 1.7
    assert np.max(np.abs(rhs_eulerian(sys, u))) < 1e-13


def test_rhs_unmagnetized_drops_lorentz_term():
    rng = np.random.default_rng(0)
    u = circle.random_field(32, 10, rng).coeffs
    sys = _kdv(a=0.0)
    expected = -sys.adT_self(u)
    np.testing.assert_array_equal(rhs_eulerian(sys, u), expected)


def test_rhs_dimension_mismatch_raises():
    sys = _kdv(K=32)
    with pytest.raises(ContractViolationError):
        rhs_eulerian(sys, np.zeros(17, dtype=complex))


def test_energy_of_sine_l2_metric():
    # u = sin x, alpha=1, beta=0 on period 2*pi: (1/2) * integral sin^2 = pi/2
    sys = circle.preset_system("burgers", K=32)
    u = np.zeros(33, dtype=complex)
    u[1] = -0.5j  # sin x
    assert abs(energy(sys, u) - np.pi / 2) < 1e-14


def test_energy_of_sine_h1_metric():
    # alpha=1, beta=1: (1/2) * integral (sin^2 + cos^2) = pi
    sys = circle.preset_system("ch", K=32)
    u = np.zeros(33, dtype=complex)
    u[1] = -0.5j
    assert abs(energy(sys, u) - np.pi) < 1e-14


def test_rk4_matches_degree4_taylor_on_linear_problem():
    lam = -0.37 + 0.21j
    sys = FlowSystem(
        name="scalar", dim=2, strength=0.0,
        inner_product=lambda u, v: float((u * np.conj(v)).real.sum()),
        pairing=lambda u, v: float((u * np.conj(v)).real.sum()),
        apply_inertia=lambda u: u, solve_inertia=lambda u: u,
        adT_self=lambda u: -lam * u, lorentz=lambda u: np.zeros_like(u),
        cocycle=lambda u, v: 0.0, bracket=lambda u, v: np.zeros_like(u),
    )
    u = np.array([1.0 + 0.0j])
    dt = 0.05
    z = lam * dt
    taylor = 1 + z + z**2 / 2 + z**3 / 6 + z**4 / 24
    out = rk4_step(sys, u, dt)
    assert abs(out[0] - taylor) < 1e-15


def test_if_rk4_exact_on_pure_linear_flow():
    cfg = circle.preset_config("kdv", a=1.0, K=16)
    sys = circle.circle_system(cfg, linear_only=True)
    u = np.zeros(17, dtype=complex)
    u[3] = 0.4 - 0.1j
    dt = 0.01
    out = if_rk4_step(sys, u, dt)
    exact = u * np.exp(sys.linear_symbol * dt)
    assert np.max(np.abs(out - exact)) < 1e-15


def test_if_rk4_requires_linear_symbol():
    sys = _kdv()
    sys.linear_symbol = None
    with pytest.raises(UnsupportedSchemeError):
        if_rk4_step(sys, np.zeros(33, dtype=complex), 0.01)


def test_evolve_zero_horizon_returns_initial():
    sys = _kdv()
    u0 = np.zeros(33, dtype=complex)
    u0[1] = 0.1
    traj, recs = evolve(sys, u0, IntegratorConfig(dt=0.01, t_end=0.0))
    assert len(traj) == 1 and len(recs) == 1
    np.testing.assert_array_equal(traj[0][1], u0)


def test_evolve_steady_state_keeps_energy_constant():
    sys = _kdv(a=1.0)
    u0 = np.zeros(33, dtype=complex)
    u0[0] = 0.8
    _, recs = evolve(sys, u0, IntegratorConfig(dt=0.01, t_end=0.5,
                                               scheme="if_rk4"))
    energies = [r.energy for r in recs]
    assert max(energies) == min(energies)


def test_evolve_lands_exactly_on_t_end():
    sys = _kdv(a=0.0)
    u0 = np.zeros(33, dtype=complex)
    u0[1] = 0.05
    # 0.25 is not an integer multiple of 0.004
    traj, _ = evolve(sys, u0, IntegratorConfig(dt=0.004, t_end=0.25))
    assert traj[-1][0] == 0.25


def test_evolve_reports_divergence_with_last_time():
    sys = circle.preset_system("burgers", K=128)
    u0 = np.zeros(129, dtype=complex)
    u0[1] = 1.0  # steep cosine: shock formation
    with pytest.raises(DivergenceError) as err:
        evolve(sys, u0, IntegratorConfig(dt=5e-3, t_end=10.0))
    assert err.value.t is not None
    assert err.value.last_state is not None
    assert np.all(np.isfinite(err.value.last_state))


def test_integrator_config_validation():
    with pytest.raises(ContractViolationError):
        IntegratorConfig(dt=-1.0, t_end=1.0)
    with pytest.raises(ContractViolationError):
        IntegratorConfig(dt=2.0, t_end=1.0)
    with pytest.raises(ContractViolationError):
        IntegratorConfig(dt=0.1, t_end=1.0, scheme="euler")
    with pytest.raises(ContractViolationError):
        IntegratorConfig(dt=0.1, t_end=1.0, monitor_stride=0)


def test_momentum_form_agrees_with_velocity_form():
    sys = circle.preset_system("gch", a=0.8, K=32)
    rng = np.random.default_rng(1)
    u = circle.random_field(32, 10, rng, amplitude=0.3).coeffs
    m = sys.apply_inertia(u)
    lhs = rhs_momentum(sys, m)
    rhs = sys.apply_inertia(rhs_eulerian(sys, u))
    assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_momentum_system_step_conjugates():
    sys = circle.preset_system("gch", a=0.8, K=32)
    rng = np.random.default_rng(2)
    u = circle.random_field(32, 10, rng, amplitude=0.3).coeffs
    dt = 1e-3
    u1 = rk4_step(sys, u, dt)
    m1 = rk4_step(momentum_system(sys), sys.apply_inertia(u), dt)
    scale = np.max(np.abs(m1))
    assert np.max(np.abs(m1 - sys.apply_inertia(u1))) < 1e-12 * scale


def test_extended_state_roundtrip():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    x = extended_state(u, 1.25)
    v, a = split_extended_state(x, (10,))
    np.testing.assert_array_equal(u, v)
    assert a == 1.25


def test_extension_zero_charge_matches_unmagnetized():
    sys = circle.preset_system("kdv", a=0.9, K=16)
    ext = extend_central(sys.with_strength(0.0), (17,))
    rng = np.random.default_rng(4)
    u = circle.random_field(16, 5, rng, amplitude=0.3).coeffs
    x = extended_state(u, 0.0)
    out, charge_dot = split_extended_state(rhs_eulerian(ext, x), (17,))
    np.testing.assert_array_equal(out, rhs_eulerian(sys.with_strength(0.0), u))
    assert charge_dot == 0.0


def test_extension_pure_charge_is_fixed_point():
    sys = circle.preset_system("kdv", a=1.0, K=16)
    ext = extend_central(sys.with_strength(0.0), (17,))
    x = extended_state(np.zeros(17, dtype=complex), 2.0)
    assert np.all(rhs_eulerian(ext, x) == 0)


def test_extension_trajectory_matches_magnetic_flow():
    a = 0.8
    sys = circle.preset_system("gch", a=a, K=16)
    ext = extend_central(sys.with_strength(0.0), (17,))
    rng = np.random.default_rng(5)
    u0 = circle.random_field(16, 5, rng, amplitude=0.3).coeffs
    cfg = IntegratorConfig(dt=1e-3, t_end=0.5, scheme="rk4")
    traj, _ = evolve(sys, u0, cfg)
    etraj, _ = evolve(ext, extended_state(u0, a), cfg)
    uT = traj[-1][1]
    vT, aT = split_extended_state(etraj[-1][1], (17,))
    assert np.max(np.abs(uT - vT)) < 1e-12 * np.max(np.abs(uT))
    assert aT == a


def test_pairing_residual_zero_state():
    sys = _kdv()
    rng = np.random.default_rng(6)
    w = circle.random_field(32, 10, rng).coeffs
    res, _ = pairing_identity_residual(sys, np.zeros(33, dtype=complex), w)
    assert res == 0.0


def test_pairing_residual_self_pairing_unmagnetized():
    sys = _kdv(a=0.0)
    rng = np.random.default_rng(7)
    u = circle.random_field(32, 10, rng, amplitude=0.4).coeffs
    res, _ = pairing_identity_residual(sys, u, u)
    assert res < 1e-13


def test_pairing_sign_is_consistently_negative():
    rng = np.random.default_rng(8)
    for preset, a in (("kdv", 1.0), ("gch", 0.7)):
        sys = circle.preset_system(preset, a=a, K=32)
        for _ in range(20):
            u = circle.random_field(32, 10, rng, amplitude=0.4).coeffs
            w = circle.random_field(32, 10, rng, amplitude=0.4).coeffs
            res, s = pairing_identity_residual(sys, u, w)
            assert res < 1e-10
            assert s == -1


def test_strength_scaling_equivalence():
    rng = np.random.default_rng(9)
    u = circle.random_field(32, 10, rng, amplitude=0.4).coeffs
    for a in (-2.0, 0.5, 3.0):
        sys = circle.preset_system("kdv", a=a, K=32)
        scaled = sys.scaled_cocycle(a).with_strength(1.0)
        np.testing.assert_array_equal(
            rhs_eulerian(sys, u), rhs_eulerian(scaled, u)
        )
