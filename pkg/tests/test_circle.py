"""Tests of the Fourier pseudo-spectral circle systems (Burgers, KdV,
Camassa-Holm, generalized Camassa-Holm)."""

import numpy as np
import pytest

from magflow import circle
from magflow.circle import (
    CircleSystemConfig,
    Fourier1DField,
    adT_self_circle,
    apply_inertia_ab,
    bracket_circle,
    circle_rhs,
    convolve_reference,
    derivative,
    galerkin_adT_oracle,
    gelfand_fuchs,
    h1ab_inner,
    l2_pair,
    linear_symbol,
    lorentz_gf,
    mean,
    multiply_dealiased,
    preset_config,
    solve_inertia_ab,
)
from magflow.errors import ContractViolationError, SingularInertiaError


def test_grid_roundtrip():
    rng = np.random.default_rng(0)
    f = circle.random_field(16, 16, rng)
    g = Fourier1DField.from_grid(f.grid_values(), 16)
    assert np.max(np.abs(f.coeffs - g.coeffs)) < 1e-14


def test_from_function_sine():
    f = Fourier1DField.from_function(np.sin, 8)
    expect = np.zeros(9, dtype=complex)
    expect[1] = -0.5j
    assert np.max(np.abs(f.coeffs - expect)) < 1e-15


def test_derivative_of_sine_is_cosine():
    f = Fourier1DField.from_function(np.sin, 8)
    g = derivative(f, 1)
    expect = Fourier1DField.from_function(np.cos, 8)
    assert np.max(np.abs(g.coeffs - expect.coeffs)) < 1e-14


def test_dealiased_product_matches_reference_convolution():
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = circle.random_field(24, 24, rng)
        g = circle.random_field(24, 24, rng)
        fast = multiply_dealiased(f, g)
        slow = convolve_reference(f, g)
        assert np.max(np.abs(fast.coeffs - slow.coeffs)) < 1e-13


def test_product_without_dealiasing_aliases_high_modes():
    # two pure modes at K: the alias-free product truncates their beat mode
    K = 8
    f = Fourier1DField(np.eye(K + 1)[K] * (0.5 + 0j))
    clean = multiply_dealiased(f, f, dealias=True)
    dirty = multiply_dealiased(f, f, dealias=False)
    # dealiased: only the k=0 part of cos(Kx)^2 survives inside the truncation
    assert abs(clean.coeffs[0] - 0.5) < 1e-14
    assert np.max(np.abs(clean.coeffs[1:])) < 1e-14
    # aliasing folds the 2K mode somewhere into the truncation
    assert not np.allclose(dirty.coeffs, clean.coeffs)


def test_l2_pair_matches_quadrature():
    rng = np.random.default_rng(2)
    f = circle.random_field(16, 16, rng)
    g = circle.random_field(16, 16, rng)
    n = 64
    quad = np.mean(f.grid_values(n) * g.grid_values(n)) * f.period
    assert abs(l2_pair(f, g) - quad) < 1e-12


def test_inertia_roundtrip_and_symbol():
    cfg = CircleSystemConfig(alpha=2.0, beta=0.5, K=16)
    rng = np.random.default_rng(3)
    f = circle.random_field(16, 16, rng)
    back = solve_inertia_ab(apply_inertia_ab(f, cfg), cfg)
    assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-14
    # u = sin x: A u = (alpha + beta) sin x
    s = Fourier1DField.from_function(np.sin, 16)
    au = apply_inertia_ab(s, cfg)
    assert np.max(np.abs(au.coeffs - 2.5 * s.coeffs)) < 1e-14


def test_singular_inertia_reports_mode():
    cfg = CircleSystemConfig(alpha=0.0, beta=1.0, K=8)
    f = Fourier1DField(np.ones(9, dtype=complex))
    with pytest.raises(SingularInertiaError) as err:
        solve_inertia_ab(f, cfg)
    assert err.value.mode == 0


def test_h1ab_inner_positive_definite():
    cfg = CircleSystemConfig(alpha=1.0, beta=1.0, K=16)
    rng = np.random.default_rng(4)
    for _ in range(10):
        f = circle.random_field(16, 16, rng)
        assert h1ab_inner(f, f, cfg) > 0


def test_gelfand_fuchs_antisymmetry():
    rng = np.random.default_rng(5)
    for _ in range(20):
        f = circle.random_field(24, 24, rng)
        g = circle.random_field(24, 24, rng)
        s = abs(gelfand_fuchs(f, g) + gelfand_fuchs(g, f))
        # the cocycle carries three derivatives, so normalize by its size
        scale = max(abs(gelfand_fuchs(f, g)), 1.0)
        assert s < 1e-12 * scale


def test_gelfand_fuchs_known_value():
    # integral over [0, 2*pi] of sin x * (cos x)''' = integral sin^2 = pi
    f = Fourier1DField.from_function(np.sin, 8)
    g = Fourier1DField.from_function(np.cos, 8)
    assert abs(gelfand_fuchs(f, g) - np.pi) < 1e-13


def test_adT_of_cosine_burgers():
    # alpha=1, beta=0: ad^T_u u = 3 u u_x; u = cos x gives -(3/2) sin 2x
    cfg = CircleSystemConfig(alpha=1.0, beta=0.0, K=16)
    u = Fourier1DField.from_function(np.cos, 16)
    out = adT_self_circle(u, cfg)
    expect = Fourier1DField.from_function(lambda x: -1.5 * np.sin(2 * x), 16)
    assert np.max(np.abs(out.coeffs - expect.coeffs)) < 1e-14


def test_adT_matches_galerkin_oracle():
    rng = np.random.default_rng(6)
    for alpha, beta in ((1.0, 0.0), (1.0, 1.0), (2.0, 0.5)):
        cfg = CircleSystemConfig(alpha=alpha, beta=beta, K=24)
        u = circle.random_field(24, 8, rng, amplitude=0.5)
        fast = adT_self_circle(u, cfg)
        oracle = galerkin_adT_oracle(u, cfg, K_test=24)
        assert np.max(np.abs(fast.coeffs - oracle.coeffs)) < 1e-12


def test_adjoint_identity_against_bracket():
    rng = np.random.default_rng(7)
    cfg = CircleSystemConfig(alpha=1.0, beta=1.0, K=30)
    for _ in range(20):
        u = circle.random_field(30, 10, rng, amplitude=0.5)
        w = circle.random_field(30, 10, rng, amplitude=0.5)
        lhs = h1ab_inner(adT_self_circle(u, cfg), w, cfg)
        rhs = h1ab_inner(u, bracket_circle(u, w), cfg)
        assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)


def test_lorentz_skewness_and_cocycle_pairing():
    rng = np.random.default_rng(8)
    cfg = CircleSystemConfig(alpha=1.0, beta=0.0, K=24)
    for _ in range(20):
        u = circle.random_field(24, 8, rng, amplitude=0.5)
        v = circle.random_field(24, 8, rng, amplitude=0.5)
        y = lorentz_gf(u, cfg)
        assert abs(h1ab_inner(y, u, cfg)) < 1e-12
        assert abs(h1ab_inner(y, v, cfg) - gelfand_fuchs(u, v)) < 1e-12


def test_kdv_rhs_on_small_cosine():
    # rhs = -3 u u_x + a u_xxx for alpha=1, beta=0;
    # u = eps cos x: -3 u u_x = (3/2) eps^2 sin 2x, a u_xxx = a eps sin x
    eps, a = 0.1, 0.7
    cfg = CircleSystemConfig(alpha=1.0, beta=0.0, a=a, K=16)
    u = Fourier1DField.from_function(lambda x: eps * np.cos(x), 16)
    out = circle_rhs(u, cfg)
    expect = Fourier1DField.from_function(
        lambda x: 1.5 * eps**2 * np.sin(2 * x) + a * eps * np.sin(x), 16
    )
    assert np.max(np.abs(out.coeffs - expect.coeffs)) < 1e-13


def test_rhs_preserves_mean_exactly():
    rng = np.random.default_rng(9)
    cfg = CircleSystemConfig(alpha=1.0, beta=1.0, a=0.9, K=32)
    for _ in range(10):
        u = circle.random_field(32, 10, rng, amplitude=0.5)
        out = circle_rhs(u, cfg)
        assert mean(out) == 0.0


def test_linear_symbol_matches_dispersion_relation():
    cfg = CircleSystemConfig(alpha=1.0, beta=0.5, a=1.3, K=8)
    sym = linear_symbol(cfg)
    k = 2.0 * np.pi * np.arange(9) / cfg.L
    expect = cfg.a * (1j * k) ** 3 / (cfg.alpha + cfg.beta * k * k)
    assert np.max(np.abs(sym - expect)) < 1e-14


def test_presets():
    assert preset_config("burgers").a == 0.0
    assert preset_config("kdv", a=2.0).a == 2.0
    ch = preset_config("ch")
    assert ch.alpha == 1.0 and ch.beta == 1.0 and ch.a == 0.0
    gch = preset_config("gch", a=0.5)
    assert gch.beta == 1.0 and gch.a == 0.5
    with pytest.raises(ContractViolationError):
        preset_config("euler")


def test_config_validation():
    with pytest.raises(ContractViolationError):
        CircleSystemConfig(alpha=0.0, beta=0.0)
    with pytest.raises(ContractViolationError):
        CircleSystemConfig(alpha=-1.0)
    with pytest.raises(ContractViolationError):
        CircleSystemConfig(K=0)
    with pytest.raises(ContractViolationError):
        CircleSystemConfig(L=-1.0)
