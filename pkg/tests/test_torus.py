"""Tests of the 3-torus infinite-conductivity machinery."""

import numpy as np
import pytest

from magflow import torus
from magflow.core import rhs_eulerian
from magflow.errors import ContractViolationError
from magflow.torus import (
    Fourier3DVectorField,
    ICConfig,
    VOLUME,
    bracket_ic,
    cocycle_ic,
    curl,
    divergence_norm,
    energy3d,
    from_function,
    from_grid,
    ic_rhs,
    ic_system,
    l2_inner,
    leray_project,
    lorentz_ic,
    nonlinear_convective,
    nonlinear_rotational,
    random_divfree_field,
    to_grid,
)

K = 4
ZERO = lambda x, y, z: np.zeros_like(x)


def test_grid_roundtrip():
    rng = np.random.default_rng(0)
    f = random_divfree_field(K, K, rng)
    back = from_grid(to_grid(f), K)
    assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-14


def test_random_field_is_divergence_free():
    rng = np.random.default_rng(1)
    for _ in range(5):
        f = random_divfree_field(K, 3, rng)
        assert divergence_norm(f) < 1e-13


def test_curl_of_shear():
    f = from_function(lambda x, y, z: np.sin(z), ZERO, ZERO, K)
    w = curl(f)
    expect = from_function(ZERO, lambda x, y, z: np.cos(z), ZERO, K)
    assert np.max(np.abs(w.coeffs - expect.coeffs)) < 1e-14


def test_leray_projection_removes_gradients():
    # grad(sin x sin y sin z) projects to zero; solenoidal fields are fixed
    g = from_function(
        lambda x, y, z: np.cos(x) * np.sin(y) * np.sin(z),
        lambda x, y, z: np.sin(x) * np.cos(y) * np.sin(z),
        lambda x, y, z: np.sin(x) * np.sin(y) * np.cos(z),
        K,
    )
    assert np.max(np.abs(leray_project(g).coeffs)) < 1e-14
    rng = np.random.default_rng(2)
    f = random_divfree_field(K, 3, rng)
    assert np.max(np.abs(leray_project(f).coeffs - f.coeffs)) < 1e-14


def test_leray_is_idempotent_and_l2_orthogonal():
    rng = np.random.default_rng(3)
    raw = Fourier3DVectorField(
        rng.standard_normal((3, 10, 10, 6)) + 1j * rng.standard_normal((3, 10, 10, 6)),
        K,
    )
    raw = torus.truncate(raw)
    p1 = leray_project(raw)
    p2 = leray_project(p1)
    assert np.max(np.abs(p2.coeffs - p1.coeffs)) < 1e-13
    # the removed part is L2-orthogonal to every divergence-free field
    rem = Fourier3DVectorField(raw.coeffs - p1.coeffs, K)
    f = random_divfree_field(K, 3, rng)
    scale = np.sqrt(l2_inner(rem, rem) * l2_inner(f, f))
    assert abs(l2_inner(rem, f)) < 1e-13 * scale


def test_energy_of_shear():
    # (1/2) * integral of sin^2 z over the (2 pi)^3 torus
    f = from_function(lambda x, y, z: np.sin(z), ZERO, ZERO, K)
    assert abs(energy3d(f) - 0.5 * VOLUME / 2.0) < 1e-12


def test_rotational_matches_convective_on_divfree_fields():
    rng = np.random.default_rng(4)
    for _ in range(5):
        u = random_divfree_field(K, 2, rng, amplitude=0.7)
        a = nonlinear_rotational(u)
        b = nonlinear_convective(u)
        assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-13


def test_rotational_form_is_energy_neutral():
    rng = np.random.default_rng(5)
    for _ in range(5):
        u = random_divfree_field(K, 2, rng, amplitude=0.7)
        adv = nonlinear_rotational(u)
        assert abs(l2_inner(adv, u)) < 1e-12


def test_lorentz_constant_b_matches_grid_path():
    rng = np.random.default_rng(6)
    u = random_divfree_field(K, 3, rng, amplitude=0.7)
    fast = lorentz_ic(u, ICConfig(B=(0.3, -0.2, 1.1), a=1.0, K=K))
    ones = lambda x: np.ones_like(x)
    Bf = from_function(
        lambda x, y, z: 0.3 * ones(x),
        lambda x, y, z: -0.2 * ones(x),
        lambda x, y, z: 1.1 * ones(x),
        K,
    )
    slow = lorentz_ic(u, ICConfig(B=Bf, a=1.0, K=K))
    assert np.max(np.abs(fast.coeffs - slow.coeffs)) < 1e-14


def test_lorentz_output_is_divergence_free():
    rng = np.random.default_rng(7)
    u = random_divfree_field(K, 3, rng)
    y = lorentz_ic(u, ICConfig(B=(0.0, 0.0, 1.0), a=1.0, K=K))
    assert divergence_norm(y) < 1e-13


def test_ic_rhs_shear_in_vertical_field():
    # u = (sin z, 0, 0), B = e_z: du/dt = (0, -sin z, 0)
    u = from_function(lambda x, y, z: np.sin(z), ZERO, ZERO, K)
    r = ic_rhs(u, ICConfig(B=(0.0, 0.0, 1.0), a=1.0, K=K))
    expect = from_function(ZERO, lambda x, y, z: -np.sin(z), ZERO, K)
    assert np.max(np.abs(r.coeffs - expect.coeffs)) < 1e-13


def test_shear_is_steady_without_magnetic_field():
    u = from_function(
        lambda x, y, z: np.sin(z) + 0.5 * np.cos(2 * z), ZERO, ZERO, K
    ).coeffs
    sys = ic_system(ICConfig(B=(0.0, 0.0, 1.0), a=0.0, K=K))
    assert np.max(np.abs(rhs_eulerian(sys, u))) < 1e-12


def test_cocycle_antisymmetry_and_pairing():
    rng = np.random.default_rng(8)
    cfg = ICConfig(B=(0.4, 0.1, -0.8), a=1.0, K=K)
    for _ in range(5):
        u = random_divfree_field(K, 2, rng)
        v = random_divfree_field(K, 2, rng)
        c = cocycle_ic(u, v, cfg)
        assert abs(c + cocycle_ic(v, u, cfg)) < 1e-12
        y = lorentz_ic(u, cfg)
        assert abs(l2_inner(y, v) - c) < 1e-12


def test_bracket_closes_on_divfree_fields():
    rng = np.random.default_rng(9)
    u = random_divfree_field(K, 2, rng)
    v = random_divfree_field(K, 2, rng)
    br = bracket_ic(u, v)
    assert divergence_norm(br) < 1e-12


def test_config_validates_b():
    with pytest.raises(ContractViolationError):
        ICConfig(B=(1.0, 2.0), K=K)
    with pytest.raises(ContractViolationError):
        ICConfig(K=0)


def test_shear_rotation_frequency():
    # p' = a b q, q' = -a b p for the two horizontal amplitudes of sin z
    from magflow.integrators import IntegratorConfig, evolve

    a, b, T = 0.8, 1.2, 1.0
    cfg = ICConfig(B=(0.0, 0.0, b), a=a, K=K)
    sys = ic_system(cfg)
    u0 = from_function(lambda x, y, z: np.sin(z), ZERO, ZERO, K).coeffs
    traj, _ = evolve(sys, u0, IntegratorConfig(dt=2e-3, t_end=T, scheme="rk4",
                                               monitor_stride=1000))
    th = a * b * T
    expect = from_function(
        lambda x, y, z: np.cos(th) * np.sin(z),
        lambda x, y, z: -np.sin(th) * np.sin(z),
        ZERO, K,
    )
    assert np.max(np.abs(traj[-1][1] - expect.coeffs)) < 1e-8
