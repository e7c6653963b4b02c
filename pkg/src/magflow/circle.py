"""Fourier pseudo-spectral systems on the circle.

Realizes the H^1_{alpha,beta} family of right-invariant metrics on the
diffeomorphism group of the circle together with the Gelfand-Fuchs magnetic
term.  The named presets cover Burgers (alpha=1, beta=0, a=0), KdV
(alpha=1, beta=0), Camassa-Holm (alpha=beta=1, a=0) and the generalized
Camassa-Holm equation (alpha=beta=1).

A real periodic field is stored by its complex Fourier coefficients
c_k for k = 0..K (negative modes implied by Hermitian symmetry), so

    u(x) = c_0 + sum_{k=1}^{K} ( c_k e^{2 pi i k x / L} + c.c. ).

All quadratic products are evaluated on a zero-padded grid (3/2-rule) and
are therefore alias-free; every integral below is exact quadrature of a
trigonometric polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FlowSystem
from .errors import ContractViolationError, SingularInertiaError

Array = np.ndarray


@dataclass
class Fourier1DField:
    """Complex Fourier coefficients (k = 0..K) of a real field of period L."""

    coeffs: Array
    period: float = 2.0 * np.pi

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ContractViolationError("coeffs must be a nonempty 1D array")
        if self.period <= 0:
            raise ContractViolationError("period must be positive")

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    def copy(self) -> "Fourier1DField":
        return Fourier1DField(self.coeffs.copy(), self.period)

    def wavenumbers(self) -> Array:
        """Physical wavenumbers 2 pi k / L for k = 0..K."""
        return 2.0 * np.pi * np.arange(self.K + 1) / self.period

    def grid_values(self, n: int | None = None) -> Array:
        """Sample the field on n uniform points (default 2K+1)."""
        n = n if n is not None else 2 * self.K + 1
        spec = np.zeros(n // 2 + 1, dtype=complex)
        m = min(self.K, n // 2)
        spec[: m + 1] = self.coeffs[: m + 1]
        return np.fft.irfft(spec, n=n) * n

    @staticmethod
    def from_grid(values: Array, K: int, period: float = 2.0 * np.pi) -> "Fourier1DField":
        values = np.asarray(values, dtype=float)
        spec = np.fft.rfft(values) / values.size
        c = np.zeros(K + 1, dtype=complex)
        m = min(K, spec.size - 1)
        c[: m + 1] = spec[: m + 1]
        return Fourier1DField(c, period)

    @staticmethod
    def from_function(f, K: int, period: float = 2.0 * np.pi, ngrid: int | None = None) -> "Fourier1DField":
        n = ngrid if ngrid is not None else 4 * K + 5
        x = np.arange(n) * (period / n)
        return Fourier1DField.from_grid(f(x), K, period)


@dataclass
class CircleSystemConfig:
    alpha: float = 1.0
    beta: float = 0.0
    a: float = 0.0
    K: int = 128
    L: float = 2.0 * np.pi
    dealias: bool = True

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ContractViolationError("alpha and beta must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ContractViolationError("(alpha, beta) = (0, 0) is degenerate")
        if self.beta == 0 and self.alpha <= 0:
            raise ContractViolationError("beta = 0 requires alpha > 0")
        if self.K < 1:
            raise ContractViolationError("K must be a positive integer")
        if self.L <= 0:
            raise ContractViolationError("L must be positive")


PRESETS = {
    "burgers": dict(alpha=1.0, beta=0.0, a=0.0),
    "kdv": dict(alpha=1.0, beta=0.0),
    "ch": dict(alpha=1.0, beta=1.0, a=0.0),
    "gch": dict(alpha=1.0, beta=1.0),
}


def preset_config(name: str, a: float = 0.0, K: int = 128, L: float = 2.0 * np.pi,
                  dealias: bool = True) -> CircleSystemConfig:
    if name not in PRESETS:
        raise ContractViolationError(f"unknown circle preset {name!r}")
    params = dict(PRESETS[name])
    if "a" not in params:
        params["a"] = a
    return CircleSystemConfig(K=K, L=L, dealias=dealias, **params)


# ---------------------------------------------------------------------------
# Field operations
# ---------------------------------------------------------------------------

def _same_layout(f: Fourier1DField, g: Fourier1DField):
    if f.K != g.K or f.period != g.period:
        raise ContractViolationError("fields must share truncation and period")


def derivative(f: Fourier1DField, order: int) -> Fourier1DField:
    """Spectral derivative: multiply c_k by (2 pi i k / L)^order."""
    ik = 1j * f.wavenumbers()
    return Fourier1DField(f.coeffs * ik**order, f.period)


def _product_grid_size(K: int, dealias: bool) -> int:
    # Alias-free truncated quadratic product needs >= 3K+1 points.
    return 3 * K + 2 if dealias else 2 * K + 1


def multiply_dealiased(f: Fourier1DField, g: Fourier1DField, dealias: bool = True) -> Fourier1DField:
    """Pointwise product of two trigonometric polynomials, truncated to K.

    With ``dealias`` the product is computed on a 3/2-padded grid and is the
    exact truncated convolution of the coefficient arrays.
    """
    _same_layout(f, g)
    n = _product_grid_size(f.K, dealias)
    prod = f.grid_values(n) * g.grid_values(n)
    return Fourier1DField.from_grid(prod, f.K, f.period)


def convolve_reference(f: Fourier1DField, g: Fourier1DField) -> Fourier1DField:
    """Direct O(K^2) coefficient convolution (oracle for multiply_dealiased)."""
    _same_layout(f, g)
    K = f.K
    full = lambda c: np.concatenate([np.conj(c[1:][::-1]), c])  # k = -K..K
    a, b = full(f.coeffs), full(g.coeffs)
    out = np.zeros(K + 1, dtype=complex)
    for k in range(K + 1):
        # c_k = sum_{p+q=k} a_p b_q with p, q in [-K, K]
        s = 0.0 + 0.0j
        for p in range(max(-K, k - K), min(K, k + K) + 1):
            q = k - p
            if -K <= q <= K:
                s += a[p + K] * b[q + K]
        out[k] = s
    return Fourier1DField(out, f.period)


def l2_pair(f: Fourier1DField, g: Fourier1DField) -> float:
    """Exact quadrature of the L2 pairing: integral of f*g over the circle."""
    _same_layout(f, g)
    c, d = f.coeffs, g.coeffs
    s = c[0].real * d[0].real + 2.0 * np.sum((c[1:] * np.conj(d[1:])).real)
    return float(f.period * s)


def mean(f: Fourier1DField) -> float:
    """Integral of the field over the circle."""
    return float(f.period * f.coeffs[0].real)


def h1ab_inner(f: Fourier1DField, g: Fourier1DField, cfg: CircleSystemConfig) -> float:
    """H^1_{alpha,beta} inner product: integral of alpha f g + beta f_x g_x."""
    val = cfg.alpha * l2_pair(f, g)
    if cfg.beta != 0.0:
        val += cfg.beta * l2_pair(derivative(f, 1), derivative(g, 1))
    return val


def inertia_symbol(cfg: CircleSystemConfig) -> Array:
    k = 2.0 * np.pi * np.arange(cfg.K + 1) / cfg.L
    return cfg.alpha + cfg.beta * k**2


def apply_inertia_ab(f: Fourier1DField, cfg: CircleSystemConfig) -> Fourier1DField:
    """Inertia operator alpha - beta d^2/dx^2, diagonal in Fourier space."""
    return Fourier1DField(f.coeffs * inertia_symbol(cfg), f.period)


def solve_inertia_ab(m: Fourier1DField, cfg: CircleSystemConfig) -> Fourier1DField:
    sym = inertia_symbol(cfg)
    bad = np.nonzero(sym == 0.0)[0]
    if bad.size:
        k = int(bad[0])
        if abs(m.coeffs[k]) > 0:
            raise SingularInertiaError(k)
        out = m.coeffs.copy()
        nz = sym != 0.0
        out[nz] = out[nz] / sym[nz]
        return Fourier1DField(out, m.period)
    return Fourier1DField(m.coeffs / sym, m.period)


def gelfand_fuchs(f: Fourier1DField, g: Fourier1DField) -> float:
    """Gelfand-Fuchs cocycle: integral of f * g_xxx."""
    return l2_pair(f, derivative(g, 3))


def adT_self_circle(u: Fourier1DField, cfg: CircleSystemConfig) -> Fourier1DField:
    """Transpose-adjoint operator applied to itself:

        A^{-1}( 3 alpha u u_x - 2 beta u_x u_xx - beta u u_xxx ).

    The argument of A^{-1} is an exact x-derivative,

        d/dx ( (3 alpha / 2) u^2 - beta ( u u_xx + u_x^2 / 2 ) ),

    and is evaluated in that form so the zero mode vanishes identically
    (exact conservation of the mean).
    """
    n = _product_grid_size(u.K, cfg.dealias)
    ug = u.grid_values(n)
    if cfg.beta != 0.0:
        uxg = derivative(u, 1).grid_values(n)
        uxxg = derivative(u, 2).grid_values(n)
        g = 1.5 * cfg.alpha * ug * ug - cfg.beta * (ug * uxxg + 0.5 * uxg * uxg)
    else:
        g = 1.5 * cfg.alpha * ug * ug
    gf = Fourier1DField.from_grid(g, u.K, u.period)
    return solve_inertia_ab(derivative(gf, 1), cfg)


def lorentz_gf(u: Fourier1DField, cfg: CircleSystemConfig) -> Fourier1DField:
    """Lorentz force of the Gelfand-Fuchs magnetic term: -A^{-1}(u_xxx)."""
    out = solve_inertia_ab(derivative(u, 3), cfg)
    return Fourier1DField(-out.coeffs, u.period)


def bracket_circle(u: Fourier1DField, v: Fourier1DField, dealias: bool = True) -> Fourier1DField:
    """Lie bracket in the right-invariant orientation: v u_x - u v_x."""
    t1 = multiply_dealiased(v, derivative(u, 1), dealias)
    t2 = multiply_dealiased(u, derivative(v, 1), dealias)
    return Fourier1DField(t1.coeffs - t2.coeffs, u.period)


def circle_rhs(u: Fourier1DField, cfg: CircleSystemConfig) -> Fourier1DField:
    """Full right-hand side -ad^T_u u + a A^{-1}(u_xxx)."""
    adT = adT_self_circle(u, cfg)
    disp = solve_inertia_ab(derivative(u, 3), cfg)
    return Fourier1DField(-adT.coeffs + cfg.a * disp.coeffs, u.period)


def linear_symbol(cfg: CircleSystemConfig) -> Array:
    """Per-mode multiplier of the linear (dispersive) part of the rhs."""
    k = 2.0 * np.pi * np.arange(cfg.K + 1) / cfg.L
    return cfg.a * (1j * k) ** 3 / inertia_symbol(cfg)


# ---------------------------------------------------------------------------
# Brute-force oracle for the transpose-adjoint operator
# ---------------------------------------------------------------------------

def bandwidth(u: Fourier1DField, tol: float = 0.0) -> int:
    nz = np.nonzero(np.abs(u.coeffs) > tol)[0]
    return int(nz[-1]) if nz.size else 0


def galerkin_adT_oracle(u: Fourier1DField, cfg: CircleSystemConfig, K_test: int) -> Fourier1DField:
    """Solve for ad^T_u u from its defining identity by brute force.

    Assembles the Gram matrix of the H^1_{alpha,beta} inner product on the
    real trigonometric basis up to K_test and the load vector
    w |-> <u, [u, w]>, then solves the dense linear system.  Independent of
    the closed-form expression in :func:`adT_self_circle`.
    """
    if K_test < 2 * bandwidth(u):
        raise ContractViolationError("K_test must cover twice the bandwidth of u")
    nb = 2 * K_test + 1

    def basis(j: int) -> Fourier1DField:
        c = np.zeros(K_test + 1, dtype=complex)
        if j == 0:
            c[0] = 1.0
        elif j % 2 == 1:
            c[(j + 1) // 2] = 0.5          # cos(k x)
        else:
            c[j // 2] = -0.5j              # sin(k x)
        return Fourier1DField(c, u.period)

    cfg_t = CircleSystemConfig(alpha=cfg.alpha, beta=cfg.beta, a=cfg.a,
                               K=K_test, L=cfg.L, dealias=True)
    if u.K >= K_test:
        u_t = Fourier1DField(u.coeffs[: K_test + 1], u.period)
    else:
        u_t = Fourier1DField(np.pad(u.coeffs, (0, K_test - u.K)), u.period)

    G = np.zeros((nb, nb))
    b = np.zeros(nb)
    fields = [basis(j) for j in range(nb)]
    for i in range(nb):
        for j in range(i, nb):
            G[i, j] = G[j, i] = h1ab_inner(fields[i], fields[j], cfg_t)
    for j in range(nb):
        b[j] = h1ab_inner(u_t, bracket_circle(u_t, fields[j]), cfg_t)

    x = np.linalg.solve(G, b)
    c = np.zeros(K_test + 1, dtype=complex)
    c[0] = x[0]
    for k in range(1, K_test + 1):
        c[k] = 0.5 * x[2 * k - 1] - 0.5j * x[2 * k]
    out = np.zeros(u.K + 1, dtype=complex)
    m = min(u.K, K_test)
    out[: m + 1] = c[: m + 1]
    return Fourier1DField(out, u.period)


# ---------------------------------------------------------------------------
# FlowSystem assembly
# ---------------------------------------------------------------------------

def random_field(K: int, bandwidth: int, rng: np.random.Generator,
                 amplitude: float = 1.0, period: float = 2.0 * np.pi,
                 zero_mean: bool = False) -> Fourier1DField:
    """Random real band-limited field with modes up to ``bandwidth``."""
    c = np.zeros(K + 1, dtype=complex)
    m = min(bandwidth, K)
    c[: m + 1] = rng.standard_normal(m + 1) + 1j * rng.standard_normal(m + 1)
    c[0] = c[0].real
    if zero_mean:
        c[0] = 0.0
    scale = amplitude / max(np.abs(c).max(), 1e-300)
    return Fourier1DField(c * scale, period)


def circle_system(cfg: CircleSystemConfig, linear_only: bool = False,
                  name: str | None = None) -> FlowSystem:
    """Assemble the FlowSystem for one circle configuration.

    ``linear_only`` disables the nonlinear transport term, leaving the pure
    dispersion flow (used by the exact phase checks).
    """
    L = cfg.L

    def wrap(c):
        return Fourier1DField(c, L)

    def adT(c):
        if linear_only:
            return np.zeros_like(c)
        return adT_self_circle(wrap(c), cfg).coeffs

    def diag(c):
        return {"mean": mean(wrap(c))}

    return FlowSystem(
        name=name or f"circle(alpha={cfg.alpha},beta={cfg.beta})",
        dim=2 * cfg.K + 1,
        strength=cfg.a,
        inner_product=lambda c, d: h1ab_inner(wrap(c), wrap(d), cfg),
        pairing=lambda c, d: l2_pair(wrap(c), wrap(d)),
        apply_inertia=lambda c: apply_inertia_ab(wrap(c), cfg).coeffs,
        solve_inertia=lambda c: solve_inertia_ab(wrap(c), cfg).coeffs,
        adT_self=adT,
        lorentz=lambda c: lorentz_gf(wrap(c), cfg).coeffs,
        cocycle=lambda c, d: gelfand_fuchs(wrap(c), wrap(d)),
        bracket=lambda c, d: bracket_circle(wrap(c), wrap(d), cfg.dealias).coeffs,
        linear_symbol=linear_symbol(cfg),
        diagnostics=diag,
        state_shape=(cfg.K + 1,),
    )


def preset_system(preset: str, a: float = 0.0, K: int = 128,
                  L: float = 2.0 * np.pi, dealias: bool = True,
                  linear_only: bool = False) -> FlowSystem:
    cfg = preset_config(preset, a=a, K=K, L=L, dealias=dealias)
    return circle_system(cfg, linear_only=linear_only, name=preset)
