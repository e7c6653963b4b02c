"""Spherical-harmonic realization of the global quasi-geostrophic system.

Scalar fields on the unit sphere are stored by complex spherical-harmonic
coefficients c[l, m] for 0 <= m <= l <= Lmax (orthonormal basis, negative
orders implied by the reality condition).  The collocation grid pairs
Gauss-Legendre latitudes with uniform longitudes and carries enough points
that every quadratic product below is analyzed alias-free.

State variables: potential vorticity q and stream function psi = f related
by q = (gamma z^2 - Delta) f + a * phi with the correction field
phi = (2/Ro) z + 2 z h (h is the bottom topography).  The elliptic operator
gamma z^2 - Delta couples l to l +/- 2 at fixed m and is inverted by a
direct banded Cholesky factorization per order m.

Advection uses the standard Poisson bracket in (longitude, z) coordinates,
{f, g} = f_lambda g_z - f_z g_lambda, evaluated pseudo-spectrally with all
derivatives taken in spectral space (no finite differences near the poles).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .core import FlowSystem
from .errors import ContractViolationError, NonInvertibleModeError

Array = np.ndarray

SPHERE_AREA = 4.0 * np.pi


# ---------------------------------------------------------------------------
# Grid, Legendre tables, transforms
# ---------------------------------------------------------------------------

def _nlat_for(lmax: int) -> int:
    # exact quadrature for triple products of degree <= 3*lmax + 2
    return (3 * lmax + 4) // 2 + 1


def _nlon_for(lmax: int) -> int:
    # alias-free quadratic products in longitude need > 3*lmax points
    n = 3 * lmax + 3
    return n + (n % 2)


class SphereGrid:
    """Gauss-Legendre x uniform-longitude grid with Legendre tables.

    ``plm[l, m, j]`` holds the orthonormal associated Legendre function
    (unit norm on [-1, 1]) at node z_j; ``dplm`` its z-derivative.
    """

    def __init__(self, lmax: int, nlat: int | None = None, nlon: int | None = None):
        self.lmax = lmax
        self.nlat = nlat if nlat is not None else _nlat_for(lmax)
        self.nlon = nlon if nlon is not None else _nlon_for(lmax)
        if self.nlat < lmax + 1 or self.nlon < 2 * lmax + 1:
            raise ContractViolationError("grid too small for the truncation")
        self.z, self.weights = np.polynomial.legendre.leggauss(self.nlat)
        self.plm, self.dplm = _legendre_tables(lmax, self.z)

    def quad(self, gridvals: Array) -> float:
        """Exact integral over the sphere of a band-limited grid field."""
        lon_mean = gridvals.mean(axis=1)
        return float(2.0 * np.pi * np.dot(self.weights, lon_mean))


def _legendre_tables(lmax: int, z: Array):
    nlat = z.size
    plm = np.zeros((lmax + 1, lmax + 1, nlat))
    dplm = np.zeros_like(plm)
    s2 = 1.0 - z * z
    pmm = np.full(nlat, np.sqrt(0.5))
    for m in range(lmax + 1):
        plm[m, m] = pmm
        if m + 1 <= lmax:
            plm[m + 1, m] = np.sqrt(2 * m + 3.0) * z * pmm
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            plm[l, m] = a * (z * plm[l - 1, m] - b * plm[l - 2, m])
        if m + 1 <= lmax:
            pmm = np.sqrt((2 * m + 3.0) / (2 * m + 2.0)) * np.sqrt(s2) * pmm
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            d = np.sqrt((l * l - m * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0)) if l > 0 else 0.0
            low = plm[l - 1, m] if l - 1 >= m else 0.0
            dplm[l, m] = (d * low - l * z * plm[l, m]) / s2
    return plm, dplm


_GRID_CACHE: dict = {}


def get_grid(lmax: int) -> SphereGrid:
    if lmax not in _GRID_CACHE:
        _GRID_CACHE[lmax] = SphereGrid(lmax)
    return _GRID_CACHE[lmax]


@dataclass
class SphereField:
    """Real scalar field under triangular truncation l <= Lmax."""

    coeffs: Array  # complex, shape (Lmax+1, Lmax+1), entries for m <= l
    lmax: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.lmax + 1, self.lmax + 1):
            raise ContractViolationError("coefficient array shape mismatch")

    def copy(self) -> "SphereField":
        return SphereField(self.coeffs.copy(), self.lmax)

    @staticmethod
    def zeros(lmax: int) -> "SphereField":
        return SphereField(np.zeros((lmax + 1, lmax + 1), dtype=complex), lmax)

    @staticmethod
    def harmonic(lmax: int, l: int, m: int, amplitude: complex = 1.0) -> "SphereField":
        """Real field with a single (l, m) mode switched on."""
        f = SphereField.zeros(lmax)
        f.coeffs[l, m] = amplitude
        if m == 0:
            f.coeffs[l, 0] = np.real(amplitude)
        return f


def sht_synthesis(f: SphereField, grid: SphereGrid | None = None,
                  deriv_z: bool = False) -> Array:
    """Grid samples (nlat, nlon) of the field (or of its z-derivative)."""
    grid = grid or get_grid(f.lmax)
    if grid.lmax < f.lmax:
        raise ContractViolationError("grid truncation below field truncation")
    table = grid.dplm if deriv_z else grid.plm
    L = f.lmax
    gm = np.einsum("lmj,lm->jm", table[: L + 1, : L + 1], f.coeffs) / np.sqrt(2.0 * np.pi)
    spec = np.zeros((grid.nlat, grid.nlon // 2 + 1), dtype=complex)
    spec[:, : L + 1] = gm
    return np.fft.irfft(spec, n=grid.nlon, axis=1) * grid.nlon


def sht_analysis(gridvals: Array, lmax: int, grid: SphereGrid | None = None) -> SphereField:
    """Project grid samples onto the truncation (exact for band-limited data)."""
    grid = grid or get_grid(lmax)
    if gridvals.shape != (grid.nlat, grid.nlon):
        raise ContractViolationError("grid shape mismatch")
    gm = np.fft.rfft(gridvals, axis=1) / grid.nlon
    gm = gm[:, : lmax + 1]
    wgm = gm * grid.weights[:, None]
    c = np.sqrt(2.0 * np.pi) * np.einsum(
        "lmj,jm->lm", grid.plm[: lmax + 1, : lmax + 1], wgm
    )
    c[np.triu_indices(lmax + 1, k=1)] = 0.0
    c[:, 0] = c[:, 0].real
    return SphereField(c, lmax)


# ---------------------------------------------------------------------------
# Pointwise/linear operators in coefficient space
# ---------------------------------------------------------------------------

def degree_grid(lmax: int) -> Array:
    return np.arange(lmax + 1)[:, None] * np.ones((1, lmax + 1))


def laplacian_sphere(f: SphereField, radius_factor: float = 1.0) -> SphereField:
    """Laplace-Beltrami operator, eigenvalue -l(l+1) per degree (unit sphere).

    ``radius_factor`` is the documented convention multiplier applied to the
    spectrum for non-unit radius conventions.
    """
    l = np.arange(f.lmax + 1)[:, None]
    return SphereField(-radius_factor * l * (l + 1) * f.coeffs, f.lmax)


def lon_derivative(f: SphereField) -> SphereField:
    m = np.arange(f.lmax + 1)[None, :]
    return SphereField(1j * m * f.coeffs, f.lmax)


def coeff_dot(f: SphereField, g: SphereField) -> float:
    """Exact integral of f*g over the sphere (orthonormality)."""
    c, d = f.coeffs, g.coeffs
    s = np.sum((c[:, 0].real * d[:, 0].real))
    s += 2.0 * np.sum((c[:, 1:] * np.conj(d[:, 1:])).real)
    return float(s)


def field_mean(f: SphereField) -> float:
    """Integral of the field over the sphere."""
    return float(np.sqrt(SPHERE_AREA) * f.coeffs[0, 0].real)


def _z_coupling(lmax: int) -> Array:
    """eps[l, m] = sqrt((l^2 - m^2) / (4 l^2 - 1)): z Y_lm recurrence weights."""
    l = np.arange(lmax + 2)[:, None].astype(float)
    m = np.arange(lmax + 2)[None, :].astype(float)
    num = l * l - m * m
    den = 4.0 * l * l - 1.0
    eps = np.sqrt(np.maximum(num, 0.0) / np.where(den == 0, 1.0, den))
    eps[num <= 0] = 0.0
    return eps


def multiply_z(f: SphereField, out_lmax: int | None = None) -> SphereField:
    """Exact spectral multiplication by z = cos(colatitude)."""
    L = f.lmax
    out_l = out_lmax if out_lmax is not None else L
    eps = _z_coupling(max(L, out_l) + 1)
    c = np.zeros((max(L, out_l) + 2, L + 1), dtype=complex)
    c[: L + 1] = f.coeffs
    res = np.zeros((out_l + 1, out_l + 1), dtype=complex)
    for m in range(min(L, out_l) + 1):
        col = c[:, m]
        new = np.zeros(out_l + 1, dtype=complex)
        for l in range(m, out_l + 1):
            lo = eps[l, m] * col[l - 1] if l - 1 >= m else 0.0
            hi = eps[l + 1, m] * col[l + 1]
            new[l] = lo + hi
        res[: out_l + 1, m] = new
    res[:, 0] = res[:, 0].real
    return SphereField(res, out_l)


def multiply_z2(f: SphereField, truncate: bool = True) -> SphereField:
    """Multiplication by z^2 via two z-recurrences (couples l to l +/- 2).

    With ``truncate`` the result is projected back to the input truncation;
    otherwise it is returned at Lmax + 2.
    """
    up = multiply_z(f, f.lmax + 1)
    up2 = multiply_z(up, f.lmax + 2)
    if not truncate:
        return up2
    return SphereField(up2.coeffs[: f.lmax + 1, : f.lmax + 1].copy(), f.lmax)


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------

def poisson_bracket_sphere(f: SphereField, g: SphereField,
                           grid: SphereGrid | None = None) -> SphereField:
    """{f, g} = d_lambda f d_z g - d_z f d_lambda g, alias-free."""
    if f.lmax != g.lmax:
        raise ContractViolationError("bracket requires a common truncation")
    grid = grid or get_grid(f.lmax)
    fl = sht_synthesis(lon_derivative(f), grid)
    gl = sht_synthesis(lon_derivative(g), grid)
    fz = sht_synthesis(f, grid, deriv_z=True)
    gz = sht_synthesis(g, grid, deriv_z=True)
    return sht_analysis(fl * gz - fz * gl, f.lmax, grid)


# ---------------------------------------------------------------------------
# QG configuration and elliptic solver
# ---------------------------------------------------------------------------

@dataclass
class QGConfig:
    gamma: float = 1.0
    Ro: float = 1.0
    h: Optional[SphereField] = None
    a: float = 1.0
    lmax: int = 42
    radius_factor: float = 1.0
    phi_topography_over_Ro: bool = False

    def __post_init__(self):
        if self.gamma < 0:
            raise ContractViolationError("gamma must be nonnegative")
        if self.Ro <= 0:
            raise ContractViolationError("Ro must be positive")
        if self.lmax < 2:
            raise ContractViolationError("lmax must be at least 2")
        if self.h is not None and self.h.lmax != self.lmax:
            h = self.h
            c = np.zeros((self.lmax + 1, self.lmax + 1), dtype=complex)
            L = min(h.lmax, self.lmax)
            c[: L + 1, : L + 1] = h.coeffs[: L + 1, : L + 1]
            self.h = SphereField(c, self.lmax)


class StreamSolver:
    """Direct banded factorization of gamma z^2 - Delta, one block per order m.

    The operator is symmetric positive definite for gamma > 0; for gamma = 0
    it degenerates to -Delta and is inverted on mean-free fields only.
    """

    def __init__(self, gamma: float, lmax: int, radius_factor: float = 1.0):
        self.gamma = gamma
        self.lmax = lmax
        self.radius_factor = radius_factor
        self.factors = []
        if gamma == 0.0:
            return
        eps = _z_coupling(lmax + 1)
        for m in range(lmax + 1):
            ls = np.arange(m, lmax + 1)
            n = ls.size
            # pentadiagonal symmetric: diag + coupling to l +/- 2
            ab = np.zeros((3, n))
            diag = radius_factor * ls * (ls + 1.0) + gamma * (
                eps[ls, m] ** 2 + eps[ls + 1, m] ** 2
            )
            off2 = gamma * eps[ls[:-2] + 1, m] * eps[ls[:-2] + 2, m] if n > 2 else np.zeros(0)
            ab[2] = diag
            if n > 2:
                ab[0, 2:] = off2
            self.factors.append(cholesky_banded(ab, lower=False))

    def solve(self, r: SphereField) -> SphereField:
        if r.lmax != self.lmax:
            raise ContractViolationError("truncation mismatch in elliptic solve")
        out = np.zeros_like(r.coeffs)
        if self.gamma == 0.0:
            mean = abs(r.coeffs[0, 0].real)
            scale = max(np.abs(r.coeffs).max(), 1e-300)
            if mean > 1e-10 * scale:
                raise NonInvertibleModeError(
                    "gamma = 0 requires a mean-free right-hand side"
                )
            l = np.arange(r.lmax + 1)[:, None].astype(float)
            lam = self.radius_factor * l * (l + 1.0)
            lam[0, 0] = 1.0
            out = r.coeffs / lam
            out[0, 0] = 0.0
            return SphereField(out, r.lmax)
        for m in range(self.lmax + 1):
            ls = np.arange(m, self.lmax + 1)
            rhs = r.coeffs[ls, m]
            sol = cho_solve_banded((self.factors[m], False), rhs.real)
            if m > 0:
                sol = sol + 1j * cho_solve_banded((self.factors[m], False), rhs.imag)
            out[ls, m] = sol
        out[:, 0] = out[:, 0].real
        return SphereField(out, r.lmax)


_SOLVER_CACHE: dict = {}


def get_solver(cfg: QGConfig) -> StreamSolver:
    key = (cfg.gamma, cfg.lmax, cfg.radius_factor)
    if key not in _SOLVER_CACHE:
        _SOLVER_CACHE[key] = StreamSolver(cfg.gamma, cfg.lmax, cfg.radius_factor)
    return _SOLVER_CACHE[key]


def contact_laplacian(f: SphereField, cfg: QGConfig) -> SphereField:
    """(gamma z^2 - Delta) f."""
    out = -laplacian_sphere(f, cfg.radius_factor).coeffs
    if cfg.gamma != 0.0:
        out = out + cfg.gamma * multiply_z2(f).coeffs
    return SphereField(out, f.lmax)


def invert_stream(r: SphereField, cfg: QGConfig) -> SphereField:
    """Solve (gamma z^2 - Delta) psi = r."""
    return get_solver(cfg).solve(r)


def phi_field(cfg: QGConfig) -> SphereField:
    """Correction field phi = (2/Ro) z + 2 z h.

    The optional ``phi_topography_over_Ro`` switch divides the topography
    term by Ro as well (the two readings both occur; the default follows
    the displayed evolution system).
    """
    zf = SphereField.zeros(cfg.lmax)
    # z = sqrt(4 pi / 3) * Y_10
    zf.coeffs[1, 0] = np.sqrt(SPHERE_AREA / 3.0)
    out = (2.0 / cfg.Ro) * zf.coeffs
    if cfg.h is not None:
        zh = multiply_z(cfg.h)
        factor = 2.0 / cfg.Ro if cfg.phi_topography_over_Ro else 2.0
        out = out + factor * zh.coeffs
    return SphereField(out, cfg.lmax)


def q_from_f(f: SphereField, cfg: QGConfig) -> SphereField:
    """Potential vorticity q = (gamma z^2 - Delta) f + a * phi."""
    out = contact_laplacian(f, cfg).coeffs + cfg.a * phi_field(cfg).coeffs
    return SphereField(out, f.lmax)


def f_from_q(q: SphereField, cfg: QGConfig) -> SphereField:
    """Stream function from potential vorticity (inverse of q_from_f)."""
    r = SphereField(q.coeffs - cfg.a * phi_field(cfg).coeffs, q.lmax)
    return invert_stream(r, cfg)


def qg_rhs(q: SphereField, cfg: QGConfig) -> SphereField:
    """dq/dt = -{psi, q} with psi recovered by the elliptic inversion."""
    psi = f_from_q(q, cfg)
    br = poisson_bracket_sphere(psi, q)
    return SphereField(-br.coeffs, q.lmax)


def qg_diagnostics(q: SphereField, cfg: QGConfig) -> dict:
    """Energy, enstrophy, and mean of a potential-vorticity state."""
    psi = f_from_q(q, cfg)
    return {
        "energy": 0.5 * coeff_dot(psi, contact_laplacian(psi, cfg)),
        "enstrophy": coeff_dot(q, q),
        "mean": field_mean(q),
    }


# ---------------------------------------------------------------------------
# Topography presets and random fields
# ---------------------------------------------------------------------------

def topography_preset(name: str, lmax: int, amplitude: float = 0.1,
                      center=(0.0, 0.0), width: float = 0.5) -> SphereField:
    """Named bottom-topography fields: zero | zonal:P2 | gaussian-bump."""
    if name == "zero":
        return SphereField.zeros(lmax)
    if name == "zonal:P2":
        f = SphereField.zeros(lmax)
        f.coeffs[2, 0] = amplitude * np.sqrt(SPHERE_AREA / 5.0)  # P2(z) normalization
        return f
    if name == "gaussian-bump":
        grid = get_grid(lmax)
        z0, lon0 = center
        lam = np.arange(grid.nlon) * (2.0 * np.pi / grid.nlon)
        Z = grid.z[:, None]
        Lam = lam[None, :]
        s0 = np.sqrt(max(1.0 - z0 * z0, 0.0))
        cosd = Z * z0 + np.sqrt(1.0 - Z**2) * s0 * np.cos(Lam - lon0)
        vals = amplitude * np.exp(-((1.0 - cosd) / (width * width)))
        return sht_analysis(vals, lmax, grid)
    raise ContractViolationError(f"unknown topography preset {name!r}")


def random_field(lmax: int, bandwidth: int, rng: np.random.Generator,
                 amplitude: float = 1.0, zero_mean: bool = True) -> SphereField:
    """Random real band-limited field with degrees up to ``bandwidth``."""
    c = np.zeros((lmax + 1, lmax + 1), dtype=complex)
    B = min(bandwidth, lmax)
    for l in range(0 if not zero_mean else 1, B + 1):
        c[l, : l + 1] = rng.standard_normal(l + 1) + 1j * rng.standard_normal(l + 1)
        c[l, 0] = c[l, 0].real
    scale = amplitude / max(np.abs(c).max(), 1e-300)
    return SphereField(c * scale, lmax)


# ---------------------------------------------------------------------------
# FlowSystem assembly (stream-function form)
# ---------------------------------------------------------------------------

def qg_system(cfg: QGConfig, name: str | None = None) -> FlowSystem:
    """FlowSystem on stream-function coefficients f.

    The inertia operator is the contact Laplacian, so momenta are vorticity
    anomalies q - a*phi; diagnostics are reported for the physical q.
    """
    phi = phi_field(cfg)
    grid = get_grid(cfg.lmax)

    def wrap(c):
        return SphereField(np.asarray(c), cfg.lmax)

    def _mean_free(br):
        # a Poisson bracket integrates to zero; drop the quadrature roundoff
        br.coeffs[0, 0] = 0.0
        return br

    def adT(c):
        f = wrap(c)
        br = poisson_bracket_sphere(f, contact_laplacian(f, cfg), grid)
        return invert_stream(_mean_free(br), cfg).coeffs

    def lorentz(c):
        f = wrap(c)
        br = poisson_bracket_sphere(phi, f, grid)
        return -invert_stream(_mean_free(br), cfg).coeffs

    def cocycle(c, d):
        # integral of phi * bracket(f, g) with the right-invariant bracket {g, f}
        br = poisson_bracket_sphere(wrap(d), wrap(c), grid)
        return coeff_dot(phi, br)

    def diag(c):
        f = wrap(c)
        q = q_from_f(f, cfg)
        return {"enstrophy": coeff_dot(q, q), "mean": field_mean(q)}

    return FlowSystem(
        name=name or "qg",
        dim=(cfg.lmax + 1) ** 2,
        strength=cfg.a,
        inner_product=lambda c, d: coeff_dot(wrap(c), contact_laplacian(wrap(d), cfg)),
        pairing=lambda c, d: coeff_dot(wrap(c), wrap(d)),
        apply_inertia=lambda c: contact_laplacian(wrap(c), cfg).coeffs,
        solve_inertia=lambda c: invert_stream(wrap(c), cfg).coeffs,
        adT_self=adT,
        lorentz=lorentz,
        cocycle=cocycle,
        bracket=lambda c, d: poisson_bracket_sphere(wrap(d), wrap(c), grid).coeffs,
        linear_symbol=None,
        diagnostics=diag,
        state_shape=(cfg.lmax + 1, cfg.lmax + 1),
    )
