"""Pseudo-spectral incompressible flow on the flat 3-torus with a Lorentz
term -a B x u: the infinite-conductivity deformation of the Euler equations.

Vector fields are stored as the rfftn coefficients of their three real
components on a (2pi)^3-periodic grid, normalized so that the coefficient
of mode k is the plain Fourier coefficient of the field.  The advective
nonlinearity is evaluated in rotational form (curl u) x u with 3/2-rule
dealiasing and Leray projection, which makes it exactly energy-neutral on
the truncation; the convective form u . grad u is kept as a test oracle.

The raw magnetic force B x u is not divergence-free in general; since the
equation carries a free pressure gradient, the Leray projection of B x u is
used as the Lorentz operator (the discarded part is a gradient absorbed
into the pressure).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import FlowSystem
from .errors import ContractViolationError

Array = np.ndarray

VOLUME = (2.0 * np.pi) ** 3


def _grid_size(K: int) -> int:
    # smallest even grid resolving modes -K..K
    return 2 * (K + 1)


def _padded_size(K: int) -> int:
    # 3/2-rule padding for quadratic products
    return 3 * (K + 1)


@dataclass
class Fourier3DVectorField:
    """Three Hermitian-symmetric rfftn coefficient arrays over (2pi)^3.

    ``coeffs`` has shape (3, N, N, N//2 + 1) with N = 2(K+1); the Nyquist
    planes are kept at zero so the retained modes are exactly |k_i| <= K.
    """

    coeffs: Array
    K: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        N = _grid_size(self.K)
        if self.coeffs.shape != (3, N, N, N // 2 + 1):
            raise ContractViolationError(
                f"coeffs shape {self.coeffs.shape} does not match K={self.K}"
            )

    @property
    def N(self) -> int:
        return _grid_size(self.K)

    def copy(self) -> "Fourier3DVectorField":
        return Fourier3DVectorField(self.coeffs.copy(), self.K)


def wavevectors(K: int) -> tuple[Array, Array, Array]:
    """Integer wavevector components broadcastable over the rfftn layout."""
    N = _grid_size(K)
    kx = np.fft.fftfreq(N, d=1.0 / N)[:, None, None]
    ky = np.fft.fftfreq(N, d=1.0 / N)[None, :, None]
    kz = np.arange(N // 2 + 1)[None, None, :]
    return kx, ky, kz


def _truncation_mask(K: int) -> Array:
    kx, ky, kz = wavevectors(K)
    return (np.abs(kx) <= K) & (np.abs(ky) <= K) & (kz <= K)


def truncate(f: Fourier3DVectorField) -> Fourier3DVectorField:
    mask = _truncation_mask(f.K)
    out = f.coeffs * mask[None, :, :, :]
    return Fourier3DVectorField(out, f.K)


def to_grid(f: Fourier3DVectorField, n: int | None = None) -> Array:
    """Real-space samples of the three components on an n^3 grid."""
    n = n if n is not None else f.N
    N = f.N
    if n == N:
        spec = f.coeffs
    else:
        spec = np.zeros((3, n, n, n // 2 + 1), dtype=complex)
        half = N // 2
        sl = np.r_[0:half, n - half : n]
        src = np.r_[0:half, N - half : N]
        ix = np.ix_(sl, sl, np.arange(half + 1))
        sx = np.ix_(src, src, np.arange(half + 1))
        for c in range(3):
            spec[c][ix] = f.coeffs[c][sx]
    return np.fft.irfftn(spec, s=(n, n, n), axes=(1, 2, 3)) * n**3


def from_grid(values: Array, K: int) -> Fourier3DVectorField:
    """Analyze grid samples (3, n, n, n) back to the K-truncation."""
    n = values.shape[-1]
    spec = np.fft.rfftn(values, axes=(1, 2, 3)) / n**3
    N = _grid_size(K)
    out = np.zeros((3, N, N, N // 2 + 1), dtype=complex)
    half = N // 2
    sl = np.r_[0:half, N - half : N]
    src = np.r_[0:half, n - half : n]
    ix = np.ix_(sl, sl, np.arange(half + 1))
    sx = np.ix_(src, src, np.arange(half + 1))
    for c in range(3):
        out[c][ix] = spec[c][sx]
    return truncate(Fourier3DVectorField(out, K))


def from_function(fx, fy, fz, K: int) -> Fourier3DVectorField:
    n = _padded_size(K)
    x = np.arange(n) * (2.0 * np.pi / n)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    vals = np.stack([fx(X, Y, Z), fy(X, Y, Z), fz(X, Y, Z)])
    return from_grid(vals, K)


# ---------------------------------------------------------------------------
# Differential and algebraic operators
# ---------------------------------------------------------------------------

def divergence(f: Fourier3DVectorField) -> Array:
    """Scalar rfftn coefficients of div f (exact, i k . f)."""
    kx, ky, kz = wavevectors(f.K)
    return 1j * (kx * f.coeffs[0] + ky * f.coeffs[1] + kz * f.coeffs[2])


def divergence_norm(f: Fourier3DVectorField) -> float:
    d = divergence(f)
    return float(np.abs(d).max())


def curl(f: Fourier3DVectorField) -> Fourier3DVectorField:
    kx, ky, kz = wavevectors(f.K)
    cx = 1j * (ky * f.coeffs[2] - kz * f.coeffs[1])
    cy = 1j * (kz * f.coeffs[0] - kx * f.coeffs[2])
    cz = 1j * (kx * f.coeffs[1] - ky * f.coeffs[0])
    return Fourier3DVectorField(np.stack([cx, cy, cz]), f.K)


def gradient(scalar_coeffs: Array, K: int) -> Fourier3DVectorField:
    kx, ky, kz = wavevectors(K)
    return Fourier3DVectorField(
        np.stack([1j * kx * scalar_coeffs, 1j * ky * scalar_coeffs, 1j * kz * scalar_coeffs]),
        K,
    )


def leray_project(f: Fourier3DVectorField) -> Fourier3DVectorField:
    """L2-orthogonal projection onto divergence-free fields.

    Symbol I - k k^T / |k|^2; the k = 0 (mean-flow) mode is untouched.
    """
    kx, ky, kz = wavevectors(f.K)
    k2 = kx**2 + ky**2 + kz**2
    k2safe = np.where(k2 == 0, 1.0, k2)
    kdotf = kx * f.coeffs[0] + ky * f.coeffs[1] + kz * f.coeffs[2]
    factor = np.where(k2 == 0, 0.0, kdotf / k2safe)
    out = f.coeffs - np.stack([kx * factor, ky * factor, kz * factor])
    return Fourier3DVectorField(out, f.K)


def cross_grid(v: Array, w: Array) -> Array:
    """Pointwise Euclidean cross product of two (3, ...) grid fields."""
    return np.stack([
        v[1] * w[2] - v[2] * w[1],
        v[2] * w[0] - v[0] * w[2],
        v[0] * w[1] - v[1] * w[0],
    ])


def l2_inner(f: Fourier3DVectorField, g: Fourier3DVectorField) -> float:
    """Exact L2 pairing by Parseval (Hermitian modes counted twice)."""
    weight = np.ones(f.coeffs.shape[1:])
    weight[:, :, 1:] = 2.0
    N = f.N
    # kz = N//2 column is zero by truncation, no double-count correction needed
    s = np.sum(weight * (f.coeffs * np.conj(g.coeffs)).real)
    return float(VOLUME * s)


def energy3d(f: Fourier3DVectorField) -> float:
    """Kinetic energy (1/2) integral |u|^2 dV."""
    return 0.5 * l2_inner(f, f)


# ---------------------------------------------------------------------------
# Nonlinearity and magnetic term
# ---------------------------------------------------------------------------

def nonlinear_rotational(u: Fourier3DVectorField, check: bool = True) -> Fourier3DVectorField:
    """Leray-projected advection term P(omega x u), omega = curl u.

    Equals P(u . grad u) for divergence-free u; the |u|^2/2 gradient is
    annihilated by the projection.
    """
    if check and divergence_norm(u) > 1e-10 * (1.0 + np.abs(u.coeffs).max()):
        raise ContractViolationError("input to nonlinear term must be divergence-free")
    n = _padded_size(u.K)
    ug = to_grid(u, n)
    wg = to_grid(curl(u), n)
    return leray_project(from_grid(cross_grid(wg, ug), u.K))


def nonlinear_convective(u: Fourier3DVectorField) -> Fourier3DVectorField:
    """Test oracle: Leray-projected convective form P(u . grad u)."""
    n = _padded_size(u.K)
    ug = to_grid(u, n)
    kx, ky, kz = wavevectors(u.K)
    out = []
    for c in range(3):
        gc = np.stack([
            1j * kx * u.coeffs[c],
            1j * ky * u.coeffs[c],
            1j * kz * u.coeffs[c],
        ])
        gg = to_grid(Fourier3DVectorField(gc, u.K), n)
        out.append(ug[0] * gg[0] + ug[1] * gg[1] + ug[2] * gg[2])
    return leray_project(from_grid(np.stack(out), u.K))


@dataclass
class ICConfig:
    """Configuration of the infinite-conductivity system.

    ``B`` is either a constant 3-vector or a divergence-free coefficient
    field; ``a`` is the magnetic coupling.
    """

    B: Union[tuple, Fourier3DVectorField] = (0.0, 0.0, 1.0)
    a: float = 0.0
    K: int = 16
    dealias: bool = True

    def __post_init__(self):
        if self.K < 1:
            raise ContractViolationError("K must be positive")
        if isinstance(self.B, Fourier3DVectorField):
            if self.B.K != self.K:
                raise ContractViolationError("B truncation must match K")
            nrm = np.abs(self.B.coeffs).max()
            if divergence_norm(self.B) > 1e-12 * max(nrm, 1.0):
                raise ContractViolationError("magnetic field B must be divergence-free")
        else:
            self.B = tuple(float(b) for b in self.B)
            if len(self.B) != 3:
                raise ContractViolationError("constant B must have three components")


def _b_grid(cfg: ICConfig, n: int) -> Array:
    if isinstance(cfg.B, Fourier3DVectorField):
        return to_grid(cfg.B, n)
    b = np.array(cfg.B)
    return np.broadcast_to(b[:, None, None, None], (3, n, n, n))


def lorentz_ic(u: Fourier3DVectorField, cfg: ICConfig) -> Fourier3DVectorField:
    """Leray-projected magnetic force P(B x u).

    For constant B the cross product is linear and evaluated directly on the
    coefficients; a B given as a field goes through the dealiased grid product.
    """
    if not isinstance(cfg.B, Fourier3DVectorField):
        b = np.array(cfg.B)
        c = u.coeffs
        bxu = np.stack([
            b[1] * c[2] - b[2] * c[1],
            b[2] * c[0] - b[0] * c[2],
            b[0] * c[1] - b[1] * c[0],
        ])
        return leray_project(Fourier3DVectorField(bxu, u.K))
    n = _padded_size(u.K) if cfg.dealias else u.N
    bg = _b_grid(cfg, n)
    ug = to_grid(u, n)
    return leray_project(from_grid(cross_grid(bg, ug), u.K))


def ic_rhs(u: Fourier3DVectorField, cfg: ICConfig) -> Fourier3DVectorField:
    """du/dt = -P(u . grad u) - a P(B x u)."""
    adv = nonlinear_rotational(u)
    mag = lorentz_ic(u, cfg)
    return Fourier3DVectorField(-(adv.coeffs + cfg.a * mag.coeffs), u.K)


def cocycle_ic(u: Fourier3DVectorField, v: Fourier3DVectorField, cfg: ICConfig) -> float:
    """Magnetic two-cocycle in the toolkit orientation: integral B . (u x v)."""
    n = _padded_size(u.K)
    bg = _b_grid(cfg, n)
    ug, vg = to_grid(u, n), to_grid(v, n)
    integrand = np.sum(bg * cross_grid(ug, vg), axis=0)
    return float(integrand.mean() * VOLUME)


def bracket_ic(u: Fourier3DVectorField, v: Fourier3DVectorField) -> Fourier3DVectorField:
    """Right-invariant bracket: minus the vector-field commutator,
    (v . grad) u - (u . grad) v."""
    n = _padded_size(u.K)
    ug, vg = to_grid(u, n), to_grid(v, n)
    kx, ky, kz = wavevectors(u.K)
    out = []
    for c in range(3):
        gu = to_grid(Fourier3DVectorField(np.stack([
            1j * kx * u.coeffs[c], 1j * ky * u.coeffs[c], 1j * kz * u.coeffs[c]]), u.K), n)
        gv = to_grid(Fourier3DVectorField(np.stack([
            1j * kx * v.coeffs[c], 1j * ky * v.coeffs[c], 1j * kz * v.coeffs[c]]), u.K), n)
        out.append(
            vg[0] * gu[0] + vg[1] * gu[1] + vg[2] * gu[2]
            - (ug[0] * gv[0] + ug[1] * gv[1] + ug[2] * gv[2])
        )
    return from_grid(np.stack(out), u.K)


def random_divfree_field(K: int, bandwidth: int, rng: np.random.Generator,
                         amplitude: float = 1.0, zero_mean: bool = True) -> Fourier3DVectorField:
    """Random real divergence-free band-limited field."""
    N = _grid_size(K)
    shape = (3, N, N, N // 2 + 1)
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    kx, ky, kz = wavevectors(K)
    band = (np.abs(kx) <= bandwidth) & (np.abs(ky) <= bandwidth) & (kz <= bandwidth)
    raw *= band[None]
    f = Fourier3DVectorField(raw, K)
    # Hermitian-symmetrize by analyzing the real part of the synthesis
    f = from_grid(to_grid(f), K)
    f = leray_project(f)
    if zero_mean:
        f.coeffs[:, 0, 0, 0] = 0.0
    nrm = np.abs(f.coeffs).max()
    if nrm > 0:
        f.coeffs *= amplitude / nrm
    return f


# ---------------------------------------------------------------------------
# FlowSystem assembly
# ---------------------------------------------------------------------------

def ic_system(cfg: ICConfig, name: str | None = None) -> FlowSystem:
    N = _grid_size(cfg.K)
    shape = (3, N, N, N // 2 + 1)

    def wrap(c):
        return Fourier3DVectorField(c, cfg.K)

    def diag(c):
        f = wrap(c)
        return {
            "divergence_norm": divergence_norm(f),
            "helicity": l2_inner(f, curl(f)),
        }

    return FlowSystem(
        name=name or "ic",
        dim=2 * 3 * N * N * (N // 2 + 1),
        strength=cfg.a,
        inner_product=lambda c, d: l2_inner(wrap(c), wrap(d)),
        pairing=lambda c, d: l2_inner(wrap(c), wrap(d)),
        apply_inertia=lambda c: c.copy(),
        solve_inertia=lambda c: c.copy(),
        adT_self=lambda c: nonlinear_rotational(wrap(c)).coeffs,
        lorentz=lambda c: lorentz_ic(wrap(c), cfg).coeffs,
        cocycle=lambda c, d: cocycle_ic(wrap(c), wrap(d), cfg),
        bracket=lambda c, d: bracket_ic(wrap(c), wrap(d)).coeffs,
        linear_symbol=None,
        diagnostics=diag,
        state_shape=shape,
    )
