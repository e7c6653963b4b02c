"""Refinement studies: observed-order tables for time-step and resolution
refinement, plus exact-solution benchmarks with closed-form references."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from . import circle, sphere, torus
from .core import rhs_eulerian
from .errors import DivergenceError, MagflowError
from .integrators import IntegratorConfig, evolve


@dataclass
class ConvergenceTable:
    """Rows of (label, parameter value, error); fitted orders between rows."""

    parameter: str
    rows: list = field(default_factory=list)  # (label, value, error or nan)

    def add(self, label: str, value: float, error: float):
        self.rows.append((label, float(value), float(error)))

    @property
    def orders(self) -> list:
        """log-ratio observed order between consecutive refinement levels."""
        out = []
        for (_, v1, e1), (_, v2, e2) in zip(self.rows, self.rows[1:]):
            if not (np.isfinite(e1) and np.isfinite(e2)) or e2 == 0 or v1 == v2:
                out.append(float("nan"))
            else:
                out.append(math.log(e1 / e2) / math.log(v1 / v2))
        return out

    def lines(self) -> list:
        out = [f"{self.parameter:>12s} {'error':>14s} {'order':>8s}"]
        orders = [float("nan")] + self.orders
        for (label, _, err), order in zip(self.rows, orders):
            otxt = f"{order:8.2f}" if np.isfinite(order) else "       -"
            etxt = f"{err:14.6e}" if np.isfinite(err) else "      diverged"
            out.append(f"{label:>12s} {etxt} {otxt}")
        return out

    def csv_rows(self) -> list:
        orders = [float("nan")] + self.orders
        rows = [("level", self.parameter, "error", "observed_order")]
        for (label, value, err), order in zip(self.rows, orders):
            rows.append((label, repr(value), repr(err), repr(order)))
        return rows


def _final_state(setup_sys, u0, icfg):
    traj, _ = evolve(setup_sys, u0, icfg)
    return traj[-1][1]


def dt_refinement(sys, u0, dt0: float, t_end: float, levels: int,
                  scheme: str = "rk4") -> ConvergenceTable:
    """Halve dt ``levels`` times; errors are sup-norm differences against one
    further halving.  A diverged level is recorded as NaN, not fatal."""
    if levels < 3:
        raise MagflowError("need at least 3 refinement levels")
    finals = []
    dts = [dt0 / 2**i for i in range(levels + 1)]
    for dt in dts:
        try:
            icfg = IntegratorConfig(dt=dt, t_end=t_end, scheme=scheme,
                                    monitor_stride=10**9)
            finals.append(_final_state(sys, u0, icfg))
        except DivergenceError:
            finals.append(None)
    ref = finals[-1]
    table = ConvergenceTable(parameter="dt")
    for dt, state in zip(dts[:-1], finals[:-1]):
        if state is None or ref is None:
            err = float("nan")
        else:
            err = float(np.max(np.abs(state - ref)))
        table.add(f"{dt:.3e}", dt, err)
    return table


def observed_dt_order(sys, u0, dt0: float, t_end: float, levels: int = 4,
                      scheme: str = "rk4") -> float:
    """Median observed order of a dt-refinement study."""
    orders = [o for o in dt_refinement(sys, u0, dt0, t_end, levels, scheme).orders
              if np.isfinite(o)]
    if not orders:
        return float("nan")
    return float(np.median(orders))


# ---------------------------------------------------------------------------
# Exact-solution benchmarks
# ---------------------------------------------------------------------------

def kdv_linear_phase_error(K: int = 32, a: float = 1.0, dt: float = 1e-3,
                           t_end: float = 1.0, scheme: str = "if_rk4",
                           mode: int = 3) -> float:
    """Linearized-KdV single mode vs the exact phase factor exp(-i a k^3 t).

    Uses the dispersion-only system (transport disabled); with ``if_rk4``
    the step is exact, with ``rk4`` the error converges at fourth order.
    """
    cfg = circle.preset_config("kdv", a=a, K=K)
    sys = circle.circle_system(cfg, linear_only=True, name="kdv-linear")
    u0 = np.zeros(K + 1, dtype=complex)
    u0[mode] = 0.5
    icfg = IntegratorConfig(dt=dt, t_end=t_end, scheme=scheme,
                            monitor_stride=10**9)
    traj, _ = evolve(sys, u0, icfg)
    # coefficient evolves by the symbol a*(ik)^3/alpha at wavenumber k
    k = 2.0 * np.pi * mode / cfg.L
    lam = a * (1j * k) ** 3 / (cfg.alpha + cfg.beta * k * k)
    exact = u0[mode] * np.exp(lam * t_end)
    return float(abs(traj[-1][1][mode] - exact) / abs(u0[mode]))


def kdv_linear_dt_table(K: int = 32, a: float = 1.0, dt0: float = 4e-3,
                        t_end: float = 0.5, levels: int = 4) -> ConvergenceTable:
    table = ConvergenceTable(parameter="dt")
    for i in range(levels):
        dt = dt0 / 2**i
        err = kdv_linear_phase_error(K=K, a=a, dt=dt, t_end=t_end, scheme="rk4")
        table.add(f"{dt:.3e}", dt, err)
    return table


def ic_shear_rotation_error(K: int = 4, a: float = 1.0, b: float = 1.0,
                            dt: float = 2e-3, t_end: float = 1.0) -> float:
    """Shear flow in a constant vertical magnetic field: the two horizontal
    amplitudes of a single z-mode rotate at exact frequency a*b."""
    cfg = torus.ICConfig(B=(0.0, 0.0, b), a=a, K=K)
    sys = torus.ic_system(cfg)
    zero = lambda x, y, z: np.zeros_like(x)
    u0 = torus.from_function(lambda x, y, z: np.sin(z), zero, zero, K).coeffs
    icfg = IntegratorConfig(dt=dt, t_end=t_end, scheme="rk4", monitor_stride=10**9)
    traj, _ = evolve(sys, u0, icfg)
    uT = torus.Fourier3DVectorField(traj[-1][1], K)
    zero3 = lambda x, y, z: np.zeros_like(x)
    th = a * b * t_end
    expect = torus.from_function(
        lambda x, y, z: np.cos(th) * np.sin(z),
        lambda x, y, z: -np.sin(th) * np.sin(z),
        zero3, K,
    )
    return float(np.max(np.abs(uT.coeffs - expect.coeffs)))


def ic_shear_dt_table(K: int = 4, dt0: float = 1.6e-2, t_end: float = 1.0,
                      levels: int = 4) -> ConvergenceTable:
    table = ConvergenceTable(parameter="dt")
    for i in range(levels):
        dt = dt0 / 2**i
        err = ic_shear_rotation_error(K=K, dt=dt, t_end=t_end)
        table.add(f"{dt:.3e}", dt, err)
    return table


def qg_rossby_phase_error(lmax: int = 31, l: int = 4, m: int = 3,
                          Ro: float = 1.0, dt: float = 5e-3,
                          t_end: float = 1.0) -> float:
    """Rossby-Haurwitz wave: a single harmonic stream function rotates at
    angular phase speed 2 / (Ro l (l+1)); returns the relative phase-speed
    error measured from the coefficient argument at t_end."""
    cfg = sphere.QGConfig(gamma=0.0, Ro=Ro, a=1.0, lmax=lmax)
    sys = sphere.qg_system(cfg)
    u0 = sphere.SphereField.harmonic(lmax, l, m, 0.2 + 0.1j).coeffs
    icfg = IntegratorConfig(dt=dt, t_end=t_end, scheme="rk4", monitor_stride=10**9)
    traj, _ = evolve(sys, u0, icfg)
    c0, cT = u0[l, m], traj[-1][1][l, m]
    dphase = np.angle(cT / c0)
    exact_speed = 2.0 / (Ro * l * (l + 1))
    measured = -dphase / (m * t_end)
    return float(abs(measured - exact_speed) / exact_speed)


EXACT_STUDIES = {
    "kdv-linear-phase": kdv_linear_dt_table,
    "ic-shear-rotation": ic_shear_dt_table,
}
