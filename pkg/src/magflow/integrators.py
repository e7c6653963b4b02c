"""Time integration: classical RK4 and integrating-factor RK4, plus the
trajectory driver with diagnostics records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .core import FlowSystem, energy, rhs_eulerian
from .errors import ContractViolationError, DivergenceError, UnsupportedSchemeError

Array = np.ndarray

SCHEMES = ("rk4", "if_rk4")


@dataclass
class IntegratorConfig:
    dt: float
    t_end: float
    scheme: str = "rk4"
    monitor_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ContractViolationError("dt must be positive")
        if self.t_end < 0:
            raise ContractViolationError("t_end must be nonnegative")
        if self.t_end > 0 and self.dt > self.t_end:
            raise ContractViolationError("dt must not exceed t_end")
        if self.scheme not in SCHEMES:
            raise ContractViolationError(f"unknown scheme {self.scheme!r}")
        if self.monitor_stride < 1:
            raise ContractViolationError("monitor_stride must be >= 1")


@dataclass
class DiagnosticsRecord:
    t: float
    energy: float
    extra: dict = field(default_factory=dict)


def _require_finite(k: Array, stage: str):
    if not np.all(np.isfinite(k)):
        raise DivergenceError(stage)


def rk4_step(sys: FlowSystem, u: Array, dt: float) -> Array:
    """One classical fourth-order Runge-Kutta step of the Eulerian rhs."""
    k1 = rhs_eulerian(sys, u)
    _require_finite(k1, "rk4 stage 1")
    k2 = rhs_eulerian(sys, u + 0.5 * dt * k1)
    _require_finite(k2, "rk4 stage 2")
    k3 = rhs_eulerian(sys, u + 0.5 * dt * k2)
    _require_finite(k3, "rk4 stage 3")
    k4 = rhs_eulerian(sys, u + dt * k3)
    _require_finite(k4, "rk4 stage 4")
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def if_rk4_step(sys: FlowSystem, u: Array, dt: float) -> Array:
    """Integrating-factor RK4: exact exponential on the diagonal linear part,
    classical RK4 on the transformed nonlinear remainder.

    Exact to machine precision whenever the nonlinear remainder vanishes.
    """
    if sys.linear_symbol is None:
        raise UnsupportedSchemeError(
            f"{sys.name}: if_rk4 requires a linear_symbol"
        )
    L = sys.linear_symbol
    E = np.exp(0.5 * dt * L)
    E2 = E * E

    def N(v, stage):
        r = rhs_eulerian(sys, v) - L * v
        _require_finite(r, stage)
        return r

    k1 = N(u, "if_rk4 stage 1")
    k2 = N(E * (u + 0.5 * dt * k1), "if_rk4 stage 2")
    k3 = N(E * u + 0.5 * dt * k2, "if_rk4 stage 3")
    k4 = N(E2 * u + dt * E * k3, "if_rk4 stage 4")
    return E2 * u + (dt / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)


def step(sys: FlowSystem, u: Array, dt: float, scheme: str) -> Array:
    if scheme == "rk4":
        return rk4_step(sys, u, dt)
    if scheme == "if_rk4":
        return if_rk4_step(sys, u, dt)
    raise UnsupportedSchemeError(scheme)


def _record(sys: FlowSystem, t: float, u: Array) -> DiagnosticsRecord:
    extra = sys.diagnostics(u) if sys.diagnostics is not None else {}
    return DiagnosticsRecord(t=t, energy=energy(sys, u), extra=extra)


def evolve(
    sys: FlowSystem,
    u0: Array,
    cfg: IntegratorConfig,
) -> Tuple[List[Tuple[float, Array]], List[DiagnosticsRecord]]:
    """Integrate from t=0 to t=t_end, shortening the last step to land
    exactly on t_end.

    Returns the monitored trajectory as (t, state) pairs (every
    ``monitor_stride`` steps plus the final state) and the matching
    diagnostics records.  On divergence, raises :class:`DivergenceError`
    carrying the last finite state and its time.
    """
    u = np.array(u0, copy=True)
    t = 0.0
    traj = [(0.0, u.copy())]
    records = [_record(sys, 0.0, u)]
    if cfg.t_end == 0.0:
        return traj, records

    nsteps = 0
    eps = 1e-12 * max(cfg.t_end, cfg.dt)
    while t < cfg.t_end - eps:
        dt = min(cfg.dt, cfg.t_end - t)
        try:
            # overflow inside a blowing-up stage is reported via
            # DivergenceError, not as a numpy warning
            with np.errstate(over="ignore", invalid="ignore"):
                u = step(sys, u, dt, cfg.scheme)
        except DivergenceError as err:
            raise DivergenceError(err.stage, t=t, last_state=u) from None
        t += dt
        nsteps += 1
        done = t >= cfg.t_end - eps
        if nsteps % cfg.monitor_stride == 0 or done:
            tt = cfg.t_end if done else t
            traj.append((tt, u.copy()))
            with np.errstate(over="ignore", invalid="ignore"):
                records.append(_record(sys, tt, u))
    return traj, records
