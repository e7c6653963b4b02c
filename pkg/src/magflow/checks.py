"""Cross-module invariant suite: every structural identity the toolkit relies
on, executed against all shipped systems with a seeded generator.

Each check returns a :class:`CheckResult` with the measured residual and its
tolerance; the CLI prints one line per result.  ``flip_bracket_sign`` is a
debug hook that negates every bracket, which must make the pairing-identity
check fail (negative control for the sign conventions).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import circle, sphere, torus
from .core import (
    FlowSystem,
    extend_central,
    extended_state,
    momentum_system,
    pairing_identity_residual,
    rhs_eulerian,
    split_extended_state,
)
from .integrators import IntegratorConfig, evolve, rk4_step


@dataclass
class CheckResult:
    name: str
    system: str
    residual: float
    tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.residual < self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.detail}]" if self.detail else ""
        return (
            f"{status}  {self.system:28s} {self.name:32s}"
            f" residual={self.residual:.3e}  tol={self.tol:.0e}{extra}"
        )


@dataclass
class CheckSystem:
    """One system under test plus its random-state factory."""

    sys: FlowSystem
    sample: callable  # rng -> coefficient array
    state_shape: tuple
    # low-bandwidth factory whose brackets stay inside the truncation
    # (required by the cyclic cocycle identity); defaults to ``sample``
    sample_low: callable = None

    def __post_init__(self):
        if self.sample_low is None:
            self.sample_low = self.sample


def _build_systems(seed: int) -> list:
    out = []
    for preset, a in (("burgers", 0.0), ("kdv", 0.9), ("ch", 0.0), ("gch", 0.7)):
        K = 32
        sys = circle.preset_system(preset, a=a, K=K)
        out.append(CheckSystem(
            sys=sys,
            sample=lambda rng, K=K: circle.random_field(
                K, K // 3, rng, amplitude=0.5
            ).coeffs,
            state_shape=(K + 1,),
        ))
    L = 10
    qcfg = sphere.QGConfig(
        gamma=1.3, Ro=0.8, a=0.6, lmax=L,
        h=sphere.topography_preset("zonal:P2", L),
    )
    out.append(CheckSystem(
        sys=sphere.qg_system(qcfg),
        sample=lambda rng: sphere.random_field(L, L - 2, rng, amplitude=0.4).coeffs,
        state_shape=(L + 1, L + 1),
        sample_low=lambda rng: sphere.random_field(
            L, L // 2, rng, amplitude=0.4
        ).coeffs,
    ))
    K3 = 4
    tcfg = torus.ICConfig(B=(0.3, -0.2, 1.1), a=0.8, K=K3)
    out.append(CheckSystem(
        sys=torus.ic_system(tcfg),
        sample=lambda rng: torus.random_divfree_field(
            K3, 2, rng, amplitude=0.5
        ).coeffs,
        state_shape=(3, 2 * (K3 + 1), 2 * (K3 + 1), K3 + 2),
    ))
    return out


def _norm(sys, u):
    return max(sys.norm(u), 1e-300)


def run_checks(seed: int = 0, flip_bracket_sign: bool = False,
               samples: int = 10) -> list:
    """Execute the full suite; returns a list of :class:`CheckResult`."""
    results = []
    for cs in _build_systems(seed):
        sys = cs.sys
        if flip_bracket_sign:
            base_bracket = sys.bracket
            sys = replace(sys, bracket=lambda u, v, b=base_bracket: -b(u, v))
        rng = np.random.default_rng(seed)
        results.extend(_check_one(sys, cs, rng, samples))
    results.append(_check_extension(seed))
    results.extend(_check_steady_states())
    return results


def _check_one(sys, cs, rng, samples):
    res = []
    r_inertia = r_adjoint = r_skew = r_lpair = r_canti = r_ccyc = 0.0
    r_pair = r_deform = r_scale = 0.0
    signs = set()
    for _ in range(samples):
        u = cs.sample(rng)
        v = cs.sample(rng)
        w = cs.sample(rng)
        nu, nv, nw = _norm(sys, u), _norm(sys, v), _norm(sys, w)

        back = sys.solve_inertia(sys.apply_inertia(u))
        r_inertia = max(r_inertia, float(np.max(np.abs(back - u))) /
                        max(float(np.max(np.abs(u))), 1e-300))

        lhs = sys.inner_product(sys.adT_self(u), w)
        rhs = sys.inner_product(u, sys.bracket(u, w))
        r_adjoint = max(r_adjoint, abs(lhs - rhs) / (nu * nu * nw))

        r_skew = max(r_skew, abs(sys.inner_product(sys.lorentz(u), u)) / (nu * nu))
        r_lpair = max(
            r_lpair,
            abs(sys.inner_product(sys.lorentz(u), v) - sys.cocycle(u, v))
            / (nu * nv),
        )
        r_canti = max(
            r_canti, abs(sys.cocycle(u, v) + sys.cocycle(v, u)) / (nu * nv)
        )
        ul, vl, wl = cs.sample_low(rng), cs.sample_low(rng), cs.sample_low(rng)
        cyc = (
            sys.cocycle(sys.bracket(ul, vl), wl)
            + sys.cocycle(sys.bracket(vl, wl), ul)
            + sys.cocycle(sys.bracket(wl, ul), vl)
        )
        nl = _norm(sys, ul) * _norm(sys, vl) * _norm(sys, wl)
        r_ccyc = max(r_ccyc, abs(cyc) / nl)

        pres, s = pairing_identity_residual(sys, u, w)
        r_pair = max(r_pair, pres)
        signs.add(s)

        d = rhs_eulerian(sys, u) - rhs_eulerian(sys.with_strength(0.0), u)
        target = -sys.strength * sys.lorentz(u)
        scale = max(float(np.max(np.abs(target))), 1e-300) \
            if sys.strength != 0 else 1.0
        r_deform = max(r_deform, float(np.max(np.abs(d - target))) / scale)

        scaled = sys.scaled_cocycle(sys.strength).with_strength(1.0) \
            if sys.strength != 0 else sys
        ds = rhs_eulerian(sys, u) - rhs_eulerian(scaled, u)
        r_scale = max(r_scale, float(np.max(np.abs(ds))) /
                      max(float(np.max(np.abs(rhs_eulerian(sys, u)))), 1e-300))

    name = sys.name
    res.append(CheckResult("inertia roundtrip", name, r_inertia, 1e-12))
    res.append(CheckResult("adjoint identity", name, r_adjoint, 1e-10))
    res.append(CheckResult("lorentz skewness", name, r_skew, 1e-12))
    res.append(CheckResult("lorentz/cocycle pairing", name, r_lpair, 1e-11))
    res.append(CheckResult("cocycle antisymmetry", name, r_canti, 1e-12))
    res.append(CheckResult("cocycle cyclic identity", name, r_ccyc, 1e-11))
    res.append(CheckResult(
        "pairing identity", name, r_pair, 1e-10,
        detail="sign " + "/".join(f"{s:+d}" for s in sorted(signs)),
    ))
    res.append(CheckResult("deformation decomposition", name, r_deform, 1e-13))
    res.append(CheckResult("strength scaling", name, r_scale, 1e-14))
    res.append(_check_momentum(sys, cs, rng))
    return res


def _check_momentum(sys, cs, rng):
    u = cs.sample(rng)
    dt = 1e-3
    u1 = rk4_step(sys, u, dt)
    msys = momentum_system(sys)
    m1 = rk4_step(msys, sys.apply_inertia(u), dt)
    err = float(np.max(np.abs(m1 - sys.apply_inertia(u1))))
    scale = max(float(np.max(np.abs(m1))), 1e-300)
    return CheckResult("momentum/velocity consistency", sys.name, err / scale, 1e-12)


def _check_extension(seed):
    K = 16
    a = 0.8
    sys = circle.preset_system("gch", a=a, K=K)
    rng = np.random.default_rng(seed)
    u0 = circle.random_field(K, K // 3, rng, amplitude=0.3).coeffs
    cfg = IntegratorConfig(dt=1e-3, t_end=0.2, scheme="rk4", monitor_stride=50)
    traj, _ = evolve(sys, u0, cfg)
    ext = extend_central(sys.with_strength(0.0), (K + 1,))
    etraj, _ = evolve(ext, extended_state(u0, a), cfg)
    uT = traj[-1][1]
    vT, aT = split_extended_state(etraj[-1][1], (K + 1,))
    err = float(np.max(np.abs(uT - vT))) / max(float(np.max(np.abs(uT))), 1e-300)
    err = max(err, abs(aT - a))
    return CheckResult("central-extension equivalence", sys.name, err, 1e-12)


def _check_steady_states():
    out = []
    # constants are steady for every circle preset
    for preset, a in (("burgers", 0.0), ("kdv", 1.0), ("ch", 0.0), ("gch", 1.0)):
        sys = circle.preset_system(preset, a=a, K=32)
        c = np.zeros(33, dtype=complex)
        c[0] = 0.7
        r = rhs_eulerian(sys, c)
        out.append(CheckResult(
            "steady state (constant)", sys.name, float(np.max(np.abs(r))), 1e-12
        ))
    # zonal stream function with zonal topography is steady for QG
    L = 10
    qcfg = sphere.QGConfig(
        gamma=1.1, Ro=0.9, a=0.7, lmax=L,
        h=sphere.topography_preset("zonal:P2", L),
    )
    qsys = sphere.qg_system(qcfg)
    rng = np.random.default_rng(7)
    zonal = np.zeros((L + 1, L + 1), dtype=complex)
    zonal[:, 0] = sphere.random_field(L, L - 2, rng).coeffs[:, 0].real
    r = rhs_eulerian(qsys, zonal)
    out.append(CheckResult(
        "steady state (zonal)", qsys.name, float(np.max(np.abs(r))), 1e-12
    ))
    # unidirectional shear depending on z alone is steady for unmagnetized flow
    K3 = 4
    tsys = torus.ic_system(torus.ICConfig(B=(0.0, 0.0, 1.0), a=0.0, K=K3))
    zero = lambda x, y, z: np.zeros_like(x)
    shear = torus.from_function(
        lambda x, y, z: np.sin(z) + 0.5 * np.cos(2 * z), zero, zero, K3
    ).coeffs
    r = rhs_eulerian(tsys, shear)
    out.append(CheckResult(
        "steady state (shear, a=0)", tsys.name, float(np.max(np.abs(r))), 1e-12
    ))
    return out
