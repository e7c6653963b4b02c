"""Abstract right-invariant magnetic system and the operations built on it.

A :class:`FlowSystem` bundles the capability handles of one truncated
Lie-algebra model: inner product, inertia operator, transpose-adjoint
operator, Lorentz force, two-cocycle, and bracket, all acting on plain
numpy coefficient arrays.  Everything downstream (time stepping, invariant
checks, the central-extension wrapper) is written against this contract
only, so the circle, sphere, and torus realizations plug in uniformly.

Sign conventions.  The evolution equation implemented by
:func:`rhs_eulerian` is

    du/dt = -(adT_self(u) + a * lorentz(u)),

and each concrete system orients its bracket and cocycle so that

    <adT_self(u), w> = <u, bracket(u, w)>,
    <lorentz(u), w>  = cocycle(u, w),

hold on the truncation.  With these choices the pairing identity of
:func:`pairing_identity_residual` closes with a single global sign per
system (it is -1 for all shipped systems).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolationError

Array = np.ndarray


@dataclass
class FlowSystem:
    """Descriptor of a truncated right-invariant magnetic system.

    All capability handles act on (and return) numpy coefficient arrays of
    a fixed shape; ``dim`` counts the real degrees of freedom of that
    truncation.  ``strength`` is the magnetic coupling constant.
    """

    name: str
    dim: int
    strength: float
    inner_product: Callable[[Array, Array], float]
    pairing: Callable[[Array, Array], float]
    apply_inertia: Callable[[Array], Array]
    solve_inertia: Callable[[Array], Array]
    adT_self: Callable[[Array], Array]
    lorentz: Callable[[Array], Array]
    cocycle: Callable[[Array, Array], float]
    bracket: Callable[[Array, Array], Array]
    # Per-coefficient complex multiplier of the linear part of the rhs
    # (only available when the Lorentz term is diagonal in the coefficient
    # basis, e.g. on the circle); enables the integrating-factor stepper.
    linear_symbol: Optional[Array] = None
    # Optional extra diagnostics hook: state -> {name: value}.
    diagnostics: Optional[Callable[[Array], dict]] = None
    state_shape: Optional[tuple] = None

    def norm(self, u: Array) -> float:
        return float(np.sqrt(max(self.inner_product(u, u), 0.0)))

    def with_strength(self, a: float) -> "FlowSystem":
        """Same system with a different magnetic coupling."""
        sys2 = replace(self, strength=float(a))
        if self.linear_symbol is not None and self.strength != 0.0:
            sys2.linear_symbol = self.linear_symbol * (a / self.strength)
        elif self.linear_symbol is not None and self.strength == 0.0:
            # symbol of an unmagnetized system is already zero
            sys2.linear_symbol = self.linear_symbol * 0.0
        return sys2

    def scaled_cocycle(self, factor: float) -> "FlowSystem":
        """System with cocycle (and hence Lorentz force) scaled by ``factor``.

        Used by the strength-scaling equivalence check: (sigma, a) and
        (a*sigma, 1) must generate the same flow.
        """
        base_lorentz = self.lorentz
        base_cocycle = self.cocycle
        sys2 = replace(
            self,
            lorentz=lambda u: factor * base_lorentz(u),
            cocycle=lambda u, v: factor * base_cocycle(u, v),
        )
        if self.linear_symbol is not None:
            sys2.linear_symbol = self.linear_symbol * factor
        return sys2


def _check_dim(sys: FlowSystem, u: Array) -> None:
    if sys.state_shape is not None and u.shape != sys.state_shape:
        raise ContractViolationError(
            f"{sys.name}: state shape {u.shape} != expected {sys.state_shape}"
        )


def rhs_eulerian(sys: FlowSystem, u: Array) -> Array:
    """Velocity-form right-hand side du/dt = -(ad^T_u u + a Y(u))."""
    _check_dim(sys, u)
    return -(sys.adT_self(u) + sys.strength * sys.lorentz(u))


def rhs_momentum(sys: FlowSystem, m: Array) -> Array:
    """Momentum-form right-hand side, defined by conjugation with the inertia
    operator so that m(t) = A u(t) holds identically along trajectories."""
    return sys.apply_inertia(rhs_eulerian(sys, sys.solve_inertia(m)))


def energy(sys: FlowSystem, u: Array) -> float:
    """Kinetic energy (1/2) <u, u>."""
    return 0.5 * sys.inner_product(u, u)


def momentum_system(sys: FlowSystem) -> FlowSystem:
    """View of ``sys`` whose states are momenta m = A u.

    Stepping this system is the momentum-form integration; it is conjugate
    to the velocity form by construction.
    """
    return replace(
        sys,
        name=sys.name + ":momentum",
        adT_self=lambda m: -rhs_momentum(sys, m) ,
        lorentz=lambda m: np.zeros_like(m),
        strength=0.0,
        linear_symbol=None,
    )


def pairing_identity_residual(sys: FlowSystem, u: Array, w: Array):
    """Residual of the Lie-Poisson pairing identity, minimized over a global sign.

    Computes ``pairing(A rhs(u), w)`` against
    ``s * (<u, [u, w]> + a * cocycle(u, w))`` for ``s in {+1, -1}`` and
    returns ``(residual, s)`` with the residual normalized by |u|^2 |w|.
    """
    lhs = sys.pairing(sys.apply_inertia(rhs_eulerian(sys, u)), w)
    rhs = sys.inner_product(u, sys.bracket(u, w)) + sys.strength * sys.cocycle(u, w)
    nu, nw = sys.norm(u), sys.norm(w)
    scale = nu * nu * nw
    if scale == 0.0:
        return abs(lhs), +1
    r_plus = abs(lhs - rhs) / scale
    r_minus = abs(lhs + rhs) / scale
    return (r_plus, +1) if r_plus <= r_minus else (r_minus, -1)


# ---------------------------------------------------------------------------
# Central extension
# ---------------------------------------------------------------------------

def extended_state(u: Array, a: float) -> Array:
    """Pack a Lie-algebra element and a central charge into one flat state."""
    flat = np.asarray(u).ravel()
    out = np.empty(flat.size + 1, dtype=np.result_type(flat.dtype, np.float64))
    out[:-1] = flat
    out[-1] = a
    return out


def split_extended_state(x: Array, shape: tuple):
    """Inverse of :func:`extended_state`."""
    return x[:-1].reshape(shape), float(x[-1].real)


def extend_central(sys: FlowSystem, state_shape: tuple) -> FlowSystem:
    """Central-extension wrapper: geodesic flow on (u, a)-pairs.

    The returned system is unmagnetized (strength 0); its transpose-adjoint
    operator on (u, a) is (ad^T_u u + a * Y(u), 0), so its geodesic equation
    reproduces the magnetic flow of strength a on the u-part while the
    central coordinate stays constant.  The extended bracket carries the
    base cocycle in its last slot and the extended metric is <u,v> + a b.
    """
    shape = tuple(state_shape)

    def split(x):
        return x[:-1].reshape(shape), x[-1]

    def adT_ext(x):
        u, a = split(x)
        du = sys.adT_self(u) + float(a.real) * sys.lorentz(u)
        return extended_state(du, 0.0)

    def lorentz_ext(x):
        return np.zeros_like(x)

    def inner_ext(x, y):
        u, a = split(x)
        v, b = split(y)
        return sys.inner_product(u, v) + float(a.real) * float(b.real)

    def pairing_ext(x, y):
        u, a = split(x)
        v, b = split(y)
        return sys.pairing(u, v) + float(a.real) * float(b.real)

    def apply_inertia_ext(x):
        u, a = split(x)
        return extended_state(sys.apply_inertia(u), float(a.real))

    def solve_inertia_ext(x):
        u, a = split(x)
        return extended_state(sys.solve_inertia(u), float(a.real))

    def bracket_ext(x, y):
        u, _ = split(x)
        v, _ = split(y)
        return extended_state(sys.bracket(u, v), sys.cocycle(u, v))

    def diag_ext(x):
        u, a = split(x)
        extra = sys.diagnostics(u) if sys.diagnostics is not None else {}
        extra["charge"] = float(a.real)
        return extra

    return FlowSystem(
        name=f"extended:{sys.name}",
        dim=sys.dim + 1,
        strength=0.0,
        inner_product=inner_ext,
        pairing=pairing_ext,
        apply_inertia=apply_inertia_ext,
        solve_inertia=solve_inertia_ext,
        adT_self=adT_ext,
        lorentz=lorentz_ext,
        cocycle=lambda x, y: 0.0,
        bracket=bracket_ext,
        linear_symbol=None,
        diagnostics=diag_ext,
        state_shape=None,
    )
