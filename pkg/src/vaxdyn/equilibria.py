"""Disease-free and endemic equilibria.

Endemic equilibria are located in the ``eps -> 0`` limit, where ``Y`` is an
equilibrium exactly when ``omega(Y) = omega_star(R0 * Y)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, root

from .model import (
    AttitudePolicy,
    ModelParams,
    ScaledState,
    equilibrium_residuals,
    grouped,
    jacobian,
)

DFE_COINCIDENT_Y = 1e-9


class NearTangencyWarning(RuntimeWarning):
    """The root scan passed close to a double root and may have missed a pair."""


@dataclass(frozen=True)
class EquilibriumRecord:
    kind: str  # "DFE" or "EDE"
    Y: float
    state: ScaledState
    residual: float
    bracket: tuple[float, float] | None = None


def reproduction_number(params: ModelParams, policy: AttitudePolicy) -> float:
    """Vaccine-reduced reproduction number ``R_v``."""
    g = grouped(params, policy, 0.0)
    w = float(policy.omega(0.0))
    zx = g.zeta * g.xi
    return zx / (zx + params.v * w * g.eta) * params.R0


def omega_cr(params: ModelParams, policy: AttitudePolicy) -> float:
    """Smallest ``omega(0)`` for which the disease-free equilibrium is stable."""
    g = grouped(params, policy, 0.0)
    return params.r * params.hbar * g.SigmaBar * g.zeta / g.rho


def dfe_state(params: ModelParams, policy: AttitudePolicy) -> EquilibriumRecord:
    g = grouped(params, policy, 0.0)
    w = float(policy.omega(0.0))
    ps = float(policy.psi(0.0))
    zx = g.zeta * g.xi
    S = zx / (zx + params.v * w * g.eta)
    R = 1.0 - S
    state = ScaledState(0.0, 0.0, S, w / g.zeta * S, R, ps / g.eta * R)
    res = float(np.max(np.abs(equilibrium_residuals(params, policy, state))))
    return EquilibriumRecord("DFE", 0.0, state, res)


def _sigma_groups(params: ModelParams, Sigma: float):
    Sb = Sigma + 1.0
    zeta = Sb + params.v
    rho = Sb * (params.v + params.r * params.h) + params.R0 * params.h * params.v
    return Sb, zeta, rho


def _check_y(params: ModelParams, y):
    top = params.r * params.hbar
    if np.any(np.asarray(y) > top * (1 + 1e-12)) or np.any(np.asarray(y) < 0):
        raise ValueError(f"y must lie in [0, r*hbar] = [0, {top}]")


def p_of_y(params: ModelParams, Sigma: float, y):
    """Scaled pro-vaccination susceptibles ``R0 * P`` at an endemic equilibrium."""
    _check_y(params, y)
    Sb, _, rho = _sigma_groups(params, Sigma)
    return Sb * (params.r * params.hbar - y) / (rho + params.R0 * params.h * y)


def omega_star(params: ModelParams, Sigma: float, y):
    """Target value ``omega`` must take for ``y = R0 Y`` to be an equilibrium."""
    _, zeta, _ = _sigma_groups(params, Sigma)
    return (zeta + y) * p_of_y(params, Sigma, y)


def kappa(params: ModelParams, Sigma: float) -> float:
    Sb, zeta, rho = _sigma_groups(params, Sigma)
    return zeta * rho - Sb * params.r * params.hbar * (params.v - params.h)


def omega_star_prime(params: ModelParams, Sigma: float, y):
    _check_y(params, y)
    Sb, _, rho = _sigma_groups(params, Sigma)
    k = kappa(params, Sigma)
    den = rho + params.R0 * params.h * y
    return -Sb * (k + 2.0 * rho * y + params.R0 * params.h * y * y) / (den * den)


def ede_gap(params: ModelParams, policy: AttitudePolicy, Y):
    """``g(Y) = omega(Y) - omega_star(R0 Y)``; endemic equilibria are its zeros."""
    return policy.omega(Y) - omega_star(params, policy.Sigma, params.R0 * np.asarray(Y))


def ede_state(params: ModelParams, policy: AttitudePolicy, Y: float) -> ScaledState:
    """Leading-order (``eps -> 0``) equilibrium state at prevalence ``Y``."""
    if not 0 < Y < params.y_max:
        raise ValueError(f"Y={Y} outside (0, Y_max={params.y_max})")
    R0, r = params.R0, params.r
    y = R0 * Y
    Sb, zeta, _ = _sigma_groups(params, policy.Sigma)
    p = float(p_of_y(params, policy.Sigma, y))
    x = r + p - R0 * (zeta + y) * p / Sb
    return ScaledState(Y=Y, Z=y * p / R0, S=1.0 / R0, P=p / R0, R=r / R0, X=x / R0)


def find_ede_roots(params: ModelParams, policy: AttitudePolicy,
                   grid_n: int = 1024) -> list[EquilibriumRecord]:
    """All endemic equilibria, ascending in ``Y``.

    Sign changes of ``g`` on a uniform grid over ``[0, Y_max]`` are refined
    with Brent's method.  A :class:`NearTangencyWarning` is issued when ``g``
    keeps its sign between neighbouring nodes but comes close to zero, which
    is what a nearly tangent root pair looks like.
    """
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    ymax = params.y_max
    if ymax <= 0:
        return []
    Ys = np.linspace(0.0, ymax, grid_n)
    g = ede_gap(params, policy, Ys)
    gscale = float(np.max(np.abs(g))) or 1.0

    brackets = [(Ys[i], Ys[i]) for i in range(1, grid_n - 1) if g[i] == 0.0]
    for i in range(grid_n - 1):
        if g[i] * g[i + 1] < 0:
            brackets.append((Ys[i], Ys[i + 1]))
    brackets.sort()

    # Near-tangency hint: a local minimum of |g| that is small but keeps sign.
    absg = np.abs(g)
    for i in range(1, grid_n - 1):
        if (
            absg[i] < 1e-3 * gscale
            and absg[i] <= absg[i - 1]
            and absg[i] <= absg[i + 1]
            and g[i - 1] * g[i] > 0
            and g[i] * g[i + 1] > 0
        ):
            warnings.warn(
                f"g nearly vanishes near Y={Ys[i]:.6g} without a sign change; "
                "a close root pair may be missed, refine grid_n",
                NearTangencyWarning,
                stacklevel=2,
            )

    def f(Y):
        return float(ede_gap(params, policy, Y))

    out = []
    for lo, hi in brackets:
        Y = lo if lo == hi else brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                       maxiter=200)
        if Y < DFE_COINCIDENT_Y or Y >= ymax:
            continue
        state = ede_state(params, policy, Y)
        res = max(abs(f(Y)),
                  float(np.max(np.abs(equilibrium_residuals(params, policy, state,
                                                            leading_order=True)))))
        out.append(EquilibriumRecord("EDE", float(Y), state, res, (float(lo), float(hi))))
    return out


def polish_equilibrium(params: ModelParams, policy: AttitudePolicy, state) -> ScaledState:
    """Newton-refine a leading-order equilibrium to the exact finite-eps one."""

    def F(u):
        return equilibrium_residuals(params, policy, np.maximum(u, 0.0))

    def J(u):
        m = jacobian(params, policy, np.maximum(u, 0.0))
        m[:2] *= params.epsilon
        return m

    sol = root(F, np.asarray(state, dtype=float), jac=J, method="hybr", tol=1e-13)
    if np.max(np.abs(F(sol.x))) > 1e-10:
        raise ArithmeticError(f"equilibrium refinement failed: {sol.message}")
    return ScaledState.from_array(sol.x)
