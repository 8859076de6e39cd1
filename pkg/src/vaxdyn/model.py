"""Parameters, attitude functions and the scaled right-hand side.

The state vector is ordered ``(Y, Z, S, P, R, X)`` where ``Y = I/eps`` and
``Z = J/eps`` are the rescaled infectious fractions, ``S`` is the total
susceptible fraction, ``P`` the pro-vaccination susceptibles, ``R`` the total
recovered fraction and ``X`` the unprotected recovered.  Time is measured in
mean lifetimes (``T = mu t``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

FAMILIES = ("constant", "monotone_exp", "peaked")


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model parameters.

    Attributes
    ----------
    R0 : float
        Basic reproduction number without vaccination.
    v : float
        Vaccination rate relative to the birth/death rate.
    h : float
        Expected number of immunity losses per lifetime.
    epsilon : float
        Mean infectious duration over mean lifetime; small, makes the
        system stiff.
    """

    R0: float = 4.0
    v: float = 50.0
    h: float = 0.0
    epsilon: float = 5e-4

    def __post_init__(self):
        for name in ("R0", "v", "h", "epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.R0 <= 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")
        if self.v < 0:
            raise ValueError(f"v must be non-negative, got {self.v}")
        if self.h < 0:
            raise ValueError(f"h must be non-negative, got {self.h}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def r(self) -> float:
        return self.R0 - 1.0

    @property
    def hbar(self) -> float:
        return self.h + 1.0

    @property
    def y_max(self) -> float:
        """Upper bound on endemic prevalence, ``(1 - 1/R0) * (h + 1)``."""
        return (1.0 - 1.0 / self.R0) * self.hbar


@dataclass(frozen=True)
class DimensionalParams:
    """Rate coefficients of the unscaled model, all in 1/time."""

    beta: float
    gamma: float
    theta: float
    mu: float
    phi: float

    def __post_init__(self):
        for name in ("beta", "gamma", "theta", "mu", "phi"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value}")
        if self.mu <= 0:
            raise ValueError("mu must be strictly positive")


def nondimensionalize(dp: DimensionalParams) -> ModelParams:
    """Convert rate coefficients to the dimensionless groups."""
    if dp.mu <= 0 or dp.gamma + dp.mu <= 0:
        raise ValueError("mu and gamma + mu must be positive")
    return ModelParams(
        R0=dp.beta / (dp.gamma + dp.mu),
        v=dp.phi / dp.mu,
        h=dp.theta / dp.mu,
        epsilon=dp.mu / (dp.gamma + dp.mu),
    )


def _check_nonneg(Y):
    if np.any(np.asarray(Y) < 0):
        raise ValueError(f"attitude functions are defined for Y >= 0, got {Y}")


@dataclass(frozen=True)
class AttitudePolicy:
    """Status-change pair ``(omega(Y), psi(Y))`` with constant total ``Sigma``.

    ``omega`` is the unprotected -> pro-vaccination rate and
    ``psi = Sigma - omega`` the reverse rate.  Use the ``constant``,
    ``monotone_exp`` and ``peaked`` constructors rather than building
    instances directly.
    """

    family: str
    Sigma: float
    a: float = 1.0
    d: float = 1.0
    omega0: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not math.isfinite(self.Sigma) or self.Sigma < 0:
            raise ValueError(f"Sigma must be non-negative, got {self.Sigma}")
        if self.family == "constant":
            if not 0 <= self.omega0 <= self.Sigma:
                raise ValueError(f"omega0 must lie in [0, Sigma], got {self.omega0}")
        else:
            if not self.a > 0:
                raise ValueError(f"a must be positive, got {self.a}")
        if self.family == "peaked" and not 0 < self.d <= 1:
            raise ValueError(f"peaked family requires 0 < d <= 1, got {self.d}")

    @classmethod
    def constant(cls, Sigma: float, omega0: float) -> AttitudePolicy:
        return cls("constant", Sigma, omega0=omega0)

    @classmethod
    def monotone_exp(cls, Sigma: float, a: float) -> AttitudePolicy:
        return cls("monotone_exp", Sigma, a=a)

    @classmethod
    def peaked(cls, Sigma: float, a: float, d: float) -> AttitudePolicy:
        return cls("peaked", Sigma, a=a, d=d)

    def omega(self, Y):
        _check_nonneg(Y)
        return self._omega(Y)

    def psi(self, Y):
        w = self.omega(Y)
        out = self.Sigma - w
        if np.any(out < -1e-12):
            raise ValueError("psi < 0: policy parameters violate omega <= Sigma")
        return out

    def omega_prime(self, Y):
        _check_nonneg(Y)
        return self._omega_prime(Y)

    def psi_prime(self, Y):
        return -self.omega_prime(Y)

    def sigma_prime(self, Y):
        """Derivative of ``omega + psi``; zero for every built-in family."""
        return np.zeros_like(np.asarray(Y, dtype=float))[()]

    # Unchecked evaluation, used internally where Y has already been validated
    # or clamped (e.g. inside integrator stages).
    def _omega(self, Y):
        Y = np.asarray(Y, dtype=float)
        if self.family == "constant":
            out = np.full_like(Y, self.omega0)
        elif self.family == "monotone_exp":
            out = self.Sigma * -np.expm1(-self.a * Y)
        else:
            aY = self.a * Y
            out = self.Sigma * self.d * aY * np.exp(1.0 - aY)
        return out[()]

    def _omega_prime(self, Y):
        Y = np.asarray(Y, dtype=float)
        if self.family == "constant":
            out = np.zeros_like(Y)
        elif self.family == "monotone_exp":
            out = self.Sigma * self.a * np.exp(-self.a * Y)
        else:
            aY = self.a * Y
            out = self.Sigma * self.d * self.a * np.exp(1.0 - aY) * (1.0 - aY)
        return out[()]


def omega(policy: AttitudePolicy, Y):
    return policy.omega(Y)


def psi(policy: AttitudePolicy, Y):
    return policy.psi(Y)


def omega_prime(policy: AttitudePolicy, Y):
    return policy.omega_prime(Y)


def psi_prime(policy: AttitudePolicy, Y):
    return policy.psi_prime(Y)


class ScaledState(NamedTuple):
    """State ``(Y, Z, S, P, R, X)`` of the scaled system."""

    Y: float
    Z: float
    S: float
    P: float
    R: float
    X: float

    @classmethod
    def from_array(cls, u) -> ScaledState:
        return cls(*(float(c) for c in u))

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def unprotected(self, epsilon: float) -> float:
        """Total unprotected fraction ``(S - P) + eps (Y - Z) + X``."""
        return (self.S - self.P) + epsilon * (self.Y - self.Z) + self.X

    def population(self, epsilon: float) -> float:
        return self.S + epsilon * self.Y + self.R

    def is_valid(self, epsilon: float, tol: float = 1e-9) -> bool:
        """Check subclass ordering and total population one."""
        Y, Z, S, P, R, X = self
        return (
            -tol <= Z <= Y + tol
            and -tol <= P <= S + tol
            and S <= 1 + tol
            and -tol <= X <= R + tol
            and R <= 1 + tol
            and abs(self.population(epsilon) - 1.0) <= tol
        )


@dataclass(frozen=True)
class GroupedParams:
    """Parameter groupings evaluated at a given prevalence ``Y``."""

    SigmaBar: float
    zeta: float
    eta: float
    xi: float
    rho: float

    def chi(self, y):
        return self.zeta + y


def grouped(params: ModelParams, policy: AttitudePolicy, Y: float = 0.0) -> GroupedParams:
    """Evaluate the groupings with ``omega``, ``psi`` taken at ``Y``."""
    w = policy.omega(Y)
    ps = policy.psi(Y)
    Sigma = w + ps
    Sb = Sigma + 1.0
    return GroupedParams(
        SigmaBar=Sb,
        zeta=Sb + params.v,
        eta=Sb + params.h,
        xi=Sb + params.h * (ps + 1.0),
        rho=Sb * (params.v + params.r * params.h) + params.R0 * params.h * params.v,
    )


def _rhs(params: ModelParams, policy: AttitudePolicy, u, w, ps):
    Y, Z, S, P, R, X = u
    R0, v, h, eps = params.R0, params.v, params.h, params.epsilon
    Sb = w + ps + 1.0
    zeta = Sb + v
    eta = Sb + h
    return np.array(
        [
            (R0 * S - 1.0) * Y / eps,
            (R0 * P * Y - Z) / eps,
            1.0 - S - v * P + h * X - R0 * S * Y,
            w * S - zeta * P - R0 * P * Y,
            (1.0 - eps) * Y + v * P - R - h * X,
            (1.0 - eps) * (Y - Z) + ps * R - eta * X,
        ]
    )


def rhs_scaled(params: ModelParams, policy: AttitudePolicy, state) -> np.ndarray:
    """Time derivatives of the scaled system with respect to ``T``.

    ``state`` may be a :class:`ScaledState` or any length-6 sequence.  The
    first two components carry the ``1/epsilon`` factor.
    """
    u = np.asarray(state, dtype=float)
    w = policy.omega(u[0])
    ps = policy.Sigma - w
    return _rhs(params, policy, u, w, ps)


def equilibrium_residuals(params: ModelParams, policy: AttitudePolicy, state,
                          leading_order: bool = False) -> np.ndarray:
    """Residuals of the equilibrium equations with the fast rows multiplied by eps.

    With ``leading_order=True`` the ``(1 - eps)`` factors in the recovered
    equations are replaced by one, which is the system solved by the
    asymptotic endemic equilibrium.
    """
    u = np.asarray(state, dtype=float)
    eps = params.epsilon
    w = policy.omega(u[0])
    f = _rhs(params, policy, u, w, policy.Sigma - w)
    f[:2] *= eps
    if leading_order:
        Y, Z = u[0], u[1]
        f[4] += eps * Y
        f[5] += eps * (Y - Z)
    return f


def jacobian(params: ModelParams, policy: AttitudePolicy, state) -> np.ndarray:
    """Exact Jacobian of :func:`rhs_scaled` at ``state``."""
    Y, Z, S, P, R, X = np.asarray(state, dtype=float)
    R0, v, h, eps = params.R0, params.v, params.h, params.epsilon
    G = 1.0 / eps
    w = policy.omega(Y)
    ps = policy.Sigma - w
    dw = policy.omega_prime(Y)
    dps = policy.psi_prime(Y)
    dSig = policy.sigma_prime(Y)
    Sb = w + ps + 1.0
    zeta = Sb + v
    eta = Sb + h
    A = S * dw - P * dSig - R0 * P
    B = (1.0 - eps) + R * dps - X * dSig
    return np.array(
        [
            [G * (R0 * S - 1.0), 0.0, G * R0 * Y, 0.0, 0.0, 0.0],
            [G * R0 * P, -G, 0.0, G * R0 * Y, 0.0, 0.0],
            [-R0 * S, 0.0, -1.0 - R0 * Y, -v, 0.0, h],
            [A, 0.0, w, -zeta - R0 * Y, 0.0, 0.0],
            [1.0 - eps, 0.0, 0.0, v, -1.0, -h],
            [B, -(1.0 - eps), 0.0, 0.0, ps, -eta],
        ]
    )
