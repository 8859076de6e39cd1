"""Jacobians, characteristic polynomials and stability verdicts.

Two independent routes decide endemic stability: the asymptotic
(``eps -> 0``) criteria evaluated in closed form, and the roots of the
characteristic polynomial of the full finite-``eps`` Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .equilibria import (
    dfe_state,
    ede_gap,
    ede_state,
    omega_star_prime,
    p_of_y,
    reproduction_number,
)
from .model import AttitudePolicy, ModelParams, grouped, jacobian

BOUNDARY_MARGIN = 0.05
ROUTH_ZERO_PIVOT = 1e-30
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of one stability test.

    ``margins`` are signed slacks: each criterion holds iff its slack is
    positive.  ``boundary`` marks results too close to a stability boundary to
    be trusted against another method.
    """

    stable: bool
    method: str
    margins: tuple[float, ...]
    boundary: bool = False
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def min_margin(self) -> float:
        return min(self.margins)


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial ``lam^n + c[0] lam^(n-1) + ... + c[n-1]``."""

    coefficients: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def as_array(self) -> np.ndarray:
        """Full coefficient vector, highest power first (numpy convention)."""
        return np.concatenate(([1.0], self.coefficients))

    def __call__(self, lam):
        return np.polyval(self.as_array(), lam)


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

def _batched_det(blocks: np.ndarray) -> np.ndarray:
    """Determinants of a stack of square matrices by partial-pivot elimination."""
    a = np.array(blocks, dtype=float, copy=True)
    k, m, _ = a.shape
    det = np.ones(k)
    rows = np.arange(k)
    for j in range(m):
        piv = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = piv != j
        if np.any(swap):
            tmp = a[rows, j].copy()
            a[rows, j] = a[rows, piv]
            a[rows, piv] = tmp
            det[swap] = -det[swap]
        d = a[:, j, j]
        det *= d
        if j + 1 < m:
            safe = np.where(d == 0.0, 1.0, d)
            f = a[:, j + 1:, j] / safe[:, None]
            f[d == 0.0] = 0.0
            a[:, j + 1:, j:] -= f[:, :, None] * a[:, j, None, j:]
    return det


def charpoly_via_minors(M) -> CharPoly:
    """Characteristic polynomial from sums of principal minors.

    ``c_m = (-1)^m * sum of all m x m principal minors`` of ``M``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > 8:
        raise ValueError("principal-minor expansion is limited to n <= 8")
    coeffs = []
    for m in range(1, n + 1):
        idx = np.array(list(combinations(range(n), m)))
        blocks = M[idx[:, :, None], idx[:, None, :]]
        coeffs.append((-1) ** m * float(np.sum(_batched_det(blocks))))
    return CharPoly(tuple(coeffs))


# ---------------------------------------------------------------------------
# Routh array and eigenvalues
# ---------------------------------------------------------------------------

def routh_array(coeffs: CharPoly) -> tuple[list[list[float]], bool]:
    """Routh table of a monic polynomial; also reports whether a zero pivot was patched."""
    c = list(coeffs.as_array())
    n = len(c) - 1
    width = n // 2 + 1
    r0 = c[0::2] + [0.0] * (width - len(c[0::2]))
    r1 = c[1::2] + [0.0] * (width - len(c[1::2]))
    table = [r0, r1]
    patched = False
    for _ in range(n - 1):
        above, prev = table[-2], table[-1]
        if prev[0] == 0.0:
            prev[0] = ROUTH_ZERO_PIVOT
            patched = True
        row = [
            (prev[0] * above[j + 1] - above[0] * prev[j + 1]) / prev[0]
            for j in range(width - 1)
        ] + [0.0]
        table.append(row)
    if table[n][0] == 0.0 and n > 0:
        table[n][0] = ROUTH_ZERO_PIVOT
        patched = True
    return table[: n + 1], patched


def routh_verdict(coeffs: CharPoly) -> StabilityVerdict:
    """All roots in the open left half-plane iff the first column is positive."""
    if coeffs.degree > 8:
        raise ValueError("degree must not exceed 8")
    table, patched = routh_array(coeffs)
    first = tuple(float(row[0]) for row in table)
    scale = [max(abs(x) for x in row) or 1.0 for row in table]
    near_zero = any(abs(f) < 1e-12 * s for f, s in zip(first, scale))
    return StabilityVerdict(
        stable=all(f > 0 for f in first),
        method="routh",
        margins=first,
        boundary=patched or near_zero,
    )


def poly_roots(coeffs: CharPoly) -> np.ndarray:
    """Roots via the balanced companion-matrix eigenproblem."""
    return np.roots(coeffs.as_array())


def eigen_verdict(M) -> StabilityVerdict:
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    cp = charpoly_via_minors(M)
    roots = poly_roots(cp)
    top = float(np.max(roots.real))
    return StabilityVerdict(
        stable=top < 0,
        method="eigenvalue",
        margins=(-top,),
        boundary=abs(top) < 1e-8,
        detail={"roots": roots},
    )


# ---------------------------------------------------------------------------
# disease-free equilibrium
# ---------------------------------------------------------------------------

def jacobian_dfe(params: ModelParams, policy: AttitudePolicy) -> np.ndarray:
    return jacobian(params, policy, dfe_state(params, policy).state)


def dfe_cubic(params: ModelParams, policy: AttitudePolicy) -> tuple[float, float, float]:
    """Coefficients of the cubic factor of the slow block's characteristic polynomial."""
    g = grouped(params, policy, 0.0)
    w = float(policy.omega(0.0))
    ps = float(policy.psi(0.0))
    v, h = params.v, params.h
    c1 = g.eta + g.zeta + 1.0
    c2 = g.zeta + g.eta * (g.zeta + 1.0) + v * w + h * ps
    c3 = g.eta * g.zeta + v * w * g.eta + h * ps * g.zeta
    return c1, c2, c3


def dfe_stability(params: ModelParams, policy: AttitudePolicy) -> StabilityVerdict:
    """Stable iff ``R_v < 1``; the slow cubic is always Hurwitz."""
    c1, c2, c3 = dfe_cubic(params, policy)
    assert c1 > 0 and c3 > 0 and c1 * c2 > c3, "slow cubic factor must be Hurwitz"
    Rv = reproduction_number(params, policy)
    margin = 1.0 - Rv
    return StabilityVerdict(
        stable=margin > 0,
        method="dfe_threshold",
        margins=(margin,),
        boundary=abs(margin) < 1e-10,
        detail={"R_v": Rv},
    )


# ---------------------------------------------------------------------------
# endemic equilibrium
# ---------------------------------------------------------------------------

def _check_ede(params: ModelParams, policy: AttitudePolicy, Y: float, tol: float = 1e-8):
    gap = abs(float(ede_gap(params, policy, Y)))
    if gap > tol * max(1.0, policy.Sigma):
        raise ValueError(f"Y={Y} is not an endemic equilibrium (|omega - omega*| = {gap:.3g})")


def jacobian_ede(params: ModelParams, policy: AttitudePolicy, Y: float) -> np.ndarray:
    _check_ede(params, policy, Y)
    return jacobian(params, policy, ede_state(params, policy, Y))


@dataclass(frozen=True)
class EdeCoefficients:
    """Leading-order quantities of the endemic characteristic polynomial."""

    y: float
    p: float
    x: float
    chi: float
    eta: float
    A: float
    B: float
    k2: float
    k4: float
    k5: float
    k6: float
    q1: float
    q2: float
    q3: float
    q4: float


def ede_coefficients(params: ModelParams, policy: AttitudePolicy, Y: float) -> EdeCoefficients:
    """Leading-order characteristic polynomial coefficients and Routh quantities.

    With ``Gamma = 1/eps`` the polynomial is
    ``lam^6 + Gamma lam^5 + k2 Gamma lam^4 + y Gamma^2 lam^3
    + k4 Gamma^2 lam^2 + k5 Gamma^2 lam + k6 Gamma^2``.
    """
    R0, v, h = params.R0, params.v, params.h
    st = ede_state(params, policy, Y)
    y = R0 * Y
    p = R0 * st.P
    x = R0 * st.X
    Sb = policy.Sigma + 1.0
    chi = Sb + v + y
    eta = Sb + h
    dw = float(policy.omega_prime(Y))
    dps = float(policy.psi_prime(Y))
    dSig = float(policy.sigma_prime(Y))
    A = st.S * dw - st.P * dSig - p
    B = 1.0 + st.R * dps - st.X * dSig
    k2 = (chi + 1.0) + (eta + 1.0) + 2.0 * y
    k4 = (v * A - h * B + (chi + h * p + eta + 1.0)) * y
    k6 = ((v * eta + h * y) * A - h * chi * B + chi * (h * p + eta)) * y
    k5 = k6 + k4 - y
    q1 = k2 - y
    q2 = y * q1 - k4
    q3 = k5 * q1 - k6
    q4 = (k4 * q3 - k6 * q2) / q1
    return EdeCoefficients(y, p, x, chi, eta, A, B, k2, k4, k5, k6, q1, q2, q3, q4)


def asymptotic_ede_criteria(params: ModelParams, policy: AttitudePolicy,
                            Y: float) -> StabilityVerdict:
    """Three-inequality stability test of an endemic equilibrium as ``eps -> 0``.

    Margins are ``RHS - LHS`` of the three inequalities; they are positive
    multiples of ``q2``, ``k4 - y`` and ``k6`` from the Routh array.
    """
    _check_ede(params, policy, Y)
    R0, v, h, r = params.R0, params.v, params.h, params.r
    c = ede_coefficients(params, policy, Y)
    y, p, x, chi, eta = c.y, c.p, c.x, c.chi, c.eta
    Sb = policy.Sigma + 1.0
    dw = float(policy.omega_prime(Y))
    dps = float(policy.psi_prime(Y))
    dSig = float(policy.sigma_prime(Y))

    w1 = h * (1.0 - p) + v * p + y + 1.0
    w2 = v * (1.0 - p) + h * p + y + Sb
    L12 = v * dw - h * r * dps + (h * x - v * p) * dSig
    L3 = (v * eta + h * y) * dw - r * h * chi * dps + (h * x * chi - v * eta * p - h * y * p) * dSig
    margins = (R0 * w1 - L12, R0 * (Sb + w2) + L12, R0 * Sb * w2 + L3)

    # The Routh chain must reproduce the same signs and its closed-form identities.
    q4_scale = max(1.0, abs(c.k4 * c.q3 / c.q1), abs(c.k6 * c.q2 / c.q1))
    assert abs(c.q4 - (c.k4 + c.k6) * (c.k4 - y)) <= IDENTITY_TOL * q4_scale
    assert abs(c.k5 - (c.k6 + c.k4 - y)) <= IDENTITY_TOL * max(1.0, abs(c.k4), abs(c.k6))
    chain = (c.q2, c.k4 - y, c.k6)
    for m, q in zip(margins, chain):
        assert abs(q - y * m / R0) <= 1e-8 * max(1.0, abs(q)), "Routh chain disagrees with criteria"

    return StabilityVerdict(
        stable=all(m > 0 for m in margins),
        method="asymptotic_routh",
        margins=margins,
        boundary=min(abs(m) for m in margins) < BOUNDARY_MARGIN,
        detail={"k": c},
    )


def upsilon(params: ModelParams, Sigma: float, y):
    """Upper-bound function ``w1(y) / (v + r h)`` of the simplified criterion."""
    p = p_of_y(params, Sigma, y)
    w1 = params.h * (1.0 - p) + params.v * p + y + 1.0
    return w1 / (params.v + params.r * params.h)


def upsilon2(params: ModelParams, Sigma: float, y):
    p = p_of_y(params, Sigma, y)
    Sb = Sigma + 1.0
    w2 = params.v * (1.0 - p) + params.h * p + y + Sb
    return (Sb + w2) / (params.v + params.r * params.h)


def upsilon3(params: ModelParams, Sigma: float, y):
    p = p_of_y(params, Sigma, y)
    Sb = Sigma + 1.0
    v, h, r = params.v, params.h, params.r
    w2 = v * (1.0 - p) + h * p + y + Sb
    return Sb * w2 / (v * (Sb + h) + r * h * (Sb + v + y) + h * y)


def w2_of_y(params: ModelParams, Sigma: float, y):
    p = p_of_y(params, Sigma, y)
    return params.v * (1.0 - p) + params.h * p + y + Sigma + 1.0


def simplified_criterion(params: ModelParams, Sigma: float, policy: AttitudePolicy,
                         Y: float) -> StabilityVerdict:
    """``R0 omega*'(R0 Y) < omega'(Y) < R0 Upsilon(R0 Y)`` for constant-Sigma policies.

    Margins are ``(lower, upper)``; the lower margin vanishes on a fold.
    """
    if float(policy.sigma_prime(Y)) != 0.0:
        raise ValueError("simplified criterion requires Sigma independent of Y")
    if Sigma != policy.Sigma:
        raise ValueError("Sigma does not match the policy")
    _check_ede(params, policy, Y)
    y = params.R0 * Y
    dw = float(policy.omega_prime(Y))
    lower = dw - params.R0 * float(omega_star_prime(params, Sigma, y))
    upper = params.R0 * float(upsilon(params, Sigma, y)) - dw
    return StabilityVerdict(
        stable=lower > 0 and upper > 0,
        method="asymptotic_simplified",
        margins=(lower, upper),
        boundary=min(abs(lower), abs(upper)) < BOUNDARY_MARGIN,
    )
