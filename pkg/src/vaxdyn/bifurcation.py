"""Fold curves, stability maps and region labels for the attitude families.

For the peaked family ``omega = Sigma d a Y exp(1 - a Y)`` the tangency
conditions can be solved exactly for ``(a, d)`` once ``Y`` is fixed, because
``omega'/omega = 1/Y - a`` is affine in ``a``.  Fold curves are therefore
parametrised by ``Y`` rather than traced by Newton continuation.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .equilibria import NearTangencyWarning, find_ede_roots, omega_star, omega_star_prime
from .model import AttitudePolicy, ModelParams
from .stability import simplified_criterion, upsilon


@dataclass(frozen=True)
class TangencyPoint:
    Y: float
    a: float
    d: float
    residuals: tuple[float, float]

    @property
    def valid(self) -> bool:
        """Only ``0 < d <= 1`` keeps ``psi`` non-negative."""
        return 0.0 < self.d <= 1.0


@dataclass(frozen=True)
class RegionLabel:
    pattern: str  # "S"/"U" per root, ascending in Y
    roots: tuple[float, ...] = ()

    def __str__(self) -> str:
        return self.pattern


def _peaked_value(Sigma, a, d, Y):
    return Sigma * d * a * Y * math.exp(1.0 - a * Y)


def _peaked_slope(Sigma, a, d, Y):
    return Sigma * d * a * math.exp(1.0 - a * Y) * (1.0 - a * Y)


def tangency_exponent(params: ModelParams, Sigma: float, Y):
    """Exponent ``a`` for which a peaked curve can touch ``omega*`` at ``Y``."""
    y = params.R0 * np.asarray(Y, dtype=float)
    ws = omega_star(params, Sigma, y)
    dws = omega_star_prime(params, Sigma, y)
    return (1.0 - Y * params.R0 * dws / ws) / Y


def tangency_from_Y(params: ModelParams, Sigma: float, Y: float) -> TangencyPoint:
    """Peaked-family parameters ``(a, d)`` whose curve is tangent to ``omega*`` at ``Y``."""
    if not 0 < Y < params.y_max:
        raise ValueError(f"Y={Y} outside (0, Y_max={params.y_max})")
    y = params.R0 * Y
    ws = float(omega_star(params, Sigma, y))
    if ws <= 0:
        raise ValueError("omega* vanishes at this Y")
    a = float(tangency_exponent(params, Sigma, Y))
    if a <= 0:
        raise ValueError(f"recovered exponent a={a} is not positive")
    d = ws / _peaked_value(Sigma, a, 1.0, Y)
    r_val = abs(_peaked_value(Sigma, a, d, Y) - ws)
    r_slope = abs(_peaked_slope(Sigma, a, d, Y)
                  - params.R0 * float(omega_star_prime(params, Sigma, y)))
    return TangencyPoint(Y=Y, a=a, d=d, residuals=(r_val, r_slope))


def tangency_curve(params: ModelParams, Sigma: float, n: int = 400) -> list[TangencyPoint]:
    """Fold points sampled uniformly in ``Y`` over the open interval ``(0, Y_max)``."""
    ymax = params.y_max
    Ys = np.linspace(0.0, ymax, n + 2)[1:-1]
    return [tangency_from_Y(params, Sigma, float(Y)) for Y in Ys]


def tangency_d_values(params: ModelParams, Sigma: float, a: float,
                      grid_n: int = 2048) -> list[tuple[float, float]]:
    """All ``(d, Y)`` pairs on the fold curve at exponent ``a``, ascending in ``d``.

    Points with ``d > 1`` are included; check ``d <= 1`` (or
    :attr:`TangencyPoint.valid`) before treating them as admissible.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    ymax = params.y_max
    Ys = np.linspace(0.0, ymax, grid_n + 2)[1:-1]
    diff = tangency_exponent(params, Sigma, Ys) - a

    def f(Y):
        return float(tangency_exponent(params, Sigma, Y)) - a

    out = []
    for i in range(len(Ys) - 1):
        if diff[i] == 0.0:
            Y = Ys[i]
        elif diff[i] * diff[i + 1] < 0:
            Y = brentq(f, Ys[i], Ys[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            continue
        tp = tangency_from_Y(params, Sigma, float(Y))
        out.append((tp.d, tp.Y))
    return sorted(out)


def fold_marginality_check(params: ModelParams, Sigma: float, tangency: TangencyPoint,
                           tol: float = 1e-8) -> bool:
    """True iff the point is a fold where the lower stability margin vanishes.

    Evaluates the simplified criterion for the peaked policy ``(a, d)`` at
    ``tangency.Y`` directly from the closed forms (no equilibrium search).
    """
    Y, a, d = tangency.Y, tangency.a, tangency.d
    y = params.R0 * Y
    slope = _peaked_slope(Sigma, a, d, Y)
    lower = slope - params.R0 * float(omega_star_prime(params, Sigma, y))
    upper = params.R0 * float(upsilon(params, Sigma, y)) - slope
    return abs(lower) <= tol and upper > 0


def classify_regions(params: ModelParams, Sigma: float, a: float, d: float,
                     grid_n: int = 1024) -> RegionLabel:
    """Stability pattern of the endemic equilibria of the peaked family at ``(a, d)``."""
    policy = AttitudePolicy.peaked(Sigma, a, d)
    roots = find_ede_roots(params, policy, grid_n)
    pattern = "".join(
        "S" if simplified_criterion(params, Sigma, policy, r.Y).stable else "U" for r in roots
    )
    return RegionLabel(pattern, tuple(r.Y for r in roots))


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def default_workers() -> int:
    """Worker count from ``VAXDYN_THREADS`` (1 when unset)."""
    try:
        return max(1, int(os.environ.get("VAXDYN_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items, workers):
    # Executor.map preserves input order, so grid output is independent of scheduling.
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _monotone_node(args):
    params, Sigma, a = args
    policy = AttitudePolicy.monotone_exp(Sigma, a)
    roots = find_ede_roots(params, policy)
    if len(roots) != 1:
        return (math.nan, None, math.nan, math.nan)
    v = simplified_criterion(params, Sigma, policy, roots[0].Y)
    return (roots[0].Y, v.stable, v.margins[0], v.margins[1])


@dataclass(frozen=True)
class StabilityMap:
    """Dense grid of unique-equilibrium prevalence and verdicts.

    Arrays are indexed ``[i, j]`` with ``i`` along ``x`` and ``j`` along ``y``.
    """

    x_name: str
    y_name: str
    x: np.ndarray
    y: np.ndarray
    Y: np.ndarray
    stable: np.ndarray
    margin_lower: np.ndarray
    margin_upper: np.ndarray

    def rows(self):
        for i, xv in enumerate(self.x):
            for j, yv in enumerate(self.y):
                yield xv, yv, self.Y[i, j], self.stable[i, j]


def stability_map_monotone(params: ModelParams, Sigma_range, a_range,
                           grid=(200, 200), log_a: bool = False,
                           workers: int | None = None) -> StabilityMap:
    """Unique endemic equilibrium and its verdict on a ``(Sigma, a)`` grid.

    Nodes without exactly one equilibrium (e.g. ``R0 <= 1``) get ``Y = nan``.
    """
    nS, na = grid
    Ss = np.linspace(Sigma_range[0], Sigma_range[1], nS)
    if log_a:
        As = np.geomspace(a_range[0], a_range[1], na)
    else:
        As = np.linspace(a_range[0], a_range[1], na)
    items = [(params, float(S), float(a)) for S in Ss for a in As]
    res = _map(_monotone_node, items, workers)
    Y = np.array([r[0] for r in res]).reshape(nS, na)
    stable = np.array([bool(r[1]) for r in res]).reshape(nS, na)
    lo = np.array([r[2] for r in res]).reshape(nS, na)
    up = np.array([r[3] for r in res]).reshape(nS, na)
    return StabilityMap("Sigma", "a", Ss, As, Y, stable, lo, up)


def _region_node(args):
    params, Sigma, a, d = args
    # grid nodes next to the fold curve are expected to come close to tangency
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearTangencyWarning)
        lab = classify_regions(params, Sigma, a, d)
    return lab.pattern, lab.roots


@dataclass(frozen=True)
class RegionMap:
    a: np.ndarray
    d: np.ndarray
    labels: np.ndarray  # object array of patterns, indexed [i_a, j_d]
    roots: np.ndarray  # object array of root tuples
    margin_upper_small: np.ndarray  # upper-bound margin at the smallest root


def region_map(params: ModelParams, Sigma: float, a_range=(0.3, 1.0), d_range=(0.3, 1.0),
               grid=(200, 200), workers: int | None = None) -> RegionMap:
    """Region labels of the peaked family over an ``(a, d)`` window."""
    na, nd = grid
    As = np.linspace(a_range[0], a_range[1], na)
    Ds = np.linspace(d_range[0], d_range[1], nd)
    items = [(params, Sigma, float(a), float(d)) for a in As for d in Ds]
    res = _map(_region_node, items, workers)
    labels = np.empty((na, nd), dtype=object)
    roots = np.empty((na, nd), dtype=object)
    upper = np.full((na, nd), math.nan)
    for k, (pat, rts) in enumerate(res):
        i, j = divmod(k, nd)
        labels[i, j] = pat
        roots[i, j] = rts
        if rts:
            a, d = items[k][2], items[k][3]
            pol = AttitudePolicy.peaked(Sigma, a, d)
            upper[i, j] = simplified_criterion(params, Sigma, pol, rts[0]).margins[1]
    return RegionMap(As, Ds, labels, roots, upper)
