"""Tabular results shared by the CLI subcommands and the figure presets."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .bifurcation import _map, tangency_d_values, tangency_exponent, tangency_from_Y
from .equilibria import dfe_state, find_ede_roots, omega_cr, omega_star, reproduction_number
from .model import AttitudePolicy, ModelParams
from .simulate import AttractorClassification, TrajectoryRecord
from .stability import (
    asymptotic_ede_criteria,
    dfe_stability,
    eigen_verdict,
    jacobian_ede,
    simplified_criterion,
)

SWEEP_AXES = ("Sigma", "a", "h", "omega0", "psi0")


class UnsupportedRequest(ValueError):
    """Valid config asking for something the tool does not do (CLI exit code 3)."""


DFE_HEADER = ["R_v", "omega_cr", "Y", "Z", "S", "P", "R", "X", "stable"]
EDE_HEADER = ["Y", "S", "P", "R", "X", "Z", "margin_lower", "margin_upper",
              "asymptotic_stable", "eigen_stable"]
TRAJECTORY_HEADER = ["T", "Y", "Z", "S", "P", "R", "X", "U"]


def dfe_row(params: ModelParams, policy: AttitudePolicy) -> list:
    st = dfe_state(params, policy).state
    verdict = dfe_stability(params, policy)
    return [reproduction_number(params, policy), omega_cr(params, policy), *st, verdict.stable]


def ede_rows(params: ModelParams, policy: AttitudePolicy) -> list[list]:
    rows = []
    for root in find_ede_roots(params, policy):
        st = root.state
        simple = simplified_criterion(params, policy.Sigma, policy, root.Y)
        full = asymptotic_ede_criteria(params, policy, root.Y)
        eig = eigen_verdict(jacobian_ede(params, policy, root.Y))
        rows.append([root.Y, st.S, st.P, st.R, st.X, st.Z, simple.margins[0],
                     simple.margins[1], full.stable, eig.stable])
    return rows


# ---------------------------------------------------------------------------
# generic two-axis sweeps
# ---------------------------------------------------------------------------

def apply_axes(params: ModelParams, policy: AttitudePolicy, values: dict):
    """Substitute swept values into the base scenario.

    ``omega0``/``psi0`` address the constant family only; when ``psi0`` is
    swept, ``Sigma`` follows as ``omega0 + psi0``.
    """
    for name in values:
        if name not in SWEEP_AXES:
            raise UnsupportedRequest(f"unsupported sweep axis {name!r}; "
                                     f"supported: {', '.join(SWEEP_AXES)}")
    if ("omega0" in values or "psi0" in values) and policy.family != "constant":
        raise UnsupportedRequest("omega0/psi0 axes require the constant family")
    if "a" in values and policy.family == "constant":
        raise UnsupportedRequest("the constant family has no exponent a")
    if "Sigma" in values and "psi0" in values:
        raise UnsupportedRequest("Sigma and psi0 cannot both be swept")
    if "h" in values:
        params = replace(params, h=values["h"])
    changes = {k: values[k] for k in ("Sigma", "a", "omega0") if k in values}
    if "psi0" in values:
        changes["Sigma"] = changes.get("omega0", policy.omega0) + values["psi0"]
    return params, replace(policy, **changes)


def _sweep_node(args):
    params, policy, names, point = args
    try:
        params, policy = apply_axes(params, policy, dict(zip(names, point)))
    except UnsupportedRequest:
        raise
    except ValueError:
        return [(math.nan, False)]
    roots = find_ede_roots(params, policy)
    if not roots:
        return [(0.0, dfe_stability(params, policy).stable)]
    return [(r.Y, simplified_criterion(params, policy.Sigma, policy, r.Y).stable)
            for r in roots]


def sweep_map(params: ModelParams, policy: AttitudePolicy, axes, workers=None):
    """Rows ``(axis values..., Y, stable)``; one row per equilibrium at each node.

    Nodes without an endemic equilibrium report the disease-free state
    (``Y = 0``) with its threshold verdict.
    """
    names = [ax.name for ax in axes]
    apply_axes(params, policy, {n: getattr(ax, "min") for n, ax in zip(names, axes)})
    grids = [ax.values() for ax in axes]
    points = [tuple(float(v) for v in pt)
              for pt in np.array(np.meshgrid(*grids, indexing="ij")).reshape(len(axes), -1).T]
    results = _map(_sweep_node, [(params, policy, names, pt) for pt in points], workers)
    rows = []
    for pt, res in zip(points, results):
        rows.extend([*pt, Y, st] for Y, st in res)
    return names + ["Y", "stable"], rows, grids, results


# ---------------------------------------------------------------------------
# bifurcation tables
# ---------------------------------------------------------------------------

def fold_curve_rows(params: ModelParams, Sigma: float, n: int = 400) -> list[list]:
    """``(Y, a, d, valid)`` on the fold curve, skipping samples where it is undefined."""
    Ys = np.linspace(0.0, params.y_max, n + 2)[1:-1]
    ws = omega_star(params, Sigma, params.R0 * Ys)
    a = tangency_exponent(params, Sigma, Ys)
    rows = []
    for Y, w, ak in zip(Ys, ws, a):
        if w > 0 and ak > 0:
            tp = tangency_from_Y(params, Sigma, float(Y))
            rows.append([tp.Y, tp.a, tp.d, tp.valid])
    return rows


def tangency_rows(params: ModelParams, Sigma: float, a_values) -> list[list]:
    return [[a, d, Y, 0.0 < d <= 1.0]
            for a in a_values for d, Y in tangency_d_values(params, Sigma, float(a))]


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def trajectory_rows(rec: TrajectoryRecord):
    U = rec.U
    for k, t in enumerate(rec.times):
        yield [t, *rec.states[k], U[k]]


def classification_text(cls: AttractorClassification) -> str:
    if cls.kind == "converged_EDE":
        return f"classification: converged_EDE target_Y={cls.target_Y:.17g}"
    if cls.kind == "limit_cycle":
        return (f"classification: limit_cycle period={cls.period:.17g} "
                f"amplitude={cls.amplitude:.17g}")
    return f"classification: undecided amplitude={cls.amplitude:.17g}"
