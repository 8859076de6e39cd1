"""Figure reproduction driven by the JSON presets in ``vaxdyn/presets``.

A preset lists panels; each panel names a ``kind`` handled by one of the
runners below and carries its own parameter values.  Runners write
``fig<n>_<panel>_*.csv`` files (and SVGs on request) and return the paths.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .bifurcation import region_map, tangency_d_values
from .equilibria import NearTangencyWarning, find_ede_roots, omega_cr, omega_star
from .model import AttitudePolicy, ModelParams, ScaledState
from .reports import (
    TRAJECTORY_HEADER,
    UnsupportedRequest,
    classification_text,
    fold_curve_rows,
    trajectory_rows,
)
from .simulate import SimulationConfig, near_ede_initial, simulate_and_classify
from .stability import simplified_criterion
from .svg import PALETTE, Plot
from .tables import write_csv

FIGURES = range(3, 10)


def load_preset(n: int) -> dict:
    if n not in FIGURES:
        raise UnsupportedRequest(f"no preset for figure {n}; available: 3..9")
    text = resources.files("vaxdyn").joinpath("presets", f"fig{n}.json").read_text("utf-8")
    return json.loads(text)


def _params(base: dict, panel: dict) -> ModelParams:
    p = {"R0": 4.0, "v": 50.0, "h": 0.0, "epsilon": 5e-4, **base, **panel.get("params", {})}
    return ModelParams(R0=p["R0"], v=p["v"], h=p["h"], epsilon=p["epsilon"])


def _policy(entry: dict) -> AttitudePolicy:
    fam = entry["family"]
    if fam == "constant":
        return AttitudePolicy.constant(entry["Sigma"], entry.get("omega0", 0.0))
    if fam == "monotone_exp":
        return AttitudePolicy.monotone_exp(entry["Sigma"], entry["a"])
    return AttitudePolicy.peaked(entry["Sigma"], entry["a"], entry["d"])


def _omega_star_curve(params: ModelParams, Sigma: float, n: int):
    Ys = np.linspace(0.0, params.y_max, n)
    return Ys, omega_star(params, Sigma, np.minimum(params.R0 * Ys, params.r * params.hbar))


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def dfe_boundary(stem, params, panel, svg):
    """Curve ``omega0 = omega_cr(omega0 + psi0)`` in the (psi0, omega0) plane, per h."""
    psis = np.linspace(*panel["psi_range"], panel["n"])
    rows = []
    plot = Plot(xlabel="psi", ylabel="omega", title="DFE stability boundary") if svg else None
    for k, h in enumerate(panel["h_values"]):
        p = ModelParams(params.R0, params.v, h, params.epsilon)

        def f(w, psi):
            return w - omega_cr(p, AttitudePolicy.constant(w + psi, w))

        ws = []
        for psi in psis:
            hi = 1.0
            while f(hi, psi) <= 0:
                hi *= 2.0
            w = brentq(f, 0.0, hi, args=(psi,), xtol=1e-14) if f(0.0, psi) < 0 else 0.0
            ws.append(w)
            rows.append([h, psi, w])
        if plot:
            plot.line(psis, ws, color=PALETTE[k], label=f"h={h:g}")
    paths = [f"{stem}_boundary.csv"]
    write_csv(paths[0], ["h", "psi0", "omega0"], rows)
    if plot:
        plot.save(f"{stem}_boundary.svg")
        paths.append(f"{stem}_boundary.svg")
    return paths


def sigma_a_map(stem, params, panel, svg):
    """Unique-equilibrium prevalence and verdict over the (Sigma, a) plane."""
    S_ax = np.linspace(*panel["Sigma_range"], panel["grid"][0])
    if panel.get("log_a"):
        a_ax = np.geomspace(*panel["a_range"], panel["grid"][1])
    else:
        a_ax = np.linspace(*panel["a_range"], panel["grid"][1])
    Y = np.full((len(S_ax), len(a_ax)), math.nan)
    upper = np.full_like(Y, math.nan)
    rows = []
    for i, S in enumerate(S_ax):
        for j, a in enumerate(a_ax):
            pol = AttitudePolicy.monotone_exp(float(S), float(a))
            roots = find_ede_roots(params, pol)
            if len(roots) != 1:
                rows.append([S, a, math.nan, False, math.nan])
                continue
            v = simplified_criterion(params, pol.Sigma, pol, roots[0].Y)
            Y[i, j], upper[i, j] = roots[0].Y, v.margins[1]
            rows.append([S, a, roots[0].Y, v.stable, v.margins[1]])
    paths = [f"{stem}_map.csv"]
    write_csv(paths[0], ["Sigma", "a", "Y", "stable", "margin_upper"], rows)
    if svg:
        ya = np.log10(a_ax) if panel.get("log_a") else a_ax
        plot = Plot(xlabel="Sigma", ylabel="log10 a" if panel.get("log_a") else "a",
                    title=f"h={params.h:g}")
        for lev in panel.get("levels", []):
            Ys = np.where(upper > 0, Y, math.nan)
            Yu = np.where(upper <= 0, Y, math.nan)
            plot.contour(S_ax, ya, Ys, lev, color="#1f77b4")
            plot.contour(S_ax, ya, Yu, lev, color="#1f77b4", dash=True)
        plot.contour(S_ax, ya, upper, 0.0, color="#000000", width=2.0)
        plot.save(f"{stem}_map.svg")
        paths.append(f"{stem}_map.svg")
    return paths


def _critical_exponents(params, Sigma, a_lo, a_hi, n):
    """Exponents where the monotone family's unique equilibrium changes verdict."""

    def margin(a):
        pol = AttitudePolicy.monotone_exp(Sigma, a)
        r = find_ede_roots(params, pol)[0]
        return min(simplified_criterion(params, Sigma, pol, r.Y).margins)

    grid = np.geomspace(a_lo, a_hi, n)
    m = [margin(a) for a in grid]
    out = []
    for k in range(n - 1):
        if m[k] * m[k + 1] < 0:
            out.append(brentq(margin, grid[k], grid[k + 1], xtol=1e-12))
    return out


def monotone_curves(stem, params, panel, svg):
    """Monotone attitude curves against the equilibrium target, with markers."""
    Sigma = panel["Sigma"]
    Ys, ws = _omega_star_curve(params, Sigma, panel.get("n", 400))
    curves = [["omega_star", math.nan, Y, w] for Y, w in zip(Ys, ws)]
    eq, crit = [], []
    plot = Plot(xlabel="Y", ylabel="omega", title=f"Sigma={Sigma:g}, h={params.h:g}") \
        if svg else None
    if plot:
        plot.line(Ys, ws, dash=True, color="#000000")
    for k, a in enumerate(panel["a_values"]):
        pol = AttitudePolicy.monotone_exp(Sigma, a)
        wv = pol.omega(Ys)
        curves.extend(["omega", a, Y, w] for Y, w in zip(Ys, wv))
        for r in find_ede_roots(params, pol):
            v = simplified_criterion(params, Sigma, pol, r.Y)
            eq.append([a, r.Y, float(pol.omega(r.Y)), v.stable])
            if plot:
                plot.points([r.Y], [pol.omega(r.Y)], filled=v.stable)
        if plot:
            plot.line(Ys, wv, color=PALETTE[k % len(PALETTE)], label=f"a={a:g}")
    for a in _critical_exponents(params, Sigma, *panel["critical_scan"]):
        pol = AttitudePolicy.monotone_exp(Sigma, a)
        Y = find_ede_roots(params, pol)[0].Y
        crit.append([a, Y, float(pol.omega(Y))])
        if plot:
            plot.points([Y], [pol.omega(Y)], color="#d62728", filled=False, r=6.0)
    paths = [f"{stem}_curves.csv", f"{stem}_equilibria.csv", f"{stem}_critical.csv"]
    write_csv(paths[0], ["curve", "a", "Y", "omega"], curves)
    write_csv(paths[1], ["a", "Y", "omega", "stable"], eq)
    write_csv(paths[2], ["a", "Y", "omega"], crit)
    if plot:
        plot.save(f"{stem}_curves.svg")
        paths.append(f"{stem}_curves.svg")
    return paths


def peaked_curves(stem, params, panel, svg):
    """Peaked attitude curves at fixed ``a`` plus the two tangent members."""
    Sigma, a = panel["Sigma"], panel["a"]
    Ys, ws = _omega_star_curve(params, Sigma, panel.get("n", 400))
    tang = [(d, Y) for d, Y in tangency_d_values(params, Sigma, a) if 0 < d <= 1]
    curves = [["omega_star", math.nan, Y, w] for Y, w in zip(Ys, ws)]
    plot = Plot(xlabel="Y", ylabel="omega", title=f"a={a:g}") if svg else None
    if plot:
        plot.line(Ys, ws, dash=True, color="#000000")
    members = [("tangent", d) for d, _ in tang] + [("sample", d) for d in panel["d_values"]]
    for kind, d in members:
        wv = AttitudePolicy.peaked(Sigma, a, d).omega(Ys)
        curves.extend([kind, d, Y, w] for Y, w in zip(Ys, wv))
        if plot:
            plot.line(Ys, wv, color="#d62728" if kind == "tangent" else "#1f77b4",
                      dash=kind != "tangent")
    paths = [f"{stem}_curves.csv", f"{stem}_tangency.csv"]
    write_csv(paths[0], ["curve", "d", "Y", "omega"], curves)
    write_csv(paths[1], ["a", "d", "Y"], [[a, d, Y] for d, Y in tang])
    if plot:
        plot.save(f"{stem}_curves.svg")
        paths.append(f"{stem}_curves.svg")
    return paths


def bifurcation_panels(stem, params, panel, svg):
    """Fold curve, region labels and per-a solution branches of the peaked family."""
    Sigma = panel["Sigma"]
    curve = fold_curve_rows(params, Sigma, panel.get("curve_n", 400))
    rm = region_map(params, Sigma, panel["a_range"], panel["d_range"], grid=tuple(panel["grid"]))
    regions = []
    Ysmall = np.full((len(rm.a), len(rm.d)), math.nan)
    for i, a in enumerate(rm.a):
        for j, d in enumerate(rm.d):
            rts = rm.roots[i, j]
            if len(rts) == 1:
                Ysmall[i, j] = rts[0]
            regions.append([a, d, rm.labels[i, j], len(rts),
                            rts[0] if rts else math.nan, rts[-1] if rts else math.nan])
    sol = []
    for a in panel["solution_a"]:
        for d in np.linspace(*panel["d_range"], panel.get("solution_n", 141)):
            pol = AttitudePolicy.peaked(Sigma, a, float(d))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NearTangencyWarning)
                roots = find_ede_roots(params, pol)
            for r in roots:
                sol.append([a, d, r.Y, simplified_criterion(params, Sigma, pol, r.Y).stable])
    paths = [f"{stem}_curve.csv", f"{stem}_regions.csv", f"{stem}_solutions.csv"]
    write_csv(paths[0], ["Y", "a", "d", "valid"], curve)
    write_csv(paths[1], ["a", "d", "pattern", "n_roots", "Y_smallest", "Y_largest"], regions)
    write_csv(paths[2], ["a", "d", "Y", "stable"], sol)
    if svg:
        c = np.array([[r[1], r[2]] for r in curve])
        plot = Plot(xlabel="a", ylabel="d", xlim=tuple(panel["a_range"]),
                    ylim=tuple(panel["d_range"]), title="fold curve and level curves")
        plot.line(c[:, 0], c[:, 1], dash=True, color="#000000")
        for lev in panel.get("levels", []):
            plot.contour(rm.a, rm.d, Ysmall, lev, color="#1f77b4")
        plot.contour(rm.a, rm.d, rm.margin_upper_small, 0.0, color="#d62728", width=2.0)
        plot.save(f"{stem}_curve.svg")
        paths.append(f"{stem}_curve.svg")
        plot = Plot(xlabel="d", ylabel="Y", title="solution branches")
        for k, a in enumerate(panel["solution_a"]):
            pts = np.array([[s[1], s[2], s[3]] for s in sol if s[0] == a]).reshape(-1, 3)
            st = pts[:, 2] > 0
            plot.points(pts[st, 0], pts[st, 1], color=PALETTE[k], r=1.5)
            plot.points(pts[~st, 0], pts[~st, 1], color=PALETTE[k], filled=False, r=1.5)
        plot.save(f"{stem}_solutions.svg")
        paths.append(f"{stem}_solutions.svg")
    return paths


def trajectory_plots(rec, stem) -> list[str]:
    p1 = Plot(xlabel="T", ylabel="Y", title="infectious fraction")
    p1.line(rec.times, rec.Y, color="#000000")
    p2 = Plot(xlabel="T", ylabel="fraction", title="susceptible and unprotected")
    p2.line(rec.times, rec.states[:, 2], color="#2ca02c", label="S")
    p2.line(rec.times, rec.U, color="#1f77b4", label="U")
    p1.save(f"{stem}_Y.svg")
    p2.save(f"{stem}_SU.svg")
    return [f"{stem}_Y.svg", f"{stem}_SU.svg"]


def simulation(stem, params, panel, svg):
    """Integrate one scenario and classify where it ends up."""
    pol = _policy(panel["policy"])
    ini = panel["initial"]
    if ini == "near_ede":
        root = find_ede_roots(params, pol)[panel.get("root_index", 0)]
        ini = near_ede_initial(params, pol, root.Y)
    cfg = SimulationConfig(ScaledState(*map(float, ini)), T_end=panel.get("T_end", 10.0))
    rec, cls = simulate_and_classify(params, pol, cfg,
                                     max_T_end=panel.get("max_T_end", cfg.T_end))
    paths = [f"{stem}_trajectory.csv", f"{stem}_classification.csv"]
    write_csv(paths[0], TRAJECTORY_HEADER, trajectory_rows(rec))
    write_csv(paths[1], ["kind", "target_Y", "amplitude", "period", "T_end"],
              [[cls.kind, cls.target_Y, cls.amplitude, cls.period, float(rec.times[-1])]])
    print(f"{os.path.basename(stem)}: {classification_text(cls)}")
    if svg:
        paths += trajectory_plots(rec, stem)
    return paths


RUNNERS = {
    "dfe_boundary": dfe_boundary,
    "sigma_a_map": sigma_a_map,
    "monotone_curves": monotone_curves,
    "peaked_curves": peaked_curves,
    "bifurcation": bifurcation_panels,
    "simulation": simulation,
}


def run_figure(n: int, outdir: str, svg: bool = False) -> list[str]:
    preset = load_preset(n)
    base = preset.get("params", {})
    written = []
    for panel in preset["panels"]:
        stem = os.path.join(outdir, f"fig{n}_{panel['name']}")
        written += RUNNERS[panel["kind"]](stem, _params(base, panel), panel, svg)
    return written
