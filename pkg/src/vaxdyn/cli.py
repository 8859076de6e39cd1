"""Command-line front end.

    vaxdyn {dfe|ede|stability-map|bifurcation|simulate} --config FILE [--outdir DIR] [--svg]
    vaxdyn figure N [--outdir DIR] [--svg]

Exit codes: 0 success, 2 config error, 3 unsupported request, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import config as cfgmod
from . import figures
from .bifurcation import region_map, tangency_d_values
from .config import ConfigError
from .reports import (
    DFE_HEADER,
    EDE_HEADER,
    TRAJECTORY_HEADER,
    UnsupportedRequest,
    classification_text,
    dfe_row,
    ede_rows,
    fold_curve_rows,
    sweep_map,
    tangency_rows,
    trajectory_rows,
)
from .simulate import IntegrationError, SimulationConfig, simulate_and_classify
from .svg import Plot
from .tables import fmt, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_NUMERIC = 0, 2, 3, 4


def cmd_dfe(cfg, outdir, svg=False) -> int:
    row = dfe_row(cfg.params, cfg.policy)
    write_csv(os.path.join(outdir, "dfe.csv"), DFE_HEADER, [row])
    verdict = "stable" if row[-1] else "unstable"
    print(f"R_v = {fmt(row[0])}  omega_cr = {fmt(row[1])}  DFE {verdict}")
    return EXIT_OK


def cmd_ede(cfg, outdir, svg=False) -> int:
    rows = ede_rows(cfg.params, cfg.policy)
    write_csv(os.path.join(outdir, "ede.csv"), EDE_HEADER, rows)
    pattern = "".join("S" if r[8] else "U" for r in rows)
    print(f"{len(rows)} endemic equilibria" + (f", pattern {pattern}" if rows else ""))
    return EXIT_OK


def cmd_stability_map(cfg, outdir, svg=False) -> int:
    if not cfg.sweep:
        raise ConfigError("config error at 'sweep': stability-map needs a sweep block")
    header, rows, grids, results = sweep_map(cfg.params, cfg.policy, cfg.sweep)
    write_csv(os.path.join(outdir, "stability_map.csv"), header, rows)
    n_stable = sum(1 for r in rows if r[-1])
    print(f"{len(rows)} rows, {n_stable} stable")
    if svg and len(grids) == 2:
        shape = (len(grids[0]), len(grids[1]))
        Y = np.array([res[0][0] for res in results]).reshape(shape)
        stable = np.array([float(res[0][1]) for res in results]).reshape(shape)
        plot = Plot(xlabel=header[0], ylabel=header[1], title="stability map")
        levels = cfg.raw.get("levels") or _auto_levels(Y)
        for lev in levels:
            plot.contour(grids[0], grids[1], Y, lev, color="#1f77b4")
        plot.contour(grids[0], grids[1], stable, 0.5, color="#000000", width=2.0)
        plot.save(os.path.join(outdir, "stability_map.svg"))
    return EXIT_OK


def _auto_levels(Y) -> list[float]:
    finite = Y[np.isfinite(Y) & (Y > 0)]
    if finite.size == 0:
        return []
    return list(np.linspace(finite.min(), finite.max(), 7)[1:-1])


def cmd_bifurcation(cfg, outdir, svg=False) -> int:
    pol = cfg.policy
    if pol.family != "peaked":
        raise UnsupportedRequest("bifurcation requires the peaked family")
    names = [ax.name for ax in cfg.sweep]
    if any(n not in ("a", "d") for n in names):
        raise UnsupportedRequest(f"bifurcation sweeps support axes a and d, got {names}")
    curve = fold_curve_rows(cfg.params, pol.Sigma)
    write_csv(os.path.join(outdir, "bifurcation_curve.csv"), ["Y", "a", "d", "valid"], curve)

    a_axis = next((ax for ax in cfg.sweep if ax.name == "a"), None)
    a_values = list(a_axis.values()) if a_axis else [pol.a]
    tang = tangency_rows(cfg.params, pol.Sigma, a_values)
    write_csv(os.path.join(outdir, "tangency_d.csv"), ["a", "d", "Y", "valid"], tang)

    if sorted(names) == ["a", "d"]:
        ax_a = cfg.sweep[names.index("a")]
        ax_d = cfg.sweep[names.index("d")]
        rm = region_map(cfg.params, pol.Sigma, (ax_a.min, ax_a.max), (ax_d.min, ax_d.max),
                        grid=(ax_a.n, ax_d.n))
        rows = [[a, d, rm.labels[i, j], len(rm.roots[i, j]),
                 rm.roots[i, j][0] if rm.roots[i, j] else np.nan]
                for i, a in enumerate(rm.a) for j, d in enumerate(rm.d)]
        write_csv(os.path.join(outdir, "regions.csv"),
                  ["a", "d", "pattern", "n_roots", "Y_smallest"], rows)
    here = [f"{fmt(d)}" for d, _ in tangency_d_values(cfg.params, pol.Sigma, pol.a)]
    print(f"fold curve: {len(curve)} points; tangencies at a={fmt(pol.a)}: d = "
          + (", ".join(here) if here else "none"))
    if svg and curve:
        plot = Plot(xlabel="a", ylabel="d", title="fold curve")
        c = np.array([[r[1], r[2]] for r in curve])
        plot.line(c[:, 0], c[:, 1], dash=True, color="#000000")
        plot.save(os.path.join(outdir, "bifurcation_curve.svg"))
    return EXIT_OK


def simulation_config(cfg) -> tuple[SimulationConfig, float]:
    sim = cfg.simulation
    if sim is None:
        raise ConfigError("config error at 'simulation': simulate needs a simulation block")
    keys = ("T_end", "rtol", "atol", "record_stride", "method")
    try:
        sc = SimulationConfig(cfgmod.initial_state(cfg), **{k: sim[k] for k in keys if k in sim})
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config error at 'simulation': {exc}") from None
    return sc, float(sim.get("max_T_end", sc.T_end))


def cmd_simulate(cfg, outdir, svg=False) -> int:
    sc, max_T = simulation_config(cfg)
    rec, cls = simulate_and_classify(cfg.params, cfg.policy, sc, max_T_end=max_T)
    write_csv(os.path.join(outdir, "trajectory.csv"), TRAJECTORY_HEADER, trajectory_rows(rec))
    print(classification_text(cls))
    if svg:
        figures.trajectory_plots(rec, os.path.join(outdir, "trajectory"))
    return EXIT_OK


COMMANDS = {
    "dfe": cmd_dfe,
    "ede": cmd_ede,
    "stability-map": cmd_stability_map,
    "bifurcation": cmd_bifurcation,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vaxdyn", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--outdir", default=".")
        sp.add_argument("--svg", action="store_true")
    fp = sub.add_parser("figure")
    fp.add_argument("n", type=int)
    fp.add_argument("--outdir", default=".")
    fp.add_argument("--svg", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    os.makedirs(args.outdir, exist_ok=True)
    try:
        if args.command == "figure":
            written = figures.run_figure(args.n, args.outdir, svg=args.svg)
            for path in written:
                print(path)
            return EXIT_OK
        cfg = cfgmod.load(args.config)
        return COMMANDS[args.command](cfg, args.outdir, args.svg)
    except ConfigError as exc:
        print(f"vaxdyn: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedRequest as exc:
        print(f"vaxdyn: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except IntegrationError as exc:
        print(f"vaxdyn: integration failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"vaxdyn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
