"""Command-line interface: every scan and solve as a reproducible batch command.

All rates are accepted in units of ``kappa1 = 1``.  Output is CSV (default)
or JSON with a comment header echoing the tool version and the full parameter
set; given the same flags (seeds included) a command writes byte-identical
files.  Exit codes: 0 success, 1 numerical failure, 2 usage error.

Grids are given as ``min:max:steps`` triples (inclusive endpoints).  A flat
``key=value`` file can be passed via ``--config``; explicit flags override
file values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, classical, critical, ensemble, lindblad, two_osc
from .errors import QsyncError

UNITS_NOTE = "all rates and frequencies in units of kappa1; times in 1/kappa1"


def _fmt(value) -> str:
    """Render one cell: 12 significant digits, ``inf`` literal, empty for None."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    return str(value)


def _json_cell(value):
    """JSON-safe cell: strict JSON has no Infinity, so use the 'inf' literal."""
    if value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return float(value)


def _write_table(path, columns, rows, meta, fmt):
    """Write a table with comment-style metadata header (csv) or wrapped (json)."""
    if fmt == "json":
        payload = {
            "tool": "qsync",
            "version": __version__,
            "units": UNITS_NOTE,
            "parameters": {k: _json_cell(v) for k, v in meta.items()},
            "columns": list(columns),
            "rows": [[_json_cell(c) for c in row] for row in rows],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=False)
            fh.write("\n")
        return
    lines = [f"# qsync version={__version__}"]
    for key, val in meta.items():
        lines.append(f"# {key}={_fmt(val)}")
    lines.append(f"# units: {UNITS_NOTE}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _grid(spec: str, name: str, parser) -> np.ndarray:
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        parser.error(f"{name} must be min:max:steps, got {spec!r}")
    if n < 1:
        parser.error(f"{name}: steps must be >= 1")
    if n == 1:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _load_config(path, parser) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, val = line.partition("=")
                values[key.strip().replace("-", "_")] = val.strip()
        return values
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")


def _apply_config(args, parser):
    """Fill in arguments that were left at their sentinel from the config file."""
    if not getattr(args, "config", None):
        return
    file_values = _load_config(args.config, parser)
    for key, raw in file_values.items():
        if not hasattr(args, key):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, raw)


def _need(args, parser, name, cast=float, default=None):
    """Resolve one possibly-config-supplied argument to its final typed value."""
    val = getattr(args, name)
    if val is None:
        if default is None:
            parser.error(f"missing required argument --{name.replace('_', '-')}")
        return default
    try:
        return cast(val)
    except (TypeError, ValueError):
        parser.error(f"--{name.replace('_', '-')}: invalid value {val!r}")


def _forbid(args, parser, model, names):
    for name in names:
        if getattr(args, name) is not None:
            parser.error(f"--{name.replace('_', '-')} is not valid for model {model!r}")


def _make_dist(kind, gamma, cutoff, parser) -> ensemble.FrequencyDistribution:
    try:
        if kind == "delta":
            if gamma not in (None, 0.0):
                parser.error("--gamma is not valid for the delta distribution")
            return ensemble.FrequencyDistribution.delta()
        if kind == "uniform":
            if cutoff is not None:
                parser.error("--cutoff applies only to the lorentzian distribution")
            return ensemble.FrequencyDistribution.uniform(gamma)
        return ensemble.FrequencyDistribution.lorentzian(gamma, cutoff)
    except ValueError as exc:
        parser.error(str(exc))


_BLOCK = ("00", "01", "10", "11")


def cmd_steady_state(args, parser) -> int:
    model = args.model
    fmt = args.format or "csv"
    if model == "single":
        _forbid(args, parser, model, ("V", "delta"))
        kappa2 = _need(args, parser, "kappa2")
        omega = _need(args, parser, "omega", default=0.0)
        trunc = _need(args, parser, "truncation", cast=int, default=4)
        p = lindblad.SingleOscParams(omega=omega, kappa2=kappa2, truncation=trunc)
        rho = lindblad.steady_state(lindblad.build_single_vdp(p))
        limit = {0: 2.0 / 3.0, 1: 1.0 / 3.0}
        rows = []
        for n in range(trunc):
            num = rho[n, n].real
            ana = limit.get(n, 0.0)
            rows.append((f"p{n}", num, 0.0, ana, 0.0, abs(num - ana)))
        meta = {"command": "steady-state", "model": model, "omega": omega,
                "kappa2": kappa2, "truncation": trunc}
    elif model in ("spin", "two"):
        _forbid(args, parser, model, ("omega",))
        V = _need(args, parser, "V")
        delta = _need(args, parser, "delta", default=0.0)
        ana = two_osc.analytic_steady_state(1.0, V, delta).as_matrix()
        if model == "spin":
            _forbid(args, parser, model, ("kappa2", "truncation"))
            rho = lindblad.steady_state(
                lindblad.build_spin_model(lindblad.SpinModelParams(omega2=delta, V=V))
            )
            block = rho
            meta = {"command": "steady-state", "model": model, "V": V, "delta": delta}
        else:
            kappa2 = _need(args, parser, "kappa2")
            trunc = _need(args, parser, "truncation", cast=int, default=3)
            p = lindblad.TwoOscParams(omega2=delta, kappa2=kappa2, V=V, truncation=trunc)
            rho = lindblad.steady_state(lindblad.build_two_vdp(p))
            pick = [0, 1, trunc, trunc + 1]  # |00>, |01>, |10>, |11> in the full space
            block = rho[np.ix_(pick, pick)]
            meta = {"command": "steady-state", "model": model, "V": V, "delta": delta,
                    "kappa2": kappa2, "truncation": trunc}
        rows = []
        for i, bi in enumerate(_BLOCK):
            for j, bj in enumerate(_BLOCK):
                num = block[i, j]
                an = ana[i, j]
                rows.append((f"rho_{bi}_{bj}", num.real, num.imag,
                             an.real, an.imag, abs(num - an)))
    else:  # pragma: no cover - argparse restricts choices
        parser.error(f"unknown model {model!r}")
    cols = ("element", "re_numeric", "im_numeric", "re_analytic", "im_analytic", "abs_diff")
    _write_table(args.out, cols, rows, meta, fmt)
    return 0


def cmd_tongue(args, parser) -> int:
    fmt = args.format or "csv"
    deltas = _grid(_need(args, parser, "delta_grid", cast=str), "--delta-grid", parser)
    vs = _grid(_need(args, parser, "v_grid", cast=str), "--v-grid", parser)
    if args.kind == "quantum":
        _forbid(args, parser, "quantum", ("kappa2",))
        grid = two_osc.tongue_scan(deltas, vs)
        meta = {"command": "tongue", "kind": "quantum",
                "delta_grid": args.delta_grid, "v_grid": args.v_grid}
        _write_table(args.out, ("delta", "V", "concurrence"), grid, meta, fmt)
        boundary = [(d, two_osc.tongue_boundary(d)) for d in deltas]
        bpath = _boundary_path(args.out)
        _write_table(bpath, ("delta", "Vc"), boundary,
                     {**meta, "content": "entanglement boundary"}, fmt)
    else:
        kappa2 = _need(args, parser, "kappa2", default=classical.DEFAULT_KAPPA2)
        rows = classical.arnold_scan(deltas, vs, kappa2=kappa2)
        meta = {"command": "tongue", "kind": "classical", "kappa2": kappa2,
                "delta_grid": args.delta_grid, "v_grid": args.v_grid}
        _write_table(args.out, ("delta", "V", "outcome", "theta_star"), rows, meta, fmt)
    return 0


def _boundary_path(out: str) -> str:
    if "." in out.rsplit("/", 1)[-1]:
        stem, _, ext = out.rpartition(".")
        return f"{stem}.boundary.{ext}"
    return out + ".boundary"


def cmd_wigner(args, parser) -> int:
    fmt = args.format or "csv"
    V = _need(args, parser, "V")
    delta = _need(args, parser, "delta", default=0.0)
    npoints = _need(args, parser, "points", cast=int, default=360)
    if npoints < 4:
        parser.error("--points must be >= 4")
    marg = two_osc.phase_marginal(two_osc.analytic_steady_state(1.0, V, delta))
    theta = 2.0 * np.pi * np.arange(npoints) / npoints
    w = marg(theta)
    meta = {"command": "wigner", "V": V, "delta": delta, "points": npoints,
            "g": marg.g, "h": marg.h, "peak_theta": marg.peak}
    _write_table(args.out, ("theta", "W"), np.column_stack([theta, w]), meta, fmt)
    return 0


def cmd_ensemble(args, parser) -> int:
    fmt = args.format or "csv"
    kind = _need(args, parser, "dist", cast=str)
    if kind not in ("delta", "uniform", "lorentzian"):
        parser.error(f"--dist must be delta|uniform|lorentzian, got {kind!r}")
    gamma = getattr(args, "gamma", None)
    gamma = float(gamma) if gamma is not None else None
    cutoff = getattr(args, "cutoff", None)
    cutoff = float(cutoff) if cutoff is not None else None
    dist = _make_dist(kind, gamma, cutoff, parser)
    kappa2 = _need(args, parser, "kappa2")
    N = _need(args, parser, "N", cast=int, default=1000)
    dt = _need(args, parser, "dt", default=5e-4)
    t_final = _need(args, parser, "t_final", default=1e3)
    seed = _need(args, parser, "seed", cast=int, default=0)
    eps = _need(args, parser, "eps", default=1e-3)
    if (args.V is None) == (args.v_grid is None):
        parser.error("exactly one of --V (trajectory) or --v-grid (scan) is required")
    vc_pred = critical.solve_vc_quantum(1.0, kappa2, dist)
    base = dict(N=N, kappa2=kappa2, dist=dist, dt=dt, t_final=t_final,
                seed=seed, eps=eps)
    meta = {"command": "ensemble", "dist": kind, "gamma": gamma, "cutoff": cutoff,
            "kappa2": kappa2, "N": N, "dt": dt, "t_final": t_final, "seed": seed,
            "eps": eps, "vc_predicted": vc_pred}
    if args.V is not None:
        V = float(args.V)
        traj = ensemble.integrate(ensemble.EnsembleConfig(V=V, **base))
        rows = np.column_stack([traj.t, traj.A.real, traj.A.imag, np.abs(traj.A)])
        _write_table(args.out, ("t", "re_A", "im_A", "abs_A"), rows,
                     {**meta, "V": V}, fmt)
    else:
        vgrid = _grid(str(args.v_grid), "--v-grid", parser)
        scan = ensemble.transition_scan(ensemble.EnsembleConfig(V=0.0, **base), vgrid)
        crossing = ensemble.first_crossing(scan)
        _write_table(args.out, ("V", "abs_A"), scan,
                     {**meta, "v_grid": args.v_grid,
                      "crossing_estimate": math.inf if crossing is None else crossing},
                     fmt)
    return 0


def cmd_vc_table(args, parser) -> int:
    fmt = args.format or "csv"
    kinds = [k.strip() for k in _need(args, parser, "dists", cast=str).split(",")]
    for k in kinds:
        if k not in ("delta", "uniform", "lorentzian"):
            parser.error(f"unknown distribution {k!r} in --dists")
    gammas = _grid(_need(args, parser, "gamma_grid", cast=str), "--gamma-grid", parser)
    kappa2 = _need(args, parser, "kappa2")
    cutoff = getattr(args, "cutoff", None)
    cutoff = float(cutoff) if cutoff is not None else None
    rows = []
    for kind in kinds:
        if kind == "delta":
            dist = ensemble.FrequencyDistribution.delta()
            rows.append(("delta", 0.0, kappa2,
                         critical.solve_vc_quantum(1.0, kappa2, dist),
                         critical.vc_closed_form_quantum(1.0, kappa2, dist),
                         critical.vc_classical(1.0, dist)))
            continue
        for g in gammas:
            if g == 0.0:
                dist = ensemble.FrequencyDistribution.delta()
            elif kind == "uniform":
                dist = ensemble.FrequencyDistribution.uniform(g)
            else:
                dist = ensemble.FrequencyDistribution.lorentzian(g, cutoff)
            rows.append((kind, float(g), kappa2,
                         critical.solve_vc_quantum(1.0, kappa2, dist),
                         critical.vc_closed_form_quantum(1.0, kappa2, dist),
                         critical.vc_classical(1.0, dist)))
    meta = {"command": "vc-table", "dists": ",".join(kinds),
            "gamma_grid": args.gamma_grid, "kappa2": kappa2, "cutoff": cutoff}
    cols = ("distribution", "gamma", "kappa2", "vc_quantum_numeric",
            "vc_quantum_closed", "vc_classical")
    _write_table(args.out, cols, rows, meta, fmt)
    return 0


def _add_common(sp):
    sp.add_argument("--out", required=True, help="output file path")
    sp.add_argument("--format", choices=("csv", "json"), default=None,
                    help="output format (default csv)")
    sp.add_argument("--config", default=None,
                    help="flat key=value file; explicit flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsync",
        description="Coupled quantum van der Pol oscillators: steady states, "
                    "entanglement tongue, synchronization transition.",
        epilog=f"All rates are in units of kappa1 = 1. Version {__version__}.",
    )
    parser.add_argument("--version", action="version", version=f"qsync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("steady-state", help="steady-state density-matrix elements")
    sp.add_argument("--model", choices=("single", "spin", "two"), required=True)
    sp.add_argument("--omega", default=None, help="oscillator frequency (single model)")
    sp.add_argument("--delta", default=None, help="detuning omega2 - omega1")
    sp.add_argument("--V", default=None, help="dissipative coupling rate")
    sp.add_argument("--kappa2", default=None, help="two-phonon damping rate")
    sp.add_argument("--truncation", default=None, help="Fock levels per oscillator")
    _add_common(sp)
    sp.set_defaults(func=cmd_steady_state)

    sp = sub.add_parser("tongue", help="entanglement / Arnold tongue scans")
    sp.add_argument("--kind", choices=("quantum", "classical"), required=True)
    sp.add_argument("--delta-grid", dest="delta_grid", default=None, help="min:max:steps")
    sp.add_argument("--v-grid", dest="v_grid", default=None, help="min:max:steps")
    sp.add_argument("--kappa2", default=None, help="classical only (default 0.5)")
    _add_common(sp)
    sp.set_defaults(func=cmd_tongue)

    sp = sub.add_parser("wigner", help="phase-difference distribution W(theta)")
    sp.add_argument("--V", default=None, help="dissipative coupling rate")
    sp.add_argument("--delta", default=None, help="detuning")
    sp.add_argument("--points", default=None, help="number of theta samples (default 360)")
    _add_common(sp)
    sp.set_defaults(func=cmd_wigner)

    sp = sub.add_parser("ensemble", help="mean-field trajectory or coupling scan")
    sp.add_argument("--dist", default=None, help="delta | uniform | lorentzian")
    sp.add_argument("--gamma", default=None, help="disorder half width")
    sp.add_argument("--cutoff", default=None, help="lorentzian tail cutoff (units of gamma)")
    sp.add_argument("--kappa2", default=None)
    sp.add_argument("--N", default=None, help="number of oscillators (default 1000)")
    sp.add_argument("--V", default=None, help="single trajectory at this coupling")
    sp.add_argument("--v-grid", dest="v_grid", default=None, help="scan min:max:steps")
    sp.add_argument("--dt", default=None, help="RK4 step (default 5e-4)")
    sp.add_argument("--t-final", dest="t_final", default=None, help="duration (default 1e3)")
    sp.add_argument("--seed", default=None, help="frequency-sample seed (default 0)")
    sp.add_argument("--eps", default=None, help="symmetry-breaking kick (default 1e-3)")
    _add_common(sp)
    sp.set_defaults(func=cmd_ensemble)

    sp = sub.add_parser("vc-table", help="critical couplings per distribution")
    sp.add_argument("--dists", default=None, help="comma list of distributions")
    sp.add_argument("--gamma-grid", dest="gamma_grid", default=None, help="min:max:steps")
    sp.add_argument("--kappa2", default=None)
    sp.add_argument("--cutoff", default=None, help="lorentzian tail cutoff (units of gamma)")
    _add_common(sp)
    sp.set_defaults(func=cmd_vc_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return args.func(args, parser)
    except QsyncError as exc:
        print(f"qsync: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FloatingPointError) as exc:
        print(f"qsync: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
