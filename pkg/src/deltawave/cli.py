"""Command-line front end: ``deltawave quad|wave|converge --config FILE``.

The config file is TOML with optional ``[quad]``, ``[wave]`` and
``[converge]`` tables; missing keys take the defaults below. The
converge command uses the ``[wave]`` table as its base configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .chart import coefficient_set
from .quadrature import quadrature_experiment
from .solver import StabilityError, WaveConfig, WaveSolver, convergence_study, fit_slope
from .svgplot import Figure

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

QUAD_DEFAULTS = {"dt_ladder": [1 / 20, 1 / 40, 1 / 80, 1 / 160, 1 / 320]}
WAVE_DEFAULTS = {"solution": "II", "v": 0.5, "N": 45, "M": 10, "dtau": 0.05, "tau_end": 4.3,
                 "stepper": "dh2", "smooth_ablation": False, "convention": "derived"}
CONVERGE_DEFAULTS = {"dtau_ladder": [0.1, 0.05, 0.025, 0.0125], "workers": 1}
SLOPE_TOL = {"dh2": (2.0, 0.3), "dh4": (4.0, 0.4)}


class ConfigError(ValueError):
    pass


# configuration --------------------------------------------------------------

def _section(raw: dict, name: str, defaults: dict) -> dict:
    table = raw.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(table) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
    out = dict(defaults)
    out.update(table)
    return out


def _check_ladder(ladder, name: str) -> list:
    try:
        vals = [float(x) for x in ladder]
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers") from None
    if len(vals) < 2 or any(not v > 0 for v in vals):
        raise ConfigError(f"{name} needs at least two positive entries")
    ratios = np.array(vals[:-1]) / np.array(vals[1:])
    if not np.allclose(ratios, 2.0, rtol=1e-9):
        raise ConfigError(f"{name} must be a geometric ladder with ratio 2 (largest first)")
    return vals


def load_config(path: str | None) -> dict:
    raw = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from None
    unknown = set(raw) - {"quad", "wave", "converge"}
    if unknown:
        raise ConfigError(f"unknown tables: {', '.join(sorted(unknown))}")
    return {
        "quad": _section(raw, "quad", QUAD_DEFAULTS),
        "wave": _section(raw, "wave", WAVE_DEFAULTS),
        "converge": _section(raw, "converge", CONVERGE_DEFAULTS),
    }


def wave_config(table: dict, stepper: str | None = None, smooth: bool = False) -> WaveConfig:
    t = dict(table)
    if stepper is not None:
        t["stepper"] = stepper
    if smooth:
        t["smooth_ablation"] = True
    try:
        cfg = WaveConfig(solution=str(t["solution"]), v=float(t["v"]), N=int(t["N"]), M=int(t["M"]),
                         dtau=float(t["dtau"]), tau_end=float(t["tau_end"]), stepper=str(t["stepper"]),
                         ablation="all" if t["smooth_ablation"] else None,
                         convention=str(t["convention"]))
        if not 0.0 < cfg.v < 1.0:
            raise ValueError(f"need 0 < v < 1, got {cfg.v}")
        coefficient_set(cfg.convention)
        return cfg.validate()
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


# output helpers -------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path: Path, record: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _meta(command: str, args, extra: dict) -> dict:
    rec = {"command": command, "version": __version__,
           "argv": {"config": args.config, "stepper": args.stepper, "smooth": args.smooth}}
    rec.update(extra)
    return rec


# commands -------------------------------------------------------------------

def cmd_quad(cfg: dict, out: Path, args) -> int:
    ladder = _check_ladder(cfg["quad"]["dt_ladder"], "dt_ladder")
    table = quadrature_experiment(ladder)
    header = ["dt", "err_dh2_smooth", "err_dh2", "err_dh4_smooth", "err_dh4"]
    write_csv(out / "quad.csv", header, table)
    slopes = {name: fit_slope(table[:, 0], table[:, k]) for k, name in enumerate(header) if k}
    fig = Figure(title="Toy integral: composite rule errors", xlabel="dt", ylabel="|error|",
                 logx=True, logy=True)
    for k, name in enumerate(header[1:], start=1):
        fig.add(table[:, 0], table[:, k], f"{name} (slope {slopes[name]:.2f})",
                dashed="smooth" in name, markers=True)
    fig.save(out / "quad.svg")
    write_json(out / "quad.json", _meta("quad", args, {"dt_ladder": ladder, "slopes": slopes}))
    for name, s in slopes.items():
        print(f"{name}: slope {s:.3f}")
    return EXIT_OK


def _wave_plot(res, solver: WaveSolver, path: Path) -> None:
    cfg = res.config
    fig = Figure(title=f"Solution {cfg.solution}: node values ({cfg.stepper}, dtau={cfg.dtau:g})",
                 xlabel="tau", ylabel="psi at nodes; dashed: worldline sigma")
    for i in range(res.psi.shape[1]):
        fig.add(res.taus, res.psi[:, i], color="#9ab", width=0.8)
    zeta = np.array([solver.motion.zeta(t) for t in res.taus])
    fig.add(res.taus, zeta, "worldline", color="#d62728", dashed=True, width=2)
    fig.save(path)


def cmd_wave(cfg: dict, out: Path, args) -> int:
    wcfg = wave_config(cfg["wave"], args.stepper, args.smooth)
    solver = WaveSolver(wcfg)
    res = solver.evolve()
    tag = f"wave_{wcfg.solution}"
    nodes = solver.grid.nodes
    rows = ((t, i, nodes[i], res.psi[k, i], res.pi[k, i], res.errors[k])
            for k, t in enumerate(res.taus) for i in range(nodes.size))
    write_csv(out / f"{tag}.csv", ["tau", "node", "sigma", "psi", "pi", "linf_err"], rows)
    _wave_plot(res, solver, out / f"{tag}.svg")
    crossings = [{"tau": e.tau_c, "node": e.node, "sigma": e.sigma, "K0": e.K_psi[0], "J0": e.J0}
                 for e in res.crossings]
    write_json(out / f"{tag}.json", _meta("wave", args, {
        "config": asdict(wcfg), "sigma_star": res.sigma_star, "tau0": res.tau0,
        "coefficient_convention": wcfg.convention, "crossing_times": [c["tau"] for c in crossings],
        "crossings": crossings, "max_linf_error": res.max_error}))
    print(f"solution {wcfg.solution} {wcfg.stepper}: {len(res.taus) - 1} steps, "
          f"{len(crossings)} crossings, max l-inf error {res.max_error:.3e}")
    return EXIT_OK


def cmd_converge(cfg: dict, out: Path, args) -> int:
    wcfg = wave_config(cfg["wave"], args.stepper, args.smooth)
    ladder = _check_ladder(cfg["converge"]["dtau_ladder"], "dtau_ladder")
    if len(ladder) < 4:
        raise ConfigError("dtau_ladder needs at least four entries")
    workers = int(cfg["converge"]["workers"])
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    table, slopes, _ = convergence_study(wcfg, ladder, (wcfg.stepper,), workers=workers)
    st = wcfg.stepper
    slope = slopes[st]
    tag = f"converge_{wcfg.solution}_{st}" + ("_smooth" if args.smooth or wcfg.ablation else "")
    write_csv(out / f"{tag}.csv", ["dtau", "linf_error", "fitted_slope"],
              ((dt, e, slope) for dt, e in table[st]))
    fig = Figure(title=f"Solution {wcfg.solution}, {st}: max l-inf error", xlabel="dtau",
                 ylabel="error", logx=True, logy=True)
    fig.add(table[st][:, 0], table[st][:, 1], f"{st} (slope {slope:.2f})", markers=True)
    fig.save(out / f"{tag}.svg")
    target, tol = SLOPE_TOL[st]
    ok = abs(slope - target) <= tol
    write_json(out / f"{tag}.json", _meta("converge", args, {
        "config": asdict(wcfg), "dtau_ladder": ladder, "errors": table[st][:, 1],
        "fitted_slope": slope, "target": target, "tolerance": tol, "within_tolerance": ok}))
    print(f"solution {wcfg.solution} {st}: slope {slope:.3f} "
          f"(target {target} +/- {tol}) {'PASS' if ok else 'FAIL'}")
    return EXIT_OK


COMMANDS = {"quad": cmd_quad, "wave": cmd_wave, "converge": cmd_converge}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deltawave", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--stepper", choices=("dh2", "dh4"), help="override the configured stepper")
    p.add_argument("--smooth", action="store_true",
                   help="disable all jump terms and corrections (comparison runs)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        print(f"deltawave: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StabilityError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"deltawave: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
