"""Command-line entry point: ``photonsim {theory,calibrate,run,sweep,compare}``.

Settings resolve as defaults < ``SIM_SEED`` (seed only) < ``--config`` file
< command-line flags. Exit codes: 0 success, 1 usage error, 2 numerical or
tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from photonsim import __version__
from photonsim.errors import DomainError, NumericalError
from photonsim.experiment import ExperimentConfig, run_repeats
from photonsim.pointer import LambdaCalibration, PointerGrid, PHASE_STYLES, calibrate_lambda
from photonsim import svgplot
from photonsim.theory import (
    MODES,
    NONPROTECTIVE,
    PROTECTIVE,
    TheoryParams,
    nonprotective_R,
    nonprotective_T,
    protective_prob,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

DEFAULT_SHOTS = {PROTECTIVE: 5000, NONPROTECTIVE: 4000}

DEFAULTS = {
    "mode": PROTECTIVE,
    "steps": 0,
    "n_max": 10,
    "pointer_qubits": 6,
    "sigma": 0.4,
    "g": 0.106,
    "d": 3.0,
    "alpha": math.pi / 8,
    "lambda": 0.921,
    "shots": None,
    "repeats": 1,
    "seed": 0,
    "format": "csv",
    "style": "single_qubit_product",
    "sweep_lo": 0.85,
    "sweep_hi": 1.0,
    "sweep_step": 0.001,
    "tolerance": 0.01,
    "shot_sigmas": 4.0,
}

OUTPUT_COLUMNS = ("n", "p_theory", "p_exact", "p_shots", "stderr", "kept", "total")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# typed settings

_ANGLE = re.compile(r"^\s*([-+]?[0-9.]+(?:e[-+]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$", re.I)


def parse_angle(text) -> float:
    """Float radians, also accepting forms like ``pi/8`` or ``3*pi/8``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _ANGLE.match(str(text))
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(text)


def _optional_int(text):
    return None if text in (None, "", "none") else int(text)


KEY_TYPES = {
    "mode": str, "steps": int, "n_max": int, "pointer_qubits": int,
    "sigma": float, "g": float, "d": float, "alpha": parse_angle, "lambda": float,
    "shots": _optional_int, "repeats": int, "seed": int, "format": str, "style": str,
    "sweep_lo": float, "sweep_hi": float, "sweep_step": float,
    "tolerance": float, "shot_sigmas": float,
}


def _convert(key, value):
    try:
        return KEY_TYPES[key](value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEY_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def resolve_settings(args: argparse.Namespace, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    settings = dict(DEFAULTS)
    if environ.get("SIM_SEED", "").strip():
        settings["seed"] = _convert("seed", environ["SIM_SEED"].strip())
    if getattr(args, "config", None):
        settings.update(read_config(args.config))
    for key in KEY_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = _convert(key, value)
    if settings["mode"] not in MODES:
        raise UsageError(f"mode must be one of {MODES}")
    if settings["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if settings["style"] not in PHASE_STYLES:
        raise UsageError(f"style must be one of {PHASE_STYLES}")
    if settings["shots"] is None:
        settings["shots"] = DEFAULT_SHOTS[settings["mode"]]
    for key in ("steps", "n_max", "seed"):
        if settings[key] < 0:
            raise UsageError(f"{key} must be non-negative")
    if settings["repeats"] < 1 or settings["shots"] < 1:
        raise UsageError("shots and repeats must be >= 1")
    return settings


def grid_from(settings) -> PointerGrid:
    return PointerGrid(settings["pointer_qubits"], settings["d"], settings["sigma"], settings["g"])


def theory_from(settings) -> TheoryParams:
    return TheoryParams(settings["sigma"], settings["g"], settings["alpha"])


def config_from(settings, steps=None) -> ExperimentConfig:
    return ExperimentConfig(
        mode=settings["mode"], steps=settings["steps"] if steps is None else steps,
        alpha=settings["alpha"], lam=settings["lambda"], grid=grid_from(settings),
        shots=settings["shots"], seed=settings["seed"], style=settings["style"],
    )


def theory_value(params: TheoryParams, mode, n) -> float:
    return protective_prob(params, n) if mode == PROTECTIVE else nonprotective_T(params, n)


# --------------------------------------------------------------------------
# output

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


def render(rows: list, columns, fmt: str) -> str:
    if fmt == "json":
        data = [{c: _jsonable(r.get(c)) for c in columns} for r in rows]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, settings, args, command: str) -> None:
    out = getattr(args, "out", None)
    if not out:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    write_manifest(out + ".manifest", settings, command)


def write_manifest(path, settings, command) -> None:
    """Flat key=value file that ``--config`` accepts verbatim."""
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    lines = [f"# photonsim {__version__} {command}", f"# timestamp {stamp}"]
    for key in sorted(settings):
        value = settings[key]
        lines.append(f"{key} = {repr(value) if isinstance(value, float) else value}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def maybe_plot(args, x, series, **kwargs) -> None:
    path = getattr(args, "emit_plot", None)
    if path:
        svgplot.write_line_chart(path, list(x), series, **kwargs)


# --------------------------------------------------------------------------
# commands

def cmd_theory(settings, args) -> int:
    params = theory_from(settings)
    rows = []
    for n in range(settings["n_max"] + 1):
        t, r = nonprotective_T(params, n), nonprotective_R(params, n)
        rows.append({"n": n, "p_protective": protective_prob(params, n),
                     "p_transmitted": t, "p_reflected": r, "p_sum": t + r})
    cols = ("n", "p_protective", "p_transmitted", "p_reflected", "p_sum")
    emit(render(rows, cols, settings["format"]), settings, args, "theory")
    ns = [r["n"] for r in rows]
    maybe_plot(args, ns, {
        "P(n)": [r["p_protective"] for r in rows],
        "P'_T(n)": [r["p_transmitted"] for r in rows],
        "P'_R(n)": [r["p_reflected"] for r in rows],
    }, title="Survival probabilities (theory)")
    return EXIT_OK


def cmd_calibrate(settings, args) -> int:
    cal = LambdaCalibration(grid_from(settings), settings["sweep_lo"], settings["sweep_hi"],
                            settings["sweep_step"], settings["style"])
    res = calibrate_lambda(cal)
    rows = [{"lambda": float(l), "fidelity": float(f), "argmax_match": bool(m)}
            for l, f, m in zip(res.lambdas, res.fidelities, res.argmax_match)]
    summary = {"best_lambda": res.best_lambda, "best_fidelity": res.best_fidelity,
               "interval": list(res.interval) if res.interval else None,
               "degenerate": res.degenerate}
    if settings["format"] == "json":
        text = json.dumps({**summary, "curve": rows}, indent=2) + "\n"
    else:
        text = render(rows, ("lambda", "fidelity", "argmax_match"), "csv")
    emit(text, settings, args, "calibrate")
    interval = "none" if res.interval is None else f"[{res.interval[0]}, {res.interval[1]}]"
    print(f"best lambda {res.best_lambda} (fidelity {res.best_fidelity:.12f}); "
          f"argmax-match interval {interval}", file=sys.stderr)
    if res.degenerate:
        print("degenerate calibration: fidelity is flat across the sweep", file=sys.stderr)
    maybe_plot(args, res.lambdas, {"fidelity": list(res.fidelities)},
               title="Translation fidelity vs lambda", xlabel="lambda", ylabel="fidelity")
    return EXIT_OK


def _seeds(settings, n):
    # repeat r, step n -> seed + r * (n_max + 1) + n: distinct for every cell
    stride = settings["n_max"] + 1
    return [settings["seed"] + r * stride + n for r in range(settings["repeats"])]


def _row(settings, n, seeds) -> dict:
    cfg = config_from(settings, steps=n)
    results = run_repeats(cfg, seeds)
    kept = sum(r.kept for r in results)
    total = sum(r.total for r in results)
    p = kept / total
    row = {"n": n, "p_theory": theory_value(theory_from(settings), settings["mode"], n),
           "p_exact": results[0].p_exact, "p_shots": p,
           "stderr": math.sqrt(p * (1 - p) / total), "kept": kept, "total": total}
    if len(results) > 1:
        vals = [r.p_shots for r in results]
        for i, v in enumerate(vals):
            row[f"shots_r{i}"] = v
        row["mean"] = float(np.mean(vals))
        row["sd"] = float(np.std(vals, ddof=1))
    return row


def _columns(settings):
    cols = list(OUTPUT_COLUMNS)
    if settings["repeats"] > 1:
        cols += [f"shots_r{i}" for i in range(settings["repeats"])] + ["mean", "sd"]
    return cols


def cmd_run(settings, args) -> int:
    n = settings["steps"]
    row = _row(settings, n, [settings["seed"] + r for r in range(settings["repeats"])])
    emit(render([row], _columns(settings), settings["format"]), settings, args, "run")
    return EXIT_OK


def _sweep_rows(settings):
    return [_row(settings, n, _seeds(settings, n)) for n in range(settings["n_max"] + 1)]


def _plot_rows(args, rows, title):
    ns = [r["n"] for r in rows]
    maybe_plot(args, ns, {
        "theory": [r["p_theory"] for r in rows],
        "exact": [r["p_exact"] for r in rows],
        "shots": [r["p_shots"] for r in rows],
    }, title=title)


def cmd_sweep(settings, args) -> int:
    rows = _sweep_rows(settings)
    emit(render(rows, _columns(settings), settings["format"]), settings, args, "sweep")
    _plot_rows(args, rows, f"{settings['mode']} sweep")
    return EXIT_OK


def cmd_compare(settings, args) -> int:
    rows = []
    ok = True
    for row in _sweep_rows(settings):
        dev_exact = abs(row["p_exact"] - row["p_theory"])
        dev_shots = abs(row["p_shots"] - row["p_exact"])
        p = row["p_exact"]
        bound = settings["shot_sigmas"] * math.sqrt(max(p * (1 - p), 0.0) / row["total"])
        passed = dev_exact <= settings["tolerance"] and dev_shots <= bound + 1e-12
        ok &= passed
        rows.append({**row, "dev_exact": dev_exact, "dev_shots": dev_shots,
                     "shot_bound": bound, "pass": passed})
    cols = ("n", "p_theory", "p_exact", "p_shots", "stderr", "kept", "total",
            "dev_exact", "dev_shots", "shot_bound", "pass")
    emit(render(rows, cols, settings["format"]), settings, args, "compare")
    worst = max(r["dev_exact"] for r in rows)
    print(f"{settings['mode']}: max |exact - theory| = {worst:.3e} "
          f"(tolerance {settings['tolerance']}); {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    _plot_rows(args, rows, f"{settings['mode']}: theory vs simulation")
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {
    "theory": cmd_theory,
    "calibrate": cmd_calibrate,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    add = common.add_argument
    add("--mode", choices=MODES)
    add("--steps", type=int)
    add("--n-max", dest="n_max", type=int)
    add("--pointer-qubits", dest="pointer_qubits", type=int)
    add("--sigma", type=float, help="Gaussian width in mm")
    add("--g", type=float, help="coupling (shift per step) in mm")
    add("--d", type=float, help="grid half width in mm")
    add("--alpha", help="HWP e angle in radians; accepts e.g. pi/8")
    add("--lambda", dest="lambda", type=float)
    add("--shots", type=int)
    add("--repeats", type=int)
    add("--seed", type=int)
    add("--style", choices=PHASE_STYLES)
    add("--sweep-lo", dest="sweep_lo", type=float)
    add("--sweep-hi", dest="sweep_hi", type=float)
    add("--sweep-step", dest="sweep_step", type=float)
    add("--tolerance", type=float, help="compare: bound on |exact - theory|")
    add("--shot-sigmas", dest="shot_sigmas", type=float,
        help="compare: shot deviation bound in binomial standard errors")
    add("--config", metavar="FILE")
    add("--format", choices=("csv", "json"))
    add("--out", metavar="PATH")
    add("--emit-plot", dest="emit_plot", metavar="PATH.svg")

    parser = _Parser(prog="photonsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"photonsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = resolve_settings(args)
        return COMMANDS[args.command](settings, args)
    except (UsageError, DomainError) as exc:
        print(f"photonsim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"photonsim: numerical error: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
