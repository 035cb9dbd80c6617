"""Command-line driver: ``frontlab <subcommand> [--config FILE] [flags]``.

Configuration is a flat JSON object whose keys match the long flags with
dashes replaced by underscores (``--t-end`` <-> ``t_end``). Values given on
the command line override the file. Results go to an output directory
(``--out``, else ``$FRONTLAB_OUT``, else the config's ``out`` key, else
``./frontlab_out``) together with ``config.json`` and ``manifest.json``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .errors import FrontlabError, SchemaError
from .model import ModelParams, Regime, classify_regime, kanon_bounds, linear_speed
from .simulator import Grid1D, InitKind, Scheme, init_front_data, run
from .speed import (
    RunConfig,
    continuity_scan,
    estimate_spreading_speed,
    estimate_wave_speed_signed,
    find_sign_threshold,
)
from .svg import LinePlot, Series, render
from .twprofile import converged_profile, fit_decay_rates, profile_invariants
from .verify import (
    BarrierRate,
    ComparisonConfig,
    comparison_test,
    degenerate_positivity,
    large_a_barrier_check,
    search_supersolution,
)

ENV_OUT = "FRONTLAB_OUT"
DEFAULT_OUT = "frontlab_out"
# keys that do not change results and are left out of the config hash
NON_RESULT_KEYS = {"out", "workers"}


class PlotKind(str, Enum):
    PROFILE_XY = "ProfileXY"
    SPEED_VS_A = "SpeedVsA"
    FRONT_TRACE = "FrontTrace"


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ config

NUMERIC_DEFAULTS: dict[str, Any] = {
    "x_min": -200.0,
    "x_max": 200.0,
    "dx": 0.25,
    "dt": 0.01,
    "t_end": 200.0,
    "sample_every": 50,
    "width": 10.0,
    "scheme": Scheme.EXPLICIT_EULER.value,
}

KEY_TYPES: dict[str, type] = {
    "a": float, "b": float, "r": float, "d": float,
    "x_min": float, "x_max": float, "dx": float, "dt": float, "t_end": float,
    "sample_every": int, "width": float, "scheme": str,
    "init": str, "method": str,
    "a_lo": float, "a_hi": float, "tol_a": float, "zero_band": float, "closed_form": bool,
    "a_from": float, "a_to": float, "steps": int,
    "check": str, "n_pairs": int, "seed": int, "delta_star": float, "delta_0": float,
    "eps": float, "R": float, "n_nodes": int, "rate": str,
    "out": str, "workers": int,
}


@dataclass
class Command:
    name: str
    defaults: dict[str, Any]
    required: tuple[str, ...]
    handler: Callable[["Context"], dict]
    flags: list[tuple[str, dict]] = field(default_factory=list)


def _coerce(key: str, value: Any) -> Any:
    kind = KEY_TYPES.get(key)
    if kind is None:
        raise UsageError(f"unknown config key {key!r}")
    if kind is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0", "yes", "no"):
            return value.lower() in ("true", "1", "yes")
        raise UsageError(f"{key} must be a boolean, got {value!r}")
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    raise UsageError(f"{key} must be of type {kind.__name__}, got {value!r}")


def canonical_json(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def config_hash(cfg: dict) -> str:
    hashed = {k: v for k, v in cfg.items() if k not in NON_RESULT_KEYS}
    return hashlib.sha256(canonical_json(hashed).encode("utf-8")).hexdigest()


def merge_config(cmd: Command, file_cfg: dict, flag_cfg: dict) -> dict:
    merged = dict(cmd.defaults)
    for source in (file_cfg, flag_cfg):
        for k, v in source.items():
            merged[k] = _coerce(k, v)
    missing = [k for k in cmd.required if k not in merged]
    if missing:
        raise UsageError(f"{cmd.name}: missing required setting(s): {', '.join('--' + k.replace('_', '-') for k in missing)}")
    return merged


def load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a flat JSON object")
    for k, v in data.items():
        if isinstance(v, (dict, list)):
            raise UsageError(f"config key {k!r} is nested; the config must be flat")
    return data


def run_config(c: dict) -> RunConfig:
    return RunConfig(
        grid=Grid1D.from_spacing(c["x_min"], c["x_max"], c["dx"]),
        dt=c["dt"],
        scheme=Scheme(c["scheme"]),
        t_end=c["t_end"],
        sample_every=c["sample_every"],
        width=c["width"],
    )


def params(c: dict) -> ModelParams:
    return ModelParams(c["a"], c["b"], c["r"], c["d"])


# ------------------------------------------------------------------ output


def _clean(obj: Any) -> Any:
    """JSON-safe copy: non-finite floats become null, enums their values, tuples lists."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _clean(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return obj


def fmt_cell(v: Any) -> str:
    if v is None:
        return "nan"
    if isinstance(v, Enum):
        return str(v.value)
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


class Context:
    def __init__(self, cmd: str, cfg: dict, out_dir: Path):
        self.cmd, self.cfg, self.out_dir = cmd, cfg, out_dir
        self.outputs: list[str] = []

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_json(self, name: str, obj: Any) -> Path:
        path = self._path(name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_clean(obj), fh, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
            fh.write("\n")
        self.outputs.append(name)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
        path = self._path(name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt_cell(v) for v in row])
        self.outputs.append(name)
        return path

    @property
    def workers(self) -> int:
        return max(1, int(self.cfg.get("workers") or os.cpu_count() or 1))


def write_manifest(ctx: Context, started: str) -> dict:
    with open(ctx._path("config.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(ctx.cfg) + "\n")
    manifest = {
        "command": ctx.cmd,
        "config_hash": config_hash(ctx.cfg),
        "started": started,
        "finished": _now(),
        "outputs": [str(ctx.out_dir / name) for name in ctx.outputs],
        "tool_version": __version__,
    }
    with open(ctx._path("manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return manifest


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


# ------------------------------------------------------------ subcommands


def cmd_simulate(ctx: Context) -> dict:
    c = ctx.cfg
    p, rc = params(c), run_config(c)
    s0 = init_front_data(rc.grid, InitKind(c["init"]), rc.width)
    state, trace = run(s0, p, rc.scheme_for(p), rc.grid, rc.t_end, sample_every=rc.sample_every)
    ctx.write_csv("trace.csv", ["t", "pos_u", "pos_v"], [(t, pu, pv) for t, pu, pv in trace.samples])
    ctx.write_csv("final_state.csv", ["x", "u", "v"], zip(rc.grid.x, state.u, state.v))
    summary = {"params": p.as_dict(), "regime": p.regime, "t_final": state.t, "n_samples": len(trace.t)}
    ctx.write_json("simulate.json", summary)
    return summary


def cmd_speed(ctx: Context) -> dict:
    c = ctx.cfg
    p, rc = params(c), run_config(c)
    regime = classify_regime(p)
    method = c["method"]
    if method == "auto":
        method = "interface_drift" if regime is Regime.BISTABLE else "invasion_front"
    if method == "interface_drift":
        est = estimate_wave_speed_signed(p, rc)
    elif method == "invasion_front":
        est = estimate_spreading_speed(p, rc)
    else:
        raise UsageError(f"--method must be auto, invasion_front or interface_drift, got {method!r}")
    out = {"params": p.as_dict(), "regime": regime, **est.as_dict()}
    if regime is Regime.BISTABLE:
        out["kanon_bounds"] = list(kanon_bounds(p))
    elif regime in (Regime.MONOSTABLE, Regime.DEGENERATE):
        out["linear_speed"] = linear_speed(p.a)
    ctx.write_json("speed.json", out)
    return out


def cmd_threshold(ctx: Context) -> dict:
    c = ctx.cfg
    res = find_sign_threshold(
        c["b"], c["r"], c["d"], (c["a_lo"], c["a_hi"]), run_config(c),
        tol_a=c["tol_a"], zero_band=c["zero_band"], closed_form=c["closed_form"],
    )
    rows = [
        (a, s.value, s.source, None if e is None else e.value, None if e is None else e.stderr)
        for a, s, e in res.evaluations
    ]
    ctx.write_csv("threshold.csv", ["a", "sign", "source", "value", "stderr"], rows)
    out = res.as_dict()
    ctx.write_json("threshold.json", out)
    return out


def scan_grid(a_from: float, a_to: float, steps: int) -> list[float]:
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if not a_to > a_from:
        raise UsageError("--a-to must exceed --a-from")
    # rounding keeps grid points such as a = 1 exact
    return [round(float(a), 12) for a in np.linspace(a_from, a_to, steps)]


def cmd_scan(ctx: Context) -> dict:
    c = ctx.cfg
    a_list = scan_grid(c["a_from"], c["a_to"], c["steps"])
    res = continuity_scan(c["b"], c["r"], c["d"], a_list, run_config(c), workers=ctx.workers)
    rows = [(a, e.value, e.stderr, e.method, e.samples_used) for a, e in res.points]
    ctx.write_csv("scan.csv", ["a", "value", "stderr", "method", "samples_used"], rows)
    out = {
        "b": c["b"], "r": c["r"], "d": c["d"],
        "a": a_list,
        "max_jump": res.max_jump,
        "jumps": res.jumps,
        "monotone": res.monotone,
        "monotone_violations": [list(v) for v in res.monotone_violations],
        "at_one": res.at_one,
    }
    ctx.write_json("scan.json", out)
    return out


def cmd_profile(ctx: Context) -> dict:
    c = ctx.cfg
    p = params(c)
    w, est = converged_profile(p, run_config(c))
    tails = fit_decay_rates(w, p)
    inv = profile_invariants(w)
    ctx.write_csv("profile.csv", ["xi", "U", "V"], zip(w.xi, w.U, w.V))
    ctx.write_csv(
        "tails.csv",
        ["end", "field", "rate", "expected", "relative_error", "r_squared", "amplitude", "xi_a", "xi_b", "biased"],
        [(t.end, t.field, t.rate, t.expected, t.relative_error, t.r_squared, t.amplitude, *t.fit_window, t.biased) for t in tails],
    )
    out = {
        "params": p.as_dict(),
        "estimate": est.as_dict(),
        **w.as_dict(),
        "invariants": inv.as_dict(),
        "tails": [t.as_dict() for t in tails],
    }
    ctx.write_json("profile.json", out)
    return out


def cmd_verify(ctx: Context) -> dict:
    c = ctx.cfg
    check = c["check"]
    if check == "comparison":
        p = params(c)
        out = comparison_test(p, c["n_pairs"], ComparisonConfig(), seed=c["seed"]).as_dict()
    elif check == "degenerate":
        out = {"passed": True, **degenerate_positivity(c["b"], c["r"], c["d"], run_config(c)).as_dict()}
    elif check == "supersolution":
        res = search_supersolution(c["b"], c["r"], c["d"], c["delta_star"], c["delta_0"], run_config(c), workers=ctx.workers)
        out = {"passed": res.found, **res.as_dict()}
    elif check == "barrier":
        out = large_a_barrier_check(c["a"], c["eps"], c["R"], c["n_nodes"], BarrierRate(c["rate"])).as_dict()
    else:
        raise UsageError(f"--check must be one of comparison, degenerate, supersolution, barrier; got {check!r}")
    out["check"] = check
    ctx.write_json(f"verify_{check}.json", out)
    return out


# --------------------------------------------------------------------- plot


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path} is empty")
    return rows[0], rows[1:]


def _columns(path: Path, needed: Sequence[str]) -> dict[str, np.ndarray]:
    try:
        header, rows = _read_csv(path)
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{path} is not a UTF-8 CSV file") from exc
    missing = [k for k in needed if k not in header]
    if missing:
        raise SchemaError(f"{path}: expected columns {list(needed)}, missing {missing}")
    idx = {k: header.index(k) for k in needed}
    try:
        return {k: np.array([float(r[i]) for r in rows]) for k, i in idx.items()}
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{path}: non-numeric or ragged rows ({exc})") from exc


def build_plot(path: Path, kind: PlotKind) -> LinePlot:
    if not path.is_file():
        raise SchemaError(f"{path} does not exist")
    if kind is PlotKind.PROFILE_XY:
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise SchemaError(f"{path} is not a profile JSON file: {exc}") from exc
        if not (isinstance(data, dict) and all(isinstance(data.get(k), list) for k in ("xi", "U", "V"))):
            raise SchemaError(f"{path}: profile JSON needs list fields xi, U, V")
        xi, U, V = (np.array(data[k], dtype=float) for k in ("xi", "U", "V"))
        if not (xi.size == U.size == V.size and xi.size >= 2):
            raise SchemaError(f"{path}: xi, U, V must have equal length >= 2")
        c = data.get("c")
        title = "Traveling-wave profile" + (f" (c = {c:.4g})" if isinstance(c, (int, float)) else "")
        return LinePlot(title, "xi", "density", [Series("U", xi, U), Series("V", xi, V)])
    if kind is PlotKind.SPEED_VS_A:
        cols = _columns(path, ("a", "value"))
        return LinePlot("Speed versus a", "a", "speed", [Series("c(a)", cols["a"], cols["value"])], vlines=[(1.0, "a = 1")])
    cols = _columns(path, ("t", "pos_u", "pos_v"))
    return LinePlot(
        "Front positions", "t", "x", [Series("u front", cols["t"], cols["pos_u"]), Series("v front", cols["t"], cols["pos_v"])]
    )


def emit_plot(result_file: str | Path, kind: PlotKind | str, out: str | Path) -> Path:
    plot = build_plot(Path(result_file), PlotKind(kind))
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render(plot), encoding="utf-8", newline="\n")
    return out


# ------------------------------------------------------------------ parser

MODEL = ["a", "b", "r", "d"]
NUMERIC_FLAGS = ["x_min", "x_max", "dx", "dt", "t_end", "sample_every", "width", "scheme"]

COMMANDS = {
    "simulate": Command("simulate", {**NUMERIC_DEFAULTS, "init": InitKind.COMPACT_INVASION.value}, tuple(MODEL), cmd_simulate),
    "speed": Command("speed", {**NUMERIC_DEFAULTS, "method": "auto"}, tuple(MODEL), cmd_speed),
    "threshold": Command(
        "threshold",
        {**NUMERIC_DEFAULTS, "tol_a": 0.02, "zero_band": 0.02, "closed_form": True},
        ("b", "r", "d", "a_lo", "a_hi"),
        cmd_threshold,
    ),
    "scan": Command("scan", dict(NUMERIC_DEFAULTS), ("b", "r", "d", "a_from", "a_to", "steps"), cmd_scan),
    "profile": Command("profile", dict(NUMERIC_DEFAULTS), tuple(MODEL), cmd_profile),
    "verify": Command(
        "verify",
        {**NUMERIC_DEFAULTS, "n_pairs": 20, "seed": 0, "delta_star": 0.05, "delta_0": 0.01, "n_nodes": 2001, "rate": "corrected"},
        ("check",),
        cmd_verify,
    ),
}

VERIFY_NEEDS = {
    "comparison": MODEL,
    "degenerate": ["b", "r", "d"],
    "supersolution": ["b", "r", "d"],
    "barrier": ["a", "eps", "R"],
}

CHOICES = {
    "scheme": [s.value for s in Scheme],
    "init": [k.value for k in InitKind],
    "method": ["auto", "invasion_front", "interface_drift"],
    "check": list(VERIFY_NEEDS),
    "rate": [r.value for r in BarrierRate],
}

FLAG_HELP = {
    "a": "competition coefficient felt by u", "b": "competition coefficient felt by v",
    "r": "growth rate of v", "d": "diffusion coefficient of v",
    "dx": "grid spacing", "dt": "time step (upper bound)", "t_end": "final time",
    "steps": "number of a values", "workers": "worker processes (default: logical cores)",
}


def _add_flag(sp: argparse.ArgumentParser, key: str) -> None:
    kind = KEY_TYPES[key]
    kw: dict[str, Any] = {"dest": key, "default": argparse.SUPPRESS, "help": FLAG_HELP.get(key)}
    if kind is bool:
        kw["type"] = lambda s: _coerce(key, s)
        kw["metavar"] = "BOOL"
    elif key in CHOICES:
        kw["choices"] = CHOICES[key]
    else:
        kw["type"] = kind
    sp.add_argument("--" + key.replace("_", "-"), **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontlab", description="Fronts and waves of the Lotka-Volterra competition-diffusion system.")
    parser.add_argument("--version", action="version", version=f"frontlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    per_command = {
        "simulate": MODEL + NUMERIC_FLAGS + ["init"],
        "speed": MODEL + NUMERIC_FLAGS + ["method"],
        "threshold": ["b", "r", "d", "a_lo", "a_hi", "tol_a", "zero_band", "closed_form"] + NUMERIC_FLAGS,
        "scan": ["b", "r", "d", "a_from", "a_to", "steps"] + NUMERIC_FLAGS,
        "profile": MODEL + NUMERIC_FLAGS,
        "verify": ["check"] + MODEL + ["n_pairs", "seed", "delta_star", "delta_0", "eps", "R", "n_nodes", "rate"] + NUMERIC_FLAGS,
    }
    for name, keys in per_command.items():
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="flat JSON config file")
        sp.add_argument("--out", dest="out", default=argparse.SUPPRESS, help="output directory")
        sp.add_argument("--workers", dest="workers", type=int, default=argparse.SUPPRESS, help=FLAG_HELP["workers"])
        for key in keys:
            _add_flag(sp, key)
    pp = sub.add_parser("plot", help="render a result file as SVG")
    pp.add_argument("input", help="result file (profile JSON, scan CSV or trace CSV)")
    pp.add_argument("--kind", required=True, choices=[k.value for k in PlotKind])
    pp.add_argument("--out", required=True, help="SVG file to write")
    return parser


def resolve_out(flags: dict, cfg: dict) -> Path:
    if "out" in flags:
        return Path(flags["out"])
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    return Path(cfg.get("out") or DEFAULT_OUT)


def _plot_command(ns: argparse.Namespace) -> int:
    try:
        path = emit_plot(ns.input, ns.kind, ns.out)
    except (FrontlabError, OSError) as exc:
        print(f"frontlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(str(path))
    return 0


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        if ns.command == "plot":
            return _plot_command(ns)
        cmd = COMMANDS[ns.command]
        flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
        file_cfg = load_config_file(ns.config)
        cfg = merge_config(cmd, file_cfg, flags)
        if cmd.name == "verify":
            missing = [k for k in VERIFY_NEEDS[cfg["check"]] if k not in cfg] if cfg["check"] in VERIFY_NEEDS else []
            if missing:
                raise UsageError(f"verify --check {cfg['check']}: missing {', '.join('--' + k for k in missing)}")
        for key in ("scheme", "init", "method", "check", "rate"):
            if key in cfg and key in CHOICES and cfg[key] not in CHOICES[key]:
                raise UsageError(f"{key} must be one of {CHOICES[key]}, got {cfg[key]!r}")
        ctx = Context(cmd.name, cfg, resolve_out(flags, cfg))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"frontlab: usage error: {exc}", file=sys.stderr)
        return 2
    started = _now()
    try:
        result = cmd.handler(ctx)
    except UsageError as exc:
        print(f"frontlab: usage error: {exc}", file=sys.stderr)
        return 2
    except (FrontlabError, ValueError) as exc:
        print(f"frontlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    write_manifest(ctx, started)
    headline = {k: result[k] for k in ("value", "stderr", "a_star", "max_jump", "passed", "residual_norm", "t_final") if k in result}
    print(json.dumps(_clean(headline), sort_keys=True))
    return 0


def main() -> None:
    sys.exit(run_command())
