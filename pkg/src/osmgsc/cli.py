"""Command line entry point: ``osmgsc {scan-f,cool,count-params,verify}``.

Exit codes: 0 success, 1 failed verification, 2 usage or config error,
3 vanishing post-selection probability.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

from .basis import Dims
from .core import param_count
from .jc import DEFAULT_N_MAX
from .protocol import (MODELS, ConfigError, ProtocolConfig, ScanSettings, build_model,
                       run_one_shot, run_repeated_baseline, scan_model)
from .states import NoOutcomeError, ThermalSpec, auto_levels

EXIT_CONFIG = 2
EXIT_NO_OUTCOME = 3

# option dest -> converter; config-file keys use the same names
OPTIONS = {
    "model": str, "omega": float, "delta": float, "g": float, "temp": float,
    "t": float, "s": float, "gamma": float, "omega1": float, "omega2": float,
    "t_min": float, "t_max": float, "grid": int, "threshold": float, "k": int,
    "n_max": int, "repeated": int, "seed": int, "interval_min": float,
    "interval_max": float,
}

DEFAULTS = {
    "model": "toy", "omega": 1.0, "delta": 1.0, "g": 0.2, "temp": 1.0,
    "gamma": 0.0, "omega1": 1.0, "omega2": 1.0, "t_min": 0.0, "t_max": 10.0,
    "grid": 2000, "threshold": 1e-4, "k": 3, "seed": 0, "interval_min": 0.1,
    "interval_max": 10.0,
}


def fmt(x: float) -> str:
    """Locale-free float with 17 significant digits."""
    return format(x, ".17g")


def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file; a section header is optional."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    parser = configparser.ConfigParser(interpolation=None)
    has_header = text.lstrip().startswith("[")
    offset = 0 if has_header else 1
    try:
        parser.read_string(text if has_header else "[osmgsc]\n" + text, source=path)
    except configparser.Error as exc:
        msg = str(exc)
        if offset and getattr(exc, "errors", None):
            msg = "; ".join(f"{path}: line {ln - offset}: {line}" for ln, line in exc.errors)
        raise ConfigError(msg) from exc

    lines = text.splitlines()

    def lineno(key):
        for i, line in enumerate(lines, 1):
            if line.split("=", 1)[0].split(":", 1)[0].strip().replace("-", "_") == key:
                return i
        return "?"

    values = {}
    for section in parser.sections():
        for raw_key, raw in parser.items(section):
            key = raw_key.replace("-", "_")
            if key not in OPTIONS:
                raise ConfigError(f"{path}: line {lineno(key)}: unknown key {raw_key!r}")
            try:
                values[key] = OPTIONS[key](raw)
            except ValueError:
                raise ConfigError(f"{path}: line {lineno(key)}: bad value {raw!r} for {raw_key}")
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    for key in OPTIONS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if opts["model"] not in MODELS:
        raise ConfigError(f"unknown model {opts['model']!r}")
    return opts


def model_params(opts: dict) -> dict:
    params = {k: opts[k] for k in ("omega", "delta", "g", "k", "gamma", "omega1", "omega2")}
    if opts["model"] == "jc":
        params["n_max"] = opts.get("n_max") or max(
            DEFAULT_N_MAX, auto_levels(opts["omega"], opts["temp"]) if opts["temp"] > 0 else 0)
    return params


def scan_settings(opts: dict) -> ScanSettings:
    return ScanSettings(opts["t_min"], opts["t_max"], opts["grid"], opts["threshold"])


def protocol_config(opts: dict) -> ProtocolConfig:
    params = model_params(opts)
    n_levels = params["n_max"] if opts["model"] == "jc" else 2
    when = opts.get("s") if opts["model"] == "xu" else opts.get("t")
    if when is None:
        when = opts.get("t", opts.get("s"))
    try:
        thermal = ThermalSpec(opts["omega"], opts["temp"], n_levels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ProtocolConfig(
        model=opts["model"], thermal=thermal, params=params,
        measure_time="auto" if when is None else when,
        scan=scan_settings(opts), seed=opts["seed"],
        interval_range=(opts["interval_min"], opts["interval_max"]),
    )


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_scan_f(args) -> int:
    opts = resolve(args)
    model = build_model(opts["model"], model_params(opts))
    result = scan_model(model, scan_settings(opts))
    rows = ["t,f"] + [f"{fmt(t)},{fmt(f)}" for t, f in zip(result.times, result.f_values)]
    _write("\n".join(rows) + "\n", args.out)

    best = result.best()
    sidecar = json.dumps({
        "model": opts["model"],
        "minima": [{"t": t, "f": f} for t, f in result.minima],
        "best": None if best is None else {"t": best[0], "f": best[1]},
        "windows": [{"t_start": a, "t_end": b} for a, b in result.windows],
        "window_threshold": opts["threshold"],
        "undefined": result.undefined,
    }, indent=2)
    if args.sidecar:
        Path(args.sidecar).write_text(sidecar + "\n")
    elif args.out:
        Path(args.out).with_suffix(".minima.json").write_text(sidecar + "\n")
    else:
        sys.stderr.write(sidecar + "\n")
    return 0


def cmd_cool(args) -> int:
    opts = resolve(args)
    cfg = protocol_config(opts)
    if opts.get("repeated"):
        reports = run_repeated_baseline(cfg, opts["repeated"])
        text = json.dumps([r.to_dict() for r in reports], indent=2)
    else:
        text = run_one_shot(cfg).to_json(indent=2)
    _write(text + "\n", args.out)
    return 0


def cmd_count_params(args) -> int:
    dims = Dims(args.n, args.m)
    pc = param_count(dims)
    nm2 = dims.total ** 2
    text = json.dumps({"n": dims.n, "m": dims.m, "constraints": pc.constraints,
                       "free_u": pc.free_u, "free_h": pc.free_h, "nm_squared": nm2,
                       "free_h_exceeds_nm_squared": pc.free_h > nm2}, indent=2)
    _write(text + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(seed=args.seed if args.seed is not None else 0)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    _write("\n".join(lines) + "\n", args.out)
    return 0 if all(r.passed for r in results) else 1


def _model_flags(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--omega", type=float, help="mode frequency / thermal level spacing")
    p.add_argument("--delta", type=float, help="jc qubit splitting")
    p.add_argument("--g", type=float, help="jc coupling strength")
    p.add_argument("--k", type=int, help="jc: number of excited blocks in f_k")
    p.add_argument("--n-max", dest="n_max", type=int, help="jc Fock truncation")
    p.add_argument("--gamma", type=float, help="xu phase shift")
    p.add_argument("--omega1", type=float, help="transition model |0,g> energy")
    p.add_argument("--omega2", type=float, help="transition model |1,e> energy")
    p.add_argument("--temp", type=float, help="temperature (k_B = 1)")
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--grid", type=int, help="scan grid points")
    p.add_argument("--threshold", type=float, help="window threshold on f")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", metavar="FILE", help="key = value file; flags win")
    p.add_argument("--out", metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osmgsc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan-f", help="sample the cooling measure over time (CSV)")
    _model_flags(scan)
    scan.add_argument("--sidecar", metavar="FILE", help="where to write minima/windows JSON")
    scan.set_defaults(func=cmd_scan_f)

    cool = sub.add_parser("cool", help="simulate the post-selected protocol (JSON)")
    _model_flags(cool)
    cool.add_argument("--t", type=float, help="measurement time; omit for the scan optimum")
    cool.add_argument("--s", type=float, help="xu: controlled-evolution duration")
    cool.add_argument("--repeated", type=int, metavar="N",
                      help="run the random-interval baseline with N measurements")
    cool.add_argument("--interval-min", dest="interval_min", type=float)
    cool.add_argument("--interval-max", dest="interval_max", type=float)
    cool.set_defaults(func=cmd_cool)

    count = sub.add_parser("count-params", help="constraint and free-parameter counts")
    count.add_argument("-n", type=int, required=True, help="target levels")
    count.add_argument("-m", type=int, required=True, help="ancilla levels")
    count.add_argument("--out", metavar="FILE")
    count.set_defaults(func=cmd_count_params)

    verify = sub.add_parser("verify", help="run the invariant suite")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out", metavar="FILE")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"osmgsc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoOutcomeError as exc:
        print(f"osmgsc: {exc}", file=sys.stderr)
        return EXIT_NO_OUTCOME
    except ValueError as exc:
        print(f"osmgsc: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
