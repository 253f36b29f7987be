"""Command-line front end: run, validate, sweep, serve.

Scenario arguments accept either a file path or the bare name of a packaged
scenario (see `proxfields.scenario.packaged_scenario_names`). Exit codes:
0 on success, 2 on any validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional

from .scenario import (
    ScenarioConfig,
    ScenarioValidationError,
    load_packaged_scenario,
    load_scenario,
    packaged_scenario_names,
)
from .service import set_param
from .simulator import run_scenario, trace_to_jsonl


def _load(ref: str) -> ScenarioConfig:
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as fh:
            return load_scenario(fh.read())
    return load_packaged_scenario(ref)


def _apply_overrides(
    cfg: ScenarioConfig, seed: Optional[int], ticks_hz: Optional[float]
) -> ScenarioConfig:
    if seed is not None:
        cfg = dataclasses.replace(cfg, noise=dataclasses.replace(cfg.noise, seed=seed))
    if ticks_hz is not None:
        cfg = dataclasses.replace(cfg, tick_rate_hz=ticks_hz)
    return cfg


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load(args.scenario), args.seed, args.ticks_hz)
    text = trace_to_jsonl(run_scenario(cfg))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _load(args.scenario)
    print(
        f"OK: {cfg.name or args.scenario}: {len(cfg.actors)} actor(s), "
        f"{len(cfg.devices)} device(s), {len(cfg.bindings)} binding(s), "
        f"{cfg.duration_s} s at {cfg.tick_rate_hz} Hz"
    )
    return 0


def _parse_values(raw: str) -> list[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ScenarioValidationError([f"bad --values list {raw!r}: {exc}"]) from exc


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _apply_overrides(_load(args.scenario), args.seed, args.ticks_hz)
    values = _parse_values(args.values)
    if not values:
        raise ScenarioValidationError(["--values must name at least one value"])
    for value in values:
        cfg = set_param(base, args.param, value)
        text = trace_to_jsonl(run_scenario(cfg))
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            safe_param = args.param.replace("[", "_").replace("]", "").replace(".", "_")
            path = os.path.join(
                args.out_dir, f"{cfg.name or 'scenario'}_{safe_param}_{value}.jsonl"
            )
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            print(path)
        else:
            sys.stdout.write(text)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import ServiceServer

    cfg = _load(args.scenario)
    server = ServiceServer(cfg, port=args.port)
    print(f"serving {cfg.name or args.scenario} on {server.host}:{server.port}")
    server.serve_forever()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxfields",
        description=(
            "Proxemic engagement engine: replay scenarios, validate configs, "
            "sweep parameters, or host a live session."
        ),
        epilog=f"packaged scenarios: {', '.join(packaged_scenario_names())}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and emit its JSONL trace")
    run.add_argument("scenario", help="scenario file path or packaged name")
    run.add_argument("--out", help="write the trace here instead of stdout")
    run.add_argument("--seed", type=int, help="override the noise seed")
    run.add_argument("--ticks-hz", type=float, help="override the tick rate")
    run.set_defaults(func=_cmd_run)

    validate = sub.add_parser("validate", help="check a scenario file and exit")
    validate.add_argument("scenario")
    validate.set_defaults(func=_cmd_validate)

    sweep = sub.add_parser("sweep", help="re-run a scenario once per parameter value")
    sweep.add_argument("scenario")
    sweep.add_argument("--param", required=True, help="e.g. actors[0].k")
    sweep.add_argument("--values", required=True, help="comma-separated numbers")
    sweep.add_argument("--out-dir", help="write one trace file per value here")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--ticks-hz", type=float)
    sweep.set_defaults(func=_cmd_sweep)

    serve = sub.add_parser("serve", help="host a live session over TCP/WebSocket")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--scenario", required=True)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioValidationError as exc:
        for problem in exc.errors:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
