"""Command-line front door: generate maps, run the opponent experiment,
serve interactive sessions, render histories, and emit layouts."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import Game, RunConfig, initial_layout, run_experiment, serialize_history
from .qsim import CouplingMap
from .render import render_rgb, replay_history, write_png
from .worldmap import MapConfig


def _add_common(parser: argparse.ArgumentParser, rounds_default: int = 20) -> None:
    parser.add_argument("--coupling", required=True, help="coupling map JSON file")
    parser.add_argument("--size", type=int, default=256, help="grid side length L")
    parser.add_argument("--radius", type=int, default=5, help="influence radius r")
    parser.add_argument("--rounds", type=int, default=rounds_default)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--tomography", choices=("exact", "sampled"), default="exact"
    )
    parser.add_argument("--shots", type=int, default=8192)


def _config_from(args, opponent_coloring: str = "none") -> RunConfig:
    return RunConfig(
        coupling=CouplingMap.from_file(args.coupling),
        map_config=MapConfig(args.size, args.radius),
        rounds=args.rounds,
        seed=args.seed,
        tomography_mode=args.tomography,
        shots=args.shots,
        opponent_coloring=opponent_coloring,
    )


def _cmd_generate(args) -> int:
    coloring = "colorA" if args.opponents == "on" else "none"
    config = _config_from(args, coloring)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    game = Game(config)
    while not game.finished:
        game.run_round()
        rgb = render_rgb(game.world)
        write_png(out / f"map_round_{game.rounds_played:02d}.png", rgb)
    history_path = out / "history.json"
    history_path.write_text(serialize_history(game.history()), encoding="utf-8")
    print(f"wrote {history_path} and {game.rounds_played} map images to {out}")
    return 0


def _cmd_experiment(args) -> int:
    config = _config_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = run_experiment(
        config, runs=args.runs, opponents=args.opponents == "on", workers=args.workers
    )
    path = out / "summary.csv"
    path.write_text(summary.to_csv(), encoding="utf-8")
    if args.opponents == "on":
        std = summary.final_mean("standard")
        opp = summary.final_mean("opponent")
        print(f"final mean area: standard {std:.1f} vs opponent {opp:.1f}")
    print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_render(args) -> int:
    history = json.loads(Path(args.history).read_text(encoding="utf-8"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    for round_index, world in replay_history(history):
        write_png(out / f"map_round_{round_index:02d}.png", render_rgb(world))
        count += 1
    print(f"rendered {count} frames to {out}")
    return 0


def _cmd_layout(args) -> int:
    coupling = CouplingMap.from_file(args.coupling)
    cells = initial_layout(coupling, MapConfig(args.size, args.radius), args.seed)
    doc = json.dumps({"capitals": [list(c) for c in cells]}, indent=1)
    if args.out:
        Path(args.out).write_text(doc + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(doc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmapgen",
        description="geopolitical map generator driven by an emulated qubit network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="autonomous run: history plus map images")
    _add_common(p)
    p.add_argument("--opponents", choices=("on", "off"), default="off")
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("experiment", help="replicated opponent study")
    _add_common(p)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--opponents", choices=("on", "off"), default="on")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("serve", help="start the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("render", help="re-render a history file into images")
    p.add_argument("history", help="history JSON file")
    p.add_argument("--out", default="out")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("layout", help="emit the initial capital layout")
    p.add_argument("--coupling", required=True)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_layout)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
