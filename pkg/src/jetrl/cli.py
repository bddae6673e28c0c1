"""Command-line entry points: train / eval / explain / render."""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, RunConfig, load_config
from .csvio import (
    read_trajectories_csv,
    write_bars_csv,
    write_distribution_csv,
    write_episode_csv,
    write_episode_meta_csv,
    write_eval_stats_csv,
    write_heatmap_csv,
)
from .env import EnvConfig
from .evaluate import evaluate
from .explain import run_explain
from .network import CheckpointFormatError, load_checkpoint
from .svgplot import (
    render_bars_svg,
    render_distribution_svg,
    render_heatmap_svg,
    render_trajectories_svg,
    render_trajectory_paths_svg,
)
from .trainer import Trainer

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit code 1
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> _Parser:
    parser = _Parser(prog="jetrl",
                     description="2D fighter-jet DDQN: train, evaluate, explain, render")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration file (section.key = value)")
        p.add_argument("--out", help="output directory (default $JETRL_OUT or ./out)")
        p.add_argument("--seed", type=int, help="override the command's seed")

    p_train = sub.add_parser("train", help="run DDQN training")
    common(p_train)
    p_train.add_argument("--steps", type=int, help="override train.total_steps")

    p_eval = sub.add_parser("eval", help="greedy evaluation of a checkpoint")
    common(p_eval)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--episodes", type=int, help="override eval.episodes")

    p_explain = sub.add_parser("explain", help="counterfactual decision analysis")
    common(p_explain)
    p_explain.add_argument("--checkpoint", required=True)
    p_explain.add_argument("--episodes", type=int, help="override explain.episodes")

    p_render = sub.add_parser("render", help="render a trajectory SVG from an episode CSV")
    p_render.add_argument("--log", required=True, help="episode CSV path")
    p_render.add_argument("--out", required=True, help="output SVG path")
    p_render.add_argument("--config", help="run configuration file (for world size)")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "out", None):
        cfg.io.out_dir = args.out
    elif not args.config or cfg.io.out_dir == "out":
        cfg.io.out_dir = os.environ.get("JETRL_OUT", cfg.io.out_dir)
    return cfg


def _load_net(path: str):
    try:
        net, _ = load_checkpoint(path)
    except FileNotFoundError:
        raise RuntimeError(f"checkpoint not found: {path}")
    except CheckpointFormatError as e:
        raise RuntimeError(f"bad checkpoint {path}: {e}")
    return net


def cmd_train(args) -> int:
    cfg = _resolve_config(args)
    if args.seed is not None:
        cfg.train.seed = args.seed
    if args.steps is not None:
        cfg.train.total_steps = args.steps
    cfg.validate()
    out = cfg.io.out_dir
    trainer = Trainer(cfg.world, cfg.train)
    trainer.train(out, cfg.io.checkpoint_interval)
    print(f"training complete: {cfg.train.total_steps} steps -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _resolve_config(args)
    if args.seed is not None:
        cfg.eval.base_seed = args.seed
    if args.episodes is not None:
        cfg.eval.episodes = args.episodes
    cfg.validate()
    net = _load_net(args.checkpoint)
    out = cfg.io.out_dir
    os.makedirs(out, exist_ok=True)
    stats, logs = evaluate(net, cfg.world, cfg.eval.episodes, cfg.eval.base_seed)
    write_episode_csv(logs, os.path.join(out, "episodes.csv"))
    write_episode_meta_csv(logs, os.path.join(out, "episodes_meta.csv"))
    write_eval_stats_csv(stats, os.path.join(out, "eval_stats.csv"))
    render_trajectories_svg(logs[:50], os.path.join(out, "trajectories.svg"),
                            cfg.world.world_width, cfg.world.world_height)
    print(f"evaluated {stats.episodes} episodes: "
          f"{stats.successes} successes ({stats.success_rate:.1f}%)")
    return EXIT_OK


def cmd_explain(args) -> int:
    cfg = _resolve_config(args)
    if args.seed is not None:
        cfg.explain.base_seed = args.seed
    if args.episodes is not None:
        cfg.explain.episodes = args.episodes
    cfg.validate()
    net = _load_net(args.checkpoint)
    out = cfg.io.out_dir
    os.makedirs(out, exist_ok=True)
    records, heatmap, bars, dist = run_explain(
        net, cfg.world, cfg.explain.episodes, cfg.explain.base_seed)
    write_heatmap_csv(heatmap, os.path.join(out, "heatmap.csv"))
    render_heatmap_svg(heatmap, os.path.join(out, "heatmap.svg"))
    write_bars_csv(bars, os.path.join(out, "factual_vs_counterfactual.csv"))
    render_bars_svg(bars, os.path.join(out, "factual_vs_counterfactual.svg"))
    write_distribution_csv(dist, os.path.join(out, "action_distribution.csv"))
    render_distribution_svg(dist, os.path.join(out, "action_distribution.svg"))
    print(f"explained {len(records)} decisions over {cfg.explain.episodes} episodes")
    return EXIT_OK


def _meta_path_for(log_path: str) -> str | None:
    stem, ext = os.path.splitext(log_path)
    candidate = f"{stem}_meta{ext}"
    return candidate if os.path.exists(candidate) else None


def cmd_render(args) -> int:
    world = EnvConfig()
    if args.config:
        world = load_config(args.config).world
    meta = _meta_path_for(args.log)
    try:
        episodes, targets = read_trajectories_csv(args.log, meta)
    except FileNotFoundError:
        raise RuntimeError(f"log not found: {args.log}")
    if not episodes:
        raise RuntimeError(f"no episodes in {args.log}")
    if meta is None:
        print(f"warning: no meta file next to {args.log}; "
              "target markers omitted", file=sys.stderr)
    render_trajectory_paths_svg(episodes, targets, args.out,
                                world.world_width, world.world_height)
    print(f"rendered {len(episodes)} trajectories -> {args.out}")
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "explain": cmd_explain,
    "render": cmd_render,
}


def parse_cli(argv: list[str]):
    """Parse arguments; raises UsageError/ConfigError instead of exiting."""
    return build_parser().parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_cli(argv)
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
