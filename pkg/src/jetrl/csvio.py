"""Delimited-text emitters. All numeric fields, fixed 6-decimal floats,
trailing newline; byte-reproducible for identical inputs."""

from __future__ import annotations

import csv

import numpy as np

from .env import ACTION_NAMES, N_ACTIONS, OutcomeKind
from .evaluate import EpisodeLog
from .explain import BarData, HeatmapMatrix

EPISODE_HEADER = "episode,step,x,y,heading,speed,action,reward,d_target,d_enemy,t_z,v_e,outcome"
EPISODE_META_HEADER = ("episode,seed,outcome,length,total_reward,"
                       "target_x,target_y,enemy_x,enemy_y")

OUTCOME_NAMES = {
    OutcomeKind.RUNNING: "Running",
    OutcomeKind.AGENT_DESTROYED: "AgentDestroyed",
    OutcomeKind.TARGET_DESTROYED: "TargetDestroyed",
    OutcomeKind.TIMEOUT: "Timeout",
}


def _f(v: float) -> str:
    return f"{v:.6f}"


def write_episode_csv(logs: list[EpisodeLog], path: str) -> None:
    """One row per step, ordered by (episode, step)."""
    with open(path, "w", newline="") as fh:
        fh.write(EPISODE_HEADER + "\n")
        for lg in sorted(logs, key=lambda l: l.episode):
            name = OUTCOME_NAMES[lg.outcome]
            for s in lg.steps:
                fh.write(f"{lg.episode},{s.step},{_f(s.x)},{_f(s.y)},{_f(s.heading)},"
                         f"{_f(s.speed)},{s.action},{_f(s.reward)},{_f(s.d_target)},"
                         f"{_f(s.d_enemy)},{s.in_target_zone},{s.enemy_visible},{name}\n")


def write_episode_meta_csv(logs: list[EpisodeLog], path: str) -> None:
    """Per-episode companion file carrying the layout the step rows lack."""
    with open(path, "w", newline="") as fh:
        fh.write(EPISODE_META_HEADER + "\n")
        for lg in sorted(logs, key=lambda l: l.episode):
            fh.write(f"{lg.episode},{lg.seed},{OUTCOME_NAMES[lg.outcome]},{lg.length},"
                     f"{_f(lg.total_reward)},{_f(lg.target_pos.x)},{_f(lg.target_pos.y)},"
                     f"{_f(lg.enemy_pos.x)},{_f(lg.enemy_pos.y)}\n")


def read_trajectories_csv(path: str, meta_path: str | None = None
                          ) -> tuple[list[dict], dict[int, tuple[float, float]]]:
    """Load agent paths (and target positions when the meta file exists)
    back from the delimited logs, for offline rendering."""
    paths: dict[int, list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            ep = int(row["episode"])
            paths.setdefault(ep, []).append((float(row["x"]), float(row["y"])))
    targets: dict[int, tuple[float, float]] = {}
    if meta_path is not None:
        with open(meta_path, newline="") as fh:
            for row in csv.DictReader(fh):
                targets[int(row["episode"])] = (float(row["target_x"]), float(row["target_y"]))
    episodes = [{"episode": ep, "points": pts} for ep, pts in sorted(paths.items())]
    return episodes, targets


def write_heatmap_csv(matrix: HeatmapMatrix, path: str) -> None:
    """6 labeled rows x 6 labeled columns plus a count column; cells of
    absent rows are left empty."""
    with open(path, "w", newline="") as fh:
        fh.write("chosen," + ",".join(ACTION_NAMES) + ",count\n")
        for i in range(N_ACTIONS):
            if matrix.counts[i] > 0:
                cells = ",".join(_f(matrix.values[i, j]) for j in range(N_ACTIONS))
            else:
                cells = ",".join("" for _ in range(N_ACTIONS))
            fh.write(f"{ACTION_NAMES[i]},{cells},{matrix.counts[i]}\n")


def read_heatmap_csv(path: str) -> HeatmapMatrix:
    values = np.full((N_ACTIONS, N_ACTIONS), np.nan)
    counts = np.zeros(N_ACTIONS, dtype=np.int64)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for i, row in enumerate(reader):
            counts[i] = int(row[-1])
            if counts[i] > 0:
                values[i] = [float(v) for v in row[1:-1]]
    return HeatmapMatrix(values, counts)


def write_bars_csv(bars: BarData, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("action,mean_factual,mean_cf_other,count\n")
        for i in range(N_ACTIONS):
            if bars.counts[i] > 0:
                fh.write(f"{ACTION_NAMES[i]},{_f(bars.mean_factual[i])},"
                         f"{_f(bars.mean_cf_other[i])},{bars.counts[i]}\n")
            else:
                fh.write(f"{ACTION_NAMES[i]},,,{bars.counts[i]}\n")


def write_distribution_csv(counts: list[int], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("action,count\n")
        for i in range(N_ACTIONS):
            fh.write(f"{ACTION_NAMES[i]},{counts[i]}\n")


def write_eval_stats_csv(stats, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("episodes,successes,failures,success_rate,"
                 "mean_length,median_length,mean_total_reward\n")
        fh.write(f"{stats.episodes},{stats.successes},{stats.failures},"
                 f"{_f(stats.success_rate)},{_f(stats.mean_length)},"
                 f"{_f(stats.median_length)},{_f(stats.mean_total_reward)}\n")
