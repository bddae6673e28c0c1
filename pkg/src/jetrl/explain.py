"""Factual-vs-counterfactual decision analysis.

At every greedy decision point the six possible actions are each stepped
from an identical snapshot of the world; the immediate rewards become one
CfRecord. Aggregations: a 6x6 chosen-vs-alternate mean-reward matrix, the
per-action factual vs mean-counterfactual bars, and the chosen-action
distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import env as sim
from .env import Action, EnvConfig, N_ACTIONS, WorldState
from .network import Network, forward


@dataclass
class CfRecord:
    episode: int
    step: int
    chosen_action: int
    factual_reward: float
    cf_rewards: list[float]   # one per action, cf_rewards[chosen] == factual
    q_values: list[float]


@dataclass
class HeatmapMatrix:
    """Mean one-step reward per (chosen action, alternate action) cell."""

    values: np.ndarray   # (6, 6) float64; rows with count 0 hold nan
    counts: np.ndarray   # (6,) int64

    def present_rows(self) -> list[int]:
        return [i for i in range(N_ACTIONS) if self.counts[i] > 0]


@dataclass
class BarData:
    """Per-action mean factual reward vs mean reward of the 5 alternatives."""

    mean_factual: np.ndarray   # (6,) float64, nan where never chosen
    mean_cf_other: np.ndarray  # (6,) float64, nan where never chosen
    counts: np.ndarray         # (6,) int64


def probe_counterfactuals(world: WorldState, net: Network, cfg: EnvConfig,
                          episode: int = 0) -> tuple[CfRecord, sim.StepOutcome]:
    """Step all six actions from snapshots of `world`.

    On return the world is exactly as if only the chosen (greedy) action had
    been stepped; the returned outcome is that step's. Every branch reuses
    the snapshot's rng state, so the enemy behaves identically across them.
    """
    if world.done:
        raise RuntimeError("cannot probe a terminated world")
    q = forward(net, sim.observe(world, cfg))
    chosen = int(np.argmax(q))
    step_index = world.step_count

    saved = sim.snapshot(world)
    cf_rewards = [0.0] * N_ACTIONS
    chosen_world = None
    chosen_outcome = None
    for a in range(N_ACTIONS):
        branch = sim.restore(saved)
        outcome = sim.step(branch, Action(a), cfg)
        cf_rewards[a] = outcome.reward
        if a == chosen:
            chosen_world = branch
            chosen_outcome = outcome

    world.__dict__.update(chosen_world.__dict__)
    record = CfRecord(
        episode=episode,
        step=step_index,
        chosen_action=chosen,
        factual_reward=cf_rewards[chosen],
        cf_rewards=cf_rewards,
        q_values=[float(v) for v in q],
    )
    return record, chosen_outcome


def aggregate_heatmap(records: list[CfRecord]) -> HeatmapMatrix:
    """M[i][j] = mean cf_rewards[j] over records whose chosen action is i."""
    if not records:
        raise ValueError("no records to aggregate")
    sums = np.zeros((N_ACTIONS, N_ACTIONS), dtype=np.float64)
    counts = np.zeros(N_ACTIONS, dtype=np.int64)
    for r in records:
        sums[r.chosen_action] += np.asarray(r.cf_rewards, dtype=np.float64)
        counts[r.chosen_action] += 1
    values = np.full((N_ACTIONS, N_ACTIONS), np.nan)
    present = counts > 0
    values[present] = sums[present] / counts[present, None]
    return HeatmapMatrix(values, counts)


def factual_vs_counterfactual(records: list[CfRecord]) -> BarData:
    """Mean factual reward vs mean reward over the five non-chosen actions,
    grouped by chosen action."""
    if not records:
        raise ValueError("no records to aggregate")
    fact_sum = np.zeros(N_ACTIONS)
    other_sum = np.zeros(N_ACTIONS)
    counts = np.zeros(N_ACTIONS, dtype=np.int64)
    for r in records:
        i = r.chosen_action
        counts[i] += 1
        fact_sum[i] += r.factual_reward
        other_sum[i] += (sum(r.cf_rewards) - r.cf_rewards[i]) / (N_ACTIONS - 1)
    mean_factual = np.full(N_ACTIONS, np.nan)
    mean_cf_other = np.full(N_ACTIONS, np.nan)
    present = counts > 0
    mean_factual[present] = fact_sum[present] / counts[present]
    mean_cf_other[present] = other_sum[present] / counts[present]
    return BarData(mean_factual, mean_cf_other, counts)


def action_distribution(records: list[CfRecord]) -> list[int]:
    counts = [0] * N_ACTIONS
    for r in records:
        counts[r.chosen_action] += 1
    return counts


def run_explain(net: Network, cfg: EnvConfig, n_episodes: int = 1000,
                base_seed: int = 0
                ) -> tuple[list[CfRecord], HeatmapMatrix, BarData, list[int]]:
    """Roll greedy episodes and probe counterfactuals at every step."""
    records: list[CfRecord] = []
    for ep in range(n_episodes):
        world, _ = sim.reset(cfg, base_seed + ep)
        while not world.done:
            record, _ = probe_counterfactuals(world, net, cfg, episode=ep)
            records.append(record)
    heatmap = aggregate_heatmap(records)
    bars = factual_vs_counterfactual(records)
    dist = action_distribution(records)
    return records, heatmap, bars, dist


def check_record(record: CfRecord, tol: float = 1e-9) -> bool:
    """Self-consistency: the chosen branch's reward is the factual reward."""
    return (math.isfinite(record.factual_reward)
            and abs(record.cf_rewards[record.chosen_action] - record.factual_reward) <= tol)
