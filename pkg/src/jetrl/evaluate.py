"""Greedy-policy evaluation: episode rollouts, success statistics and
trajectory logs for rendering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import env as sim
from .env import (
    Action,
    EnvConfig,
    OBS_ENEMY_VISIBLE,
    OBS_IN_TARGET_ZONE,
    OutcomeKind,
)
from .geom import Vec2, distance
from .network import Network, forward


@dataclass
class StepRecord:
    step: int
    x: float
    y: float
    heading: float
    speed: float
    action: int
    reward: float
    d_target: float
    d_enemy: float
    in_target_zone: int
    enemy_visible: int


@dataclass
class EpisodeLog:
    episode: int
    seed: int
    outcome: OutcomeKind
    length: int
    total_reward: float
    steps: list[StepRecord]
    target_pos: Vec2
    enemy_pos: Vec2


@dataclass
class EvalStats:
    episodes: int
    successes: int
    failures: int
    success_rate: float
    mean_length: float
    median_length: float
    mean_total_reward: float


def run_episode(net: Network, cfg: EnvConfig, seed: int,
                policy_epsilon: float = 0.0, episode_id: int = 0,
                rng: np.random.Generator | None = None) -> EpisodeLog:
    """Roll one episode to termination under an epsilon-greedy policy
    (greedy by default) and log every step."""
    if policy_epsilon > 0.0 and rng is None:
        rng = np.random.default_rng(seed)
    world, obs = sim.reset(cfg, seed)
    records: list[StepRecord] = []
    total = 0.0
    while not world.done:
        if policy_epsilon > 0.0 and rng.random() < policy_epsilon:
            action = int(rng.integers(sim.N_ACTIONS))
        else:
            action = int(np.argmax(forward(net, obs)))
        outcome = sim.step(world, Action(action), cfg)
        records.append(StepRecord(
            step=world.step_count - 1,
            x=world.agent.pos.x,
            y=world.agent.pos.y,
            heading=world.agent.heading,
            speed=world.agent.speed,
            action=action,
            reward=outcome.reward,
            d_target=distance(world.agent.pos, world.target_pos),
            d_enemy=distance(world.agent.pos, world.enemy.pos),
            in_target_zone=int(outcome.observation[OBS_IN_TARGET_ZONE]),
            enemy_visible=int(outcome.observation[OBS_ENEMY_VISIBLE]),
        ))
        total += outcome.reward
        obs = outcome.observation
    return EpisodeLog(
        episode=episode_id,
        seed=seed,
        outcome=world.outcome,
        length=len(records),
        total_reward=total,
        steps=records,
        target_pos=world.target_pos.copy(),
        enemy_pos=world.enemy.pos.copy(),
    )


def evaluate(net: Network, cfg: EnvConfig, n_episodes: int = 1000,
             base_seed: int = 0) -> tuple[EvalStats, list[EpisodeLog]]:
    """Greedy evaluation over consecutive seeds; success means the target
    was destroyed."""
    if n_episodes <= 0:
        raise ValueError("n_episodes must be positive")
    logs = [run_episode(net, cfg, base_seed + i, episode_id=i)
            for i in range(n_episodes)]
    successes = sum(1 for lg in logs if lg.outcome == OutcomeKind.TARGET_DESTROYED)
    lengths = [lg.length for lg in logs]
    stats = EvalStats(
        episodes=n_episodes,
        successes=successes,
        failures=n_episodes - successes,
        success_rate=100.0 * successes / n_episodes,
        mean_length=float(np.mean(lengths)),
        median_length=float(np.median(lengths)),
        mean_total_reward=float(np.mean([lg.total_reward for lg in logs])),
    )
    return stats, logs


def collect_trajectories(net: Network, cfg: EnvConfig, n: int = 50,
                         base_seed: int = 0) -> list[EpisodeLog]:
    """Episode logs with randomized target/enemy layouts, for the renderer."""
    return [run_episode(net, cfg, base_seed + i, episode_id=i) for i in range(n)]
