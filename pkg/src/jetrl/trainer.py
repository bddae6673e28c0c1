"""DDQN training loop: epsilon-greedy acting, double-Q targets, periodic
hard target sync, windowed metrics, checkpointing."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import env as sim
from .env import Action, EnvConfig, N_ACTIONS, OutcomeKind
from .network import (
    AdamState,
    Network,
    adam_step,
    backward,
    clip_global_norm,
    forward,
    init_params,
    save_checkpoint,
)
from .replay import Batch, ReplayBuffer

METRICS_HEADER = "step,epsilon,mean_reward,reward_std,mean_ep_length,loss,successes,failures"


@dataclass
class TrainConfig:
    total_steps: int = 1_000_000
    lr: float = 5e-5
    gamma: float = 0.99
    buffer_capacity: int = 500_000
    batch_size: int = 256
    target_update_interval: int = 5_000
    eps_start: float = 1.0
    eps_final: float = 0.1
    exploration_fraction: float = 0.7
    max_grad_norm: float = 10.0
    learn_start: int | None = None   # defaults to batch_size
    train_frequency: int = 1         # gradient updates per environment step
    seed: int = 0
    metrics_window: int = 10_000

    def validate(self) -> None:
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("require 0 < gamma < 1")
        if not (0.0 <= self.eps_final <= self.eps_start <= 1.0):
            raise ValueError("require 0 <= eps_final <= eps_start <= 1")
        if not (0.0 < self.exploration_fraction <= 1.0):
            raise ValueError("require exploration_fraction in (0, 1]")
        if self.total_steps <= 0 or self.batch_size <= 0 or self.buffer_capacity <= 0:
            raise ValueError("step/batch/buffer sizes must be positive")
        if self.metrics_window <= 0 or self.train_frequency <= 0:
            raise ValueError("metrics_window and train_frequency must be positive")

    @property
    def effective_learn_start(self) -> int:
        return self.batch_size if self.learn_start is None else self.learn_start


def epsilon_at(step: int, cfg: TrainConfig) -> float:
    """Linear decay from eps_start to eps_final over the exploration fraction."""
    horizon = cfg.exploration_fraction * cfg.total_steps
    return max(cfg.eps_final,
               cfg.eps_start - (cfg.eps_start - cfg.eps_final) * step / horizon)


def select_action(net: Network, obs: np.ndarray, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy action; argmax ties break to the lowest index."""
    if rng.random() < epsilon:
        return int(rng.integers(N_ACTIONS))
    return int(np.argmax(forward(net, obs)))


def compute_targets(online: Network, target: Network, batch: Batch,
                    gamma: float) -> np.ndarray:
    """Double-Q targets: online network picks the action, target evaluates it."""
    a_star = np.argmax(forward(online, batch.next_obs), axis=1)
    q_next = forward(target, batch.next_obs)[np.arange(len(a_star)), a_star]
    return batch.rewards + gamma * q_next * (~batch.terminals)


def sync_target(online: Network, target: Network, step: int,
                interval: int = 5_000) -> bool:
    """Hard-copy online weights into the target at sync steps."""
    if step % interval != 0:
        return False
    for tw, ow in zip(target.weights, online.weights):
        tw[...] = ow
    for tb, ob in zip(target.biases, online.biases):
        tb[...] = ob
    return True


@dataclass
class _Window:
    ep_rewards: list[float] = field(default_factory=list)
    ep_lengths: list[int] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    successes: int = 0
    failures: int = 0

    def row(self, step: int, epsilon: float) -> str:
        if self.ep_rewards:
            mean_r = float(np.mean(self.ep_rewards))
            std_r = float(np.std(self.ep_rewards))
            mean_len = float(np.mean(self.ep_lengths))
        else:
            mean_r = std_r = mean_len = float("nan")
        loss = float(np.mean(self.losses)) if self.losses else float("nan")
        return (f"{step},{epsilon:.6f},{mean_r:.6f},{std_r:.6f},"
                f"{mean_len:.6f},{loss:.6f},{self.successes},{self.failures}")


class Trainer:
    """Owns the networks, buffer and environment for one training run."""

    def __init__(self, env_cfg: EnvConfig, cfg: TrainConfig):
        cfg.validate()
        env_cfg.validate()
        self.env_cfg = env_cfg
        self.cfg = cfg
        seeds = np.random.SeedSequence(cfg.seed).spawn(4)
        self.online = init_params(seeds[0])
        self.target = self.online.copy()
        self.adam = AdamState.for_network(self.online)
        self.buffer = ReplayBuffer(cfg.buffer_capacity)
        self.action_rng = np.random.default_rng(seeds[1])
        self.replay_rng = np.random.default_rng(seeds[2])
        self.episode_seed_rng = np.random.default_rng(seeds[3])

    def train_step(self) -> float | None:
        """One sample/target/backward/clip/Adam update; None while warm."""
        if len(self.buffer) < max(self.cfg.effective_learn_start, self.cfg.batch_size):
            return None
        batch = self.buffer.sample(self.cfg.batch_size, self.replay_rng)
        targets = compute_targets(self.online, self.target, batch, self.cfg.gamma)
        loss, grads = backward(self.online, batch.obs, batch.actions, targets)
        grads = clip_global_norm(grads, self.cfg.max_grad_norm)
        adam_step(self.online, self.adam, grads, self.cfg.lr)
        return loss

    def _next_episode(self):
        seed = int(self.episode_seed_rng.integers(0, 2**31 - 1))
        return sim.reset(self.env_cfg, seed)

    def train(self, out_dir: str | None = None,
              checkpoint_interval: int = 100_000) -> list[str]:
        """Run the full act/store/learn loop; returns the metrics CSV rows."""
        cfg = self.cfg
        rows: list[str] = []
        metrics_path = None
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            metrics_path = os.path.join(out_dir, "metrics.csv")

        world, obs = self._next_episode()
        ep_reward = 0.0
        ep_length = 0
        window = _Window()
        sync_target(self.online, self.target, 0, cfg.target_update_interval)

        f = open(metrics_path, "w") if metrics_path else None
        try:
            if f:
                f.write(METRICS_HEADER + "\n")
            for t in range(cfg.total_steps):
                eps = epsilon_at(t, cfg)
                action = select_action(self.online, obs, eps, self.action_rng)
                outcome = sim.step(world, Action(action), self.env_cfg)
                self.buffer.push(obs, action, outcome.reward,
                                 outcome.observation, outcome.terminated)
                obs = outcome.observation
                ep_reward += outcome.reward
                ep_length += 1

                if outcome.terminated:
                    window.ep_rewards.append(ep_reward)
                    window.ep_lengths.append(ep_length)
                    if outcome.outcome_kind == OutcomeKind.TARGET_DESTROYED:
                        window.successes += 1
                    else:
                        window.failures += 1
                    world, obs = self._next_episode()
                    ep_reward = 0.0
                    ep_length = 0

                for _ in range(cfg.train_frequency):
                    loss = self.train_step()
                    if loss is not None:
                        window.losses.append(loss)

                step_no = t + 1
                sync_target(self.online, self.target, step_no,
                            cfg.target_update_interval)

                if step_no % cfg.metrics_window == 0 or step_no == cfg.total_steps:
                    row = window.row(step_no, epsilon_at(step_no, cfg))
                    rows.append(row)
                    if f:
                        f.write(row + "\n")
                        f.flush()
                    window = _Window()

                if (out_dir is not None and checkpoint_interval > 0
                        and step_no % checkpoint_interval == 0
                        and step_no != cfg.total_steps):
                    save_checkpoint(self.online,
                                    os.path.join(out_dir, f"checkpoint_{step_no}.jqn"),
                                    self.adam)
        finally:
            if f:
                f.close()

        if out_dir is not None:
            save_checkpoint(self.online, os.path.join(out_dir, "checkpoint_final.jqn"),
                            self.adam)
        return rows


def train(env_cfg: EnvConfig, cfg: TrainConfig, out_dir: str | None = None,
          checkpoint_interval: int = 100_000) -> tuple[Network, list[str]]:
    """Convenience wrapper: build a Trainer, run it, return net and metrics."""
    trainer = Trainer(env_cfg, cfg)
    rows = trainer.train(out_dir, checkpoint_interval)
    return trainer.online, rows
