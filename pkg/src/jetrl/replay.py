"""Fixed-capacity uniform experience replay backed by preallocated arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env import OBS_DIM


@dataclass
class Batch:
    obs: np.ndarray        # (B, OBS_DIM) float32
    actions: np.ndarray    # (B,) int64
    rewards: np.ndarray    # (B,) float32
    next_obs: np.ndarray   # (B, OBS_DIM) float32
    terminals: np.ndarray  # (B,) bool


class ReplayBuffer:
    """Ring buffer with uniform with-replacement sampling."""

    def __init__(self, capacity: int = 500_000, obs_dim: int = OBS_DIM):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.terminals = np.zeros(capacity, dtype=bool)
        self.cursor = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def push(self, obs: np.ndarray, action: int, reward: float,
             next_obs: np.ndarray, terminal: bool) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.terminals[i] = terminal
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch | None:
        """Uniform batch, or None while the buffer holds fewer items."""
        if self.size < batch_size:
            return None
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(
            obs=self.obs[idx],
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            next_obs=self.next_obs[idx],
            terminals=self.terminals[idx],
        )
