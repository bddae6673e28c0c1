"""Per-step scalar reward with an auditable per-term breakdown."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class RewardInputs:
    d_prev: float            # agent-target distance before the step
    d_cur: float             # agent-target distance after the step
    in_target_zone: int      # 1 if the agent sits inside the targeting zone
    enemy_spotted: int       # 1 if the enemy is alive and within sensor range
    bullets_fired: int       # cumulative agent shots this episode
    hit_target: int          # 1 if an in-zone agent bullet reached the target
    hit_enemy: int           # 1 if an agent bullet destroyed the enemy
    agent_hit: int           # 1 if an enemy bullet reached the agent
    mission_failed: int      # 1 on step-limit timeout

    def validate(self) -> None:
        if self.d_prev < 0 or self.d_cur < 0:
            raise ValueError("distances must be non-negative")
        if self.bullets_fired < 0:
            raise ValueError("bullets_fired must be non-negative")
        for name in ("in_target_zone", "enemy_spotted", "hit_target",
                     "hit_enemy", "agent_hit", "mission_failed"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1")


@dataclass
class RewardBreakdown:
    """One named scalar per term of the reward expression."""

    step_cost: float
    retreat_penalty: float
    outside_zone_penalty: float
    enemy_unseen_penalty: float
    ammo_penalty: float
    agent_hit_penalty: float
    mission_failure_penalty: float
    approach_reward: float
    zone_bonus: float
    enemy_spotted_bonus: float
    target_hit_reward: float
    enemy_hit_reward: float
    total: float

    def terms(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "total"}


def compute_reward(inp: RewardInputs) -> RewardBreakdown:
    """Evaluate the shaped reward.

    Distances enter in raw world units; the signed approach term is not
    rectified, so retreating incurs both the -15 rectified penalty and a
    negative approach term.
    """
    inp.validate()
    delta = inp.d_cur - inp.d_prev
    terms = RewardBreakdown(
        step_cost=-0.1,
        retreat_penalty=-15.0 * max(0.0, delta),
        outside_zone_penalty=-(1.0 - inp.in_target_zone),
        enemy_unseen_penalty=-0.5 * (1.0 - inp.enemy_spotted),
        ammo_penalty=-0.5 * max(0.0, inp.bullets_fired - 50.0),
        agent_hit_penalty=-500.0 * inp.agent_hit,
        mission_failure_penalty=-1000.0 * inp.mission_failed,
        approach_reward=10.0 * (inp.d_prev - inp.d_cur),
        zone_bonus=2.0 * inp.in_target_zone,
        enemy_spotted_bonus=1.0 * inp.enemy_spotted,
        target_hit_reward=200.0 * inp.hit_target,
        enemy_hit_reward=100.0 * inp.hit_enemy,
        total=0.0,
    )
    terms.total = sum(terms.terms().values())
    return terms
