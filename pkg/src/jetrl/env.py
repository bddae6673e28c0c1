"""2D fighter-jet world: kinematics, bullets, enemy turret, observations.

The world is a rectangle with mathematical (y-up) coordinates. All motion is
discrete-time; one call to step() advances the world by one tick. Every
source of randomness lives in the per-world numpy Generator, so two worlds
built from the same seed evolve identically under the same action sequence.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .geom import Vec2, bearing, distance, relative_angle, wrap_angle
from .reward import RewardBreakdown, RewardInputs, compute_reward


class Action(IntEnum):
    NOOP = 0
    TURN_LEFT = 1
    TURN_RIGHT = 2
    ACCELERATE = 3
    DECELERATE = 4
    SHOOT = 5


N_ACTIONS = 6

ACTION_NAMES = ["Noop", "TurnLeft", "TurnRight", "Accelerate", "Decelerate", "Shoot"]

# Observation vector layout (13 components).
OBS_X = 0
OBS_Y = 1
OBS_HEADING = 2
OBS_VX = 3
OBS_VY = 4
OBS_ALPHA_TARGET = 5
OBS_D_TARGET = 6
OBS_ALPHA_ENEMY = 7
OBS_D_ENEMY = 8
OBS_ENEMY_VISIBLE = 9
OBS_BULLET_VISIBLE = 10
OBS_IN_TARGET_ZONE = 11
OBS_D_BULLET = 12
OBS_DIM = 13


class Owner(IntEnum):
    AGENT = 0
    ENEMY = 1


class OutcomeKind(IntEnum):
    RUNNING = 0
    AGENT_DESTROYED = 1
    TARGET_DESTROYED = 2
    TIMEOUT = 3


@dataclass
class EnvConfig:
    """World physics and sensing parameters.

    Defaults are desk-scale conventions, not ground truth; every field can
    be overridden from the run configuration file.
    """

    world_width: float = 800.0
    world_height: float = 800.0
    v_min: float = 1.0
    v_max: float = 5.0
    initial_speed: float = 2.0
    turn_rate: float = 0.05
    accel_delta: float = 0.25
    bullet_speed: float = 8.0
    collision_threshold: float = 10.0
    target_zone_radius: float = 150.0
    agent_obs_range: float = 250.0
    enemy_range: float = 200.0
    enemy_fire_cooldown: int = 30
    enemy_aim_tolerance: float = 0.1
    max_steps: int = 2000
    dt: float = 1.0

    def validate(self) -> None:
        if not (0.0 < self.v_min < self.v_max):
            raise ValueError("require 0 < v_min < v_max")
        for name in ("target_zone_radius", "agent_obs_range", "enemy_range",
                     "collision_threshold", "bullet_speed"):
            if getattr(self, name) <= 0:
                raise ValueError(f"require {name} > 0")
        if self.max_steps <= 0:
            raise ValueError("require max_steps > 0")
        if self.world_width <= 0 or self.world_height <= 0:
            raise ValueError("require positive world dimensions")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.world_width, self.world_height)


@dataclass
class JetState:
    pos: Vec2
    heading: float  # radians, wrapped to (-pi, pi]
    speed: float    # world units per step


@dataclass
class EnemyState:
    pos: Vec2
    heading: float
    alive: bool = True
    cooldown: int = 0


@dataclass
class Bullet:
    pos: Vec2
    velocity: Vec2
    owner: Owner
    fired_in_target_zone: bool = False


@dataclass
class Events:
    hit_target: bool = False
    hit_enemy: bool = False
    agent_hit: bool = False
    timeout: bool = False


@dataclass
class WorldState:
    agent: JetState
    enemy: EnemyState
    target_pos: Vec2
    bullets: list[Bullet] = field(default_factory=list)
    step_count: int = 0
    bullets_fired_by_agent: int = 0
    prev_target_distance: float = 0.0
    rng: np.random.Generator = None  # type: ignore[assignment]
    done: bool = False
    outcome: OutcomeKind = OutcomeKind.RUNNING


@dataclass
class StepOutcome:
    observation: np.ndarray
    reward: float
    terminated: bool
    outcome_kind: OutcomeKind
    events: Events
    breakdown: RewardBreakdown


def in_world(pos: Vec2, cfg: EnvConfig) -> bool:
    return 0.0 <= pos.x <= cfg.world_width and 0.0 <= pos.y <= cfg.world_height


def apply_agent_action(jet: JetState, action: Action, cfg: EnvConfig) -> tuple[JetState, bool]:
    """Apply one discrete action and advance the jet one tick.

    Moves that would leave the world rectangle are nullified: the position
    stays put but heading/speed changes are kept. Returns the new state and
    whether the action requested a shot.
    """
    heading = jet.heading
    speed = jet.speed
    if action == Action.TURN_LEFT:
        heading = wrap_angle(heading + cfg.turn_rate)
    elif action == Action.TURN_RIGHT:
        heading = wrap_angle(heading - cfg.turn_rate)
    elif action == Action.ACCELERATE:
        speed = min(speed + cfg.accel_delta, cfg.v_max)
    elif action == Action.DECELERATE:
        speed = max(speed - cfg.accel_delta, cfg.v_min)

    new_pos = Vec2(jet.pos.x + speed * math.cos(heading) * cfg.dt,
                   jet.pos.y + speed * math.sin(heading) * cfg.dt)
    if not in_world(new_pos, cfg):
        new_pos = jet.pos.copy()
    return JetState(new_pos, heading, speed), action == Action.SHOOT


def spawn_bullet(shooter_pos: Vec2, shooter_heading: float, owner: Owner,
                 in_zone: bool, cfg: EnvConfig) -> Bullet:
    vel = Vec2(cfg.bullet_speed * math.cos(shooter_heading),
               cfg.bullet_speed * math.sin(shooter_heading))
    return Bullet(shooter_pos.copy(), vel, owner,
                  fired_in_target_zone=in_zone if owner == Owner.AGENT else False)


def advance_bullets(world: WorldState, cfg: EnvConfig) -> Events:
    """Move every bullet one tick and resolve proximity hits.

    Agent bullets only count against the target when they were fired from
    inside the targeting zone. Bullets leaving the rectangle vanish.
    """
    events = Events()
    survivors: list[Bullet] = []
    for b in world.bullets:
        b.pos.x += b.velocity.x * cfg.dt
        b.pos.y += b.velocity.y * cfg.dt
        if not in_world(b.pos, cfg):
            continue
        consumed = False
        if b.owner == Owner.AGENT:
            if world.enemy.alive and distance(b.pos, world.enemy.pos) <= cfg.collision_threshold:
                events.hit_enemy = True
                world.enemy.alive = False
                consumed = True
            elif b.fired_in_target_zone and distance(b.pos, world.target_pos) <= cfg.collision_threshold:
                events.hit_target = True
                consumed = True
        else:
            if distance(b.pos, world.agent.pos) <= cfg.collision_threshold:
                events.agent_hit = True
                consumed = True
        if not consumed:
            survivors.append(b)
    world.bullets = survivors
    return events


def enemy_policy(world: WorldState, cfg: EnvConfig) -> None:
    """Stationary rotating-turret enemy.

    Inert while the agent is outside its range; otherwise rotates toward the
    agent at the common turn rate and fires when roughly aligned and off
    cooldown. Fully deterministic.
    """
    enemy = world.enemy
    if not enemy.alive:
        return
    if distance(world.agent.pos, enemy.pos) <= cfg.enemy_range:
        rel = relative_angle(enemy.heading, bearing(enemy.pos, world.agent.pos))
        turn = max(-cfg.turn_rate, min(cfg.turn_rate, rel))
        enemy.heading = wrap_angle(enemy.heading + turn)
        rel = relative_angle(enemy.heading, bearing(enemy.pos, world.agent.pos))
        if abs(rel) < cfg.enemy_aim_tolerance and enemy.cooldown == 0:
            world.bullets.append(spawn_bullet(enemy.pos, enemy.heading, Owner.ENEMY, False, cfg))
            enemy.cooldown = cfg.enemy_fire_cooldown
    if enemy.cooldown > 0:
        enemy.cooldown -= 1


def observe(world: WorldState, cfg: EnvConfig) -> np.ndarray:
    """Build the normalized 13-component observation vector.

    The enemy block is masked to sentinels (alpha=0, d=1) when the enemy is
    dead or beyond the agent's sensing range; the nearest-bullet distance
    falls back to the sensing range itself when no enemy bullet is visible.
    """
    agent = world.agent
    d_target = distance(agent.pos, world.target_pos)
    alpha_target = relative_angle(agent.heading, bearing(agent.pos, world.target_pos))

    d_enemy = distance(agent.pos, world.enemy.pos)
    enemy_visible = world.enemy.alive and d_enemy <= cfg.agent_obs_range
    if enemy_visible:
        alpha_enemy_n = relative_angle(agent.heading, bearing(agent.pos, world.enemy.pos)) / math.pi
        d_enemy_n = min(d_enemy, cfg.diagonal) / cfg.diagonal
    else:
        alpha_enemy_n = 0.0
        d_enemy_n = 1.0

    d_bullet = cfg.agent_obs_range
    bullet_visible = False
    for b in world.bullets:
        if b.owner != Owner.ENEMY:
            continue
        d = distance(agent.pos, b.pos)
        if d <= cfg.agent_obs_range:
            bullet_visible = True
            d_bullet = min(d_bullet, d)

    in_zone = d_target <= cfg.target_zone_radius

    obs = np.empty(OBS_DIM, dtype=np.float32)
    obs[OBS_X] = agent.pos.x / cfg.world_width
    obs[OBS_Y] = agent.pos.y / cfg.world_height
    obs[OBS_HEADING] = agent.heading / math.pi
    obs[OBS_VX] = agent.speed * math.cos(agent.heading) / cfg.v_max
    obs[OBS_VY] = agent.speed * math.sin(agent.heading) / cfg.v_max
    obs[OBS_ALPHA_TARGET] = alpha_target / math.pi
    obs[OBS_D_TARGET] = min(d_target, cfg.diagonal) / cfg.diagonal
    obs[OBS_ALPHA_ENEMY] = alpha_enemy_n
    obs[OBS_D_ENEMY] = d_enemy_n
    obs[OBS_ENEMY_VISIBLE] = 1.0 if enemy_visible else 0.0
    obs[OBS_BULLET_VISIBLE] = 1.0 if bullet_visible else 0.0
    obs[OBS_IN_TARGET_ZONE] = 1.0 if in_zone else 0.0
    obs[OBS_D_BULLET] = d_bullet / cfg.agent_obs_range
    return obs


AGENT_SPAWN_FRACTION = (0.125, 0.5)  # fixed spawn at (w/8, h/2)

_MAX_PLACEMENT_TRIES = 10_000


def reset(cfg: EnvConfig, seed: int) -> tuple[WorldState, np.ndarray]:
    """Build a fresh world: fixed agent spawn, randomized target and enemy.

    Target and enemy are sampled uniformly inside the rectangle, rejecting
    layouts where any pair of (agent, target, enemy) is closer than
    1.5 * target_zone_radius.
    """
    cfg.validate()
    rng = np.random.default_rng(seed)
    spawn = Vec2(cfg.world_width * AGENT_SPAWN_FRACTION[0],
                 cfg.world_height * AGENT_SPAWN_FRACTION[1])
    min_sep = 1.5 * cfg.target_zone_radius

    for _ in range(_MAX_PLACEMENT_TRIES):
        target = Vec2(rng.uniform(0.0, cfg.world_width), rng.uniform(0.0, cfg.world_height))
        enemy = Vec2(rng.uniform(0.0, cfg.world_width), rng.uniform(0.0, cfg.world_height))
        if (distance(spawn, target) >= min_sep
                and distance(spawn, enemy) >= min_sep
                and distance(target, enemy) >= min_sep):
            break
    else:
        raise ValueError("world too small to place agent/target/enemy "
                         f"with separation {min_sep}")

    agent = JetState(spawn, 0.0, cfg.initial_speed)
    world = WorldState(
        agent=agent,
        enemy=EnemyState(enemy, 0.0),
        target_pos=target,
        prev_target_distance=distance(spawn, target),
        rng=rng,
    )
    return world, observe(world, cfg)


def step(world: WorldState, action: Action, cfg: EnvConfig) -> StepOutcome:
    """Advance the world one tick under the given agent action."""
    if world.done:
        raise RuntimeError("step() on a terminated world")
    action = Action(action)

    d_prev = world.prev_target_distance

    world.agent, fired = apply_agent_action(world.agent, action, cfg)
    if fired:
        in_zone = distance(world.agent.pos, world.target_pos) <= cfg.target_zone_radius
        world.bullets.append(spawn_bullet(world.agent.pos, world.agent.heading,
                                          Owner.AGENT, in_zone, cfg))
        world.bullets_fired_by_agent += 1

    enemy_policy(world, cfg)
    events = advance_bullets(world, cfg)

    # Terminal precedence when several fire at once: being shot trumps the
    # kill shot, and timeout only applies with no other terminal.
    if events.agent_hit:
        events.hit_target = False
    elif not events.hit_target and world.step_count + 1 >= cfg.max_steps:
        events.timeout = True

    d_cur = distance(world.agent.pos, world.target_pos)
    obs = observe(world, cfg)
    breakdown = compute_reward(build_reward_inputs(d_prev, d_cur, world, obs, events))

    world.prev_target_distance = d_cur
    world.step_count += 1

    if events.agent_hit:
        kind = OutcomeKind.AGENT_DESTROYED
    elif events.hit_target:
        kind = OutcomeKind.TARGET_DESTROYED
    elif events.timeout:
        kind = OutcomeKind.TIMEOUT
    else:
        kind = OutcomeKind.RUNNING
    world.done = kind != OutcomeKind.RUNNING
    world.outcome = kind

    return StepOutcome(obs, breakdown.total, world.done, kind, events, breakdown)


def build_reward_inputs(d_prev: float, d_cur: float, world: WorldState,
                        obs: np.ndarray, events: Events) -> RewardInputs:
    """Map a step's world snapshot and events onto reward-function inputs."""
    return RewardInputs(
        d_prev=d_prev,
        d_cur=d_cur,
        in_target_zone=int(obs[OBS_IN_TARGET_ZONE]),
        enemy_spotted=int(obs[OBS_ENEMY_VISIBLE]),
        bullets_fired=world.bullets_fired_by_agent,
        hit_target=int(events.hit_target),
        hit_enemy=int(events.hit_enemy),
        agent_hit=int(events.agent_hit),
        mission_failed=int(events.timeout),
    )


def snapshot(world: WorldState) -> WorldState:
    """Fully independent deep copy, including the rng state."""
    return copy.deepcopy(world)


def restore(saved: WorldState) -> WorldState:
    """Fresh independent world from a snapshot (the snapshot stays usable)."""
    return copy.deepcopy(saved)
