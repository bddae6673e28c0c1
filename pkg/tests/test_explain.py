import numpy as np
import pytest

from jetrl import env as sim
from jetrl.env import Action, EnemyState, EnvConfig, JetState, WorldState
from jetrl.evaluate import run_episode
from jetrl.explain import (
    CfRecord,
    action_distribution,
    aggregate_heatmap,
    factual_vs_counterfactual,
    probe_counterfactuals,
    run_explain,
)
from jetrl.geom import Vec2, distance
from jetrl.network import Network, init_params


@pytest.fixture
def cfg():
    return EnvConfig(max_steps=200)


def shoot_biased_net() -> Network:
    w = np.zeros((13, 6), dtype=np.float32)
    b = np.array([0, 0, 0, 0, 0, 1], dtype=np.float32)
    return Network([w], [b])


def record(chosen, cf, episode=0, step=0) -> CfRecord:
    return CfRecord(episode=episode, step=step, chosen_action=chosen,
                    factual_reward=cf[chosen], cf_rewards=list(cf),
                    q_values=[0.0] * 6)


# --- probing -------------------------------------------------------------------

def test_probe_self_consistency(cfg):
    net = init_params(4)
    world, _ = sim.reset(cfg, 5)
    rec, outcome = probe_counterfactuals(world, net, cfg)
    assert rec.cf_rewards[rec.chosen_action] == rec.factual_reward
    assert outcome.reward == rec.factual_reward
    assert len(rec.cf_rewards) == 6
    assert world.step_count == 1


def test_probe_deterministic(cfg):
    net = init_params(4)
    w1, _ = sim.reset(cfg, 6)
    w2, _ = sim.reset(cfg, 6)
    r1, _ = probe_counterfactuals(w1, net, cfg)
    r2, _ = probe_counterfactuals(w2, net, cfg)
    assert r1 == r2


def test_probe_errors_on_terminated(cfg):
    net = init_params(4)
    short = EnvConfig(max_steps=1)
    world, _ = sim.reset(short, 1)
    sim.step(world, Action.NOOP, short)
    with pytest.raises(RuntimeError):
        probe_counterfactuals(world, net, short)


def test_probing_leaves_rollout_identical(cfg):
    net = init_params(4)
    baseline = run_episode(net, cfg, seed=9)

    world, _ = sim.reset(cfg, 9)
    probed = []
    while not world.done:
        rec, outcome = probe_counterfactuals(world, net, cfg)
        probed.append((rec.chosen_action, outcome.reward,
                       world.agent.pos.x, world.agent.pos.y))
    assert len(probed) == baseline.length
    for (a, r, x, y), s in zip(probed, baseline.steps):
        assert (a, r, x, y) == (s.action, s.reward, s.x, s.y)


def test_probe_shoot_scenario_dominates(cfg):
    # agent deep inside the zone and aligned: shooting destroys the target
    # this step, so its one-step reward carries the +200 terminal bonus
    world = WorldState(
        agent=JetState(Vec2(388, 400), 0.0, 2.0),
        enemy=EnemyState(Vec2(700, 700), 0.0),
        target_pos=Vec2(400, 400),
        prev_target_distance=12.0,
        rng=np.random.default_rng(0),
    )
    rec, outcome = probe_counterfactuals(world, shoot_biased_net(), cfg)
    assert rec.chosen_action == Action.SHOOT
    assert outcome.outcome_kind == sim.OutcomeKind.TARGET_DESTROYED
    assert outcome.breakdown.target_hit_reward == 200.0
    # the +200 terminal bonus dominates; alternatives can pick up at most
    # one step of approach shaping (10 * v_max = 50)
    for a in range(6):
        if a != Action.SHOOT:
            assert rec.cf_rewards[Action.SHOOT] >= rec.cf_rewards[a] + 200.0 - 10 * cfg.v_max


# --- aggregations ----------------------------------------------------------------

def test_heatmap_single_record():
    rec = record(2, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    m = aggregate_heatmap([rec])
    assert m.counts[2] == 1
    assert np.array_equal(m.values[2], rec.cf_rewards)
    for i in (0, 1, 3, 4, 5):
        assert m.counts[i] == 0
        assert np.all(np.isnan(m.values[i]))
    assert m.present_rows() == [2]


def test_heatmap_mean_of_two():
    m = aggregate_heatmap([record(1, [0, 2, 4, 6, 8, 10]),
                           record(1, [2, 4, 6, 8, 10, 12])])
    assert np.array_equal(m.values[1], [1, 3, 5, 7, 9, 11])
    assert m.counts[1] == 2


def test_heatmap_diagonal_equals_factual_means():
    rng = np.random.default_rng(8)
    records = [record(int(rng.integers(6)), rng.normal(size=6).tolist(), step=i)
               for i in range(300)]
    m = aggregate_heatmap(records)
    bars = factual_vs_counterfactual(records)
    for i in m.present_rows():
        assert m.values[i, i] == pytest.approx(bars.mean_factual[i], abs=1e-9)


def test_heatmap_empty_errors():
    with pytest.raises(ValueError):
        aggregate_heatmap([])
    with pytest.raises(ValueError):
        factual_vs_counterfactual([])


def test_bars_uniform_record():
    bars = factual_vs_counterfactual([record(3, [1.0] * 6)])
    assert bars.mean_factual[3] == 1.0
    assert bars.mean_cf_other[3] == 1.0
    assert np.isnan(bars.mean_factual[0])


def test_bars_strictly_best_choice():
    recs = [record(0, [10.0, 1.0, 2.0, 0.0, -1.0, 3.0], step=i) for i in range(5)]
    bars = factual_vs_counterfactual(recs)
    assert bars.mean_factual[0] > bars.mean_cf_other[0]
    assert bars.counts[0] == 5


def test_bars_cover_only_chosen_actions():
    recs = [record(1, [0.0] * 6), record(4, [0.0] * 6)]
    bars = factual_vs_counterfactual(recs)
    present = [i for i in range(6) if bars.counts[i] > 0]
    assert present == [1, 4]


def test_action_distribution():
    assert action_distribution([]) == [0] * 6
    recs = [record(5, [0.0] * 6) for _ in range(10)]
    assert action_distribution(recs) == [0, 0, 0, 0, 0, 10]
    rng = np.random.default_rng(1)
    recs = [record(int(rng.integers(6)), [0.0] * 6) for _ in range(137)]
    assert sum(action_distribution(recs)) == 137


def test_aggregations_permutation_invariant():
    rng = np.random.default_rng(2)
    records = [record(int(rng.integers(6)), rng.normal(size=6).tolist(), step=i)
               for i in range(100)]
    shuffled = list(records)
    rng.shuffle(shuffled)
    m1, m2 = aggregate_heatmap(records), aggregate_heatmap(shuffled)
    assert np.allclose(m1.values, m2.values, equal_nan=True)
    b1, b2 = factual_vs_counterfactual(records), factual_vs_counterfactual(shuffled)
    assert np.allclose(b1.mean_factual, b2.mean_factual, equal_nan=True)
    assert action_distribution(records) == action_distribution(shuffled)


def test_run_explain_cross_artifact_identities(cfg):
    net = init_params(4)
    records, heatmap, bars, dist = run_explain(net, cfg, n_episodes=2, base_seed=3)
    assert sum(dist) == len(records)
    for i in heatmap.present_rows():
        assert heatmap.values[i, i] == pytest.approx(bars.mean_factual[i], abs=1e-9)
    for rec in records:
        assert abs(rec.cf_rewards[rec.chosen_action] - rec.factual_reward) <= 1e-9
