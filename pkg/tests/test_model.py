import json

import numpy as np
import pytest

from reusealloc.model import (
    Bounds, Instance, IndexOutOfRange, MalformedProbabilities,
    MissingNullAction, MissingNullType, NonpositiveCapacity,
    TableOutcomeModel, UnknownField, build_instance, compute_bounds,
    episode_streams, load_instance, mean_outcomes_for_type, sample_arrival,
    save_instance_spec,
)


def small_spec():
    return {
        "n_rewards": 1,
        "n_resources": 1,
        "n_types": 2,
        "n_actions": 2,
        "capacities": [2.0],
        "arrival_probs": [0.25, 0.75],
        "null_type": 0,
        "null_action": 0,
        "outcomes": [
            {"type": 1, "action": 1,
             "rows": [[0.5, [1.0], [1.0], [2]], [0.5, [0.0], [0.0], [0]]]},
        ],
    }


def test_build_instance_roundtrip(tmp_path):
    spec = small_spec()
    instance = build_instance(spec)
    assert instance.n_types == 2
    path = tmp_path / "inst.json"
    save_instance_spec(spec, path)
    loaded = load_instance(path)
    np.testing.assert_allclose(loaded.arrival_probs, [0.25, 0.75])


def test_unknown_field_rejected():
    spec = small_spec()
    spec["frobnicate"] = 1
    with pytest.raises(UnknownField):
        build_instance(spec)


def test_missing_null_designations():
    spec = small_spec()
    del spec["null_type"]
    with pytest.raises(MissingNullType):
        build_instance(spec)
    spec = small_spec()
    del spec["null_action"]
    with pytest.raises(MissingNullAction):
        build_instance(spec)


def test_probability_and_capacity_validation():
    spec = small_spec()
    spec["arrival_probs"] = [0.5, 0.6]
    with pytest.raises(MalformedProbabilities):
        build_instance(spec)
    spec = small_spec()
    spec["capacities"] = [0.0]
    with pytest.raises(NonpositiveCapacity):
        build_instance(spec)
    spec = small_spec()
    spec["outcomes"][0]["rows"][0][0] = 0.6  # probs now sum to 1.1
    with pytest.raises(MalformedProbabilities):
        build_instance(spec)


def test_null_outcomes_must_be_zero():
    spec = small_spec()
    spec["outcomes"].append(
        {"type": 0, "action": 1, "rows": [[1.0, [1.0], [0.0], [0]]]}
    )
    with pytest.raises(Exception):
        build_instance(spec)


def test_outcome_index_range():
    spec = small_spec()
    spec["outcomes"][0]["action"] = 9
    with pytest.raises(IndexOutOfRange):
        build_instance(spec)


def test_means_and_volume():
    instance = build_instance(small_spec())
    Wm, Vm = mean_outcomes_for_type(instance, 1)
    # action 1: E[W] = 0.5, v = E[A*D] = 0.5 * 1 * 2 = 1.0
    assert Wm[1, 0] == pytest.approx(0.5)
    assert Vm[1, 0] == pytest.approx(1.0)
    assert Wm[0, 0] == 0.0 and Vm[0, 0] == 0.0


def test_duration_tail_matches_hand_computation():
    instance = build_instance(small_spec())
    tail = instance.outcome_model.duration_tail(3)
    # E[A 1(D>=1)] = 0.5, E[A 1(D>=2)] = 0.5, E[A 1(D>=3)] = 0
    np.testing.assert_allclose(tail[0, 1, 1], [0.5, 0.5, 0.0])


def test_sampling_distributions():
    instance = build_instance(small_spec())
    rng = np.random.default_rng(0)
    draws = [sample_arrival(rng, instance.arrival_probs) for _ in range(4000)]
    assert abs(np.mean(np.array(draws) == 1) - 0.75) < 0.03
    outs = [instance.outcome_model.sample(rng, 1, 1) for _ in range(2000)]
    mean_w = np.mean([o.rewards[0] for o in outs])
    assert abs(mean_w - 0.5) < 0.05
    assert instance.outcome_model.sample(rng, 0, 0).is_zero()


def test_sample_out_of_range():
    instance = build_instance(small_spec())
    rng = np.random.default_rng(0)
    with pytest.raises(IndexOutOfRange):
        instance.outcome_model.sample(rng, 5, 0)


def test_bounds_and_assumption():
    instance = build_instance(small_spec())
    bounds = compute_bounds(instance)
    assert bounds.w_max == 1.0
    assert bounds.a_max == 1.0
    assert bounds.d_max == 2
    assert bounds.v_max == pytest.approx(1.0)
    assert bounds.gamma == pytest.approx(1.0)
    assert bounds.xi == pytest.approx(0.5)
    # xi log(C/xi) = 0.5 log 2 <= 1
    assert bounds.check_assumption(1)


def test_bounds_assumption_can_fail():
    b = Bounds(w_max=1.0, a_max=1.0, d_max=1, v_max=1.0, c_min=1.0)
    assert not b.check_assumption(8)  # 1 * log 8 > 1


def test_declared_bounds_override():
    spec = small_spec()
    spec["bounds"] = {"d_max": 5, "w_max": 2.0}
    instance = build_instance(spec)
    bounds = compute_bounds(instance)
    assert bounds.d_max == 5 and bounds.w_max == 2.0


def test_episode_streams_distinct_and_deterministic():
    s1 = episode_streams(42)
    s2 = episode_streams(42)
    a1 = s1["arrivals"].random(5)
    a2 = s2["arrivals"].random(5)
    np.testing.assert_array_equal(a1, a2)
    assert not np.allclose(a1, s2["outcomes"].random(5))


def test_instance_validation_direct():
    with pytest.raises(MalformedProbabilities):
        Instance(1, 1, 2, 2, [1.0], [0.4, 0.4],
                 TableOutcomeModel(1, 1, 2, 2, {}))
