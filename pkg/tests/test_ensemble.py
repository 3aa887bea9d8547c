import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabviews import BoostConfig, ViewPartition, evaluate, predict, project, train, train_ensemble
from collabviews.ensemble import (
    EnsembleError,
    EnsembleModel,
    Round,
    predict_ensemble,
    training_error_bound,
)
from collabviews.learner import LinearModel

from conftest import blobs, make_dataset, rotated_threshold

C = 0.6744897501960817  # upper quartile of N(0, 1)


def constant(value: int, n_features: int = 1) -> LinearModel:
    return LinearModel(np.zeros(n_features), 1.0 if value else -1.0, np.zeros(n_features), np.ones(n_features))


def manual(alphas, outputs):
    """Hand-built ensemble of constant voters on a one-feature dataset."""
    rounds = tuple(Round((0,), constant(o), a, 0.25) for a, o in zip(alphas, outputs))
    return EnsembleModel(rounds, "boosted_pool", ViewPartition(((0,),)))


def staircase(n=3000, seed=0) -> tuple:
    """Label fires when either block's sum clears the upper quartile."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 6))
    u = x[:, :4].sum(axis=1) / 2
    v = x[:, 4:].sum(axis=1) / np.sqrt(2)
    return make_dataset(x, ((u > C) | (v > C)).astype(int))


def test_single_view_single_round_is_base_classifier():
    ds = blobs(400, gap=1.0, seed=1)
    m = train_ensemble(ds, ViewPartition(((0, 1),)), BoostConfig(rounds=1))
    assert len(m.rounds) == 1
    assert np.array_equal(predict_ensemble(m, ds), predict(train(ds), ds))


def test_perfect_view_stops_early():
    x = np.concatenate([np.linspace(-3, -1, 30), np.linspace(1, 3, 30)])
    noise = np.random.default_rng(0).standard_normal(60)
    ds = make_dataset(np.column_stack([x, noise]), (x > 0).astype(int))
    cfg = BoostConfig(rounds=10)
    m = train_ensemble(ds, ViewPartition(((0,), (1,))), cfg)
    assert len(m.rounds) == 1 and m.rounds[0].view == (0,)
    assert m.rounds[0].error == 0.0
    assert m.rounds[0].alpha == pytest.approx(0.5 * np.log((1 - cfg.epsilon_cap) / cfg.epsilon_cap))
    assert np.isfinite(m.rounds[0].alpha)
    assert evaluate(m, ds).accuracy == 1.0


def test_ties_go_to_class_one():
    ds = make_dataset(np.zeros(4), [0, 1, 0, 1])
    assert predict_ensemble(manual([0.7, 0.7], [1, 0]), ds).tolist() == [1] * 4
    assert predict_ensemble(manual([2.0, 1.0, 1.0], [0, 1, 1]), ds).tolist() == [1] * 4
    assert predict_ensemble(manual([2.0, 1.0, 0.5], [0, 1, 1]), ds).tolist() == [0] * 4


def test_evaluate_cases():
    ds = blobs(200, gap=3.0, seed=2)
    const = manual([1.0], [1])
    assert evaluate(const, ds).accuracy == 0.5
    m = train_ensemble(ds, ViewPartition(((0,), (1,))))
    a, b = evaluate(m, ds), evaluate(m, ds)
    assert a == b
    assert sum(a.confusion.values()) == 200
    assert a.accuracy == pytest.approx((a.confusion["tp"] + a.confusion["tn"]) / 200)


@pytest.mark.parametrize("seed", range(4))
def test_training_error_below_bound(seed):
    ds = rotated_threshold(800, seed=seed, flip=0.05)
    m = train_ensemble(ds, ViewPartition(((0,), (1,))), BoostConfig(rounds=8))
    train_err = 1.0 - evaluate(m, ds).accuracy
    assert train_err <= training_error_bound(m) + 1e-12
    assert all(abs(s - 1.0) <= 1e-9 for s in m.weight_sums)
    assert all(0 < r.error < 0.5 for r in m.rounds)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1000), st.floats(0.01, 100.0))
def test_alpha_scaling_invariance(seed, c):
    ds = staircase(300, seed)
    m = train_ensemble(ds, ViewPartition(((0, 1, 2, 3), (4, 5))), BoostConfig(rounds=4))
    scaled = EnsembleModel(
        tuple(Round(r.view, r.model, r.alpha * c, r.error) for r in m.rounds), m.mode, m.partition
    )
    assert np.array_equal(predict_ensemble(m, ds), predict_ensemble(scaled, ds))


def test_static_fusion():
    ds = staircase(600, 1)
    p = ViewPartition(((0, 1, 2, 3), (4, 5)))
    m = train_ensemble(ds, p, BoostConfig(mode="static_fusion"))
    assert m.mode == "static_fusion"
    assert [r.view for r in m.rounds] == list(p.views)
    for r in m.rounds:
        assert r.alpha == pytest.approx(0.5 * np.log((1 - r.error) / r.error))


def test_determinism_threads_and_serialization():
    ds = staircase(600, 2)
    p = ViewPartition(((0, 1, 2, 3), (4, 5)))
    a = train_ensemble(ds, p, threads=1)
    b = train_ensemble(ds, p, threads=4)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    back = EnsembleModel.from_dict(json.loads(json.dumps(a.to_dict())))
    assert np.array_equal(predict_ensemble(back, ds), predict_ensemble(a, ds))


def test_errors():
    ds = blobs(100, seed=3)
    with pytest.raises(EnsembleError):
        train_ensemble(ds, ViewPartition(((0,),)))
    with pytest.raises(EnsembleError):
        train_ensemble(make_dataset(np.zeros((4, 2)), [1] * 4), ViewPartition(((0, 1),)))
    m = train_ensemble(ds, ViewPartition(((0,), (1,))))
    with pytest.raises(EnsembleError):
        predict_ensemble(m, make_dataset(np.zeros(3), [0, 1, 0]))
    for bad in (dict(rounds=0), dict(epsilon_cap=0.0), dict(mode="stacking")):
        with pytest.raises(ValueError):
            BoostConfig(**bad)


def test_block_structure_boosting_beats_single_views():
    ds = staircase(3000, 0)
    p = ViewPartition(((0, 1, 2, 3), (4, 5)))
    single = [float(np.mean(predict(train(project(ds, v)), project(ds, v)) == ds.labels)) for v in p.views]
    boosted = evaluate(train_ensemble(ds, p, BoostConfig(rounds=10)), ds).accuracy
    assert boosted >= max(single) + 0.05
