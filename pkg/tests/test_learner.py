import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collabviews import LinearModel, TrainConfig, cv_error, predict, train, weighted_error
from collabviews.dataset import project
from collabviews.learner import LearnerError, stratified_folds, uniform_weights

from conftest import blobs, make_dataset, rotated_threshold


def separable_1d():
    x = np.concatenate([np.linspace(-3, -1, 20), np.linspace(1, 3, 20)])
    return make_dataset(x, (x > 0).astype(int))


def test_separable_training_accuracy():
    ds = separable_1d()
    m = train(ds)
    assert np.array_equal(predict(m, ds), ds.labels)
    assert weighted_error(m, ds, uniform_weights(ds.n_samples)) == 0.0


@pytest.mark.parametrize("loss", ["hinge", "logistic"])
def test_both_losses_fit_blobs(loss):
    ds = blobs(600, gap=2.0, seed=1)
    m = train(ds, cfg=TrainConfig(loss=loss))
    assert np.mean(predict(m, ds) == ds.labels) > 0.95


def test_uniform_weights_equivalence():
    ds = blobs(300, seed=2)
    a = train(ds)
    b = train(ds, np.full(300, 1 / 300))
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_concentrated_weights_win():
    # The bulk says y = [x > 0]; a small conflict cluster at x in [1, 2]
    # carries label 0.  Unweighted, the bulk wins; with 0.98 of the weight on
    # the cluster, the fit must classify the cluster correctly.
    rng = np.random.default_rng(0)
    bulk = rng.uniform(-3, 3, 400)
    cluster = rng.uniform(1, 2, 20)
    x = np.concatenate([bulk, cluster])
    y = np.concatenate([(bulk > 0).astype(int), np.zeros(20, dtype=int)])
    ds = make_dataset(x, y)
    in_cluster = np.arange(420) >= 400
    plain = predict(train(ds), ds)
    assert np.mean(plain[in_cluster] == 0) < 0.5
    w = np.where(in_cluster, 0.98 / 20, 0.02 / 400)
    heavy = predict(train(ds, w), ds)
    assert np.all(heavy[in_cluster] == 0)


def test_zero_model_predicts_ones():
    m = LinearModel(np.zeros(2), 0.0, np.zeros(2), np.ones(2))
    ds = make_dataset(np.random.default_rng(0).standard_normal((7, 2)), [0, 1] * 3 + [0])
    assert predict(m, ds).tolist() == [1] * 7


def test_predict_pointwise_on_duplicates():
    ds = blobs(50, seed=3)
    m = train(ds)
    dup = make_dataset(np.vstack([ds.samples, ds.samples]), np.concatenate([ds.labels, ds.labels]))
    p = predict(m, dup)
    assert np.array_equal(p[:50], p[50:])
    assert np.array_equal(p[:50], predict(m, ds))


def test_weighted_error_cases():
    ds = make_dataset(np.arange(10.0), [0, 1] * 5)
    const_one = LinearModel(np.zeros(1), 1.0, np.zeros(1), np.ones(1))
    assert weighted_error(const_one, ds, uniform_weights(10)) == 0.5
    bl = blobs(400, gap=0.5, seed=4)
    m = train(bl)
    acc = np.mean(predict(m, bl) == bl.labels)
    assert weighted_error(m, bl, uniform_weights(400)) == pytest.approx(1 - acc, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=12, max_size=12).filter(lambda w: sum(w) > 0))
def test_weighted_error_in_unit_interval(raw):
    ds = make_dataset(np.arange(12.0), [0, 1] * 6)
    m = LinearModel(np.array([1.0]), -0.3, np.array([5.5]), np.array([3.0]))
    w = np.array(raw) / np.sum(raw)
    w = w / w.sum()
    e = weighted_error(m, ds, w)
    assert 0.0 <= e <= 1.0 + 1e-12


def test_training_preconditions():
    ds = make_dataset(np.arange(6.0), [0, 0, 0, 1, 1, 1])
    with pytest.raises(LearnerError, match="positive total weight"):
        train(ds, np.array([0.5, 0.25, 0.25, 0, 0, 0]))
    with pytest.raises(LearnerError):
        train(ds, np.full(6, 0.2))  # does not sum to one
    with pytest.raises(LearnerError):
        train(ds, np.array([-0.1, 0.3, 0.2, 0.2, 0.2, 0.2]))
    with pytest.raises(LearnerError):
        train(make_dataset(np.arange(4.0), [1, 1, 1, 1]))
    m = train(ds)
    with pytest.raises(LearnerError):
        predict(m, make_dataset(np.zeros((6, 2)), [0, 1] * 3))


@pytest.mark.parametrize("kwargs", [dict(loss="square"), dict(l2_lambda=-1), dict(epochs=0), dict(learning_rate=0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


def test_determinism_and_serialization():
    ds = blobs(500, seed=5)
    a, b = train(ds), train(ds)
    assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias
    assert cv_error(ds, seed=3) == cv_error(ds, seed=3)
    back = LinearModel.from_dict(json.loads(json.dumps(a.to_dict())))
    assert np.array_equal(back.decision_function(ds.samples), a.decision_function(ds.samples))
    assert a.config_fingerprint == TrainConfig().fingerprint()


def test_cv_error_wide_margin():
    assert cv_error(blobs(1000, gap=2.0, seed=6)) <= 0.05


def test_cv_error_pure_noise():
    errs = []
    for seed in range(5):
        rng = np.random.default_rng(seed)
        ds = make_dataset(rng.standard_normal(2000), np.arange(2000) % 2)
        errs.append(cv_error(ds, seed=seed))
    assert all(abs(e - 0.5) <= 0.05 for e in errs)


def test_scale_robustness():
    ds = blobs(1000, gap=2.0, seed=7)
    scaled = make_dataset(ds.samples * np.array([1000.0, 1.0]), ds.labels)
    assert abs(cv_error(ds) - cv_error(scaled)) <= 0.05


def test_rotated_threshold_errors():
    ds = rotated_threshold(4000, seed=0)
    both = cv_error(ds)
    alone = [cv_error(project(ds, [k])) for k in (0, 1)]
    assert both <= 0.05
    assert all(abs(e - 0.25) <= 0.05 for e in alone)


def test_rotated_threshold_bayes_oracle():
    # Monte Carlo check of the analytic value: a single-coordinate threshold
    # disagrees with sign(x0 + x1) on a 45-degree wedge, i.e. a quarter.
    rng = np.random.default_rng(123)
    x = rng.standard_normal((400_000, 2))
    disagree = np.mean((x[:, 0] > 0) != (x[:, 0] + x[:, 1] > 0))
    assert abs(disagree - 0.25) < 0.005


def test_stratified_folds():
    labels = np.array([0] * 13 + [1] * 7)
    folds = stratified_folds(labels, 5, seed=1)
    assert np.array_equal(folds, stratified_folds(labels, 5, seed=1))
    for c in (0, 1):
        counts = np.bincount(folds[labels == c], minlength=5)
        assert counts.max() - counts.min() <= 1


def test_cv_error_small_class():
    ds = make_dataset(np.arange(10.0), [0] * 7 + [1] * 3)
    with pytest.raises(LearnerError, match="3"):
        cv_error(ds, k_folds=5)
