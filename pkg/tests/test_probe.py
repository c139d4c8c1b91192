"""Tests for the two-level perceptron probe and its gradient oracle."""

import numpy as np
import pytest

from roleprobe.errors import TrainingDivergedError
from roleprobe.probe import (
    HIDDEN,
    ProbeModel,
    TrainConfig,
    forward,
    gradient_check,
    init_probe,
    load_probe,
    predict_batch,
    save_probe,
    train,
)


def zero_model(d=2, layer_name="t"):
    return ProbeModel(
        W1=np.zeros((HIDDEN, d)),
        b1=np.zeros(HIDDEN),
        w2=np.zeros(HIDDEN),
        b2=0.0,
        seed=0,
        layer_name=layer_name,
    )


def separable_data(n=200, d=4, margin=0.5, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    X[:, 0] = np.where(np.arange(n) % 2 == 0, 1, -1) * (
        margin + np.abs(X[:, 0])
    )
    y = (X[:, 0] > 0).astype(np.float64)
    return X, y


# ---- forward ----


def test_zero_parameters_give_half():
    m = zero_model()
    for x in ([0.0, 0.0], [3.0, -2.0]):
        assert forward(m, np.array(x)) == pytest.approx(0.5)


def test_forward_monotone_in_logit():
    m = zero_model(d=1)
    m.W1[0, 0] = 1.0
    m.w2[0] = 1.0
    small = forward(m, np.array([1.0]))
    m.w2[0] = 50.0
    large = forward(m, np.array([1.0]))
    assert large > small
    assert large > 0.999999


def test_forward_hand_computed():
    # d=2, 2 active hidden units (rest zero): h = relu(W1 x + b1)
    m = zero_model(d=2)
    m.W1[0] = [1.0, -1.0]
    m.W1[1] = [-2.0, 0.5]
    m.b1[0] = 0.1
    m.b1[1] = -0.2
    m.w2[0] = 0.3
    m.w2[1] = -0.7
    m.b2 = 0.05
    x = np.array([0.4, -0.6])
    h0 = max(0.0, 1.0 * 0.4 + (-1.0) * (-0.6) + 0.1)  # 1.1
    h1 = max(0.0, -2.0 * 0.4 + 0.5 * (-0.6) - 0.2)  # relu(-1.3) = 0
    logit = 0.3 * h0 + (-0.7) * h1 + 0.05
    expected = 1.0 / (1.0 + np.exp(-logit))
    assert forward(m, x) == pytest.approx(expected, abs=1e-12)


def test_forward_stays_strictly_inside_unit_interval():
    m = zero_model(d=1)
    m.W1[0, 0] = 1.0
    m.w2[0] = 1e6
    p_hi = forward(m, np.array([1e6]))
    m.w2[0] = -1e6
    p_lo = forward(m, np.array([1e6]))
    assert 0.0 < p_lo < p_hi < 1.0


def test_forward_shape_error():
    with pytest.raises(ValueError):
        forward(zero_model(d=3), np.array([1.0, 2.0]))


# ---- predict_batch ----


def test_predict_empty_batch():
    probs, labels = predict_batch(zero_model(), np.zeros((0, 2)))
    assert probs.shape == (0,)
    assert labels.shape == (0,)


def test_predict_half_is_object():
    probs, labels = predict_batch(zero_model(), np.array([[1.0, 2.0]]))
    assert probs[0] == pytest.approx(0.5)
    assert labels[0] == 0  # strict > 0.5 rule


def test_predict_batch_of_one_matches_forward():
    m = init_probe(5, seed=3)
    x = np.random.default_rng(1).standard_normal(5)
    probs, _ = predict_batch(m, x.reshape(1, -1))
    assert probs[0] == pytest.approx(forward(m, x), abs=1e-12)


def test_predict_shape_error():
    with pytest.raises(ValueError):
        predict_batch(zero_model(d=2), np.zeros((3, 5)))


# ---- training ----


def test_train_separable_reaches_full_accuracy():
    X, y = separable_data()
    model = init_probe(4, seed=1, layer_name="t")
    trained, history = train(model, X, y, TrainConfig(seed=2))
    _, hard = predict_batch(trained, X)
    assert np.mean(hard == y) == 1.0
    assert history[-1] < history[0]
    assert len(history) == 20


def test_train_constant_labels_saturate():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((100, 3))
    y = np.ones(100)
    trained, _ = train(init_probe(3, seed=0), X, y, TrainConfig(epochs=60, seed=1))
    probs, _ = predict_batch(trained, X)
    assert abs(float(np.mean(probs)) - 1.0) < 0.05


def test_train_does_not_mutate_input_model():
    X, y = separable_data(n=40)
    model = init_probe(4, seed=5)
    before = model.W1.copy()
    train(model, X, y, TrainConfig(epochs=2, seed=0))
    assert np.array_equal(model.W1, before)


def test_train_deterministic():
    X, y = separable_data(n=64)
    a, hist_a = train(init_probe(4, seed=7), X, y, TrainConfig(seed=9))
    b, hist_b = train(init_probe(4, seed=7), X, y, TrainConfig(seed=9))
    assert np.array_equal(a.W1, b.W1)
    assert np.array_equal(a.w2, b.w2)
    assert a.b2 == b.b2
    assert hist_a == hist_b


def test_train_duplicated_full_batch_identical():
    # full-batch runs: duplicating every point and doubling the batch size
    # leaves the mean gradient, hence the whole trajectory, unchanged
    rng = np.random.default_rng(3)
    X = rng.standard_normal((10, 3))
    y = (rng.random(10) > 0.5).astype(np.float64)
    X2 = np.repeat(X, 2, axis=0)
    y2 = np.repeat(y, 2)
    base, hist1 = train(
        init_probe(3, seed=1), X, y, TrainConfig(epochs=20, batch_size=10, seed=4)
    )
    dup, hist2 = train(
        init_probe(3, seed=1), X2, y2, TrainConfig(epochs=20, batch_size=20, seed=4)
    )
    assert np.allclose(hist1, hist2, atol=1e-12)
    assert np.allclose(base.W1, dup.W1, atol=1e-12)
    assert np.allclose(base.b2, dup.b2, atol=1e-12)


def test_train_empty_data_rejected():
    with pytest.raises(ValueError):
        train(init_probe(3, seed=0), np.zeros((0, 3)), np.zeros(0), TrainConfig())


def test_train_divergence_reported_with_location():
    X = np.full((8, 2), 1e300)
    y = np.zeros(8)
    m = init_probe(2, seed=0)
    m.W1[:] = 1e300  # overflow to inf in the first forward pass
    with pytest.raises(TrainingDivergedError) as exc:
        train(m, X, y, TrainConfig(epochs=1, batch_size=4, seed=0))
    assert exc.value.epoch == 0
    assert exc.value.batch == 0


def test_label_symmetry():
    # negating (w2, b2) at init and flipping labels mirrors predictions
    X, y = separable_data(n=60)
    m = init_probe(4, seed=11)
    mirrored = m.copy()
    mirrored.w2 = -mirrored.w2
    mirrored.b2 = -mirrored.b2
    a, _ = train(m, X, y, TrainConfig(epochs=5, seed=2))
    b, _ = train(mirrored, X, 1.0 - y, TrainConfig(epochs=5, seed=2))
    pa, _ = predict_batch(a, X)
    pb, _ = predict_batch(b, X)
    assert np.allclose(pa, 1.0 - pb, atol=1e-9)


# ---- gradient check ----


def test_gradient_check_small_models():
    rng = np.random.default_rng(0)
    for draw in range(10):
        d = int(rng.integers(2, 8))
        m = init_probe(d, seed=int(rng.integers(0, 10_000)))
        x = rng.standard_normal(d)
        label = float(rng.integers(0, 2))
        err = gradient_check(m, x, label, eps=1e-5)
        assert err < 1e-4


def test_gradient_b2_at_zero_model():
    m = zero_model(d=2)
    x = np.zeros(2)
    # numeric slope of BCE wrt b2 at p=0.5 equals p - y
    err = gradient_check(m, x, 0.0, eps=1e-5)
    assert err < 1e-6


def test_gradient_check_truncation_grows_with_eps():
    m = init_probe(4, seed=3)
    x = np.random.default_rng(5).standard_normal(4)
    fine = gradient_check(m, x, 1.0, eps=1e-5)
    coarse = gradient_check(m, x, 1.0, eps=1e-1)
    assert coarse > fine


# ---- serialization ----


def test_probe_round_trip(tmp_path):
    X, y = separable_data(n=50)
    cfg = TrainConfig(epochs=3, seed=8)
    trained, _ = train(init_probe(4, seed=2, layer_name="3"), X, y, cfg)
    save_probe(trained, cfg, tmp_path / "probe-3")
    loaded, loaded_cfg = load_probe(tmp_path / "probe-3")
    assert loaded.layer_name == "3"
    assert loaded_cfg == cfg
    # float32 storage: reload then compare predictions at float32 precision
    pa, _ = predict_batch(loaded, X)
    pb, _ = predict_batch(trained, X)
    assert np.allclose(pa, pb, atol=1e-5)
    # reloading twice is byte-stable
    save_probe(loaded, loaded_cfg, tmp_path / "again")
    assert (tmp_path / "again.bin").read_bytes() == (
        tmp_path / "probe-3.bin"
    ).read_bytes()


def test_probe_blob_size_checked(tmp_path):
    X, y = separable_data(n=20)
    cfg = TrainConfig(epochs=1)
    trained, _ = train(init_probe(4, seed=0, layer_name="0"), X, y, cfg)
    save_probe(trained, cfg, tmp_path / "p")
    (tmp_path / "p.bin").write_bytes((tmp_path / "p.bin").read_bytes()[:-8])
    with pytest.raises(ValueError):
        load_probe(tmp_path / "p")
