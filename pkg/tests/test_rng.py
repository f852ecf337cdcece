import numpy as np

from lamplighter.rng import draw_uniform, mix64, stream, subseed, trial_keys


def test_streams_are_deterministic():
    assert np.array_equal(stream(7, 100), stream(7, 100))
    assert not np.array_equal(stream(7, 100), stream(8, 100))


def test_trial_keys_do_not_depend_on_batching():
    whole = trial_keys(3, 10)
    parts = np.concatenate([trial_keys(3, 4), trial_keys(3, 6, offset=4)])
    assert np.array_equal(whole, parts)


def test_uniforms_in_unit_interval_and_roughly_uniform():
    u = draw_uniform(trial_keys(1, 200000), 0)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.005


def test_mix64_is_a_bijection_on_a_sample():
    x = np.arange(100000, dtype=np.uint64)
    assert len(np.unique(mix64(x))) == len(x)


def test_subseed_labels_differ():
    assert subseed(1, "a") != subseed(1, "b")
    assert subseed(1, "a") == subseed(1, "a")
