import numpy as np

from nftnoise import GSelector, PointNoise, TimeGrid, sech_pulse
from nftnoise.noise import linearity_ensemble
from nftnoise.parallel import ensemble_map, run_rng, run_seed


def _draw(rng, n):
    return rng.standard_normal(n)


def test_seed_depends_only_on_master_stream_index():
    a = run_seed(7, 3, stream=1).generate_state(4)
    np.testing.assert_array_equal(a, run_seed(7, 3, stream=1).generate_state(4))
    assert not np.array_equal(a, run_seed(7, 3, stream=0).generate_state(4))
    assert not np.array_equal(a, run_seed(7, 4, stream=1).generate_state(4))
    assert not np.array_equal(a, run_seed(8, 3, stream=1).generate_state(4))


def test_runs_are_independent_of_ensemble_size():
    short = ensemble_map(_draw, 3, 11, args=(5,))
    long = ensemble_map(_draw, 6, 11, args=(5,))
    for x, y in zip(short, long):
        np.testing.assert_array_equal(x, y)
    np.testing.assert_array_equal(long[4], run_rng(11, 4).standard_normal(5))


def test_worker_count_does_not_change_results():
    serial = ensemble_map(_draw, 8, 5, stream=2, args=(16,))
    pooled = ensemble_map(_draw, 8, 5, stream=2, workers=2, args=(16,))
    for x, y in zip(serial, pooled):
        np.testing.assert_array_equal(x, y)


def test_ensemble_identical_with_two_workers():
    q = sech_pulse(2.0, TimeGrid.symmetric(16.0, 1024))
    kw = dict(master_seed=3, runs=6)
    a = linearity_ensemble(q, GSelector("sum-imag"), PointNoise(1e-3, 1.0), **kw)
    b = linearity_ensemble(q, GSelector("sum-imag"), PointNoise(1e-3, 1.0), workers=2, **kw)
    np.testing.assert_array_equal(a.lhs, b.lhs)
    np.testing.assert_array_equal(a.rhs, b.rhs)
