"""Seeded, order-independent ensemble execution."""
from __future__ import annotations

import numpy as np

SEED_RULE = "SeedSequence(entropy=master_seed, spawn_key=(stream, run_index))"


def run_seed(master_seed: int, run_index: int, stream: int = 0) -> np.random.SeedSequence:
    """Seed for one ensemble member; depends only on (master, stream, index)."""
    return np.random.SeedSequence(entropy=int(master_seed),
                                  spawn_key=(int(stream), int(run_index)))


def run_rng(master_seed: int, run_index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(run_seed(master_seed, run_index, stream))


def ensemble_map(func, n_runs: int, master_seed: int, *, stream: int = 0, workers: int = 1,
                 args=(), kwargs=None):
    """``[func(rng_i, *args, **kwargs) for i in range(n_runs)]``.

    Each call gets its own generator from :func:`run_seed`, so results do not
    depend on ``workers``.  ``func`` must be picklable when ``workers > 1``.
    """
    kwargs = kwargs or {}
    if workers == 1 or n_runs < 2:
        return [func(run_rng(master_seed, i, stream), *args, **kwargs) for i in range(n_runs)]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=workers)(
        delayed(func)(run_rng(master_seed, i, stream), *args, **kwargs) for i in range(n_runs))
