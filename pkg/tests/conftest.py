import numpy as np
import pytest

from mincut_restore import EnergyParams, GNetwork, GrayImage


def random_gnetwork(rng, n=None, density=0.3, max_lam=8, max_beta=5, allow_zero_lam=True):
    if n is None:
        n = int(rng.integers(2, 13))
    low = 0 if allow_zero_lam else 1
    lam = tuple(int(v) for v in rng.integers(low, max_lam, size=n))
    y = tuple(int(v) for v in rng.integers(0, 2, size=n))
    arcs = tuple(
        (i, j, int(rng.integers(1, max_beta + 1)))
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < density
    )
    return GNetwork(n, lam, y, arcs)


def random_image(rng, shape, levels):
    return GrayImage(rng.integers(0, levels, size=shape), levels)


def small_params(rng, scale=4):
    return EnergyParams(
        lam=float(rng.integers(1, 5)),
        beta=float(rng.integers(1, 4)) / 2,
        scale=scale,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
