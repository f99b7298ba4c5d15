import numpy as np
import pytest

from mincut_restore import EnergyParams, GNetwork, GrayImage, cut_capacity, eval_U1, eval_U2
from mincut_restore.oracle import (
    EnumerationLimitError,
    EnumLimit,
    brute_min_cut,
    brute_min_U1,
    brute_min_U2,
)

from conftest import random_gnetwork, random_image


class TestBruteMinCut:
    def test_two_node_example(self):
        g = GNetwork(2, (3, 2), (1, 0), ((0, 1, 1), (1, 0, 1)))
        value, argmin = brute_min_cut(g)
        assert value == 1
        assert argmin == [(1, 0)]

    def test_values_match_direct_capacity(self, rng):
        for _ in range(10):
            g = random_gnetwork(rng, n=5)
            value, argmin = brute_min_cut(g)
            for x in argmin:
                assert cut_capacity(g, x) == value
            # value really is the minimum over a re-enumeration
            direct = min(
                cut_capacity(g, tuple((k >> b) & 1 for b in range(5)))
                for k in range(32)
            )
            assert direct == value

    def test_offset_only_network(self):
        g = GNetwork(0, (), (), (), offset=7)
        assert brute_min_cut(g) == (7, [()])

    def test_tie_reports_all_minimizers(self):
        g = GNetwork(2, (1, 0), (1, 0), ())
        value, argmin = brute_min_cut(g)
        assert value == 0
        assert set(argmin) == {(1, 0), (1, 1)}

    def test_limit_enforced(self):
        g = GNetwork(5, (1,) * 5, (0,) * 5, ())
        with pytest.raises(EnumerationLimitError):
            brute_min_cut(g, EnumLimit(max_states=16))


class TestBruteImages:
    def test_u1_value_is_minimum(self, rng):
        y = random_image(rng, (2, 2), 3)
        p = EnergyParams(lam=1.0, beta=0.5, scale=2)
        v, x = brute_min_U1(y, p)
        assert eval_U1(x, y, p) == v
        # check against a literal scan
        lo = min(
            eval_U1(GrayImage(np.array([a, b, c, d]).reshape(2, 2), 3), y, p)
            for a in range(3)
            for b in range(3)
            for c in range(3)
            for d in range(3)
        )
        assert lo == v

    def test_u2_value_is_minimum(self, rng):
        y = random_image(rng, (2, 2), 3)
        p = EnergyParams(lam=1.0, beta=1.0, scale=1)
        v, x = brute_min_U2(y, p)
        assert eval_U2(x, y, p) == v
        lo = min(
            eval_U2(GrayImage(np.array([a, b, c, d]).reshape(2, 2), 3), y, p)
            for a in range(3)
            for b in range(3)
            for c in range(3)
            for d in range(3)
        )
        assert lo == v

    def test_limit_enforced(self, rng):
        y = random_image(rng, (4, 4), 8)
        with pytest.raises(EnumerationLimitError):
            brute_min_U1(y, EnergyParams(lam=1.0, beta=1.0), EnumLimit(max_states=100))

    def test_strong_lambda_returns_observation(self, rng):
        y = random_image(rng, (2, 3), 3)
        p = EnergyParams(lam=50.0, beta=0.5, scale=2)
        _, x1 = brute_min_U1(y, p)
        _, x2 = brute_min_U2(y, p)
        assert x1 == y and x2 == y
