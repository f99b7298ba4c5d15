import itertools

import numpy as np
import pytest

from mincut_restore import EnergyParams, GrayImage, ImageError, eval_U2, minimize_U2
from mincut_restore.layers import threshold_decompose
from mincut_restore.mnfc import MnfcConfig
from mincut_restore.oracle import brute_min_U2
from mincut_restore.qnet import build_q_network, coeff_d, p_value, q_value

from conftest import random_image


def gi(rows, levels):
    return GrayImage(np.array(rows, dtype=np.int64), levels)


def all_layer_configs(shape, nlayers):
    """Every assignment of nlayers binary layers (ordered or not)."""
    n = shape[0] * shape[1]
    from mincut_restore.ising import BinaryImage

    for bits in itertools.product((0, 1), repeat=n * nlayers):
        arr = np.array(bits, dtype=np.int64).reshape(nlayers, *shape)
        yield [BinaryImage(arr[k], 2) for k in range(nlayers)]


class TestCoeffD:
    def test_isolated_pixel_examples(self):
        # single pixel: no neighbors, coupling sum 0
        y = gi([[2]], 3)
        p = EnergyParams(lam=1.0, beta=1.0, scale=1)
        assert coeff_d(0, 1, y, p) == -3
        assert coeff_d(0, 2, y, p) == -1

    def test_coupled_pixel_examples(self):
        # pair of pixels: coupling sum 2 at scale 2 with beta=1
        y = gi([[2, 2]], 3)
        p = EnergyParams(lam=1.0, beta=1.0, scale=1)
        assert coeff_d(0, 1, y, p) == -3 + (2 * 1 - 3) * 1
        y1 = gi([[2, 2]], 3)
        p2 = EnergyParams(lam=0.5, beta=1.0, scale=2)
        assert coeff_d(0, 1, y1, p2) == -5
        assert coeff_d(0, 2, y1, p2) == 1

    def test_increasing_in_l(self, rng):
        y = random_image(rng, (2, 3), 5)
        p = EnergyParams(lam=1.0, beta=0.5, scale=2)
        for i in range(6):
            ds = [coeff_d(i, l, y, p) for l in range(1, 5)]
            assert ds == sorted(ds) and len(set(ds)) == len(ds)

    def test_layer_out_of_range(self):
        with pytest.raises(ImageError):
            coeff_d(0, 3, gi([[0]], 3), EnergyParams(lam=1.0, beta=1.0))


class TestSurrogate:
    def test_q_dominates_p_everywhere_and_matches_on_ordered(self):
        y = gi([[2, 0]], 3)
        p = EnergyParams(lam=1.0, beta=1.0, scale=1)
        for layers in all_layer_configs((1, 2), 2):
            ordered = np.all(layers[0].pixels >= layers[1].pixels)
            q, pv = None, None
            if ordered:
                q = q_value(layers, y, p)
                pv = p_value(layers, y, p)
                assert q == pv
            else:
                q = q_value(layers, y, p)
                # unordered sums can exceed the level range; compare via a
                # sorted copy which Q strictly dominates
                srt = np.sort(np.stack([l.pixels for l in layers]), axis=0)[::-1]
                from mincut_restore.ising import BinaryImage

                ordered_layers = [BinaryImage(srt[k], 2) for k in range(2)]
                assert q >= q_value(ordered_layers, y, p)

    def test_q_equals_p_on_decompositions(self, rng):
        p = EnergyParams(lam=1.5, beta=0.5, scale=2)
        for _ in range(10):
            y = random_image(rng, (2, 2), 4)
            x = random_image(rng, (2, 2), 4)
            layers = list(threshold_decompose(x).layers)
            assert q_value(layers, y, p) == p_value(layers, y, p)

    def test_network_cut_value_tracks_q(self):
        # arc capacities out of any labeling reproduce Q up to the fixed offset
        y = gi([[1, 2]], 3)
        p = EnergyParams(lam=1.0, beta=1.0, scale=1)
        net = build_q_network(y, p)
        offset = sum(c for (u, v, c) in net.arcs if u == 0)
        t = net.num_usual + 1
        for layers in all_layer_configs((1, 2), 2):
            bits = np.concatenate([l.pixels.ravel() for l in layers])
            side = lambda k: 1 if (k == 0 or (k != t and bits[k - 1])) else 0
            cut = sum(c for (u, v, c) in net.arcs if side(u) == 1 and side(v) == 0)
            assert cut - offset == q_value(layers, y, p)


class TestMinimizeU2:
    def test_matches_enumeration(self, rng):
        for _ in range(12):
            L = int(rng.integers(2, 5))
            y = random_image(rng, (2, 2), L)
            p = EnergyParams(lam=float(rng.integers(1, 4)), beta=float(rng.integers(1, 4)) / 2, scale=4)
            bv, _ = brute_min_U2(y, p)
            x, v = minimize_U2(y, p)
            assert v == bv
            assert eval_U2(x, y, p) == bv

    def test_mnfc_solver_agrees(self, rng):
        cfg = MnfcConfig(tile_side=2, cell_size=8, fallback_threshold=2)
        for _ in range(5):
            y = random_image(rng, (2, 3), 3)
            p = EnergyParams(lam=2.0, beta=1.0, scale=2)
            xd, vd = minimize_U2(y, p)
            xm, vm = minimize_U2(y, p, solver="mnfc", cfg=cfg)
            assert vm == vd

    def test_strong_data_recovers_input(self):
        y = gi([[0, 1, 2], [3, 2, 1]], 4)
        x, v = minimize_U2(y, EnergyParams(lam=20.0, beta=0.5, scale=2))
        assert x == y

    def test_quadratic_prefers_gradual_steps(self):
        # squared differences split a big jump across intermediate levels
        y = gi([[0, 0, 4, 4]], 5)
        p = EnergyParams(lam=0.5, beta=1.0, scale=2)
        x, v = minimize_U2(y, p)
        bv, bx = brute_min_U2(y, p)
        assert v == bv
        diffs = np.abs(np.diff(x.pixels[0]))
        assert diffs.max() < 4
