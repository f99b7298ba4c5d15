import numpy as np
import pytest

from mincut_restore import (
    EnergyParams,
    Fixability,
    GNetwork,
    GrayImage,
    MnfcConfig,
    build_binary_map_network,
    check_fixable_subset,
    cut_capacity,
    fix_nodes,
    local_estimates,
    partition_level,
    run_mnfc,
    solve_gnetwork,
)

from mincut_restore.oracle import brute_min_cut

from conftest import random_gnetwork


class TestPartition:
    def test_grid_tiles(self):
        img = GrayImage(np.zeros((8, 8), dtype=np.int64), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.5))
        cfg = MnfcConfig(tile_side=4, fallback_threshold=1)
        cells = partition_level(range(64), g, cfg)
        assert len(cells) == 4
        assert all(len(c) == 16 for c in cells)

    def test_small_set_is_single_cell(self):
        g = random_gnetwork(np.random.default_rng(0), n=7)
        cells = partition_level(range(7), g, MnfcConfig(fallback_threshold=10))
        assert cells == [list(range(7))]

    def test_holes_excluded_and_covering(self):
        img = GrayImage(np.zeros((8, 8), dtype=np.int64), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.5))
        remaining = set(range(64)) - {0, 5, 17, 40, 63}
        cells = partition_level(remaining, g, MnfcConfig(tile_side=4, fallback_threshold=1))
        seen = [n for c in cells for n in c]
        assert sorted(seen) == sorted(remaining)
        assert len(seen) == len(set(seen))

    def test_generic_ranges(self):
        g = random_gnetwork(np.random.default_rng(0), n=10)
        cells = partition_level(range(10), g, MnfcConfig(cell_size=4, fallback_threshold=1, strategy="ranges"))
        assert cells == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]]

    def test_pyramid_strategy(self):
        g = random_gnetwork(np.random.default_rng(0), n=12)
        cells = partition_level(range(12), g, MnfcConfig(cell_size=4, fallback_threshold=1, strategy="pyramid"))
        assert sum(len(c) for c in cells) == 12
        assert max(len(c) for c in cells) <= 4
        assert len(cells) & (len(cells) - 1) == 0 or len(cells) == 3  # near power of two split

    def test_layered_tiles_group_layers(self):
        g = random_gnetwork(np.random.default_rng(0), n=32)
        g.layer_shape = (4, 4, 2)
        cells = partition_level(range(32), g, MnfcConfig(tile_side=2, fallback_threshold=1))
        assert len(cells) == 4
        for cell in cells:
            pix = {n % 16 for n in cell}
            assert len(cell) == 8 and len(pix) == 4  # both layer copies of each pixel


class TestLocalEstimates:
    def test_constant_region_interior_decided(self):
        img = GrayImage(np.ones((4, 4), dtype=np.int64), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.5))
        x0, x1 = local_estimates(g, list(range(16)), {})
        assert all(v == 1 for v in x0.values())
        assert all(v == 1 for v in x1.values())

    def test_isolated_free_node_undecided(self):
        g = GNetwork(1, (0,), (0,), ())
        x0, x1 = local_estimates(g, [0], {})
        assert x0 == {0: 0} and x1 == {0: 1}

    def test_sandwich_always(self, rng):
        for _ in range(30):
            g = random_gnetwork(rng, n=int(rng.integers(3, 10)))
            n = g.num_usual
            cell = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
            x0, x1 = local_estimates(g, cell, {})
            assert all(x0[k] <= x1[k] for k in cell)


class TestFixNodes:
    def test_example(self):
        x0 = {1: 0, 2: 0, 3: 1}
        x1 = {1: 0, 2: 1, 3: 1}
        assert fix_nodes(x0, x1) == {1: 0, 3: 1}

    def test_collapsed_sandwich_fixes_everything(self):
        x = {1: 0, 2: 1}
        assert fix_nodes(x, x) == x

    def test_fully_undecided(self):
        assert fix_nodes({1: 0, 2: 0}, {1: 1, 2: 1}) == {}


class TestFixableSubset:
    def test_single_source_node_fixable_to_1(self):
        g = GNetwork(2, (2, 1), (1, 0), ((0, 1, 1), (1, 0, 1)))
        assert check_fixable_subset(g, {0}) == Fixability.FIXABLE_TO_1

    def test_single_sink_node_fixable_to_0(self):
        g = GNetwork(2, (2, 1), (0, 0), ((0, 1, 1), (1, 0, 1)))
        assert check_fixable_subset(g, {0}) == Fixability.FIXABLE_TO_0

    def test_empty_subset_undecided(self):
        g = GNetwork(1, (1,), (1,), ())
        assert check_fixable_subset(g, set()) == Fixability.UNDECIDED

    def test_necessity_against_enumeration(self, rng):
        # the inequalities must hold for the decided parts of actual
        # optima: the ones of the minimal solution satisfy the W-case,
        # the zeros of the maximal solution are never left undecided
        checked = 0
        for _ in range(40):
            g = random_gnetwork(rng, n=int(rng.integers(2, 8)))
            _, argmin = brute_min_cut(g)
            lo = tuple(min(x[i] for x in argmin) for i in range(g.num_usual))
            hi = tuple(max(x[i] for x in argmin) for i in range(g.num_usual))
            W = {i for i, v in enumerate(lo) if v == 1}
            B = {i for i, v in enumerate(hi) if v == 0}
            if W:
                assert check_fixable_subset(g, W) == Fixability.FIXABLE_TO_1
                checked += 1
            if B:
                assert check_fixable_subset(g, B) != Fixability.UNDECIDED
                checked += 1
        assert checked > 10


class TestRunMnfc:
    def test_constant_image_fixed_at_level_1(self):
        img = GrayImage(np.ones((8, 8), dtype=np.int64), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.4))
        cfg = MnfcConfig(tile_side=4, fallback_threshold=8)
        x, stats = run_mnfc(g, cfg)
        assert x == (1,) * 64
        assert stats[0].fixed_fraction == 1.0

    def test_random_networks_match_baseline(self, rng):
        for _ in range(20):
            g = random_gnetwork(rng, n=50, density=0.08)
            cfg = MnfcConfig(cell_size=10, fallback_threshold=8, strategy="ranges")
            x, _ = run_mnfc(g, cfg)
            _, base = solve_gnetwork(g)
            assert cut_capacity(g, x) == base

    def test_undecidable_network_falls_back_once(self):
        g = GNetwork(2, (0, 0), (0, 0), ((0, 1, 1), (1, 0, 1)))
        cfg = MnfcConfig(cell_size=1, fallback_threshold=1, strategy="ranges")
        x, stats = run_mnfc(g, cfg, pick="minimal")
        assert cut_capacity(g, x) == solve_gnetwork(g)[1]
        fallbacks = [s for s in stats if s.fallback]
        assert len(fallbacks) == 1

    def test_level_count_bounded(self, rng):
        g = random_gnetwork(rng, n=30, density=0.1)
        cfg = MnfcConfig(cell_size=5, fallback_threshold=2, strategy="ranges", max_levels=3)
        _, stats = run_mnfc(g, cfg)
        assert max(s.level for s in stats) <= 4  # max_levels plus the closing direct solve

    def test_deterministic_across_worker_counts(self, rng):
        img = GrayImage(rng.integers(0, 2, size=(16, 16)), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.4))
        results = []
        for workers in (1, 2, 8):
            cfg = MnfcConfig(tile_side=4, fallback_threshold=16, worker_count=workers)
            x, _ = run_mnfc(g, cfg)
            results.append(x)
        assert results[0] == results[1] == results[2]

    def test_image_network_matches_baseline(self, rng):
        for _ in range(5):
            img = GrayImage(rng.integers(0, 2, size=(16, 16)), 2)
            g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.4))
            for tile in (4, 8):
                cfg = MnfcConfig(tile_side=tile, fallback_threshold=32)
                x, _ = run_mnfc(g, cfg)
                assert cut_capacity(g, x) == solve_gnetwork(g)[1]

    def test_stats_emitted_per_level(self, rng):
        img = GrayImage(rng.integers(0, 2, size=(8, 8)), 2)
        g = build_binary_map_network(img, EnergyParams(lam=1.0, beta=0.4))
        _, stats = run_mnfc(g, MnfcConfig(tile_side=4, fallback_threshold=8))
        js = stats[0].to_json()
        assert {"level", "cells", "fixed_count", "fixed_fraction", "wall_time"} <= set(js)
        assert all({"nodes", "arcs", "boundary_arcs"} <= set(c) for c in js["cells"])
