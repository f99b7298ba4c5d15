"""Multiresolution minimum-cut: tile, solve under extreme frontiers, fix, recurse.

Each level partitions the unresolved nodes into cells and solves every
cell twice: once assuming all other unresolved nodes sit on the sink side
(all-zeros frontier, canonical minimal cut) and once assuming the source
side (all-ones frontier, canonical maximal cut).  Nodes on which the two
extremes agree are provably part of a global optimum and are fixed for
good; the rest carry to the next level with fixed neighbors folded into
terminal capacities.  An empty fixing round falls back to a direct solve.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .netcore import CutLabeling, GNetwork, NetworkError
from .maxflow import FrontierCondition, restricted_solve


@dataclass(frozen=True)
class MnfcConfig:
    tile_side: int = 64
    cell_size: int = 256
    fallback_threshold: int = 4096
    max_levels: int = 32
    worker_count: int = 1
    strategy: str = "auto"  # auto | tiles | ranges | pyramid

    def __post_init__(self):
        if self.tile_side < 1 or self.cell_size < 1 or self.fallback_threshold < 1:
            raise ValueError("tile_side, cell_size, fallback_threshold must be >= 1")
        if self.max_levels < 1 or self.worker_count < 1:
            raise ValueError("max_levels and worker_count must be >= 1")
        if self.strategy not in ("auto", "tiles", "ranges", "pyramid"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass
class CellStats:
    nodes: int
    arcs: int
    boundary_arcs: int


@dataclass
class LevelStats:
    level: int
    unresolved: int
    cells: List[CellStats]
    fixed_count: int
    fixed_fraction: float
    wall_time: float
    fallback: bool = False

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "unresolved": self.unresolved,
            "cells": [
                {"nodes": c.nodes, "arcs": c.arcs, "boundary_arcs": c.boundary_arcs}
                for c in self.cells
            ],
            "fixed_count": self.fixed_count,
            "fixed_fraction": self.fixed_fraction,
            "wall_time": self.wall_time,
            "fallback": self.fallback,
        }


class Fixability(enum.Enum):
    FIXABLE_TO_1 = "fixable_to_1"
    FIXABLE_TO_0 = "fixable_to_0"
    UNDECIDED = "undecided"


def partition_level(S_l: Iterable[int], g: GNetwork, cfg: MnfcConfig) -> List[List[int]]:
    """Disjoint cover of the unresolved set.

    Image networks use tile_side x tile_side grid blocks (layered networks
    group all layer copies of a tile); generic networks use contiguous id
    ranges of cell_size, or a pyramidal halving split.  A set at or below
    fallback_threshold comes back as a single cell (direct-solve signal).
    """
    nodes = sorted(S_l)
    if not nodes:
        raise NetworkError("cannot partition an empty set")
    if len(nodes) <= cfg.fallback_threshold:
        return [nodes]
    strategy = cfg.strategy
    if strategy == "auto":
        strategy = "tiles" if (g.grid_shape or g.layer_shape) else "ranges"
    if strategy == "tiles" and (g.grid_shape or g.layer_shape):
        if g.layer_shape:
            h, w, nlayers = g.layer_shape
        else:
            h, w = g.grid_shape
            nlayers = 1
        npix = h * w
        cells: Dict[Tuple[int, int], List[int]] = {}
        for nid in nodes:
            pix = nid % npix
            r, c = divmod(pix, w)
            key = (r // cfg.tile_side, c // cfg.tile_side)
            cells.setdefault(key, []).append(nid)
        return [cells[k] for k in sorted(cells)]
    if strategy == "pyramid":
        # halve until chunks fit cell_size: 2^k equal contiguous chunks
        k = 1
        while (len(nodes) + (1 << k) - 1) >> k > cfg.cell_size:
            k += 1
        count = 1 << k
        size = (len(nodes) + count - 1) // count
        return [nodes[i : i + size] for i in range(0, len(nodes), size)]
    return [nodes[i : i + cfg.cell_size] for i in range(0, len(nodes), cfg.cell_size)]


def local_estimates(
    g: GNetwork, cell: Sequence[int], fixed: Dict[int, int]
) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Canonical extreme solutions of the cell under the two constant frontiers.

    x0: minimal cut assuming every unresolved outside node is 0; x1:
    maximal cut assuming 1.  Always x0 <= x1 coordinate-wise; any global
    optimum restricted to the cell lies between them.
    """
    cell_set = frozenset(cell)
    x0 = restricted_solve(g, FrontierCondition(cell_set, 0, fixed), pick="minimal")
    x1 = restricted_solve(g, FrontierCondition(cell_set, 1, fixed), pick="maximal")
    if any(x0[k] > x1[k] for k in cell_set):
        raise AssertionError("sandwich violated: x0 > x1 on a cell node")
    return x0, x1


def fix_nodes(x0: Dict[int, int], x1: Dict[int, int]) -> Dict[int, int]:
    """Nodes decided by both extremes: x1=0 pins to 0, x0=1 pins to 1."""
    fixed = {k: 0 for k, v in x1.items() if v == 0}
    fixed.update({k: 1 for k, v in x0.items() if v == 1})
    return fixed


def check_fixable_subset(g: GNetwork, D: Iterable[int]) -> Fixability:
    """Evaluate the degeneracy inequalities for a candidate subset D.

    sum lam_i*(1-2y_i) over D plus the beta mass leaving D nonpositive
    means D can join the source side of some optimum; with the incoming
    beta mass and >= 0 it can join the sink side.  Diagnostic only.
    """
    D = set(D)
    if not D:
        return Fixability.UNDECIDED
    base = sum(g.lam[i] * (1 - 2 * g.y[i]) for i in D)
    out_mass = sum(c for i in D for j, c in g.out_adj()[i] if j not in D)
    in_mass = sum(c for i in D for j, c in g.in_adj()[i] if j not in D)
    if base + out_mass <= 0:
        return Fixability.FIXABLE_TO_1
    if base + in_mass >= 0:
        return Fixability.FIXABLE_TO_0
    return Fixability.UNDECIDED


def _cell_stats(g: GNetwork, cell: Sequence[int]) -> CellStats:
    cell_set = set(cell)
    arcs = boundary = 0
    out_adj = g.out_adj()
    for i, row in enumerate(out_adj):
        for j, _ in row:
            if i in cell_set and j in cell_set:
                arcs += 1
            elif i in cell_set or j in cell_set:
                boundary += 1
    # terminal arcs of the modified subnetwork
    arcs += sum(1 for i in cell_set if g.lam[i] > 0)
    return CellStats(nodes=len(cell), arcs=arcs, boundary_arcs=boundary)


def run_mnfc(
    g: GNetwork, cfg: MnfcConfig, pick: str = "maximal", collect_stats: bool = True
) -> Tuple[CutLabeling, List[LevelStats]]:
    """Full multiresolution solve; the labeling attains the global minimum cut.

    `pick` selects the canonical cut of the final direct solve, so with
    "maximal" the assembled labeling is the canonical maximal minimum cut
    (level-fixed bits agree with every optimum).
    """
    n = g.num_usual
    fixed: Dict[int, int] = {}
    unresolved = set(range(n))
    stats: List[LevelStats] = []
    level = 0
    while unresolved:
        level += 1
        t0 = time.perf_counter()
        cells = partition_level(unresolved, g, cfg)
        direct = len(cells) == 1 or level > cfg.max_levels
        if direct:
            sol = restricted_solve(g, FrontierCondition(frozenset(unresolved), 0, fixed), pick)
            fixed.update(sol)
            if collect_stats:
                stats.append(
                    LevelStats(
                        level=level,
                        unresolved=len(unresolved),
                        cells=[_cell_stats(g, sorted(unresolved))],
                        fixed_count=len(unresolved),
                        fixed_fraction=1.0,
                        wall_time=time.perf_counter() - t0,
                        fallback=True,
                    )
                )
            unresolved.clear()
            break

        frozen_fixed = dict(fixed)

        def solve_cell(cell):
            x0, x1 = local_estimates(g, cell, frozen_fixed)
            return fix_nodes(x0, x1)

        if cfg.worker_count > 1:
            with ThreadPoolExecutor(max_workers=cfg.worker_count) as pool:
                results = list(pool.map(solve_cell, cells))
        else:
            results = [solve_cell(cell) for cell in cells]

        newly: Dict[int, int] = {}
        for res in results:  # merged in cell order: schedule-independent
            newly.update(res)
        if collect_stats:
            stats.append(
                LevelStats(
                    level=level,
                    unresolved=len(unresolved),
                    cells=[_cell_stats(g, cell) for cell in cells],
                    fixed_count=len(newly),
                    fixed_fraction=len(newly) / len(unresolved),
                    wall_time=time.perf_counter() - t0,
                )
            )
        if not newly:
            # R(l) empty: the multiresolution step cannot continue; direct solve
            t0 = time.perf_counter()
            sol = restricted_solve(g, FrontierCondition(frozenset(unresolved), 0, fixed), pick)
            fixed.update(sol)
            if collect_stats:
                stats.append(
                    LevelStats(
                        level=level + 1,
                        unresolved=len(unresolved),
                        cells=[_cell_stats(g, sorted(unresolved))],
                        fixed_count=len(unresolved),
                        fixed_fraction=1.0,
                        wall_time=time.perf_counter() - t0,
                        fallback=True,
                    )
                )
            unresolved.clear()
            break
        fixed.update(newly)
        unresolved -= set(newly)
    return tuple(fixed[i] for i in range(n)), stats
