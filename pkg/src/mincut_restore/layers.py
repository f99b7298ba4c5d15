"""Exact U1 minimization by threshold decomposition into binary cut problems.

|a - b| equals the sum over thresholds l of |1(a>=l) - 1(b>=l)|, so U1
splits into L-1 independent binary energies, one per layer.  Solving each
layer with the same canonical maximal cut yields a monotone stack whose
sum is a global integer minimizer.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .ising import BinaryImage, EnergyParams, GrayImage, ImageError, build_binary_map_network, eval_U1
from .maxflow import max_flow, min_cut_maximal
from .mnfc import MnfcConfig, run_mnfc


@dataclass(frozen=True)
class LayerStack:
    """Monotone decreasing sequence of binary layers x(1) >= ... >= x(L-1)."""

    levels: int
    layers: Tuple[BinaryImage, ...]

    def __post_init__(self):
        if len(self.layers) != self.levels - 1:
            raise ImageError("expected levels-1 layers")
        for a, b in zip(self.layers, self.layers[1:]):
            if not np.all(a.pixels >= b.pixels):
                raise ImageError("layer stack is not monotone decreasing")


def threshold_decompose(x: GrayImage) -> LayerStack:
    """x(l)_i = 1 iff x_i >= l, for l = 1..L-1."""
    layers = tuple(
        BinaryImage((x.pixels >= l).astype(np.int64), 2) for l in range(1, x.levels)
    )
    return LayerStack(x.levels, layers)


def stack_sum(s: LayerStack) -> GrayImage:
    """Pixel-wise sum of the layers; inverse of threshold_decompose."""
    total = np.zeros(s.layers[0].shape, dtype=np.int64) if s.layers else None
    if total is None:
        raise ImageError("empty layer stack")
    for layer in s.layers:
        total = total + layer.pixels
    return GrayImage(total, s.levels)


def layer_energy(xl: BinaryImage, yl: BinaryImage, p: EnergyParams) -> int:
    """Binary energy of one layer; these sum to U1 across the stack."""
    return eval_U1(xl, yl, p)


def _solve_layer(yl: BinaryImage, p: EnergyParams, solver: str, cfg: Optional[MnfcConfig]) -> BinaryImage:
    g = build_binary_map_network(yl, p)
    if solver == "mnfc":
        x, _ = run_mnfc(g, cfg or MnfcConfig(), pick="maximal")
    else:
        x = min_cut_maximal(max_flow(g.to_network()))
    return BinaryImage(np.array(x, dtype=np.int64).reshape(yl.shape), 2)


def minimize_U1(
    y: GrayImage,
    p: EnergyParams,
    solver: str = "baseline",
    cfg: Optional[MnfcConfig] = None,
    workers: int = 1,
) -> Tuple[GrayImage, int]:
    """Global integer minimizer of U1 and its value.

    Each threshold layer of y is solved as an independent binary MAP cut;
    the uniform canonical-maximal policy makes the solved layers monotone
    (observed layers are monotone, and canonical cuts are monotone in the
    data), which a failed assertion here would disprove.
    """
    if solver not in ("baseline", "mnfc"):
        raise ValueError(f"unknown solver {solver!r}")
    ylayers = threshold_decompose(y).layers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(lambda yl: _solve_layer(yl, p, solver, cfg), ylayers))
    else:
        solved = [_solve_layer(yl, p, solver, cfg) for yl in ylayers]
    for a, b in zip(solved, solved[1:]):
        if not np.all(a.pixels >= b.pixels):
            raise AssertionError("solved layers lost monotonicity (solver bug)")
    x = stack_sum(LayerStack(y.levels, tuple(solved)))
    return x, eval_U1(x, y, p)
