"""Exact U2 minimization through the multi-layer Boolean network.

U2 over {0,...,L-1} pixels is rewritten over L-1 unordered Boolean layers
per pixel; a surrogate polynomial Q dominates the rewritten form P and
agrees with it exactly on ordered (monotone) layer stacks, so every
minimum cut of the layer network is ordered and sums to the U2 minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ising import BinaryImage, EnergyParams, GrayImage, ImageError, eval_U2
from .maxflow import max_flow, min_cut_maximal
from .mnfc import MnfcConfig, run_mnfc
from .netcore import Network, normalize_to_G


def _pair_caps(shape: Tuple[int, int], p: EnergyParams) -> Dict[Tuple[int, int], int]:
    """Unordered neighbor pair -> total coupling (scaled beta, counted once).

    Energies count each unordered pair once with weight beta, so the
    ordered-direction couplings sum to beta, not 2*beta.
    """
    return {(i, j): p.beta_int(i, j) for i, j in p.pairs(shape)}


def _coupling_sums(n: int, caps: Dict[Tuple[int, int], int]) -> List[int]:
    """Per pixel: sum over neighbors j of (b_ij + b_ji)."""
    sums = [0] * n
    for (i, j), c in caps.items():
        sums[i] += c
        sums[j] += c
    return sums


def coeff_d(i: int, l: int, y: GrayImage, p: EnergyParams) -> int:
    """Linear coefficient of layer bit x_i(l) in the rearranged polynomial.

    d_{i,l} = (2l-1)*lam_i - 2*lam_i*y_i + (2l-L)*sum_j(b_ij + b_ji);
    strictly increasing in l since lam_i and the couplings are positive.
    """
    if not (1 <= l <= y.levels - 1):
        raise ImageError(f"layer index {l} outside 1..{y.levels - 1}")
    lam = int(p.lam_int(y.shape)[i])
    caps = _pair_caps(y.shape, p)
    csum = _coupling_sums(y.height * y.width, caps)[i]
    yi = int(y.pixels.ravel()[i])
    return (2 * l - 1) * lam - 2 * lam * yi + (2 * l - y.levels) * csum


def build_q_network(y: GrayImage, p: EnergyParams) -> Network:
    """Layer network with (L-1)*|S| usual nodes; min cuts minimize Q.

    Node for pixel i at layer l has id 1 + (l-1)*|S| + i.  Negative d
    coefficients become source arcs of capacity -d, positive ones sink
    arcs; neighbor pixels are joined by opposing arcs of the coupling
    capacity within each layer and across every distinct layer pair.
    """
    if y.levels < 2:
        raise ImageError("need at least 2 levels")
    h, w = y.shape
    n = h * w
    nlayers = y.levels - 1
    lam = p.lam_int(y.shape)
    yf = y.pixels.ravel()
    caps = _pair_caps(y.shape, p)
    csum = _coupling_sums(n, caps)
    V = nlayers * n
    t = V + 1
    arcs = []

    def node(i: int, l: int) -> int:
        return 1 + (l - 1) * n + i

    for l in range(1, nlayers + 1):
        for i in range(n):
            d = (2 * l - 1) * int(lam[i]) - 2 * int(lam[i]) * int(yf[i]) + (2 * l - y.levels) * csum[i]
            if d < 0:
                arcs.append((0, node(i, l), -d))
            elif d > 0:
                arcs.append((node(i, l), t, d))
    for (i, j), c in caps.items():
        for l in range(1, nlayers + 1):
            for m in range(1, nlayers + 1):
                arcs.append((node(i, l), node(j, m), c))
                arcs.append((node(j, m), node(i, l), c))
    return Network(V, tuple(arcs))


def q_value(layers: Sequence[BinaryImage], y: GrayImage, p: EnergyParams) -> int:
    """Direct evaluation of the rearranged surrogate polynomial Q."""
    h, w = y.shape
    n = h * w
    nlayers = y.levels - 1
    if len(layers) != nlayers:
        raise ImageError("expected levels-1 layers")
    lam = p.lam_int(y.shape)
    yf = y.pixels.ravel()
    caps = _pair_caps(y.shape, p)
    csum = _coupling_sums(n, caps)
    flat = [layer.pixels.ravel() for layer in layers]
    total = 0
    for l in range(1, nlayers + 1):
        xl = flat[l - 1]
        for i in range(n):
            d = (2 * l - 1) * int(lam[i]) - 2 * int(lam[i]) * int(yf[i]) + (2 * l - y.levels) * csum[i]
            total += d * int(xl[i])
    for (i, j), c in caps.items():
        for l in range(nlayers):
            total += c * (int(flat[l][i]) - int(flat[l][j])) ** 2
        for l in range(nlayers):
            for m in range(l + 1, nlayers):
                total += c * (
                    (int(flat[m][i]) - int(flat[l][j])) ** 2
                    + (int(flat[l][i]) - int(flat[m][j])) ** 2
                )
    return total


def p_value(layers: Sequence[BinaryImage], y: GrayImage, p: EnergyParams) -> int:
    """U2 of the layer sum minus the constant sum lam_i*y_i^2 (Q's lower bound)."""
    total = np.zeros(y.shape, dtype=np.int64)
    for layer in layers:
        total = total + layer.pixels
    x = GrayImage(np.minimum(total, y.levels - 1), y.levels)
    if total.max(initial=0) > y.levels - 1:
        raise ImageError("layer sum exceeds the level range")
    lam = p.lam_int(y.shape)
    const = int(np.dot(lam, (y.pixels.ravel()) ** 2))
    return eval_U2(x, y, p) - const


def minimize_U2(
    y: GrayImage,
    p: EnergyParams,
    solver: str = "baseline",
    cfg: Optional[MnfcConfig] = None,
) -> Tuple[GrayImage, int]:
    """Global integer minimizer of U2 and its value.

    Solves the layer network by min cut, checks the extracted per-layer
    bits form a decreasing stack (true of every minimizer), and sums them.
    """
    if solver not in ("baseline", "mnfc"):
        raise ValueError(f"unknown solver {solver!r}")
    h, w = y.shape
    n = h * w
    nlayers = y.levels - 1
    net = build_q_network(y, p)
    if solver == "mnfc":
        g = normalize_to_G(net)
        g.layer_shape = (h, w, nlayers)
        x, _ = run_mnfc(g, cfg or MnfcConfig(), pick="maximal")
    else:
        x = min_cut_maximal(max_flow(net))
    flat = np.array(x, dtype=np.int64)
    stacks = [flat[(l - 1) * n : l * n].reshape(y.shape) for l in range(1, nlayers + 1)]
    for a, b in zip(stacks, stacks[1:]):
        if not np.all(a >= b):
            raise AssertionError("q-layers are not decreasing (construction bug)")
    total = np.zeros(y.shape, dtype=np.int64)
    for layer in stacks:
        total = total + layer
    xstar = GrayImage(total, y.levels)
    return xstar, eval_U2(xstar, y, p)
