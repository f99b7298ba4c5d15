"""Ising image energies, binary MAP network construction, preservation bounds.

Pixels are flat-indexed row-major; neighbor pairs are unordered and each
energy sum counts a pair once.  Real-valued lambda/beta are converted to
exact integers by the fixed-point scale before any network is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from .netcore import GNetwork


class ImageError(ValueError):
    pass


@dataclass(frozen=True)
class GrayImage:
    """2D integer lattice with pixel values in {0, ..., levels-1}."""

    pixels: np.ndarray
    levels: int

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.int64)
        if arr.ndim != 2:
            raise ImageError("pixels must be a 2D array")
        if self.levels < 2:
            raise ImageError("need at least 2 levels")
        if arr.size and (arr.min() < 0 or arr.max() >= self.levels):
            raise ImageError(f"pixel values outside [0, {self.levels - 1}]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape

    def is_binary(self) -> bool:
        return self.levels == 2

    def __eq__(self, other):
        return (
            isinstance(other, GrayImage)
            and self.levels == other.levels
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )


BinaryImage = GrayImage  # levels == 2


def neighbor_pairs(shape: Tuple[int, int], neighborhood: int = 4) -> List[Tuple[int, int]]:
    """Unordered neighbor pairs (i < j) of the lattice, flat row-major ids."""
    if neighborhood not in (4, 8):
        raise ImageError("neighborhood must be 4 or 8")
    h, w = shape
    offsets = [(0, 1), (1, 0)]
    if neighborhood == 8:
        offsets += [(1, 1), (1, -1)]
    pairs = []
    for r in range(h):
        for c in range(w):
            i = r * w + c
            for dr, dc in offsets:
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w:
                    pairs.append((i, rr * w + cc))
    return pairs


@dataclass(frozen=True)
class EnergyParams:
    """Smoothing/fidelity weights in user units plus the fixed-point scale.

    lam: uniform float or per-pixel array; beta: uniform float or a dict
    keyed by unordered flat-id pairs (missing pairs fall back to the
    uniform value, which then must be given as beta_default).
    """

    lam: Union[float, np.ndarray]
    beta: Union[float, Dict[Tuple[int, int], float]]
    neighborhood: int = 4
    scale: int = 65536
    beta_default: float = 0.0

    def __post_init__(self):
        if self.neighborhood not in (4, 8):
            raise ImageError("neighborhood must be 4 or 8")
        if self.scale < 1:
            raise ImageError("scale must be positive")

    def lam_int(self, shape: Tuple[int, int]) -> np.ndarray:
        """Per-pixel scaled integer lambda, flat row-major."""
        n = shape[0] * shape[1]
        if np.isscalar(self.lam):
            val = int(round(float(self.lam) * self.scale))
            if val <= 0:
                raise ImageError("lambda must be positive after scaling")
            return np.full(n, val, dtype=np.int64)
        arr = np.asarray(self.lam, dtype=np.float64)
        if arr.shape != shape:
            raise ImageError("per-pixel lambda shape mismatch")
        out = np.rint(arr * self.scale).astype(np.int64).ravel()
        if (out <= 0).any():
            raise ImageError("lambda must be positive after scaling")
        return out

    def beta_int(self, i: int, j: int) -> int:
        """Scaled integer beta of the unordered pair {i, j}."""
        if isinstance(self.beta, dict):
            key = (i, j) if i < j else (j, i)
            raw = self.beta.get(key, self.beta_default)
        else:
            raw = float(self.beta)
        val = int(round(raw * self.scale))
        if val <= 0:
            raise ImageError("beta must be positive after scaling")
        return val

    def pairs(self, shape: Tuple[int, int]) -> List[Tuple[int, int]]:
        return neighbor_pairs(shape, self.neighborhood)


def _check_same(x: GrayImage, y: GrayImage):
    if x.shape != y.shape or x.levels != y.levels:
        raise ImageError("image shape/levels mismatch")


def eval_U1(x: GrayImage, y: GrayImage, p: EnergyParams) -> int:
    """lam*sum|y_i - x_i| + sum over unordered neighbor pairs beta*|x_i - x_j|."""
    _check_same(x, y)
    lam = p.lam_int(x.shape)
    xf = x.pixels.ravel()
    yf = y.pixels.ravel()
    total = int(np.dot(lam, np.abs(yf - xf)))
    for i, j in p.pairs(x.shape):
        total += p.beta_int(i, j) * abs(int(xf[i]) - int(xf[j]))
    return total


def eval_U2(x: GrayImage, y: GrayImage, p: EnergyParams) -> int:
    """sum lam_i*(y_i - x_i)^2 + sum over unordered pairs beta*(x_i - x_j)^2."""
    _check_same(x, y)
    lam = p.lam_int(x.shape)
    xf = x.pixels.ravel()
    yf = y.pixels.ravel()
    total = int(np.dot(lam, (yf - xf) ** 2))
    for i, j in p.pairs(x.shape):
        total += p.beta_int(i, j) * (int(xf[i]) - int(xf[j])) ** 2
    return total


def build_binary_map_network(y: BinaryImage, p: EnergyParams) -> GNetwork:
    """Min-cut network whose optimal labelings are the binary MAP estimates.

    Pixels observed as 1 hang off the source, 0-pixels off the sink, both
    with capacity lam_i; each unordered neighbor pair contributes the two
    opposing arcs of capacity beta, of which any cut pays exactly one.
    """
    if not y.is_binary():
        raise ImageError("binary MAP network requires a 2-level image")
    lam = p.lam_int(y.shape)
    bits = y.pixels.ravel()
    arcs = []
    for i, j in p.pairs(y.shape):
        b = p.beta_int(i, j)
        arcs.append((i, j, b))
        arcs.append((j, i, b))
    return GNetwork(
        num_usual=y.height * y.width,
        lam=tuple(int(v) for v in lam),
        y=tuple(int(b) for b in bits),
        beta_arcs=tuple(arcs),
        offset=0,
        grid_shape=y.shape,
    )


def preservation_bound(component_size: int, p: EnergyParams) -> bool:
    """True iff beta <= M*lam / (2*(M+1)) for uniform parameters.

    Under this bound every constant component of the observed image with
    more than M nodes keeps its value in the exact MAP; the M -> infinity
    limit beta <= lam/2 covers contoured components.
    """
    if component_size < 1:
        raise ImageError("component size must be >= 1")
    if not np.isscalar(p.lam) or isinstance(p.beta, dict):
        raise ImageError("preservation bound requires uniform lambda and beta")
    lam = int(round(float(p.lam) * p.scale))
    beta = p.beta_int(0, 1)
    m = component_size
    return 2 * (m + 1) * beta <= m * lam
