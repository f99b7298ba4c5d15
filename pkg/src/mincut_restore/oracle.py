"""Brute-force reference minimizers, independent of the flow solvers.

These enumerate every labeling (vectorized, but still plain enumeration)
and share only the energy evaluators' definitions with the main code
paths.  Desk scale only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .ising import EnergyParams, GrayImage
from .netcore import CutLabeling, GNetwork


class EnumerationLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumLimit:
    max_states: int = 2**24


def _bit_table(n: int) -> np.ndarray:
    """All 2^n binary labelings as a (2^n, n) array, lexicographic."""
    states = np.arange(2**n, dtype=np.int64)
    return (states[:, None] >> np.arange(n - 1, -1, -1)) & 1


def brute_min_cut(
    g: GNetwork, limit: EnumLimit = EnumLimit()
) -> Tuple[int, List[CutLabeling]]:
    """Exhaustive minimum cut value with the full argmin set."""
    n = g.num_usual
    if 2**n > limit.max_states:
        raise EnumerationLimitError(f"2^{n} labelings exceed the enumeration cap")
    if n == 0:
        return g.offset, [()]
    X = _bit_table(n)
    lam = np.array(g.lam, dtype=np.int64)
    y = np.array(g.y, dtype=np.int64)
    vals = X @ (lam * (1 - y)) + (1 - X) @ (lam * y) + g.offset
    for i, j, c in g.beta_arcs:
        vals = vals + c * X[:, i] * (1 - X[:, j])
    best = int(vals.min())
    argmin = [tuple(int(b) for b in row) for row in X[vals == best]]
    return best, argmin


def _level_table(levels: int, n: int) -> np.ndarray:
    """All levels^n gray labelings as a (levels^n, n) array."""
    states = np.arange(levels**n, dtype=np.int64)
    digits = []
    for k in range(n - 1, -1, -1):
        digits.append((states // levels**k) % levels)
    return np.stack(digits, axis=1)


def _brute_min_image(y: GrayImage, p: EnergyParams, power: int, limit: EnumLimit):
    n = y.height * y.width
    if y.levels**n > limit.max_states:
        raise EnumerationLimitError(
            f"{y.levels}^{n} labelings exceed the enumeration cap"
        )
    X = _level_table(y.levels, n)
    lam = p.lam_int(y.shape)
    yf = y.pixels.ravel()
    vals = np.abs(yf - X) ** power @ lam
    for i, j in p.pairs(y.shape):
        vals = vals + p.beta_int(i, j) * np.abs(X[:, i] - X[:, j]) ** power
    k = int(vals.argmin())
    best_x = GrayImage(X[k].reshape(y.shape), y.levels)
    return int(vals[k]), best_x


def brute_min_U1(y: GrayImage, p: EnergyParams, limit: EnumLimit = EnumLimit()):
    """Exhaustive U1 minimum and one argmin image."""
    return _brute_min_image(y, p, 1, limit)


def brute_min_U2(y: GrayImage, p: EnergyParams, limit: EnumLimit = EnumLimit()):
    """Exhaustive U2 minimum and one argmin image."""
    return _brute_min_image(y, p, 2, limit)
