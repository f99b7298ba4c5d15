"""Netpbm I/O, seeded noise models, comparator filters, quality metrics.

Noise uses numpy's PCG64 generator explicitly (pinned for bit-for-bit
reproducibility across platforms); seed 0 means "derive from entropy".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .ising import EnergyParams, GrayImage, ImageError
from .layers import minimize_U1
from .mnfc import MnfcConfig
from .qnet import minimize_U2


@dataclass(frozen=True)
class ColorImage:
    r: GrayImage
    g: GrayImage
    b: GrayImage

    def __post_init__(self):
        if not (self.r.shape == self.g.shape == self.b.shape):
            raise ImageError("channel shapes differ")
        if not (self.r.levels == self.g.levels == self.b.levels):
            raise ImageError("channel levels differ")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.r.shape

    @property
    def levels(self) -> int:
        return self.r.levels


@dataclass(frozen=True)
class NoiseSpec:
    kind: str  # bernoulli_flip | exponential_additive
    p: Optional[float] = None
    rate: Optional[float] = None
    seed: int = 1

    def __post_init__(self):
        if self.kind == "bernoulli_flip":
            if self.p is None or not (0.0 <= self.p <= 1.0):
                raise ImageError("bernoulli_flip needs p in [0, 1]")
        elif self.kind == "exponential_additive":
            if self.rate is None or self.rate <= 0:
                raise ImageError("exponential_additive needs rate > 0")
        else:
            raise ImageError(f"unknown noise kind {self.kind!r}")


def _rng(seed: int) -> np.random.Generator:
    if seed == 0:
        return np.random.Generator(np.random.PCG64())
    return np.random.Generator(np.random.PCG64(seed))


def apply_noise(img: GrayImage, spec: NoiseSpec) -> GrayImage:
    """Seeded corruption: independent pixel flips or additive exponential."""
    rng = _rng(spec.seed)
    if spec.kind == "bernoulli_flip":
        if not img.is_binary():
            raise ImageError("bernoulli_flip requires a binary image")
        flips = rng.random(img.shape) < spec.p
        return GrayImage(np.where(flips, 1 - img.pixels, img.pixels), 2)
    noise = rng.exponential(scale=1.0 / spec.rate, size=img.shape)
    noisy = img.pixels + np.floor(noise + 0.5).astype(np.int64)
    return GrayImage(np.clip(noisy, 0, img.levels - 1), img.levels)


_TOKEN = re.compile(rb"\s+")


def _pnm_tokens(data: bytes, count: int):
    """First `count` whitespace-separated header tokens and the end offset."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise ImageError("unterminated comment in header")
            pos = eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageError("truncated header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_image(path) -> Union[GrayImage, ColorImage]:
    """Read PGM (P2/P5) or PPM (P6); maxval+1 becomes the level count."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2:
        raise ImageError("not a netpbm file")
    magic = data[:2]
    if magic not in (b"P2", b"P5", b"P6"):
        raise ImageError(f"unsupported magic {magic!r}")
    tokens, pos = _pnm_tokens(data, 4)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise ImageError("malformed header")
    if width < 1 or height < 1:
        raise ImageError("bad dimensions")
    if not (0 < maxval <= 255):
        raise ImageError(f"maxval {maxval} unsupported (1..255)")
    levels = maxval + 1
    if magic == b"P2":
        values = data[pos:].split()
        if len(values) != width * height:
            raise ImageError("truncated or overlong P2 payload")
        arr = np.array([int(v) for v in values], dtype=np.int64)
        return GrayImage(arr.reshape(height, width), levels)
    pos += 1  # single whitespace after maxval
    channels = 3 if magic == b"P6" else 1
    need = width * height * channels
    payload = data[pos : pos + need]
    if len(payload) != need:
        raise ImageError("truncated binary payload")
    arr = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)
    if magic == b"P5":
        return GrayImage(arr.reshape(height, width), levels)
    arr = arr.reshape(height, width, 3)
    return ColorImage(
        GrayImage(arr[:, :, 0], levels),
        GrayImage(arr[:, :, 1], levels),
        GrayImage(arr[:, :, 2], levels),
    )


def write_image(img: Union[GrayImage, ColorImage], path) -> None:
    """Write P5 for grayscale, P6 for color; round-trips through read_image."""
    if isinstance(img, ColorImage):
        header = f"P6\n{img.shape[1]} {img.shape[0]}\n{img.levels - 1}\n".encode()
        stacked = np.stack(
            [img.r.pixels, img.g.pixels, img.b.pixels], axis=-1
        ).astype(np.uint8)
        payload = stacked.tobytes()
    else:
        header = f"P5\n{img.width} {img.height}\n{img.levels - 1}\n".encode()
        payload = img.pixels.astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def _pad_windows(img: GrayImage) -> np.ndarray:
    padded = np.pad(img.pixels, 1, mode="edge")
    h, w = img.shape
    return np.stack(
        [padded[dr : dr + h, dc : dc + w] for dr in range(3) for dc in range(3)],
        axis=0,
    )


def moving_average_3x3(img: GrayImage) -> GrayImage:
    """3x3 mean with replicate padding; rounds half up, exactly in integers."""
    wins = _pad_windows(img)
    avg = (wins.sum(axis=0) + 4) // 9
    return GrayImage(avg, img.levels)


def moving_median_3x3(img: GrayImage) -> GrayImage:
    wins = _pad_windows(img)
    med = np.median(wins, axis=0).astype(np.int64)
    return GrayImage(med, img.levels)


def metrics(a: GrayImage, b: GrayImage) -> dict:
    """error_rate: fraction of differing pixels; mae: mean absolute difference."""
    if a.shape != b.shape:
        raise ImageError("shape mismatch")
    diff = np.abs(a.pixels - b.pixels)
    n = diff.size
    return {
        "error_rate": float(np.count_nonzero(diff)) / n,
        "mae": float(diff.sum()) / n,
    }


def restore_color(
    img: ColorImage,
    p: EnergyParams,
    which: str = "u1",
    solver: str = "baseline",
    cfg: Optional[MnfcConfig] = None,
) -> ColorImage:
    """Channel-wise restoration: the grayscale pipeline applied per channel."""
    if which not in ("u1", "u2"):
        raise ImageError(f"unknown model {which!r}")
    minimize = minimize_U1 if which == "u1" else minimize_U2
    channels = []
    for chan in (img.r, img.g, img.b):
        restored, _ = minimize(chan, p, solver=solver, cfg=cfg)
        channels.append(restored)
    return ColorImage(*channels)
