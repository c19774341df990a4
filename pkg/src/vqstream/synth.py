"""Seeded frame generators for self-tests.

Plain uniform noise almost never trips the interlace or blackout detectors,
so the generator mixes several content styles that land on both sides of
every decision the metrics make.
"""

from __future__ import annotations

import numpy as np

from .ingest import Frame

STYLES = ("noise", "flat", "comb", "blocky", "gradient")


def random_size(rng: np.random.Generator, lo: int = 16, hi: int = 128) -> tuple[int, int]:
    """(height, width), each a multiple of 8 drawn uniformly from [lo, hi]."""
    h, w = rng.integers(lo // 8, hi // 8 + 1, size=2) * 8
    return int(h), int(w)


def make_luma(rng: np.random.Generator, height: int, width: int, style: str) -> np.ndarray:
    if style == "noise":
        return rng.integers(0, 256, (height, width), dtype=np.uint8)
    if style == "flat":
        # a handful of +1 bumps keeps block-sum spreads around the threshold
        base = int(rng.integers(0, 255))
        luma = np.full((height, width), base, dtype=np.int64)
        k = int(rng.integers(0, 7))
        ys = rng.integers(0, height, k)
        xs = rng.integers(0, width, k)
        np.add.at(luma, (ys, xs), 1)
        return np.clip(luma, 0, 255).astype(np.uint8)
    if style == "comb":
        hi_v = int(rng.integers(40, 256))
        lo_v = int(rng.integers(0, hi_v))
        rows = np.where(np.arange(height) % 2 == 0, hi_v, lo_v)
        luma = np.repeat(rows[:, None], width, axis=1)
        # sparse damage so some microblocks fail the test
        mask = rng.random((height, width)) < 0.01
        luma = np.where(mask, rng.integers(0, 256, (height, width)), luma)
        return luma.astype(np.uint8)
    if style == "blocky":
        tiles = rng.integers(0, 256, (height // 8, width // 8))
        luma = np.kron(tiles, np.ones((8, 8), dtype=np.int64))
        luma = luma + rng.integers(-3, 4, (height, width))
        return np.clip(luma, 0, 255).astype(np.uint8)
    if style == "gradient":
        y = np.linspace(0, int(rng.integers(1, 256)), height)[:, None]
        x = np.linspace(0, int(rng.integers(1, 256)), width)[None, :]
        return np.clip((y + x) / 2, 0, 255).astype(np.uint8)
    raise ValueError(f"unknown style {style!r}")


def random_test_frame(rng: np.random.Generator, index: int = 0,
                      lo: int = 16, hi: int = 128) -> Frame:
    h, w = random_size(rng, lo, hi)
    style = STYLES[int(rng.integers(len(STYLES)))]
    return Frame(index, make_luma(rng, h, w, style))


def comb_luma(height: int, width: int, high: int = 100, low: int = 50) -> np.ndarray:
    rows = np.where(np.arange(height) % 2 == 0, high, low).astype(np.uint8)
    return np.repeat(rows[:, None], width, axis=1)
