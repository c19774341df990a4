"""Reference metrics computed straight from frame pixels.

Nothing here serializes or packs words. Each metric walks the shifted-block
grid in frame coordinates with unbounded Python integers; the only
truncation is the pair of right shifts that define the hardware exposure
value. Slow by design.

Frame coordinates are 0-based. Shifted block ``(u, v)`` has its top-left
pixel at ``(8u + 1, 8v + 1)``; inside it the coding-block boundaries sit
between local rows 6|7 and local columns 6|7.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import TooFewBlocks
from .ingest import Frame

MIN_SENTINEL = 16384

# Local rows sampled across the vertical boundary (cols 6|7) and local
# columns sampled across the horizontal boundary (rows 6|7): all four rows
# of the upper-right quadrant plus the first and last row of the lower-right
# one, and symmetrically for columns.
VERTICAL_BOUNDARY_ROWS = (0, 1, 2, 3, 4, 7)
HORIZONTAL_BOUNDARY_COLS = (0, 1, 2, 3, 4, 7)


def _shifted_origins(frame: Frame):
    for u in range(frame.height // 8 - 1):
        for v in range(frame.width // 8 - 1):
            yield 8 * u + 1, 8 * v + 1


def _rows(frame: Frame) -> list[list[int]]:
    return frame.luma.tolist()


def oracle_blockiness(frame: Frame) -> tuple[int, int, Optional[float]]:
    """Return ``(inter, intra, intra / inter)``; the ratio is None when inter is 0."""
    img = _rows(frame)
    inter = intra = 0
    for top, left in _shifted_origins(frame):
        for r in VERTICAL_BOUNDARY_ROWS:
            row = img[top + r]
            before, last, first = row[left + 5], row[left + 6], row[left + 7]
            inter += abs(last - first)
            intra += abs(last - before)
        for c in HORIZONTAL_BOUNDARY_COLS:
            x = left + c
            before, last, first = img[top + 5][x], img[top + 6][x], img[top + 7][x]
            inter += abs(last - first)
            intra += abs(last - before)
    return inter, intra, (intra / inter if inter else None)


def block_sums(frame: Frame) -> list[int]:
    """Luminance sum of every shifted block, raster order."""
    img = _rows(frame)
    sums = []
    for top, left in _shifted_origins(frame):
        sums.append(sum(sum(img[top + r][left:left + 8]) for r in range(8)))
    return sums


@dataclass(frozen=True)
class BlockSummary:
    sums: list
    means: list
    sorted_sums: list
    sorted_means: list

    @classmethod
    def of(cls, frame: Frame) -> "BlockSummary":
        sums = block_sums(frame)
        means = [Fraction(s, 64) for s in sums]
        return cls(sums, means, sorted(sums), sorted(means))


def _extreme_chains(sums: list[int]) -> tuple[list[int], list[int]]:
    # Sentinel-padded top/bottom four: the hardware chains keep exactly the
    # four smallest (largest) of {sentinels} + sums.
    lows = sorted(sums + [MIN_SENTINEL] * 4)[:4]
    highs = sorted(sums + [0] * 4, reverse=True)[:4]
    return lows, highs


def oracle_exposure_hw(frame: Frame) -> int:
    lows, highs = _extreme_chains(block_sums(frame))
    return sum(v >> 2 for v in lows + highs) >> 7


def oracle_exposure_paper(frame: Frame) -> float:
    """Half the sum of the three darkest and three brightest block means."""
    summary = BlockSummary.of(frame)
    if len(summary.sums) < 3:
        raise TooFewBlocks(
            f"{frame.width}x{frame.height} has {len(summary.sums)} shifted blocks, need 3"
        )
    dark = sum(summary.sorted_means[:3])
    bright = sum(summary.sorted_means[-3:])
    return float((bright + dark) / 2)


def oracle_blackout(frame: Frame, th_blout: int = 4) -> int:
    sums = block_sums(frame)
    return 1 if max(sums) - min(sums) <= th_blout else 0


def interlace_differences(block: list[list[int]]) -> list[int]:
    """Twelve signed differences of a 4x4 microblock (``block[row][col]``).

    d1..d4 = row1 - row2, d5..d8 = row3 - row2, d9..d12 = row3 - row4, per column.
    """
    r1, r2, r3, r4 = block
    return ([a - b for a, b in zip(r1, r2)]
            + [a - b for a, b in zip(r3, r2)]
            + [a - b for a, b in zip(r3, r4)])


def _is_comb(block: list[list[int]]) -> bool:
    d = interlace_differences(block)
    return all(x > 0 for x in d) or all(x < 0 for x in d)


def oracle_interlace(frame: Frame) -> tuple[int, float]:
    img = _rows(frame)
    count = total = 0
    for top, left in _shifted_origins(frame):
        for dr in (0, 4):
            for dc in (0, 4):
                block = [img[top + dr + r][left + dc:left + dc + 4] for r in range(4)]
                count += _is_comb(block)
                total += 1
    return count, count / total


@dataclass(frozen=True)
class OracleResult:
    inter_sum: int
    intra_sum: int
    exposure: int
    blackout: int
    interlace_count: int


def oracle_all(frame: Frame, th_blout: int = 4) -> OracleResult:
    inter, intra, _ = oracle_blockiness(frame)
    count, _ = oracle_interlace(frame)
    return OracleResult(
        inter_sum=inter,
        intra_sum=intra,
        exposure=oracle_exposure_hw(frame),
        blackout=oracle_blackout(frame, th_blout),
        interlace_count=count,
    )
