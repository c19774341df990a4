"""Frame -> 128-bit word stream.

The stream for one frame is a resolution header word followed by the
microblocks of every shifted 8x8 block. A shifted block starts one pixel
right and down of the coding grid so that each coding-block boundary falls
inside it, between microblock rows/columns 3 and 4.

Words are held as rows of a ``(n, 16)`` uint8 array; byte ``k`` of a row is
bits ``8k..8k+7`` of the 128-bit value (byte 0 least significant).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ResolutionMismatch
from .ingest import Frame, Resolution

WORD_BYTES = 16


class MicroblockKind(IntEnum):
    TL = 0  # no boundary
    TR = 1  # vertical coding-block boundary
    BL = 2  # horizontal coding-block boundary
    BR = 3  # both


@dataclass(frozen=True)
class GridGeometry:
    width: int
    height: int
    blx: int
    bly: int

    @property
    def shifted_cols(self) -> int:
        return self.blx - 1

    @property
    def shifted_rows(self) -> int:
        return self.bly - 1

    @property
    def shifted_blocks(self) -> int:
        return self.shifted_cols * self.shifted_rows

    @property
    def microblocks(self) -> int:
        return 4 * self.shifted_blocks

    @property
    def words_per_frame(self) -> int:
        return 1 + self.microblocks


def grid_geometry(res: Resolution) -> GridGeometry:
    return GridGeometry(res.width, res.height, res.width // 8, res.height // 8)


def microblock_kind(counter: int) -> MicroblockKind:
    return MicroblockKind(counter % 4)


def pack_microblock(px) -> int:
    """Pack sixteen column-major samples p1..p16 into a 128-bit integer."""
    data = bytes(px)
    if len(data) != WORD_BYTES:
        raise ValueError(f"a microblock has 16 samples, got {len(data)}")
    return int.from_bytes(data, "little")


def unpack_word(word: int) -> tuple[int, ...]:
    """Inverse of :func:`pack_microblock`; returns (p1, ..., p16)."""
    return tuple(int(word).to_bytes(WORD_BYTES, "little"))


def header_word(res: Resolution) -> int:
    return res.width | (res.height << 16)


def parse_header_word(word: int) -> Resolution:
    if word >> 32:
        raise ResolutionMismatch("header word has non-zero reserved bits")
    return Resolution(word & 0xFFFF, (word >> 16) & 0xFFFF)


def word_to_int(row) -> int:
    return int.from_bytes(bytes(row), "little")


def int_to_word(word: int) -> np.ndarray:
    return np.frombuffer(int(word).to_bytes(WORD_BYTES, "little"), dtype=np.uint8)


def serialize_payload(luma: np.ndarray) -> np.ndarray:
    """Microblock words of a ``(H, W)`` plane as a ``(4 * shifted_blocks, 16)`` array.

    Shifted blocks go in raster order; inside each, microblocks go TL, TR, BL,
    BR; inside each microblock the samples are column-major.
    """
    h, w = luma.shape
    rows, cols = h // 8 - 1, w // 8 - 1
    region = luma[1:1 + 8 * rows, 1:1 + 8 * cols]
    # axes: (u, half_r, r, v, half_c, c)
    tiles = region.reshape(rows, 2, 4, cols, 2, 4)
    # -> (u, v, half_r, half_c, c, r): raster blocks, TL/TR/BL/BR, column-major
    return np.ascontiguousarray(tiles.transpose(0, 3, 1, 4, 5, 2)).reshape(-1, WORD_BYTES)


def serialize_frame(frame: Frame, expected: Resolution | None = None) -> np.ndarray:
    """Header word plus payload words for one frame, as a ``(n, 16)`` uint8 array."""
    res = frame.resolution
    if expected is not None and expected != res:
        raise ResolutionMismatch(f"frame {frame.index} is {res}, stream is {expected}")
    payload = serialize_payload(frame.luma)
    words = np.empty((payload.shape[0] + 1, WORD_BYTES), dtype=np.uint8)
    words[0] = int_to_word(header_word(res))
    words[1:] = payload
    return words


def deserialize_region(words: np.ndarray) -> tuple[Resolution, np.ndarray, np.ndarray]:
    """Rebuild the shifted region from a serialized frame.

    Returns the resolution, a ``(H, W)`` plane with the covered pixels filled
    in, and per-pixel write counts.
    """
    res = parse_header_word(word_to_int(words[0]))
    geom = grid_geometry(res)
    payload = words[1:]
    if payload.shape[0] != geom.microblocks:
        raise ResolutionMismatch(
            f"{payload.shape[0]} payload words for a {res} frame "
            f"(expected {geom.microblocks})"
        )
    plane = np.zeros((res.height, res.width), dtype=np.uint8)
    hits = np.zeros((res.height, res.width), dtype=np.int64)
    for counter, word in enumerate(payload):
        block, kind = divmod(counter, 4)
        u, v = divmod(block, geom.shifted_cols)
        top = 1 + 8 * u + 4 * (kind >> 1)
        left = 1 + 8 * v + 4 * (kind & 1)
        for k in range(16):
            c, r = divmod(k, 4)
            plane[top + r, left + c] = word[k]
            hits[top + r, left + c] += 1
    return res, plane, hits


def stream_bytes(words: np.ndarray) -> bytes:
    return np.ascontiguousarray(words, dtype=np.uint8).tobytes()
