"""Fixed-width streaming datapath for the four frame metrics.

The engine sees one 128-bit word (one 4x4 microblock) at a time and keeps
only fixed-width accumulators, mirroring the accelerator registers:

* ``inter_sum`` / ``intra_sum`` -- 32-bit, absolute differences across and
  just inside coding-block boundaries (blockiness numerator/denominator);
* ``block_sum`` -- 16-bit luminance sum of the current shifted block;
* ``min_chain`` / ``max_chain`` -- the four smallest / largest block sums,
  16-bit each, min chain initialised to 16384;
* ``interlace_count`` -- 32-bit count of comb-patterned microblocks.

:func:`consume_word` is the literal per-word model. :func:`consume_words`
produces bit-identical state for a whole batch of words using numpy and is
what the lane runner uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FrameIncomplete, ResolutionMismatch, WordOverrun
from .ingest import Frame
from .serializer import (
    GridGeometry,
    MicroblockKind,
    grid_geometry,
    parse_header_word,
    serialize_payload,
    unpack_word,
    word_to_int,
)

U16 = 0xFFFF
U32 = 0xFFFF_FFFF

MIN_SENTINEL = 16384
MAX_INIT = 0
MAX_BLOCK_SUM = 64 * 255


@dataclass
class EngineConfig:
    th_blout: int = 4

    def __post_init__(self):
        if self.th_blout < 0:
            raise ValueError("th_blout must be non-negative")


@dataclass
class EngineState:
    geometry: GridGeometry
    config: EngineConfig = field(default_factory=EngineConfig)
    inter_sum: int = 0
    intra_sum: int = 0
    block_sum: int = 0
    min_chain: list = field(default_factory=lambda: [MIN_SENTINEL] * 4)
    max_chain: list = field(default_factory=lambda: [MAX_INIT] * 4)
    interlace_count: int = 0
    microblock_counter: int = 0

    def reset(self) -> None:
        self.inter_sum = 0
        self.intra_sum = 0
        self.block_sum = 0
        self.min_chain = [MIN_SENTINEL] * 4
        self.max_chain = [MAX_INIT] * 4
        self.interlace_count = 0
        self.microblock_counter = 0


def engine_init(geom: GridGeometry, cfg: EngineConfig | None = None) -> EngineState:
    return EngineState(geom, cfg if cfg is not None else EngineConfig())


@dataclass(frozen=True)
class MetricRecord:
    """128-bit per-frame result record.

    Layout: bits 0-31 inter_sum, 32-63 intra_sum, 64-95 interlace_count,
    96-111 exposure, bit 112 blackout, 113-127 zero.
    """

    inter_sum: int
    intra_sum: int
    interlace_count: int
    exposure: int
    blackout: int

    def to_int(self) -> int:
        return (
            (self.inter_sum & U32)
            | (self.intra_sum & U32) << 32
            | (self.interlace_count & U32) << 64
            | (self.exposure & U16) << 96
            | (self.blackout & 1) << 112
        )

    def to_bytes(self) -> bytes:
        return self.to_int().to_bytes(16, "little")

    @classmethod
    def from_int(cls, value: int) -> "MetricRecord":
        if value >> 113:
            raise ValueError("reserved bits of a metric record must be zero")
        return cls(
            inter_sum=value & U32,
            intra_sum=(value >> 32) & U32,
            interlace_count=(value >> 64) & U32,
            exposure=(value >> 96) & U16,
            blackout=(value >> 112) & 1,
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "MetricRecord":
        return cls.from_int(int.from_bytes(data, "little"))


@dataclass(frozen=True)
class FrameMetrics:
    frame_index: int
    blockiness: Optional[float]  # None when inter_sum == 0
    exposure: int
    blackout: bool
    interlace: float
    inter_sum: int
    intra_sum: int
    interlace_count: int


def _ad(a: int, b: int) -> int:
    return a - b if a > b else b - a


def insert_extreme(state: EngineState, s: int) -> EngineState:
    """Sorted insert of a completed block sum into both extreme chains."""
    mn = state.min_chain
    if s < mn[3]:
        if s < mn[2]:
            if s < mn[1]:
                if s < mn[0]:
                    mn[3], mn[2], mn[1], mn[0] = mn[2], mn[1], mn[0], s
                else:
                    mn[3], mn[2], mn[1] = mn[2], mn[1], s
            else:
                mn[3], mn[2] = mn[2], s
        else:
            mn[3] = s
    mx = state.max_chain
    if s > mx[3]:
        if s > mx[2]:
            if s > mx[1]:
                if s > mx[0]:
                    mx[3], mx[2], mx[1], mx[0] = mx[2], mx[1], mx[0], s
                else:
                    mx[3], mx[2], mx[1] = mx[2], mx[1], s
            else:
                mx[3], mx[2] = mx[2], s
        else:
            mx[3] = s
    return state


def consume_word(state: EngineState, word) -> EngineState:
    """Process one payload word (an int, or a 16-byte row)."""
    if state.microblock_counter >= state.geometry.microblocks:
        raise WordOverrun(
            f"payload word {state.microblock_counter} exceeds the "
            f"{state.geometry.microblocks} microblocks of the frame"
        )
    if not isinstance(word, int):
        word = word_to_int(word)
    (p1, p2, p3, p4, p5, p6, p7, p8,
     p9, p10, p11, p12, p13, p14, p15, p16) = unpack_word(word)

    kind = state.microblock_counter % 4
    if kind == MicroblockKind.TR:
        intra = _ad(p9, p5) + _ad(p10, p6) + _ad(p11, p7) + _ad(p12, p8)
        inter = _ad(p9, p13) + _ad(p10, p14) + _ad(p11, p15) + _ad(p12, p16)
    elif kind == MicroblockKind.BL:
        intra = _ad(p2, p3) + _ad(p6, p7) + _ad(p10, p11) + _ad(p14, p15)
        inter = _ad(p4, p3) + _ad(p8, p7) + _ad(p12, p11) + _ad(p16, p15)
    elif kind == MicroblockKind.BR:
        intra = _ad(p9, p5) + _ad(p8, p12) + _ad(p2, p3) + _ad(p14, p15)
        inter = _ad(p9, p13) + _ad(p12, p16) + _ad(p4, p3) + _ad(p15, p16)
    else:
        intra = inter = 0
    state.intra_sum = (state.intra_sum + intra) & U32
    state.inter_sum = (state.inter_sum + inter) & U32

    state.block_sum = (state.block_sum + p1 + p2 + p3 + p4 + p5 + p6 + p7 + p8
                       + p9 + p10 + p11 + p12 + p13 + p14 + p15 + p16) & U16
    if kind == MicroblockKind.BR:
        insert_extreme(state, state.block_sum)
        state.block_sum = 0

    is_interlace = (
        p1 > p2 and p5 > p6 and p9 > p10 and p13 > p14
        and p3 > p2 and p7 > p6 and p11 > p10 and p15 > p14
        and p3 > p4 and p7 > p8 and p11 > p12 and p15 > p16
    )
    is_interlace2 = (
        p1 < p2 and p5 < p6 and p9 < p10 and p13 < p14
        and p3 < p2 and p7 < p6 and p11 < p10 and p15 < p14
        and p3 < p4 and p7 < p8 and p11 < p12 and p15 < p16
    )
    if is_interlace or is_interlace2:
        state.interlace_count = (state.interlace_count + 1) & U32

    state.microblock_counter += 1
    return state


def _absdiff(cols: np.ndarray, a: int, b: int) -> np.ndarray:
    # cols is (16, n) int16 indexed by p-number - 1
    return np.abs(cols[a - 1] - cols[b - 1])


def _bulk(state: EngineState, payload: np.ndarray) -> None:
    """Whole shifted blocks, starting at a block boundary (counter % 4 == 0)."""
    nblocks = payload.shape[0] // 4
    cols = np.ascontiguousarray(payload.T)  # (16, 4 * nblocks) uint8
    tr = cols[:, 1::4].astype(np.int16)
    bl = cols[:, 2::4].astype(np.int16)
    br = cols[:, 3::4].astype(np.int16)

    intra = 0
    inter = 0
    for a, b in ((9, 5), (10, 6), (11, 7), (12, 8)):
        intra += int(_absdiff(tr, a, b).sum(dtype=np.int64))
    for a, b in ((9, 13), (10, 14), (11, 15), (12, 16)):
        inter += int(_absdiff(tr, a, b).sum(dtype=np.int64))
    for a, b in ((2, 3), (6, 7), (10, 11), (14, 15)):
        intra += int(_absdiff(bl, a, b).sum(dtype=np.int64))
    for a, b in ((4, 3), (8, 7), (12, 11), (16, 15)):
        inter += int(_absdiff(bl, a, b).sum(dtype=np.int64))
    for a, b in ((9, 5), (8, 12), (2, 3), (14, 15)):
        intra += int(_absdiff(br, a, b).sum(dtype=np.int64))
    for a, b in ((9, 13), (12, 16), (4, 3), (15, 16)):
        inter += int(_absdiff(br, a, b).sum(dtype=np.int64))
    state.intra_sum = (state.intra_sum + intra) & U32
    state.inter_sum = (state.inter_sum + inter) & U32

    sums = payload.reshape(nblocks, 64).sum(axis=1, dtype=np.int64)
    if nblocks:
        pool = np.concatenate([np.asarray(state.min_chain, dtype=np.int64), sums])
        state.min_chain = [int(v) for v in np.sort(np.partition(pool, 3)[:4])]
        pool = np.concatenate([np.asarray(state.max_chain, dtype=np.int64), sums])
        state.max_chain = [int(v) for v in np.sort(np.partition(pool, -4)[-4:])[::-1]]

    # x[c, r]: column c, row r of every microblock
    x = cols.reshape(4, 4, -1)
    r1, r2, r3, r4 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    down = (r1 > r2).all(0) & (r3 > r2).all(0) & (r3 > r4).all(0)
    up = (r1 < r2).all(0) & (r3 < r2).all(0) & (r3 < r4).all(0)
    state.interlace_count = (state.interlace_count + int(np.count_nonzero(down | up))) & U32

    state.microblock_counter += payload.shape[0]


def consume_words(state: EngineState, words: np.ndarray) -> EngineState:
    """Process a batch of payload words; same result as repeated :func:`consume_word`."""
    words = np.asarray(words, dtype=np.uint8).reshape(-1, 16)
    room = state.geometry.microblocks - state.microblock_counter
    if words.shape[0] > room:
        raise WordOverrun(
            f"{words.shape[0]} payload words offered, only {room} remain in the frame"
        )
    start = 0
    while start < words.shape[0] and state.microblock_counter % 4:
        consume_word(state, words[start])
        start += 1
    stop = start + (words.shape[0] - start) // 4 * 4
    if stop > start:
        _bulk(state, words[start:stop])
    for row in words[stop:]:
        consume_word(state, row)
    return state


def finalize_frame(state: EngineState) -> MetricRecord:
    """Emit the frame's record and reset every register."""
    if state.microblock_counter != state.geometry.microblocks:
        raise FrameIncomplete(
            f"frame finalized after {state.microblock_counter} of "
            f"{state.geometry.microblocks} payload words"
        )
    acc = 0
    for v in state.max_chain + state.min_chain:
        acc = (acc + (v >> 2)) & U16
    exposure = acc >> 7
    # registers are unsigned in hardware; the max chain never falls below min1
    # once a block has been inserted
    spread = (state.max_chain[0] - state.min_chain[0]) & U16
    blackout = 0 if spread > state.config.th_blout else 1
    rec = MetricRecord(
        inter_sum=state.inter_sum,
        intra_sum=state.intra_sum,
        interlace_count=state.interlace_count,
        exposure=exposure,
        blackout=blackout,
    )
    state.reset()
    return rec


def record_to_metrics(rec: MetricRecord, geom: GridGeometry, idx: int) -> FrameMetrics:
    blockiness = rec.intra_sum / rec.inter_sum if rec.inter_sum else None
    return FrameMetrics(
        frame_index=idx,
        blockiness=blockiness,
        exposure=rec.exposure,
        blackout=bool(rec.blackout),
        interlace=rec.interlace_count / geom.microblocks,
        inter_sum=rec.inter_sum,
        intra_sum=rec.intra_sum,
        interlace_count=rec.interlace_count,
    )


class StreamEngine:
    """Consumes a multi-frame word stream: header word, payload words, repeat.

    Each frame's geometry comes from its header word; a record is produced as
    soon as the last payload word of a frame arrives.
    """

    def __init__(self, config: EngineConfig | None = None):
        self.config = config if config is not None else EngineConfig()
        self.state: Optional[EngineState] = None

    def feed_word(self, word) -> Optional[MetricRecord]:
        if not isinstance(word, int):
            word = word_to_int(word)
        if self.state is None:
            geom = grid_geometry(parse_header_word(word))
            self.state = engine_init(geom, self.config)
            return None
        consume_word(self.state, word)
        return self._maybe_finish()

    def feed(self, words: np.ndarray) -> list[MetricRecord]:
        words = np.asarray(words, dtype=np.uint8).reshape(-1, 16)
        records = []
        i = 0
        while i < words.shape[0]:
            if self.state is None:
                self.feed_word(words[i])
                i += 1
                continue
            take = min(words.shape[0] - i,
                       self.state.geometry.microblocks - self.state.microblock_counter)
            consume_words(self.state, words[i:i + take])
            i += take
            rec = self._maybe_finish()
            if rec is not None:
                records.append(rec)
        return records

    def _maybe_finish(self) -> Optional[MetricRecord]:
        if self.state.microblock_counter < self.state.geometry.microblocks:
            return None
        rec = finalize_frame(self.state)
        self.state = None
        return rec


def analyze_frame(frame: Frame, config: EngineConfig | None = None,
                  geometry: GridGeometry | None = None,
                  per_word: bool = False) -> FrameMetrics:
    """Serialize one frame, run it through a fresh engine and post-process."""
    geom = grid_geometry(frame.resolution)
    if geometry is not None and geometry != geom:
        raise ResolutionMismatch(f"frame {frame.index} does not match the stream geometry")
    state = engine_init(geom, config)
    payload = serialize_payload(frame.luma)
    if per_word:
        for row in payload:
            consume_word(state, row)
    else:
        consume_words(state, payload)
    return record_to_metrics(finalize_frame(state), geom, frame.index)
