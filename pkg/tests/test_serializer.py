import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import constant_frame, make_frame
from vqstream.errors import ResolutionMismatch
from vqstream.ingest import Resolution
from vqstream.serializer import (
    MicroblockKind,
    deserialize_region,
    grid_geometry,
    header_word,
    microblock_kind,
    pack_microblock,
    parse_header_word,
    serialize_frame,
    unpack_word,
    word_to_int,
)
from vqstream.synth import random_size


@pytest.mark.parametrize("w,h,blx,bly,blocks", [
    (16, 16, 2, 2, 1),
    (1920, 1080, 240, 135, 32026),
    (7680, 4320, 960, 540, 516901),
])
def test_grid_geometry(w, h, blx, bly, blocks):
    g = grid_geometry(Resolution(w, h))
    assert (g.blx, g.bly, g.shifted_blocks) == (blx, bly, blocks)
    assert g.microblocks == 4 * blocks


def test_pack_examples():
    assert pack_microblock([0] * 16) == 0
    assert pack_microblock([1] + [0] * 15) == 1
    assert unpack_word(0) == (0,) * 16
    assert unpack_word(255 << 120)[15] == 255


@given(st.lists(st.integers(0, 255), min_size=16, max_size=16))
def test_pack_round_trip(px):
    assert list(unpack_word(pack_microblock(px))) == px


@given(st.integers(0, 2**128 - 1))
def test_unpack_round_trip(word):
    assert pack_microblock(unpack_word(word)) == word


@pytest.mark.parametrize("counter,kind", [(0, MicroblockKind.TL), (3, MicroblockKind.BR),
                                          (5, MicroblockKind.TR), (6, MicroblockKind.BL)])
def test_microblock_kind(counter, kind):
    assert microblock_kind(counter) is kind


def test_header_word_layout():
    w = header_word(Resolution(1920, 1080))
    assert w & 0xFFFF == 1920 and (w >> 16) & 0xFFFF == 1080 and w >> 32 == 0
    assert parse_header_word(w) == Resolution(1920, 1080)


def test_16x16_word_layout():
    # each pixel's value is its raster position, so every byte is traceable
    luma = np.arange(256).reshape(16, 16)
    words = serialize_frame(make_frame(luma))
    assert words.shape == (5, 16)
    assert parse_header_word(word_to_int(words[0])) == Resolution(16, 16)
    tl, tr, bl, br = words[1:]
    # column-major inside a microblock
    assert list(tl[:5]) == [luma[1, 1], luma[2, 1], luma[3, 1], luma[4, 1], luma[1, 2]]
    assert tr[0] == luma[1, 5]
    assert bl[0] == luma[5, 1]
    assert br[15] == luma[8, 8]


def test_constant_frame_words():
    words = serialize_frame(constant_frame(7, 32, 24))
    assert (words[1:] == 7).all()


def test_resolution_mismatch():
    with pytest.raises(ResolutionMismatch):
        serialize_frame(constant_frame(0, 16, 16), Resolution(24, 16))


def _shifted_mask(h, w):
    mask = np.zeros((h, w), dtype=bool)
    mask[1:h - 7, 1:w - 7] = True
    return mask


def test_round_trip_covers_shifted_region(rng):
    for _ in range(20):
        h, w = random_size(rng)
        luma = rng.integers(0, 256, (h, w), dtype=np.uint8)
        words = serialize_frame(make_frame(luma))
        res, plane, hits = deserialize_region(words)
        assert res == Resolution(w, h)
        assert words.shape[0] == 1 + 4 * (w // 8 - 1) * (h // 8 - 1)
        mask = _shifted_mask(h, w)
        np.testing.assert_array_equal(hits, mask.astype(int))
        np.testing.assert_array_equal(plane[mask], luma[mask])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_serialize_deterministic(bx, by, seed):
    luma = np.random.default_rng(seed).integers(0, 256, (8 * by, 8 * bx), dtype=np.uint8)
    a = serialize_frame(make_frame(luma))
    b = serialize_frame(make_frame(luma.copy(), index=9))
    np.testing.assert_array_equal(a, b)
