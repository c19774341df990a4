from fractions import Fraction

import numpy as np
import pytest

from conftest import constant_frame, make_frame
from vqstream.errors import TooFewBlocks
from vqstream.oracle import (
    BlockSummary,
    interlace_differences,
    oracle_blackout,
    oracle_blockiness,
    oracle_exposure_hw,
    oracle_exposure_paper,
    oracle_interlace,
)
from vqstream.synth import comb_luma


def step_frame():
    luma = np.full((16, 16), 10)
    luma[:, 8:] = 50
    return make_frame(luma)


def test_step_frame_blockiness():
    # 6 sampled rows cross the col 8|9 step, each |10 - 50|
    assert oracle_blockiness(step_frame()) == (240, 0, 0.0)


def test_constant_blockiness_undefined():
    assert oracle_blockiness(constant_frame(30, 24, 24)) == (0, 0, None)


def test_horizontal_step_is_symmetric():
    luma = np.full((16, 16), 10)
    luma[8:, :] = 50
    assert oracle_blockiness(make_frame(luma))[:2] == (240, 0)


def test_exposure_hw():
    assert oracle_exposure_hw(constant_frame(100, 24, 24)) == 100
    assert oracle_exposure_hw(constant_frame(0, 64, 64)) == 0


def _fill_shifted_blocks(values, bly, blx):
    luma = np.full((8 * bly, 8 * blx), 128)
    for i, v in enumerate(values):
        u, w = divmod(i, blx - 1)
        luma[1 + 8 * u:9 + 8 * u, 1 + 8 * w:9 + 8 * w] = v
    return make_frame(luma)


def test_exposure_paper_constant():
    assert oracle_exposure_paper(constant_frame(90, 32, 32)) == 270.0


def test_exposure_paper_extremes():
    values = [0, 0, 0, 255, 255, 255] + [128] * 10
    frame = _fill_shifted_blocks(values, 5, 5)
    means = sorted(Fraction(int(s), 64) for s in BlockSummary.of(frame).sums)
    assert (sum(means[:3]) + sum(means[-3:])) / 2 == Fraction(765, 2)
    assert oracle_exposure_paper(frame) == 382.5


def test_exposure_paper_too_few_blocks():
    with pytest.raises(TooFewBlocks):
        oracle_exposure_paper(constant_frame(1, 16, 16))


def test_exposure_variants_both_increase_with_brightness(rng):
    luma = rng.integers(0, 200, (48, 48))
    dark, bright = make_frame(luma), make_frame(luma + 40)
    assert oracle_exposure_paper(bright) > oracle_exposure_paper(dark)
    assert oracle_exposure_hw(bright) >= oracle_exposure_hw(dark)


def test_blackout():
    assert oracle_blackout(constant_frame(200, 24, 24)) == 1
    assert oracle_blackout(make_frame(comb_luma(32, 32))) == 1
    luma = np.full((32, 32), 60)
    luma[3, 4] = 65
    assert oracle_blackout(make_frame(luma)) == 0
    luma[3, 4] = 64
    assert oracle_blackout(make_frame(luma)) == 1


def test_interlace_full_comb():
    frame = make_frame(comb_luma(32, 40))
    count, metric = oracle_interlace(frame)
    assert count == 4 * 3 * 4 and metric == 1.0


def test_interlace_constant():
    assert oracle_interlace(constant_frame(9, 24, 24)) == (0, 0.0)


def _microblocks_touching_column(h, w, x):
    # brute force over every microblock's column span
    n = 0
    for u in range(h // 8 - 1):
        for v in range(w // 8 - 1):
            for dr in (0, 4):
                for dc in (0, 4):
                    left = 8 * v + 1 + dc
                    n += left <= x < left + 4
    return n


@pytest.mark.parametrize("x", [0, 1, 5, 12, 20, 30])
def test_interlace_flattened_column(x):
    h, w = 32, 32
    luma = comb_luma(h, w).copy()
    luma[:, x] = 77
    total = 4 * 3 * 3
    count, _ = oracle_interlace(make_frame(luma))
    assert count == total - _microblocks_touching_column(h, w, x)


def test_interlace_differences_layout():
    block = [[9, 9, 9, 9], [1, 2, 3, 4], [5, 5, 5, 5], [0, 0, 0, 0]]
    d = interlace_differences(block)
    assert d == [8, 7, 6, 5, 4, 3, 2, 1, 5, 5, 5, 5]


def test_interlace_inversion_invariant(rng):
    for _ in range(20):
        luma = np.where(rng.random((40, 48)) < 0.05, rng.integers(0, 256, (40, 48)),
                        comb_luma(40, 48, 180, 20))
        a = oracle_interlace(make_frame(luma))[0]
        b = oracle_interlace(make_frame(255 - luma))[0]
        assert a == b
