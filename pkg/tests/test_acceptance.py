"""Exit criteria for the package, one test per criterion.

Each criterion prints PASS/FAIL in the "acceptance criteria" section of the
pytest summary.
"""

import csv
import io
import os

import numpy as np
import pytest

from conftest import constant_frame, criterion, make_frame
from vqstream import cli
from vqstream.engine import analyze_frame
from vqstream.ingest import Resolution, write_raw
from vqstream.lanes import DEFAULT_RESOLUTIONS, LaneConfig, benchmark, run_pipeline
from vqstream.oracle import oracle_all
from vqstream.selftest import engine_values
from vqstream.serializer import deserialize_region, grid_geometry, serialize_frame
from vqstream.synth import comb_luma, make_luma, random_size, random_test_frame, STYLES


def test_1_oracle_equivalence():
    with criterion("1 engine == oracle on 1000 seeded random frames (zero tolerance)"):
        rng = np.random.default_rng(20240101)
        for i in range(1000):
            frame = random_test_frame(rng, i)
            o = oracle_all(frame)
            expected = (o.inter_sum, o.intra_sum, o.exposure, o.blackout, o.interlace_count)
            assert engine_values(analyze_frame(frame)) == expected, (i, frame.resolution)
            assert engine_values(analyze_frame(frame, per_word=True)) == expected, i


def test_2_fixture_exactness():
    with criterion("2 fixture frames give the exact hand-derived values"):
        m = analyze_frame(constant_frame(100, 24, 24))
        assert m.exposure == 100 and m.blackout and m.interlace == 0.0
        assert m.blockiness is None

        step = np.full((16, 16), 10)
        step[:, 8:] = 50
        m = analyze_frame(make_frame(step))
        assert (m.inter_sum, m.intra_sum) == (240, 0)

        m = analyze_frame(make_frame(comb_luma(48, 64)))
        assert m.interlace == 1.0 and m.blackout

        plus5 = np.full((40, 40), 100)
        plus5[20, 20] = 105
        assert analyze_frame(make_frame(plus5)).blackout is False

        plus4 = np.full((40, 40), 100)
        plus4[20, 20] = 104
        assert analyze_frame(make_frame(plus4)).blackout is True


def test_3_wire_format_round_trip():
    with criterion("3 serialize/deserialize reproduces the shifted region; word count formula"):
        rng = np.random.default_rng(3)
        for i in range(100):
            h, w = random_size(rng)
            luma = rng.integers(0, 256, (h, w), dtype=np.uint8)
            words = serialize_frame(make_frame(luma, i))
            assert words.shape[0] == 1 + 4 * (w // 8 - 1) * (h // 8 - 1)
            res, plane, hits = deserialize_region(words)
            assert res == Resolution(w, h)
            mask = np.zeros((h, w), dtype=bool)
            mask[1:h - 7, 1:w - 7] = True
            assert (hits == mask).all()
            assert (plane[mask] == luma[mask]).all()


def test_4_determinism_under_parallelism(tmp_path, capsys):
    with criterion("4 identical output bytes for lanes 1, 2, 6 on a 100-frame source"):
        rng = np.random.default_rng(4)
        h, w = 64, 96
        planes = [make_luma(rng, h, w, STYLES[i % len(STYLES)]) for i in range(100)]
        path = tmp_path / "src.raw"
        write_raw(path, planes)
        outputs = []
        for lanes in (1, 2, 6):
            for fmt in ("csv", "json"):
                dest = tmp_path / f"out{lanes}.{fmt}"
                code = cli.main(["analyze", "--input", str(path), "--width", str(w),
                                 "--height", str(h), "--lanes", str(lanes),
                                 "--output", fmt, "--out-file", str(dest)])
                assert code == 0
                outputs.append((fmt, dest.read_bytes()))
        csvs = {b for f, b in outputs if f == "csv"}
        jsons = {b for f, b in outputs if f == "json"}
        assert len(csvs) == 1 and len(jsons) == 1
        assert len(list(csv.reader(io.StringIO(csvs.pop().decode())))) == 101


def test_5_invariance_suite():
    with criterion("5 inversion keeps inter/intra/interlace; offset keeps blackout (200+ frames each)"):
        rng = np.random.default_rng(5)
        for i in range(200):
            frame = random_test_frame(rng, i)
            a = analyze_frame(frame)
            b = analyze_frame(make_frame(255 - frame.luma))
            assert (a.inter_sum, a.intra_sum, a.interlace_count) == \
                (b.inter_sum, b.intra_sum, b.interlace_count), i
        for i in range(200):
            frame = random_test_frame(rng, i)
            luma = frame.luma.astype(int)
            lo, hi = -int(luma.min()), 255 - int(luma.max())
            c = int(rng.integers(lo, hi + 1))
            shifted = analyze_frame(make_frame(luma + c))
            assert analyze_frame(frame).blackout == shifted.blackout, (i, c)


def test_6_desk_scale_benchmark(capsys):
    with criterion("6 benchmark sweep 320x240..7680x4320, 100 frames/point, fps + bytes/s + 30 fps flag"):
        report = benchmark(DEFAULT_RESOLUTIONS, [1, 6], 100)
        assert [(r.width, r.height) for r in report.rows[::2]] == \
            [(r.width, r.height) for r in DEFAULT_RESOLUTIONS]
        for row in report.rows:
            assert row.frames == 100
            assert row.fps > 0
            assert row.bytes_per_second == pytest.approx(row.fps * row.width * row.height)
            assert row.realtime == (row.fps >= 30.0)
        with capsys.disabled():
            print()
            print(report.format_table())
