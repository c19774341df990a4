import contextlib

import numpy as np
import pytest

from vqstream.ingest import Frame

# (criterion, passed) pairs recorded by test_acceptance.py
ACCEPTANCE_RESULTS = []


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS.append((name, False))
        raise
    ACCEPTANCE_RESULTS.append((name, True))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


def make_frame(luma, index=0):
    return Frame(index, np.ascontiguousarray(luma, dtype=np.uint8))


def constant_frame(value, height, width, index=0):
    return make_frame(np.full((height, width), value), index)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
