import time
from contextlib import contextmanager

import pytest

from ocnets.fixtures import dd_pair, pump_pair, loopy_pair, macro_net
from ocnets.net import Ocn


def single(trans, alphabet=("a",), name="N"):
    """Net over the states mentioned in ``trans`` (in order of appearance)."""
    states = []
    for s, _, _, d in trans:
        for q in (s, d):
            if q not in states:
                states.append(q)
    return Ocn(tuple(states), alphabet, tuple(trans), name)


@pytest.fixture
def fix_macro():
    return macro_net()


@pytest.fixture
def fix_loopy():
    return loopy_pair()


@pytest.fixture
def fix_dd():
    return dd_pair()


@pytest.fixture
def fix_pump():
    return pump_pair()


_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its outcome."""

    @contextmanager
    def run(num: int, title: str, limit: float):
        t = time.perf_counter()
        try:
            yield
        except BaseException as e:
            msg = str(e).splitlines()[0] if str(e) else ""
            _ACCEPTANCE.append((num, title, False, f"{type(e).__name__} {msg}".strip()))
            print(f"criterion {num}: FAIL {title}")
            raise
        dt = time.perf_counter() - t
        ok = dt < limit
        _ACCEPTANCE.append((num, title, ok, f"{dt:.2f}s, limit {limit:g}s"))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {title} ({dt:.2f}s)")
        assert ok, f"criterion {num} took {dt:.1f}s, limit {limit}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num, title, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
