import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20251015)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, 18):
        if num in mod.RESULTS:
            ok, detail = mod.RESULTS[num]
            terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {num:2d}: not run")
