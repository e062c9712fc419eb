"""Acceptance criteria 1-11 at their stated tolerances and time limits.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see conftest.py) and also directly when run with ``-s``.
"""
import subprocess
import sys
import time

import pytest

from groupgame import acceptance

RESULT_LINES: list[str] = []


def record(line: str) -> None:
    RESULT_LINES.append(line)
    print(line)


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: c.__name__.removeprefix("criterion_"))
def test_criterion(criterion):
    res = criterion()
    record(res.line())
    assert res.passed, res.detail


def test_selftest_under_60_seconds():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "groupgame", "selftest"], capture_output=True, text=True,
                          timeout=300)
    dt = time.perf_counter() - t0
    ok = proc.returncode == 0 and dt < 60.0
    flag = "PASS" if ok else "FAIL"
    record(f"[{flag}] 11 selftest: exit code {proc.returncode}, {dt:.2f} s (limit 60 s)")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert dt < 60.0
    assert proc.stdout.count("[PASS]") == 10
