"""Acceptance criteria 1-10 at their pinned tolerances.

Each criterion prints one PASS/FAIL line (collected again in the pytest
terminal summary) followed by its individual checks. Run directly with
``python3 tests/test_acceptance.py`` to get only the summary lines.
"""

import sys
import time

import pytest

from bos.acceptance import CRITERIA, run_criterion

SEED = 0
RESULTS: dict = {}


def summary_line(k: int, checks, seconds: float) -> str:
    ok = all(c.passed for c in checks)
    n_ok = sum(c.passed for c in checks)
    return f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {CRITERIA[k][0]}  ({n_ok}/{len(checks)} checks, {seconds:.1f}s)"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    t0 = time.perf_counter()
    checks = run_criterion(k, seed=SEED)
    line = summary_line(k, checks, time.perf_counter() - t0)
    RESULTS[k] = line
    print(line)
    for c in checks:
        print("   ", c.line())
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)


if __name__ == "__main__":
    status = 0
    for k in sorted(CRITERIA):
        t0 = time.perf_counter()
        checks = run_criterion(k, seed=SEED)
        print(summary_line(k, checks, time.perf_counter() - t0), flush=True)
        status |= not all(c.passed for c in checks)
    sys.exit(status)
