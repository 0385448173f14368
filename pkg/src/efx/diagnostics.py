"""Counters for structural-invariant checks.

The allocation procedure asserts a number of structural facts (cut minimality,
lower/upper half orderings, ...) every time their hypotheses arise.  A failed
check raises; these counters additionally record that each check actually ran,
so the test suite can tell "never violated" apart from "never exercised".
"""

from __future__ import annotations

from collections import Counter

check_counts: Counter = Counter()


def record(name: str) -> None:
    check_counts[name] += 1


def snapshot() -> dict:
    return dict(check_counts)


def reset() -> None:
    check_counts.clear()
