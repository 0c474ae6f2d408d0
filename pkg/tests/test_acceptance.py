"""Acceptance gate: one pass/fail line per criterion.

Every criterion is exact (tolerance 0) unless listed otherwise below. Run with
``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
from fractions import Fraction

import pytest
from conftest import ACCEPTANCE_LINES

from medianspace.verify import CRITERIA, VerifyConfig, criterion_profile

CFG = VerifyConfig()

TOLERANCE = {
    "1": "exact, runtime < 30 s",
    "2": "exact, runtime < 60 s",
    "3": "exact",
    "4": "exact",
    "5": "exact, witness distance = 4",
    "6": "exact",
    "7a": "exact",
    "7b": "exact",
    "7c": "exact",
    "8": "delta = eps = 1",
    "9": "exact, runtime < 120 s",
    "10": "exact",
}

assert CFG.time_limits == {1: 30.0, 2: 60.0, 9: 120.0}
assert CFG.profile_eps[:2] == (Fraction(1, 100), Fraction(1, 10))


def _record(key, chk):
    status = "PASS" if chk.passed else "FAIL"
    name = chk.name.split(" ", 1)[1] if chk.name.startswith(key + " ") else chk.name
    line = f"{status} criterion {key}: {name} [{TOLERANCE[key]}]"
    if not chk.passed:
        line += f" witness={chk.witness}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return chk


@pytest.fixture(scope="module")
def profile_parts():
    return criterion_profile(CFG)[1]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 8, 9, 10])
def test_criterion(k):
    chk = _record(str(k), CRITERIA[k](CFG))
    assert chk.passed, chk.witness


@pytest.mark.parametrize("part", ["7a", "7b", "7c"])
def test_criterion_7(part, profile_parts):
    chk = _record(part, profile_parts["abc".index(part[1])])
    assert chk.passed, chk.witness


if __name__ == "__main__":
    import sys
    failed = 0
    for k, fn in CRITERIA.items():
        if k == 7:
            for part, chk in zip(("7a", "7b", "7c"), criterion_profile(CFG)[1]):
                failed += not _record(part, chk).passed
        else:
            failed += not _record(str(k), fn(CFG)).passed
    sys.exit(1 if failed else 0)
