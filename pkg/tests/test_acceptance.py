"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line followed by the individual checks,
so the outcome is visible in ``pytest -v`` logs without ``-s``.
"""

import time

import pytest

from slicelab import suites

SEED = 0

CRITERIA = [
    ("1 algebra", lambda: suites.check_algebra(SEED), 10.0),
    ("2 pointwise/star compatibility", lambda: suites.check_pointwise(SEED), 30.0),
    ("3 representation formula", lambda: suites.check_representation(SEED), None),
    ("4 unimodularity both directions", lambda: suites.check_modulo(SEED), None),
    ("5 adjoint and isometry",
     lambda: suites.check_adjoint(SEED) + suites.check_isometry(SEED), None),
    ("6 idempotent examples", lambda: suites.check_idempotents(), 60.0),
    ("7 doubly invariant projector", lambda: suites.check_doubly_invariant(), None),
    ("8 wandering vector recovery", lambda: suites.check_beurling(SEED), 120.0),
    ("9 inner-outer factorization", lambda: suites.check_factorization(SEED), None),
    ("10 cyclicity proxy", lambda: suites.check_cyclicity(SEED), None),
    ("11 zero-set proxy", lambda: suites.check_zero_sets(SEED), None),
]


@pytest.mark.parametrize("label,run,limit", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(label, run, limit, capsys):
    start = time.perf_counter()
    checks = run()
    elapsed = time.perf_counter() - start
    ok = all(c.passed for c in checks) and (limit is None or elapsed < limit)
    budget = f" (limit {limit:.0f} s)" if limit is not None else ""
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {label}: {elapsed:.1f} s{budget}")
        for c in checks:
            print("    " + c.line())
    assert checks
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]
    if limit is not None:
        assert elapsed < limit
