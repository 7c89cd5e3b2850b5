"""Desk-scale acceptance sweep: one PASS/FAIL line per criterion.

The whole sweep (including the exhaustive parasite hunt) runs once per
session and takes several minutes on one core.  Select or skip it with
``-m slow`` / ``-m "not slow"``.
"""

import pytest

from bethewronski import sweeps

from conftest import ACCEPTANCE_LINES

NAMES = [
    "dimensions", "schubert", "gaudin", "bethe_completeness", "bethe_eigenvectors",
    "heine_stieltjes_roundtrip", "wronski_map", "slp_instances", "falsification_guard",
]


@pytest.fixture(scope="module")
def reports():
    out = sweeps.run_all(seed=0, exhaustive=True)
    assert len(out) == len(NAMES)
    for i, r in enumerate(out, 1):
        ACCEPTANCE_LINES.append(f"[{i}] {r.line()}")
    return dict(zip(NAMES, out))


@pytest.mark.slow
@pytest.mark.parametrize("name", NAMES)
def test_criterion(reports, name):
    r = reports[name]
    print(r.line())
    assert r.passed, r.failures[:5]
    assert r.cases > 0
