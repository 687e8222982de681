import re
from collections import OrderedDict

import pytest

from dnwave import stability

SWEEP_KAPPAS = stability.DEFAULT_KAPPAS
SWEEP_TUPLES = stability.DEFAULT_TUPLES


def _sweep(N):
    return stability.sweep(None, None, None, None, N, points=stability.default_points()).rows


@pytest.fixture(scope="session")
def sweep_rows():
    """StabilityReports for 3 parameter tuples x 9 moduli at N=256."""
    return _sweep(256)


@pytest.fixture(scope="session")
def sweep_rows_fine():
    """Same points at N=512, for the refinement comparison."""
    return _sweep(512)


def label(report):
    p = report.params
    return f"(c={p.c:g}, omega={p.omega:g}, alpha={p.alpha:g}, kappa={p.kappa:.2g})"


CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    outcomes = OrderedDict()
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            m = CRITERION.search(rep.nodeid)
            if not m:
                continue
            name = f"{int(m.group(1)):2d} {m.group(2).replace('_', ' ')}"
            ok = key == "passed" and outcomes.get(name, True)
            outcomes[name] = ok
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(outcomes):
        terminalreporter.write_line(f"{'PASS' if outcomes[name] else 'FAIL'}  criterion {name}")
