from __future__ import annotations

import math

import pytest

from localzeta.padic_geometry import PadicParams
from localzeta.schwartz import BALL, SHELL, SchwartzFn

# (order, exponent) pairs naming roots of unity
C_CHOICES = {"1": (1, 0), "-1": (2, 1), "zeta4": (4, 1), "zeta5": (5, 1), "zeta5^2": (5, 2)}
ALPHA_CHOICES = {"1": (1, 0), "zeta4": (4, 1), "zeta5": (5, 1)}


def make_params(q: int, c: tuple = (1, 0), alpha: tuple = (1, 0)) -> PadicParams:
    (cn, ck), (an, ak) = c, alpha
    N = math.lcm(cn, an)
    return PadicParams(q, N, ck * (N // cn), ak * (N // an))


def battery_phis(F) -> dict:
    return {
        "O3": SchwartzFn.lattice_indicator(F, 3),
        "wO": SchwartzFn.box(F, [(BALL, -1), (BALL, 0), (BALL, 0)]),
        "mixed": SchwartzFn.box(F, [(BALL, -1), (SHELL, 0), (BALL, 0)])
        + SchwartzFn.box(F, [(BALL, 0), (BALL, 1), (SHELL, -1)], 2),
    }


@pytest.fixture
def p3z5():
    return PadicParams(3, 5, 1, 2)


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and rep.when == "call":
        _CRITERIA[mark.args[0]] = (mark.args[1], rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k} [{'PASS' if ok else 'FAIL'}] {title}")
