import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from scatdiag import new_case, scatter, t_order_for  # noqa: E402

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def p2():
    """The (9) diagram over three domains, certified through degree 3."""
    N, Y = t_order_for("P2", 3)
    return scatter(new_case("P2", 3, t_bound=N), N, accelerate=True, y_bound=Y)


@pytest.fixture(scope="session")
def p2_low():
    """The (9) diagram through degree 2, small enough for every-ray checks."""
    N, Y = t_order_for("P2", 2)
    return scatter(new_case("P2", 1, t_bound=N), N, accelerate=True, y_bound=Y)


@pytest.fixture(scope="session")
def f2():
    """(8'a) on its smooth toric model, certified through degree 3."""
    N, Y = t_order_for("(8'a)", 3)
    return scatter(new_case("(8'a)", 1, t_bound=N, refined=True), N, accelerate=True, y_bound=Y)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance")
    for n in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[n])
