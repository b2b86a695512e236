import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


import pytest  # noqa: E402


@pytest.fixture(scope="session")
def rr_angles():
    """Critical angles of the regular reflection problem for gamma=1.4, rho0=1, rho1=2."""
    from shockreg.config import sonic_angle
    from shockreg.gas import GasParams
    return sonic_angle(1.0, 2.0, GasParams(1.4))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
