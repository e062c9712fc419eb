import sys

import pytest

from groupgame.oligopoly import OligopolyParams, build_game


@pytest.fixture(scope="session")
def ref_params():
    return OligopolyParams(a=10.0, b=0.5, c_A=2.0, c_C=1.0)


@pytest.fixture(scope="session")
def ref_game(ref_params):
    return build_game(ref_params)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
