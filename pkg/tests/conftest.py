import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from multibrot import build, build_periodic  # noqa: E402

ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, ok, detail)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title}"
    if detail:
        line += f" ({detail})"
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lam6():
    return build_periodic(2, 6)


@pytest.fixture(scope="session")
def lam10():
    return build_periodic(2, 10)


@pytest.fixture(scope="session")
def lam10pre():
    return build(2, 10, 3)


@pytest.fixture(scope="session")
def lam8pre():
    return build(2, 8, 3)


@pytest.fixture(scope="session")
def lam3d():
    return build(3, 5, 2)
