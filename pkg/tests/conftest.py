import math
import os

import pytest
from hypothesis import settings

from compton_xsec.constants import to_au

settings.register_profile("numeric", deadline=None, max_examples=60)
settings.register_profile("thorough", deadline=None, max_examples=600)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "numeric"))

OMEGA_5KEV = to_au(5.0, "keV")
OMEGA_3KEV = to_au(3.0, "keV")


@pytest.fixture
def omega5():
    return OMEGA_5KEV


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def binary_phi1(theta):
    return 0.5 * math.pi - 0.5 * theta


ACCEPTANCE_LINES = []


def report(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
