import re
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from rhlkit.gcl_syntax import parse_program
from rhlkit.specfile import load_spec

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "rhlkit" / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def program(name):
    return parse_program((FIXTURES / f"{name}.gcl").read_text())


def spec(name, relational=None):
    return load_spec(FIXTURES / f"{name}.spec", relational)


@pytest.fixture(scope="session")
def c0():
    return program("c0")


@pytest.fixture(scope="session")
def c4():
    return program("c4")


@pytest.fixture(scope="session")
def c5():
    return program("c5")


# acceptance results, filled in by test_acceptance and printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        for line in ACCEPTANCE[key]:
            terminalreporter.write_line(line)
