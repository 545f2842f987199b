import sys

import pytest

from mapcheck.c11 import compute_hb
from mapcheck.corpus import load_sources, source_test
from mapcheck.executions import enumerate_executions, filter_outcome


def outcome_witness(test):
    """The unique execution producing the test's outcome."""
    (ex,) = filter_outcome(enumerate_executions(test))
    return ex


@pytest.fixture(scope="session")
def iriw():
    return source_test("iriw_acq_acq")


@pytest.fixture(scope="session")
def iriw_sc():
    return source_test("iriw_sc_sc")


@pytest.fixture(scope="session")
def rwc():
    return source_test("rwc_acq")


@pytest.fixture(scope="session")
def iriw_witness(iriw):
    return outcome_witness(iriw)


@pytest.fixture(scope="session")
def rwc_witness(rwc):
    return outcome_witness(rwc)


@pytest.fixture(scope="session")
def iriw_hb(iriw_witness):
    return compute_hb(iriw_witness)


@pytest.fixture(scope="session")
def rwc_hb(rwc_witness):
    return compute_hb(rwc_witness)


@pytest.fixture(scope="session")
def c11_corpus():
    return [e.test for e in load_sources()]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
