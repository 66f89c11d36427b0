from __future__ import annotations

import pytest

from qfano.candidates import attach_status, enumerate_candidates, load_status_table
from qfano.links import target_tables

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def q7():
    cands, unmatched = attach_status(enumerate_candidates(7), load_status_table())
    assert not unmatched
    return cands


@pytest.fixture(scope="session")
def case(q7):
    by_no = {c.number: c for c in q7}
    return lambda no: by_no[no]


@pytest.fixture(scope="session")
def tables():
    return target_tables()


@pytest.fixture(scope="session")
def by_q():
    cache = {}

    def get(q):
        if q not in cache:
            cache[q] = enumerate_candidates(q)
        return cache[q]

    return get


@pytest.fixture
def record():
    def rec(no, ok, desc):
        line = f"criterion {no:>3}: {'PASS' if ok else 'FAIL'}  {desc}"
        ACCEPTANCE[no] = line
        print(line)
        return ok

    return rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: (int(str(k).rstrip("abcde")), str(k))):
            terminalreporter.write_line(ACCEPTANCE[key])
