import functools

import pytest

from ecdim import SpectrumModel
from ecdim.dimbounds import generate_table

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_table(table_id, f_source="exact", base="nat"):
    return generate_table(table_id, f_source=f_source, base=base)


@pytest.fixture
def osc1():
    return SpectrumModel.oscillator(1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
