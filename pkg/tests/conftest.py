import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_log import LINES  # noqa: E402


@pytest.fixture(autouse=True)
def _default_backend():
    from qlattice import kernels
    before = kernels.backend()
    yield
    kernels.set_backend(before)


def pytest_terminal_summary(terminalreporter):
    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in LINES:
        terminalreporter.write_line(line)
