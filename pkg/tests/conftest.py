import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spinlock_qa import SystemSpec  # noqa: E402


@pytest.fixture
def chain2():
    return SystemSpec.chain(2, 2.4)


@pytest.fixture
def chain4():
    return SystemSpec.chain(4, 2.4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
