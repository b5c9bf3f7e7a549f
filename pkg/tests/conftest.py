import os

import pytest

# keep thread counts (and hence run time) predictable across machines
os.environ.setdefault("MWC_THREADS", "4")


@pytest.fixture
def tmp(tmp_path):
    return tmp_path


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
