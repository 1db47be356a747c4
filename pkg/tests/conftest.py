import numpy as np
import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def accept(request):
    """Record one pass/fail line for the acceptance summary."""
    lines = request.config._acceptance_lines

    def record(number, title, ok, detail=""):
        lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
