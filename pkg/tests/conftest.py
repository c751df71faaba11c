from __future__ import annotations

import subprocess
import sys

import pytest

@pytest.fixture
def run_cli():
    def run(*args, cwd=None):
        return subprocess.run([sys.executable, "-m", "nablabvp.cli", *map(str, args)],
                              capture_output=True, text=True, cwd=cwd)
    return run


def pytest_terminal_summary(terminalreporter):
    # echo the per-criterion lines collected by test_acceptance
    lines = [ln for name, mod in list(sys.modules.items())
             if name.endswith("test_acceptance") for ln in getattr(mod, "LINES", [])]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
