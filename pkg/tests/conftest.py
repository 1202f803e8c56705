import sys
from pathlib import Path

# make the shared oracle helpers importable from any test module
sys.path.insert(0, str(Path(__file__).parent))

# Verdict lines recorded by the acceptance tests; shown after the run so
# they stay visible even though pytest captures per-test output.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
