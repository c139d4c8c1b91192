"""Pytest hooks: repeat the acceptance PASS/FAIL lines in the final summary.

Default output capturing swallows in-test prints on success; echoing the
bracketed lines into a summary section keeps them in any full-suite log.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(module, "RESULTS", None) if module else None
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
