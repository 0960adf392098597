"""Shared pytest hooks.

The acceptance suite records one line per criterion; the summary hook
replays them at the end of the run so `pytest -v` output always carries
an explicit pass/fail verdict for each one.
"""

ACCEPTANCE_RESULTS = []


def record_criterion(name: str, passed: bool) -> None:
    line = ("PASS" if passed else "FAIL") + "  " + name
    ACCEPTANCE_RESULTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
