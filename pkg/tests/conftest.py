"""Shared test helpers.

test_acceptance.py appends one verdict line per criterion to
ACCEPTANCE_LINES; the summary hook replays them in a single block at
the end of the run so the pass/fail picture is visible at a glance.
"""

ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
