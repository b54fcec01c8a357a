import pytest

# (criterion number, title, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    def record(number, title, passed, detail):
        ACCEPTANCE_LINES.append((number, title, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LINES, key=lambda row: row[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  [{number:>2}] {title}: {detail}")
