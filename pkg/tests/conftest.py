import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line: call with (number, title, passed, detail)."""
    def record(num, title, passed, detail=""):
        ACCEPTANCE.append((num, title, passed, detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {num}. {title}" + (f" ({detail})" if detail else ""))
