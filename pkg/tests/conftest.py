import pytest


def pytest_configure(config):
    config._verdicts = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config._verdicts:
        terminalreporter.section("acceptance criteria")
        for line in config._verdicts:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion and fail the test on FAIL."""

    def record(number, title, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        request.config._verdicts.append(line)
        print(line)
        if not passed:
            pytest.fail(line, pytrace=False)

    return record
