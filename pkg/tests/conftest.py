import os

import hypothesis
import pytest

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record a criterion verdict; printed in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def report(label: str, checks: list[tuple[str, bool, str]]):
        ok = all(passed for _, passed, _ in checks)
        header = f"{'PASS' if ok else 'FAIL'}  {label}"
        print(header)
        lines.append(header)
        for name, passed, detail in checks:
            line = f"        [{'ok' if passed else 'xx'}] {name}: {detail}"
            print(line)
            lines.append(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
