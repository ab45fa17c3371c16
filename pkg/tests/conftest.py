import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

S1 = (0.1, 0.2, 0.3, 0.4, 0.8)


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def record_criterion(request):
    """Store one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(tag, ok, detail):
        line = f"{tag}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config._acceptance_lines[tag] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(lines, key=lambda t: int(t.split("-")[1])):
        terminalreporter.write_line(lines[tag])


@pytest.fixture
def s1():
    from gpindex import IncomeSample

    return IncomeSample(np.array(S1))
