import pytest

from deformed_kepler import Chart, ChartPoint, ModelParams


@pytest.fixture
def params():
    return ModelParams(m=1.0, k=1.0, alpha=0.1)


@pytest.fixture
def kepler():
    return ModelParams(m=1.0, k=1.0, alpha=0.0)


@pytest.fixture
def probe():
    # r = 1, phi_alpha = 0, p_r = 0, p_phi_alpha = 0.9
    return ChartPoint(Chart.REDUCED, (1.0, 0.0, 0.0, 0.9))


@pytest.fixture
def action_point():
    return ChartPoint(Chart.ACTION, (0.3, 0.7, 1.0, 2.0))



def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
