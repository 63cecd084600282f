import pytest

from timehash.datagen import DistributionConfig, generate


@pytest.fixture(scope="session")
def pois_100k():
    return generate(DistributionConfig())


@pytest.fixture(scope="session")
def pois_5k():
    return generate(DistributionConfig(n=5000, seed=7))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
