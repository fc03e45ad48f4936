import functools

import numpy as np
import pytest

from twocavity import runner


@functools.lru_cache(maxsize=None)
def scenario_run(name: str, **overrides):
    config = runner.config_from_mapping({"scenario": name, **overrides})
    return runner.simulate(config)


def scan(records, attr):
    return np.array([getattr(r, attr) for r in records])


@pytest.fixture(scope="session")
def fig_run():
    return scenario_run


@pytest.fixture
def rng():
    return np.random.default_rng(20260116)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    def report(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
