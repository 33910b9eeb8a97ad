import functools
import logging

import pytest

from eventcons import load_config, prepare, simulate

ACCEPTANCE_LINES = []


@pytest.fixture(autouse=True)
def _quiet_setup_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="eventcons")


@functools.lru_cache(maxsize=None)
def _bundled_run(**overrides):
    cfg = load_config("paper_sec4").with_(**overrides)
    setup = prepare(cfg)
    return cfg, setup, simulate(cfg, setup)


@pytest.fixture(scope="session")
def bundled_cfg():
    return load_config("paper_sec4")


@pytest.fixture(scope="session")
def bundled_run():
    """Cached simulations of the bundled scenario, keyed by config overrides."""
    return _bundled_run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
