from functools import lru_cache

import pytest

from ptchaos.models import PRESETS, build_model
from ptchaos.sector_basis import build_basis, neel_state

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def cached_basis(L, N=None):
    return build_basis(L, L // 2 if N is None else N)


@lru_cache(maxsize=None)
def cached_model(name, L):
    return build_model(PRESETS[name], cached_basis(L))


@pytest.fixture
def model_of():
    return cached_model


@pytest.fixture
def neel_of():
    return lambda L: neel_state(cached_basis(L))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
