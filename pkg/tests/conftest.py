"""Shared fixtures: canonical parameter sets and cached reference waves."""

import pytest

from fkwaves import ModelParams, kinetic_wave


@pytest.fixture(scope="session")
def params():
    return ModelParams(mu=1.0, alpha=0.0)


@pytest.fixture(scope="session")
def wave_v02(params):
    # plateau-branch reference wave, reused by several suites
    return kinetic_wave(0.2, params)


@pytest.fixture(scope="session")
def wave_v05(params):
    # classical-branch reference wave
    return kinetic_wave(0.5, params)
