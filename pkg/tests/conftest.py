"""Shared fixtures: reference parameter sets used across the suite."""

import pytest

from gravent import MediatorInit, ModelParams, derive_squeezed_frame, \
    load_preset


@pytest.fixture(scope="session")
def bench_params():
    """Undriven benchmark system: g_a = 1/48, g_b = 1, F = 0."""
    return ModelParams.dimensionless(g_a=1.0 / 48.0, g_b=1.0, F=0.0)


@pytest.fixture(scope="session")
def bench_frame(bench_params):
    return derive_squeezed_frame(bench_params)


@pytest.fixture(scope="session")
def coherent_init():
    """Plain coherent mediator state, no extra squeezing."""
    return MediatorInit(alpha0=1.0 + 0.0j, xi_mag=0.0)


@pytest.fixture(scope="session")
def tracking_init():
    """Mediator state whose squeezing follows the frame."""
    return MediatorInit(alpha0=1.0 + 0.0j)


@pytest.fixture(scope="session")
def sec5_config():
    return load_preset("sec5-feasibility")
