import numpy as np
import pytest
from hypothesis import settings

from robustins.market import AmbiguityBand, MarketParams

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def bench():
    return MarketParams.benchmark()


def random_params(rng, T=None):
    """Broad random market draw used by property-style sweeps."""
    r = rng.uniform(0.0, 0.05)
    return MarketParams(
        l=rng.uniform(0.5, 2.0),
        eta=rng.uniform(0.05, 0.6),
        r=r,
        mu=r + rng.uniform(0.005, 0.15),
        sigma=rng.uniform(0.05, 0.5),
        alpha=rng.uniform(0.2, 5.0),
        gamma=rng.uniform(0.2, 5.0),
        t0=0.0,
        T=rng.uniform(1.0, 60.0) if T is None else T,
    )


def random_band(rng, margin=1e-3):
    rho = rng.uniform(-0.95, 0.95)
    return AmbiguityBand(rho, rng.uniform(0.0, 1.0 - abs(rho) - margin))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
