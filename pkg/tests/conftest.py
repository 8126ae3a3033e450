import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

from torusns.spectral import (  # noqa: E402
    SpectrumProfile,
    make_field,
    make_grid,
    random_divfree_field,
)


@pytest.fixture(scope="session")
def grid8():
    return make_grid(8, 2 * np.pi)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16, 2 * np.pi)


def random_field(grid, seed, amplitude=1.0, m_hi=None, exponent=-1.0):
    """Dealiased-band random divergence-free field used across the suite."""
    m_hi = m_hi if m_hi is not None else max(grid.n // 3, 1)
    profile = SpectrumProfile(
        shape="power_law",
        amplitude=amplitude,
        m_lo=1.0,
        m_hi=float(m_hi),
        exponent=exponent,
        seed=seed,
    )
    return random_divfree_field(grid, profile)


def single_mode_field(grid, component=1, m=(1, 0, 0), coeff=1.0):
    """Field with one Hermitian mode pair, e.g. 2 cos(x1) e2 for the defaults."""
    n = grid.n
    c = np.zeros((3, n, n, n), complex)
    idx = tuple(mi % n for mi in m)
    neg = tuple((-mi) % n for mi in m)
    c[(component,) + idx] = coeff
    c[(component,) + neg] = np.conj(coeff)
    return make_field(grid, c)
