import numpy as np
import pytest

from blochzener import LatticeWindow, ModelParams, WavePacket


@pytest.fixture
def window128():
    return LatticeWindow(-128, 128, guard=24)


@pytest.fixture
def window64():
    return LatticeWindow(-64, 64, guard=16)


def gaussian(window, width=8.0, center=0):
    n = window.sites
    amps = np.exp(-((n - center) ** 2) / width**2).astype(complex)
    return WavePacket(window, amps).normalized()


def random_interior_packet(window, rng, margin=None):
    """Normalised random packet supported away from the walls."""
    n_sites = window.n_sites
    margin = window.guard + 2 if margin is None else margin
    amps = np.zeros(n_sites, dtype=complex)
    core = slice(margin, n_sites - margin)
    size = n_sites - 2 * margin
    amps[core] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return WavePacket(window, amps).normalized()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
