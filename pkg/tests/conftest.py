import numpy as np
import pytest

from speclab.grid import Field, Grid, VectorField
from speclab.multipliers import gradient
from speclab.norms import sup_norm


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def random_solenoidal_velocity(grid, rng, xi_peak=None, amplitude=1.0):
    """Divergence-free velocity: perp-gradient of a random smooth stream
    function, rescaled so the larger component sup equals ``amplitude``."""
    psi = random_smooth_field(grid, rng, xi_peak=xi_peak)
    gx, gy = gradient(psi)
    u = VectorField(gy, gx * -1.0)
    speed = max(sup_norm(u.u), sup_norm(u.v))
    return u * (amplitude / speed) if speed > 0 else u


def random_smooth_field(grid, rng, xi_peak=None, mean_zero=True):
    """Random real field with Gaussian spectral envelope inside the dealias band."""
    if xi_peak is None:
        xi_peak = 0.25 * grid.dealias_xi
    w = rng.standard_normal(grid.shape)
    c = np.fft.fftn(w) / w.size
    envelope = np.exp(-((np.sqrt(grid.xi_sq) / xi_peak) ** 2))
    c = c * envelope * grid.dealias_mask
    if mean_zero:
        c[(0,) * grid.dim] = 0.0
    f = Field.from_coeffs(grid, c)
    scale = np.abs(f.values).max()
    return f * (1.0 / scale) if scale > 0 else f


def random_band_field(grid, rng, mean_zero=True):
    """Random real field with full (dealias-band) spectral content, flat envelope."""
    w = rng.standard_normal(grid.shape)
    c = np.fft.fftn(w) / w.size * grid.dealias_mask
    if mean_zero:
        c[(0,) * grid.dim] = 0.0
    return Field.from_coeffs(grid, c)


@pytest.fixture
def grid64():
    return Grid(n=64, length=2 * np.pi, dim=2)


@pytest.fixture
def grid128():
    return Grid(n=128, length=2 * np.pi, dim=2)
