import numpy as np
import pytest

from speclab.grid import Field, Grid
from speclab.interp import periodic_interpolate, spectral_upsample


def test_upsample_reproduces_band_limited_modes():
    g = Grid(n=32, dim=2)
    x, y = g.mesh()
    f = Field.from_values(g, np.sin(5 * x) * np.cos(7 * y) + np.cos(2 * x))
    fine = spectral_upsample(f, 4)
    xf, yf = fine.grid.mesh()
    exact = np.sin(5 * xf) * np.cos(7 * yf) + np.cos(2 * xf)
    assert np.abs(fine.values - exact).max() < 1e-12


def test_upsample_preserves_grid_values():
    g = Grid(n=16, dim=1)
    rng = np.random.default_rng(7)
    f = Field.from_values(g, rng.standard_normal(16))
    fine = spectral_upsample(f, 2)
    assert np.abs(fine.values[::2] - f.values).max() < 1e-12


def test_upsample_rejects_non_power_of_two():
    g = Grid(n=16, dim=1)
    f = Field.zeros(g)
    with pytest.raises(ValueError):
        spectral_upsample(f, 3)


def test_interpolation_exact_at_nodes():
    g = Grid(n=32, dim=2)
    rng = np.random.default_rng(3)
    f = Field.from_values(g, rng.standard_normal(g.shape))
    x, y = g.mesh()
    out = periodic_interpolate(f, (x, y), order=6)
    assert np.abs(out - f.values).max() < 1e-11


def test_interpolation_periodic_wraparound():
    g = Grid(n=32, dim=1)
    x = g.mesh()[0]
    f = Field.from_values(g, np.exp(np.sin(x)))
    q = np.array([0.3, 1.7, 5.9])
    a = periodic_interpolate(f, (q,))
    b = periodic_interpolate(f, (q + g.length,))
    c = periodic_interpolate(f, (q - 3 * g.length,))
    assert np.abs(a - b).max() < 1e-14
    assert np.abs(a - c).max() < 1e-14


def test_interpolation_accuracy_low_mode():
    g = Grid(n=128, dim=2)
    x, y = g.mesh()
    f = Field.from_values(g, np.sin(3 * x) * np.cos(2 * y))
    rng = np.random.default_rng(11)
    qx = rng.uniform(0, g.length, 400)
    qy = rng.uniform(0, g.length, 400)
    out = periodic_interpolate(f, (qx, qy), order=6, upsample=4)
    exact = np.sin(3 * qx) * np.cos(2 * qy)
    assert np.abs(out - exact).max() < 1e-8


def test_interpolation_sixth_order_convergence():
    rng = np.random.default_rng(5)
    q = rng.uniform(0, 2 * np.pi, 500)
    errs = []
    for n in (64, 128):
        g = Grid(n=n, dim=1)
        x = g.mesh()[0]
        f = Field.from_values(g, np.exp(np.sin(x)))
        out = periodic_interpolate(f, (q,), order=6)
        errs.append(np.abs(out - np.exp(np.sin(q))).max())
    rate = np.log2(errs[0] / errs[1])
    assert rate > 5.5


def test_interpolation_rejects_odd_order():
    g = Grid(n=16, dim=1)
    f = Field.zeros(g)
    with pytest.raises(ValueError):
        periodic_interpolate(f, (np.array([0.1]),), order=5)
