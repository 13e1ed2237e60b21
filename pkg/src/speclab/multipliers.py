"""Fourier multipliers: diagonal operators m(xi) acting on spectral coefficients.

A Multiplier wraps a vectorized symbol xi -> m(xi) plus a policy for the zero
mode, where degree-0 symbols like xi_i*xi_j/|xi|^2 are undefined:

* "zero":     the zero mode of the output is set to 0 (default; right for
              Riesz-type operators, which are defined on mean-zero data);
* "identity": the zero mode passes through unchanged;
* "error":    applying the multiplier to a field with nonzero mean raises.

Symbols are evaluated on the grid's frequency lattice; non-finite symbol
values anywhere on the lattice are an error naming the offending frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Field, Grid, VectorField

__all__ = [
    "Multiplier",
    "SymbolError",
    "apply_multiplier",
    "hilbert",
    "riesz",
    "riesz_pair",
    "inverse_neg_laplacian",
    "exp_of_multiplier",
    "gradient",
    "divergence",
    "curl",
    "perp_grad_inv_laplacian",
    "MEAN_TOL",
]

MEAN_TOL = 1e-10

_ZERO_POLICIES = ("zero", "identity", "error")


class SymbolError(ValueError):
    """Raised when a symbol is non-finite on the lattice or misused at xi = 0."""


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier with symbol `symbol(*xi_mesh) -> ndarray`."""

    symbol: Callable[..., np.ndarray]
    zero_mode: str = "zero"
    name: str = ""

    def __post_init__(self):
        if self.zero_mode not in _ZERO_POLICIES:
            raise ValueError(f"zero_mode must be one of {_ZERO_POLICIES}, got {self.zero_mode!r}")

    def symbol_array(self, grid: Grid) -> np.ndarray:
        """Symbol sampled on the grid lattice, zero-mode policy applied.

        For policy "error" the zero-mode entry is set to 0; apply_multiplier
        separately rejects fields with nonzero mean.
        """
        xi = grid.xi_mesh()
        with np.errstate(divide="ignore", invalid="ignore"):
            sym = np.asarray(self.symbol(*xi), dtype=np.complex128)
        if sym.shape != grid.shape:
            sym = np.broadcast_to(sym, grid.shape).astype(np.complex128)
        sym = sym.copy()
        zero = (0,) * grid.dim
        if not np.isfinite(sym[zero]):
            if self.zero_mode == "identity":
                sym[zero] = 1.0
            else:
                sym[zero] = 0.0
        elif self.zero_mode == "identity":
            sym[zero] = 1.0
        elif self.zero_mode == "zero":
            sym[zero] = 0.0
        bad = ~np.isfinite(sym)
        if bad.any():
            idx = tuple(int(i[0]) for i in np.nonzero(bad))
            freq = tuple(float(grid.xi_1d[i]) for i in idx)
            raise SymbolError(f"symbol {self.name or '<anonymous>'} is non-finite at frequency xi = {freq}")
        return sym


def apply_multiplier(m: Multiplier, f: Field) -> Field:
    """Apply the diagonal operator: output coeffs = symbol(xi) * coeffs(xi)."""
    grid = f.grid
    sym = m.symbol_array(grid)
    if m.zero_mode == "error":
        zmode = abs(f.coeffs[(0,) * grid.dim])
        if zmode > MEAN_TOL:
            raise SymbolError(
                f"multiplier {m.name or '<anonymous>'} requires mean-zero input; |mean| = {zmode:.3e}"
            )
    return Field.from_coeffs(grid, sym * f.coeffs)


# -- stock symbols ----------------------------------------------------------


def hilbert() -> Multiplier:
    """1D Hilbert transform, symbol -i*sign(xi).  H.H = -Id on mean-zero data."""
    return Multiplier(lambda xi: -1j * np.sign(xi), zero_mode="zero", name="hilbert")


def riesz(i: int) -> Multiplier:
    """Single Riesz transform R_i, symbol -i*xi_i/|xi|."""
    if i not in (1, 2):
        raise ValueError("component index must be 1 or 2")

    def sym(*xi):
        mag = np.sqrt(sum(x**2 for x in xi))
        return -1j * xi[i - 1] / mag

    return Multiplier(sym, zero_mode="zero", name=f"riesz_{i}")


def riesz_pair(i: int, j: int) -> Multiplier:
    """Composition R_i R_j, symbol -xi_i*xi_j/|xi|^2 (degree 0, bounded)."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("component indices must be 1 or 2")

    def sym(*xi):
        base = -(xi[i - 1] * xi[j - 1]) / sum(x**2 for x in xi)
        if i != j:
            # the mixed pair is odd in each axis separately, so the unpaired
            # Nyquist row (even n) must carry symbol 0 or the output of a
            # real field would lose Hermitian symmetry — same convention as
            # odd-order derivatives
            for ax in (i - 1, j - 1):
                lo = xi[ax].min()
                if -lo > xi[ax].max() + 1e-12 * abs(lo):
                    base = np.where(xi[ax] == lo, 0.0, base)
        return base

    return Multiplier(sym, zero_mode="zero", name=f"riesz_pair_{i}{j}")


def inverse_neg_laplacian() -> Multiplier:
    """(-Laplace)^{-1}, symbol 1/|xi|^2; defined on mean-zero data only."""

    def sym(*xi):
        return 1.0 / sum(x**2 for x in xi)

    return Multiplier(sym, zero_mode="error", name="inverse_neg_laplacian")


def exp_of_multiplier(m: Multiplier, t: float) -> Multiplier:
    """Semigroup element exp(t*m): symbol exp(t*symbol(xi)).

    The zero mode evolves by d/dt c_0 = sigma(0) c_0 with sigma(0) the
    policy-adjusted symbol, so a "zero" policy exponentiates to the identity
    on the zero mode.  Raises on overflow (t*Re(symbol) > 700 anywhere).
    """

    base = m  # closure

    def sym(*xi):
        s = np.asarray(base.symbol(*xi), dtype=np.complex128)
        return np.exp(t * s)

    wrapped = Multiplier(sym, zero_mode="identity", name=f"exp({t:g}*{m.name or 'm'})")

    def checked_symbol_array(grid: Grid) -> np.ndarray:
        s = base.symbol_array(grid)
        growth = (t * s.real).max()
        if growth > 700.0:
            raise SymbolError(
                f"exp_of_multiplier overflow: t*Re(symbol) reaches {growth:.1f} > 700"
            )
        return np.exp(t * s)

    object.__setattr__(wrapped, "symbol_array", checked_symbol_array)
    return wrapped


# -- first-order calculus ----------------------------------------------------
#
# Odd derivative operators annihilate the Nyquist mode: that coefficient is
# its own conjugate partner, so multiplying it by an odd imaginary symbol
# would break the Hermitian symmetry of a real field.  (Even symbols such as
# xi^2 are unaffected.)


def _derivative_xi(grid: Grid) -> tuple[np.ndarray, ...]:
    axes = []
    for ax in range(grid.dim):
        xi = grid.xi_1d.copy()
        xi[grid.n // 2] = 0.0
        shape = [1] * grid.dim
        shape[ax] = grid.n
        axes.append(xi.reshape(shape))
    return tuple(axes)


def gradient(f: Field) -> tuple[Field, ...]:
    """Spectral gradient; one component per dimension."""
    grid = f.grid
    xi = _derivative_xi(grid)
    return tuple(Field.from_coeffs(grid, 1j * x * f.coeffs) for x in xi)


def divergence(w: VectorField) -> Field:
    grid = w.grid
    xi1, xi2 = _derivative_xi(grid)
    return Field.from_coeffs(grid, 1j * xi1 * w.u.coeffs + 1j * xi2 * w.v.coeffs)


def curl(w: VectorField) -> Field:
    """Scalar curl d1 u2 - d2 u1 of a 2D vector field."""
    grid = w.grid
    xi1, xi2 = _derivative_xi(grid)
    return Field.from_coeffs(grid, 1j * xi1 * w.v.coeffs - 1j * xi2 * w.u.coeffs)


def perp_grad_inv_laplacian(omega: Field) -> VectorField:
    """Biot-Savart: u = grad^perp (-Laplace)^{-1} omega with grad^perp = (d_y, -d_x).

    Requires mean-zero vorticity (error beyond 1e-10).  The output satisfies
    div u = 0 and curl u = omega; componentwise d_y u1 = R2^2 omega.
    """
    grid = omega.grid
    if grid.dim != 2:
        raise ValueError("Biot-Savart requires a 2D grid")
    zmode = abs(omega.coeffs[0, 0])
    if zmode > MEAN_TOL:
        raise SymbolError(f"Biot-Savart requires mean-zero vorticity; |mean| = {zmode:.3e}")
    xi1, xi2 = _derivative_xi(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / grid.xi_sq
    inv = inv.copy()
    inv[0, 0] = 0.0
    psi_hat = omega.coeffs * inv  # (-Laplace)^{-1} omega
    u1 = Field.from_coeffs(grid, 1j * xi2 * psi_hat)
    u2 = Field.from_coeffs(grid, -1j * xi1 * psi_hat)
    return VectorField(u1, u2)
