"""Periodic grids and real fields with paired physical/spectral representations.

Conventions (used by every module in the package):

* the torus is [0, L)^d sampled at n uniform points per axis, x_j = j*L/n;
* lattice frequencies are xi = 2*pi*k/L for integer k in [-n/2, n/2);
* spectral coefficients are normalized Fourier-series coefficients,
  ``coeffs = fftn(values) / n**d``, so the constant field 1 has zero mode 1
  and f(x) = sum_k coeffs[k] * exp(i xi_k . x).

Fields are immutable: arrays handed in are copied once, flagged read-only, and
all operations return new instances.  The missing representation is computed
lazily and cached, which keeps Field logically pure and thread-safe for
readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field as _dc_field
from functools import cached_property

import numpy as np

__all__ = ["Grid", "Field", "VectorField", "GridError"]


class GridError(ValueError):
    """Raised for invalid grid parameters or grid/field mismatches."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L)^d, d in {1, 2}, n a power of two >= 8.

    Parameters
    ----------
    n : int
        Samples per axis.
    length : float
        Period L (default 2*pi).
    dim : int
        Spatial dimension, 1 or 2.
    """

    n: int
    length: float = 2.0 * np.pi
    dim: int = 2

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not _is_power_of_two(int(self.n)) or self.n < 8:
            raise GridError(f"grid size must be a power of two >= 8, got {self.n!r}")
        if self.dim not in (1, 2):
            raise GridError(f"dimension must be 1 or 2, got {self.dim!r}")
        if not (float(self.length) > 0.0 and np.isfinite(self.length)):
            raise GridError(f"period length must be positive and finite, got {self.length!r}")

    # -- real-space lattice ------------------------------------------------

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @cached_property
    def x_nodes(self) -> np.ndarray:
        x = np.arange(self.n) * self.dx
        x.setflags(write=False)
        return x

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays (ij indexing): (x,) in 1D, (x, y) in 2D."""
        if self.dim == 1:
            return (self.x_nodes,)
        return tuple(np.meshgrid(self.x_nodes, self.x_nodes, indexing="ij"))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    # -- frequency lattice -------------------------------------------------

    @cached_property
    def k_1d(self) -> np.ndarray:
        """Integer frequency indices in FFT order."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def xi_1d(self) -> np.ndarray:
        """Physical frequencies 2*pi*k/L in FFT order."""
        xi = self.k_1d * (2.0 * np.pi / self.length)
        xi.setflags(write=False)
        return xi

    def xi_mesh(self) -> tuple[np.ndarray, ...]:
        if self.dim == 1:
            return (self.xi_1d,)
        return tuple(np.meshgrid(self.xi_1d, self.xi_1d, indexing="ij"))

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """|xi|^2 on the lattice."""
        if self.dim == 1:
            out = self.xi_1d**2
        else:
            out = self.xi_1d[:, None] ** 2 + self.xi_1d[None, :] ** 2
        out = np.ascontiguousarray(out)
        out.setflags(write=False)
        return out

    @cached_property
    def xi_abs(self) -> np.ndarray:
        out = np.sqrt(self.xi_sq)
        out.setflags(write=False)
        return out

    @property
    def nyquist_xi(self) -> float:
        """Largest representable frequency magnitude per axis, (n/2)*(2*pi/L)."""
        return (self.n // 2) * 2.0 * np.pi / self.length

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: True where |k| <= n/3 on every axis."""
        cut = self.n // 3
        keep = np.abs(self.k_1d) <= cut
        if self.dim == 1:
            mask = keep.copy()
        else:
            mask = keep[:, None] & keep[None, :]
        mask.setflags(write=False)
        return mask

    @property
    def dealias_xi(self) -> float:
        """Frequency magnitude of the 2/3 cutoff per axis."""
        return (self.n // 3) * 2.0 * np.pi / self.length


def _check_real_values(arr: np.ndarray) -> None:
    if not np.isfinite(arr).all():
        raise ValueError("field contains non-finite samples")
    if np.iscomplexobj(arr):
        raise ValueError("field values must be real")


@dataclass(frozen=True)
class Field:
    """Real scalar field on a Grid, with lazily synced spectral coefficients.

    Construct with `Field.from_values` or `Field.from_coeffs`; the other
    representation is computed on first access and cached.
    """

    grid: Grid
    _values: np.ndarray | None = _dc_field(default=None, repr=False)
    _coeffs: np.ndarray | None = _dc_field(default=None, repr=False)

    # construction ---------------------------------------------------------

    @classmethod
    def from_values(cls, grid: Grid, values: np.ndarray) -> "Field":
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != grid.shape:
            raise GridError(f"values shape {arr.shape} does not match grid shape {grid.shape}")
        _check_real_values(arr)
        arr = arr.copy()
        arr.setflags(write=False)
        return cls(grid, arr, None)

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs: np.ndarray, *, hermitian_tol: float = 1e-10) -> "Field":
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.shape != grid.shape:
            raise GridError(f"coeffs shape {arr.shape} does not match grid shape {grid.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("spectral coefficients contain non-finite entries")
        # real fields only: c(-k) = conj(c(k)) up to tolerance
        scale = np.abs(arr).max()
        if scale > 0:
            flipped = arr
            for ax in range(grid.dim):
                flipped = np.flip(np.roll(flipped, -1, axis=ax), axis=ax)
            err = np.abs(arr - np.conj(flipped)).max()
            if err > hermitian_tol * max(scale, 1.0):
                raise ValueError(
                    f"coefficients violate Hermitian symmetry by {err:.3e}; field would not be real"
                )
        arr = arr.copy()
        arr.setflags(write=False)
        return cls(grid, None, arr)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls.from_values(grid, np.zeros(grid.shape))

    # representations ------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.ifftn(self._coeffs).real * self._coeffs.size
            v = np.ascontiguousarray(v)
            v.setflags(write=False)
            object.__setattr__(self, "_values", v)
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = np.fft.fftn(self._values) / self._values.size
            c.setflags(write=False)
            object.__setattr__(self, "_coeffs", c)
        return self._coeffs

    def to_spectral(self) -> "Field":
        """Materialize the spectral representation (returns self)."""
        self.coeffs
        return self

    def to_physical(self) -> "Field":
        """Materialize the physical representation (returns self)."""
        self.values
        return self

    # small algebra ---------------------------------------------------------

    def _like(self, other: "Field") -> None:
        if other.grid != self.grid:
            raise GridError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._like(other)
        return Field.from_values(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._like(other)
        return Field.from_values(self.grid, self.values - other.values)

    def __mul__(self, a: float) -> "Field":
        return Field.from_values(self.grid, self.values * float(a))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self * -1.0

    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True)
class VectorField:
    """Pair of scalar fields (u, v) on a common grid (2D velocity)."""

    u: Field
    v: Field

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridError("vector components live on different grids")
        if self.u.grid.dim != 2:
            raise GridError("VectorField is 2D only")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u - other.u, self.v - other.v)

    def __mul__(self, a: float) -> "VectorField":
        return VectorField(self.u * a, self.v * a)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        """Grid sup of the pointwise Euclidean magnitude."""
        return float(np.sqrt(self.u.values**2 + self.v.values**2).max())
