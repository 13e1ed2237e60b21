"""Generators for the explicit data used across the laboratory.

* band-limited square-indicator datum (``make_gn``) — the spectrum
  4 sin(xi1) sin(xi2)/(xi1 xi2) of the indicator of [-1,1]^2, truncated to a
  dyadic box, realised on the torus lattice; an ``orientation`` switch
  rotates the truncation frame by 45 degrees so that either the mixed Riesz
  pair (axis frame, corner (1,1)) or the pure second Riesz square (diagonal
  frame, corner (0, sqrt 2)) develops the logarithmic corner growth;
* the cellular stationary flow (sin x cos y, -cos x sin y) and its vorticity;
* a mollified odd-odd sign-cross vorticity (bounded, mean-zero);
* the once-differentiable velocity built from the harmonic quartic
  Q = x^4 + y^4 - 6 x^2 y^2 and its log-weighted potential
  G = Q log(x^2 + y^2 + reg): u = delta * perp-grad Laplace(chi G)
  + eta * perp-grad((y^2/2) chi), whose Jacobian determinant carries a
  logarithmic spike at the centre;
* the literal off-diagonal bilinear pressure source.

All closed-form derivatives of the C^1 datum come from one symbolically
differentiated expression set (lazily built, cached), so grid sampling and
off-grid probes evaluate the same formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import Field, Grid, GridError, VectorField
from .multipliers import gradient

__all__ = [
    "indicator_spectrum",
    "GNDatum",
    "make_gn",
    "cellular_flow",
    "cellular_vorticity",
    "cross_vorticity",
    "harmonic_quartic",
    "log_weighted_potential",
    "C1Datum",
    "make_c1_datum",
    "bilinear_pressure_source",
    "det_gradient",
]


# ------------------------------------------------------------ square datum


def indicator_spectrum(xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
    """Spectrum 4 sin(xi1) sin(xi2)/(xi1 xi2) of the [-1,1]^2 indicator.

    Removable singularities are filled exactly (sinc), so the value at the
    origin is 4 and along xi_i = 0 it is 4 sin(xi_j)/xi_j.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    return 4.0 * np.sinc(xi1 / np.pi) * np.sinc(xi2 / np.pi)


@dataclass(frozen=True)
class GNDatum:
    """Band-limited square-indicator datum on a torus grid.

    ``corner`` is the material off-lattice point where the singular average
    is read off; ``orientation`` records the truncation frame.
    """

    cutoff: int
    orientation: str
    field: Field
    corner: tuple[float, float]

    def manifest(self) -> dict:
        g = self.field.grid
        return {
            "datum": "band-limited square indicator",
            "cutoff": self.cutoff,
            "orientation": self.orientation,
            "corner": list(self.corner),
            "grid_n": g.n,
            "grid_length": g.length,
        }


def make_gn(cutoff: int, grid: Grid, orientation: str = "diagonal") -> GNDatum:
    """Sample the truncated indicator spectrum on the lattice.

    The dyadic box [-2^cutoff, 2^cutoff]^2 lives in the axis frame
    (orientation "axis") or rotated by 45 degrees (orientation "diagonal",
    the default); the rotated box's bounding frequencies are sqrt(2) times
    larger, which tightens the grid precondition accordingly.
    """
    if grid.dim != 2:
        raise GridError("square-indicator datum requires a 2D grid")
    if orientation not in ("axis", "diagonal"):
        raise ValueError(f"orientation must be 'axis' or 'diagonal', got {orientation!r}")
    if not isinstance(cutoff, (int, np.integer)) or cutoff < 0:
        raise ValueError(f"cutoff must be a nonnegative integer, got {cutoff}")
    m = 2.0**cutoff
    extent = m * (math.sqrt(2.0) if orientation == "diagonal" else 1.0)
    if extent > grid.nyquist_xi:
        raise GridError(
            f"cutoff 2^{cutoff} ({orientation}) needs frequencies up to "
            f"{extent:g}, beyond the grid Nyquist {grid.nyquist_xi:g}"
        )
    xi1, xi2 = grid.xi_mesh()
    if orientation == "axis":
        eta1, eta2 = xi1, xi2
        corner = (1.0, 1.0)
    else:
        inv = 1.0 / math.sqrt(2.0)
        eta1 = (xi1 + xi2) * inv
        eta2 = (xi2 - xi1) * inv
        corner = (0.0, math.sqrt(2.0))
    tol = 1e-12 * m
    mask = (np.abs(eta1) <= m + tol) & (np.abs(eta2) <= m + tol)
    coeffs = indicator_spectrum(eta1, eta2) * mask / grid.length**2
    field = Field.from_coeffs(grid, coeffs.astype(complex))
    return GNDatum(cutoff=int(cutoff), orientation=orientation, field=field, corner=corner)


# ------------------------------------------------------------ cellular flow


def _require_full_periods(grid: Grid) -> None:
    ratio = grid.length / (2.0 * math.pi)
    if abs(ratio - round(ratio)) > 1e-12 or round(ratio) < 1:
        raise GridError(
            f"period {grid.length:g} is not a positive multiple of 2*pi; "
            "the cellular flow would not be periodic"
        )


def cellular_flow(grid: Grid, amplitude: float = 1.0) -> VectorField:
    """Stationary cellular velocity A (sin x cos y, -cos x sin y)."""
    if grid.dim != 2:
        raise GridError("cellular flow requires a 2D grid")
    _require_full_periods(grid)
    x, y = grid.mesh()
    u = Field.from_values(grid, amplitude * np.sin(x) * np.cos(y))
    v = Field.from_values(grid, -amplitude * np.cos(x) * np.sin(y))
    return VectorField(u, v)


def cellular_vorticity(grid: Grid, amplitude: float = 1.0) -> Field:
    """curl of the cellular flow: 2 A sin x sin y."""
    if grid.dim != 2:
        raise GridError("cellular vorticity requires a 2D grid")
    _require_full_periods(grid)
    x, y = grid.mesh()
    return Field.from_values(grid, 2.0 * amplitude * np.sin(x) * np.sin(y))


# ------------------------------------------------------- sign-cross datum


def cross_vorticity(grid: Grid, smoothing: float) -> Field:
    """Mollified odd-odd sign pattern: tanh-smoothed sgn x sgn y on the torus.

    ``smoothing`` is the transition width; it must be at least two grid
    cells so the spectrum decays before the Nyquist band.
    """
    if grid.dim != 2:
        raise GridError("sign-cross vorticity requires a 2D grid")
    if smoothing < 2.0 * grid.dx:
        raise GridError(
            f"smoothing {smoothing:g} below two grid cells ({2 * grid.dx:g}); "
            "the jump would alias"
        )
    k = 2.0 * math.pi / grid.length

    def ramp(t: np.ndarray) -> np.ndarray:
        return np.tanh(np.sin(k * t) / (k * smoothing))

    x, y = grid.mesh()
    return Field.from_values(grid, ramp(x) * ramp(y))


# ----------------------------------------------------------- C^1 datum


def harmonic_quartic(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Q(x, y) = x^4 + y^4 - 6 x^2 y^2; harmonic (Laplacian identically 0)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x**4 + y**4 - 6.0 * x**2 * y**2


def log_weighted_potential(x: np.ndarray, y: np.ndarray, n_reg: int) -> np.ndarray:
    """G = Q(x,y) log(x^2 + y^2 + 2^{-n_reg})."""
    if n_reg < 0:
        raise ValueError(f"regularization index must be >= 0, got {n_reg}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return harmonic_quartic(x, y) * np.log(x**2 + y**2 + 2.0**-n_reg)


_C1_FORMS: dict | None = None


def _c1_forms() -> dict:
    """Lazily build and cache the symbolic expression set of the C^1 datum.

    Returns numpy-vectorised callables of (X, Y, reg) in coordinates centred
    on the datum; the cutoff chi is 1 on r <= 1, 0 on r >= 2, with the same
    normalised C-infinity ramp used by the dyadic filter bank.
    """
    global _C1_FORMS
    if _C1_FORMS is not None:
        return _C1_FORMS
    import sympy as sp

    X, Y, REG = sp.symbols("X Y REG", real=True)
    r = sp.sqrt(X**2 + Y**2)

    def bump(t):
        return sp.exp(-1 / t)

    s = 2 - r  # ramp coordinate: 0 at r=2, 1 at r=1
    ramp = bump(s) / (bump(s) + bump(1 - s))
    chi = sp.Piecewise((1, r <= 1), (0, r >= 2), (ramp, True))

    q = X**4 + Y**4 - 6 * X**2 * Y**2
    g_pot = q * sp.log(X**2 + Y**2 + REG)

    def lap(expr):
        return sp.diff(expr, X, 2) + sp.diff(expr, Y, 2)

    def perp(stream):
        return sp.diff(stream, Y), -sp.diff(stream, X)

    # singular part: perp-grad of Laplace(chi G); shear part: perp-grad((Y^2/2) chi)
    big = lap(chi * g_pot)
    u1_sing, u2_sing = perp(big)
    u1_shear, u2_shear = perp((Y**2 / 2) * chi)

    names = {
        "u1_sing": u1_sing,
        "u2_sing": u2_sing,
        "u1_shear": u1_shear,
        "u2_shear": u2_shear,
        "du_sing_11": sp.diff(u1_sing, X),
        "du_sing_12": sp.diff(u1_sing, Y),
        "du_sing_21": sp.diff(u2_sing, X),
        "du_sing_22": sp.diff(u2_sing, Y),
        "du_shear_11": sp.diff(u1_shear, X),
        "du_shear_12": sp.diff(u1_shear, Y),
        "du_shear_21": sp.diff(u2_shear, X),
        "du_shear_22": sp.diff(u2_shear, Y),
        # plateau closed forms (chi = 1): what the probes need near the centre
        "dxx_lap_g": sp.diff(lap(g_pot), X, 2),
        "dxxyy_g": sp.diff(g_pot, X, 2, Y, 2),
        "div_sing": sp.diff(u1_sing, X) + sp.diff(u2_sing, Y),
        "div_shear": sp.diff(u1_shear, X) + sp.diff(u2_shear, Y),
    }
    _C1_FORMS = {
        key: sp.lambdify((X, Y, REG), expr, modules="numpy")
        for key, expr in names.items()
    }
    return _C1_FORMS


def _eval_form(name: str, x: np.ndarray, y: np.ndarray, reg: float) -> np.ndarray:
    fn = _c1_forms()[name]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = fn(x, y, reg)
    return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast_shapes(x.shape, y.shape)).copy()


@dataclass(frozen=True)
class C1Datum:
    """Divergence-free velocity with a logarithmic Jacobian-determinant spike.

    ``u`` is the lattice sampling; the ``*_analytic`` callables evaluate the
    same closed forms at arbitrary points in centred coordinates.
    """

    delta: float
    eta: float
    n_reg: int
    center: tuple[float, float]
    u: VectorField
    u_analytic: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    grad_u_analytic: Callable[[np.ndarray, np.ndarray], np.ndarray]
    det_grad_analytic: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dxx_lap_g_analytic: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dxxyy_g_analytic: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def manifest(self) -> dict:
        g = self.u.grid
        return {
            "datum": "log-potential C1 velocity",
            "delta": self.delta,
            "eta": self.eta,
            "n_reg": self.n_reg,
            "center": list(self.center),
            "grid_n": g.n,
            "grid_length": g.length,
        }


def make_c1_datum(grid: Grid, delta: float, eta: float, n_reg: int = 20) -> C1Datum:
    """Build u = delta perp-grad Laplace(chi G) + eta perp-grad((y^2/2) chi).

    On the unit ball around the centre this is delta perp-grad Laplace(G)
    plus the plain shear eta (y, 0), and
    det(grad u) = eta delta dxx Laplace G + delta^2 (singular-part Jacobian),
    whose leading behaviour is a log spike of strength 24 eta delta.
    """
    if grid.dim != 2:
        raise GridError("C1 datum requires a 2D grid")
    if grid.length <= 4.0 * (1.0 + 1e-12):
        raise GridError(
            f"period {grid.length:g} cannot contain the radius-2 support"
        )
    if grid.dx > 0.25:
        raise GridError(
            f"grid spacing {grid.dx:g} too coarse to resolve the unit-width "
            "cutoff ramp (need <= 0.25)"
        )
    if n_reg < 0:
        raise ValueError(f"regularization index must be >= 0, got {n_reg}")
    reg = 2.0**-n_reg
    cx = cy = grid.length / 2.0
    x, y = grid.mesh()
    lx, ly = x - cx, y - cy

    def u_analytic(px, py):
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        u1 = delta * _eval_form("u1_sing", px, py, reg) + eta * _eval_form(
            "u1_shear", px, py, reg
        )
        u2 = delta * _eval_form("u2_sing", px, py, reg) + eta * _eval_form(
            "u2_shear", px, py, reg
        )
        return u1, u2

    def grad_u_analytic(px, py):
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        rows = []
        for i in (1, 2):
            row = []
            for j in (1, 2):
                val = delta * _eval_form(f"du_sing_{i}{j}", px, py, reg)
                val = val + eta * _eval_form(f"du_shear_{i}{j}", px, py, reg)
                row.append(val)
            rows.append(row)
        return np.stack(
            [np.stack(r, axis=-1) for r in rows], axis=-2
        )  # (..., 2, 2)

    def det_grad_analytic(px, py):
        j = grad_u_analytic(px, py)
        return j[..., 0, 0] * j[..., 1, 1] - j[..., 0, 1] * j[..., 1, 0]

    def dxx_lap_g_analytic(px, py):
        return _eval_form("dxx_lap_g", np.asarray(px, float), np.asarray(py, float), reg)

    def dxxyy_g_analytic(px, py):
        return _eval_form("dxxyy_g", np.asarray(px, float), np.asarray(py, float), reg)

    u1, u2 = u_analytic(lx, ly)
    u = VectorField(Field.from_values(grid, u1), Field.from_values(grid, u2))
    return C1Datum(
        delta=delta,
        eta=eta,
        n_reg=n_reg,
        center=(cx, cy),
        u=u,
        u_analytic=u_analytic,
        grad_u_analytic=grad_u_analytic,
        det_grad_analytic=det_grad_analytic,
        dxx_lap_g_analytic=dxx_lap_g_analytic,
        dxxyy_g_analytic=dxxyy_g_analytic,
    )


# ------------------------------------------------------- pressure source


def det_gradient(w: VectorField) -> Field:
    """det(grad w) by spectral differentiation and pointwise products."""
    u1x, u1y = gradient(w.u)
    u2x, u2y = gradient(w.v)
    vals = u1x.values * u2y.values - u1y.values * u2x.values
    return Field.from_values(w.grid, vals)


def bilinear_pressure_source(w: VectorField) -> Field:
    """Off-diagonal bilinear source: sum over l != k of w_{l,k} w_{k,l}.

    In 2D this is literally 2 * d_y(w_1) * d_x(w_2). For divergence-free w
    the full trace identity is tr((grad w)^2) = -2 det(grad w); the
    off-diagonal sum alone equals -2 det(grad w) - 2 (d_x w_1)^2, so the two
    agree exactly where the flow is locally a pure shear/rotation
    (d_x w_1 = 0) and share the same singular behaviour in general.
    """
    _, u1y = gradient(w.u)
    u2x, _ = gradient(w.v)
    return Field.from_values(w.grid, 2.0 * u1y.values * u2x.values)
