"""Vorticity dynamics: conservation laws, damped perturbation, decoupled
three-component flows, and the regularity/L^p growth probes, each checked
against an independent route (closed forms, scalar ODEs, quadrature)."""

import math

import numpy as np
import pytest
from conftest import random_smooth_field

from speclab.calibration import (
    C1_DELTA,
    C1_ETA,
    CROSS_DRIFT_BOUND,
    EULER_SMOOTH_DT,
    EXP_GROWTH_DT,
    EXP_GROWTH_M,
    INFLATION_SMALL_CONTROL_TOL,
    INFLATION_SMALL_DT,
    INFLATION_SMALL_EPS,
    INFLATION_SMALL_N,
    INFLATION_SMALL_RATIO,
    INFLATION_SMALL_T,
    LP_GROWTH_C_HIGH,
    LP_GROWTH_C_LOW,
    LP_FLAT_SLOPE_BOUND,
    LP_PROBE_DT,
    LP_PROBE_N_REG,
    LP_PROBE_T,
)
from speclab.euler import (
    EulerError,
    EulerState,
    evolve_25d,
    evolve_euler,
    lp_growth_probe,
    step_euler2d,
    step_perturbed,
    yudovich_regularity_probe,
)
from speclab.grid import Field, Grid, GridError
from speclab.initial_data import (
    cellular_flow,
    cellular_vorticity,
    cross_vorticity,
    make_c1_datum,
    make_gn,
)
from speclab.interp import spectral_point_value
from speclab.multipliers import curl, divergence, gradient
from speclab.norms import lp_norm, refined_sup, sup_norm

P_LIST = (2, 4, 8, 16, 32, 64)


def _affine_fit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = y - y.mean()
    rsq = 1.0 - (resid @ resid) / (total @ total)
    return float(slope), float(intercept), float(rsq)


# ----------------------------------------------------------- state basics


def test_state_velocity_consistency_and_validation(grid128, rng):
    w = random_smooth_field(grid128, rng, xi_peak=4.0)
    state = EulerState.from_vorticity(w)
    assert state.t == 0.0
    assert sup_norm(curl(state.u) - w) <= 1e-10
    assert sup_norm(divergence(state.u)) <= 1e-12
    assert state.energy > 0.0
    assert state.enstrophy > 0.0
    assert state.biot_savart_residual() <= 1e-12

    x, _ = grid128.mesh()
    with pytest.raises(EulerError, match="mean"):
        EulerState.from_vorticity(Field.from_values(grid128, 1.0 + 0.0 * x))
    with pytest.raises(EulerError, match="2D"):
        EulerState.from_vorticity(
            Field.from_values(Grid(n=64, dim=1), np.sin(Grid(n=64, dim=1).mesh()[0]))
        )
    # content beyond the dealiasing band is rejected up front
    c = np.zeros(grid128.shape, dtype=complex)
    k = int(0.45 * grid128.n)
    c[k, 0] = c[-k, 0] = 0.5
    with pytest.raises(EulerError, match="band-limited"):
        EulerState.from_vorticity(Field.from_coeffs(grid128, c))


def test_state_diagnostics_closed_form(grid128):
    # omega = 2 sin x sin y  =>  u = (sin x cos y, -cos x sin y):
    # energy = 0.5 * (2 pi)^2 * 2 * (1/4) ,  enstrophy = 0.5 * (2 pi)^2 * 4 * (1/4)
    state = EulerState.from_vorticity(cellular_vorticity(grid128))
    area = grid128.length**2
    assert state.energy == pytest.approx(0.25 * area, rel=1e-12)
    assert state.enstrophy == pytest.approx(0.5 * area, rel=1e-12)
    assert state.omega_sup == pytest.approx(2.0, rel=1e-12)
    d = state.diagnostics()
    assert set(d) >= {"t", "energy", "enstrophy", "omega_sup"}


# ------------------------------------------------------------ pure dynamics


def test_cellular_vorticity_is_stationary(grid128):
    state = EulerState.from_vorticity(cellular_vorticity(grid128))
    # independent route: the advection term vanishes identically for this datum
    gx, gy = gradient(state.omega)
    residual = state.u.u.values * gx.values + state.u.v.values * gy.values
    assert np.abs(residual).max() <= 1e-12

    run = evolve_euler(state, T=1.0, dt=0.01)
    assert sup_norm(run.states[-1].omega - state.omega) <= 1e-8


def test_single_mode_is_stationary(grid128):
    x, y = grid128.mesh()
    state = EulerState.from_vorticity(Field.from_values(grid128, np.cos(3 * x + 2 * y)))
    run = evolve_euler(state, T=0.5, dt=0.01)
    assert sup_norm(run.states[-1].omega - state.omega) <= 1e-10
    ens = [row["enstrophy"] for row in run.trace]
    assert max(ens) - min(ens) <= 1e-12 * ens[0]


def test_smooth_run_conserves_energy_and_enstrophy(grid128, rng):
    w0 = random_smooth_field(grid128, rng, xi_peak=3.0)
    state = EulerState.from_vorticity(w0)
    run = evolve_euler(state, T=1.0, dt=EULER_SMOOTH_DT, save_every=50)
    e0, z0 = state.energy, state.enstrophy
    for row in run.trace:
        assert abs(row["energy"] - e0) <= 1e-6 * e0
        assert abs(row["enstrophy"] - z0) <= 1e-6 * z0
    for s in run.states:
        assert s.biot_savart_residual() <= 1e-10


def test_time_step_stability_guard(grid128, rng):
    state = EulerState.from_vorticity(random_smooth_field(grid128, rng, xi_peak=3.0))
    with pytest.raises(EulerError, match="stability"):
        step_euler2d(state, dt=10.0)
    with pytest.raises(ValueError, match="positive"):
        step_euler2d(state, dt=-0.1)


# ------------------------------------------------------- damped perturbation


def test_perturbed_single_mode_decays_exponentially(grid128):
    _, y = grid128.mesh()
    state = EulerState.from_vorticity(Field.from_values(grid128, np.cos(y)))
    run = evolve_euler(state, T=1.0, dt=0.05, forced=True, save_every=10)
    for t, s in zip(run.times, run.states):
        exact = math.exp(-t) * np.cos(y)
        assert np.abs(s.omega.values - exact).max() <= 1e-10


def test_perturbed_mode_independent_of_forcing_direction_is_frozen(grid128):
    # a mode with no component along the damped direction is left untouched
    x, _ = grid128.mesh()
    state = EulerState.from_vorticity(Field.from_values(grid128, np.cos(x)))
    run = evolve_euler(state, T=0.5, dt=0.05, forced=True)
    assert sup_norm(run.states[-1].omega - state.omega) <= 1e-12


def test_perturbed_enstrophy_monotone(grid128, rng):
    state = EulerState.from_vorticity(random_smooth_field(grid128, rng, xi_peak=3.0))
    run = evolve_euler(state, T=0.5, dt=0.01, forced=True, save_every=10)
    ens = [row["enstrophy"] for row in run.trace]
    for prev, cur in zip(ens, ens[1:]):
        assert cur <= prev * (1.0 + 1e-10)
    assert ens[-1] < ens[0]


def test_forced_corner_value_amplifies_but_control_stays():
    # the damped forcing pumps the signed value at the indicator corner (the
    # point where its singular-integral image piles up log mass) while plain
    # transport leaves that value alone and the global sup never rises
    grid = Grid(n=256, length=2 * math.pi)
    datum = make_gn(INFLATION_SMALL_N, grid)
    coeffs = datum.field.coeffs.copy()
    coeffs[0, 0] = 0.0
    zeroed = Field.from_coeffs(grid, coeffs)
    w = zeroed * (INFLATION_SMALL_EPS / sup_norm(zeroed))
    state = EulerState.from_vorticity(w)
    v0 = spectral_point_value(w, datum.corner)
    assert v0 > 0.0

    forced = evolve_euler(
        state, T=INFLATION_SMALL_T, dt=INFLATION_SMALL_DT, forced=True, save_every=25
    )
    final = forced.states[-1]
    gain = spectral_point_value(final.omega, datum.corner) / v0
    assert gain >= INFLATION_SMALL_RATIO
    # the amplified point stays under the (decaying) global sup: the datum sup
    # itself never inflates at this cutoff, only the corner value does
    assert max(row["omega_sup"] for row in forced.trace) <= state.omega_sup * (
        1.0 + 1e-4
    )
    for prev, cur in zip(forced.trace, forced.trace[1:]):
        assert cur["enstrophy"] <= prev["enstrophy"] * (1.0 + 1e-10)

    control = evolve_euler(
        state, T=INFLATION_SMALL_T, dt=INFLATION_SMALL_DT, forced=False, save_every=25
    )
    control_gain = spectral_point_value(control.states[-1].omega, datum.corner) / v0
    assert abs(control_gain - 1.0) <= INFLATION_SMALL_CONTROL_TOL
    control_sup = max(row["omega_sup"] for row in control.trace)
    assert control_sup <= state.omega_sup * (1.0 + 1e-4)


# ------------------------------------------------- three-component reduction


def test_25d_constant_scalar_stays_constant(grid128):
    u_h = cellular_flow(grid128)
    x, _ = grid128.mesh()
    u3 = Field.from_values(grid128, 0.7 + 0.0 * x)
    run = evolve_25d(u_h, u3, times=(0.0, 0.5, 1.0))
    for rec in run.records:
        assert np.abs(rec.u3.values - 0.7).max() <= 1e-12


def test_25d_sup_norm_conserved():
    grid = Grid(n=256, length=2 * math.pi)
    u_h = cellular_flow(grid)
    _, y = grid.mesh()
    u3 = Field.from_values(grid, np.sin(4 * y))
    run = evolve_25d(u_h, u3, times=(0.5, 1.0), dt=0.005)
    for rec in run.records:
        assert abs(rec.sup - 1.0) <= 1e-6


def test_25d_exact_sampling_matches_interpolation():
    grid = Grid(n=256, length=2 * math.pi)
    u_h = cellular_flow(grid)
    _, y = grid.mesh()
    u3 = Field.from_values(grid, np.sin(4 * y))
    interp = evolve_25d(u_h, u3, times=(0.5,), dt=0.005)
    exact = evolve_25d(
        u_h, u3, times=(0.5,), dt=0.005, u3_exact=lambda px, py: np.sin(4 * py)
    )
    diff = np.abs(interp.records[0].u3.values - exact.records[0].u3.values).max()
    assert diff <= 1e-8


def test_25d_vorticity_assembly_and_validation(grid128):
    u_h = cellular_flow(grid128)
    _, y = grid128.mesh()
    u3 = Field.from_values(grid128, np.sin(y))
    run = evolve_25d(u_h, u3, times=(0.0, 0.25))
    w1, w2, w3 = run.vorticity3(0)
    gx, gy = gradient(u3)
    assert sup_norm(w1 - gy) <= 1e-12
    assert sup_norm(w2 + gx) <= 1e-12
    assert sup_norm(w3 - curl(u_h)) <= 1e-12

    with pytest.raises(ValueError, match="increasing"):
        evolve_25d(u_h, u3, times=(0.5, 0.25))
    with pytest.raises(EulerError, match="stability"):
        evolve_25d(u_h, u3, times=(1.0,), dt=5.0)


def test_25d_gradient_growth_is_exponential():
    grid = Grid(n=256, length=2 * math.pi)
    u_h = cellular_flow(grid)
    _, y = grid.mesh()
    u3 = Field.from_values(grid, np.sin(EXP_GROWTH_M * y))
    times = np.linspace(0.0, 2.0, 9)
    run = evolve_25d(u_h, u3, times=times, dt=EXP_GROWTH_DT)
    sups = [rec.grad_sup for rec in run.records]
    slope, intercept, rsq = _affine_fit(times, np.log(sups))
    assert slope >= 0.8
    assert rsq >= 0.98
    # the scalar itself does not grow, only its gradient; the final snapshot
    # is marginally resolved (composed frequency ~ m e^2 vs Nyquist 128) so
    # its measured sup carries a visible interpolation overshoot
    for t, rec in zip(times, run.records):
        assert rec.sup <= (1.0 + 1e-3 if t <= 1.5 else 1.1)


def test_25d_constant_scalar_has_zero_growth_exponent(grid128):
    u_h = cellular_flow(grid128)
    x, _ = grid128.mesh()
    u3 = Field.from_values(grid128, 0.3 + 0.0 * x)
    run = evolve_25d(u_h, u3, times=np.linspace(0.0, 1.0, 5))
    assert all(rec.grad_sup <= 1e-10 for rec in run.records)


# ----------------------------------------------------- regularity of the map


def test_cross_datum_is_nearly_stationary():
    grid = Grid(n=256, length=2 * math.pi)
    w0 = cross_vorticity(grid, smoothing=2.0 * grid.dx)
    state = EulerState.from_vorticity(
        Field.from_coeffs(grid, w0.coeffs * grid.dealias_mask)
    )
    run = evolve_euler(state, T=0.5, dt=0.005)
    drift = lp_norm(run.states[-1].omega - state.omega, 2) / lp_norm(state.omega, 2)
    assert drift <= CROSS_DRIFT_BOUND


def test_regularity_probe_identity_at_time_zero():
    scales = tuple(2.0**-k for k in range(1, 5))
    records = yudovich_regularity_probe(T=0.0, n=256, scales=scales)
    assert records[0]["t"] == 0.0
    assert records[0]["alpha"] == pytest.approx(1.0, abs=1e-12)


def test_regularity_probe_exponent_decreases():
    records = yudovich_regularity_probe(T=1.0, n=1024, times=(0.25, 0.5, 1.0))
    alphas = [rec["alpha"] for rec in records]
    assert all(a2 < a1 for a1, a2 in zip(alphas, alphas[1:]))
    final = records[-1]
    assert 0.5 * math.exp(-1.0) <= final["alpha"] < 1.0
    assert final["rsq"] >= 0.9


def test_regularity_probe_rejects_subgrid_scales():
    with pytest.raises(GridError, match="grid"):
        yudovich_regularity_probe(T=0.5, n=256, scales=(2.0**-12,))


# ------------------------------------------------------------ L^p mechanism


@pytest.fixture(scope="module")
def lp_records():
    grid = Grid(n=256, length=16.0)
    datum = make_c1_datum(grid, delta=C1_DELTA, eta=C1_ETA, n_reg=LP_PROBE_N_REG)
    return lp_growth_probe(datum, T=LP_PROBE_T, p_list=P_LIST, dt=LP_PROBE_DT)


def test_lp_hessian_anchor_at_p_two(lp_records):
    assert lp_records["anchor_rel_error"] <= 1e-10


def test_lp_profile_curve_is_affine_with_positive_slope(lp_records):
    fit = lp_records["profile_fit"]
    assert fit["slope"] > 0.0
    assert fit["rsq"] >= 0.95
    assert lp_records["profile_quadrature_rel_error"] <= 1e-6


def test_lp_radial_shell_slope_positive(lp_records):
    shells = lp_records["radial_shells"]
    assert len(shells) >= 3
    slope, _, _ = _affine_fit(
        [math.log(1.0 / r) for r, _ in shells], [v for _, v in shells]
    )
    assert slope > 0.0


def test_lp_gradient_norms_stay_above_calibrated_envelope(lp_records):
    # the gain over the base norm is quadratically small: the Hessian spike
    # is pointwise misaligned with the dominant shear, so its linear pairing
    # cancels and only the calibrated quadratic envelope binds
    rows = lp_records["growth"]
    assert rows[0]["t"] == 0.0
    for row in rows[1:]:
        t = row["t"]
        for p in P_LIST:
            gain = row["grad_lp"][p] - rows[0]["grad_lp"][p]
            floor = LP_GROWTH_C_LOW * p * t - LP_GROWTH_C_HIGH * p * t * t
            assert gain >= floor, (p, t, gain, floor)


def test_lp_probe_without_singular_part_is_flat():
    grid = Grid(n=256, length=16.0)
    datum = make_c1_datum(grid, delta=0.0, eta=C1_ETA, n_reg=LP_PROBE_N_REG)
    records = lp_growth_probe(datum, T=0.0, p_list=P_LIST)
    assert all(v == 0.0 for v in records["profile_curve"].values())
    lat = records["lattice_curve"]
    slope, _, _ = _affine_fit(list(P_LIST), [lat[p] for p in P_LIST])
    assert abs(slope) <= LP_FLAT_SLOPE_BOUND
