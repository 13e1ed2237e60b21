"""speclab: a pseudospectral laboratory for singular-integral growth mechanisms.

Core layers:

* grid / multipliers / norms — periodic FFT calculus (fields, Riesz-type
  multipliers, Biot-Savart, Lipschitz norms);
* lp — Littlewood-Paley filter bank and Besov norms;
* quadrature — FFT-independent continuum oracles (sine-integral sups,
  corner-singularity integrals);
* initial_data — explicit data: band-truncated indicator data, cellular flow,
  sign-cross vorticity, log-weighted quartic velocity data;
* transport — flow maps, Riesz/flow commutators, forced transport solver,
  flow-frame (Duhamel) residuals, sup-norm lower bounds;
* euler — 2D Euler, drag-forced Euler, 2.5-D advected scalar, regularity and
  pressure-growth probes;
* experiments / cli — reproducible experiment records, CSV/SVG emission.
"""

from .grid import Field, Grid, GridError, VectorField
from .multipliers import (
    Multiplier,
    SymbolError,
    apply_multiplier,
    curl,
    divergence,
    exp_of_multiplier,
    gradient,
    hilbert,
    inverse_neg_laplacian,
    perp_grad_inv_laplacian,
    riesz,
    riesz_pair,
)
from .experiments import (
    ExperimentConfig,
    ExperimentError,
    ExperimentRecord,
    ExperimentResult,
    config_hash,
    default_config,
    emit_config,
    load_config,
    parse_config,
    run_experiment,
)
from .norms import lip_norm, lip_seminorm, lp_norm, sup_norm

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Grid",
    "GridError",
    "VectorField",
    "Multiplier",
    "SymbolError",
    "apply_multiplier",
    "curl",
    "divergence",
    "exp_of_multiplier",
    "gradient",
    "hilbert",
    "inverse_neg_laplacian",
    "perp_grad_inv_laplacian",
    "riesz",
    "riesz_pair",
    "lip_norm",
    "lip_seminorm",
    "lp_norm",
    "sup_norm",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentRecord",
    "ExperimentResult",
    "config_hash",
    "default_config",
    "emit_config",
    "load_config",
    "parse_config",
    "run_experiment",
    "__version__",
]
