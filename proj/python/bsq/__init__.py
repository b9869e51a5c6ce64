"""Pseudo-spectral a-b-c-d Boussinesq solver with balance-law diagnostics.

Fields are numpy arrays of shape (ny, nx), row-major like the C++ core.
"""

from ._bsq import (
    BsqError,
    ConfigError,
    Grid,
    IoError,
    ModelParams,
    NumericError,
    ParameterError,
    SimConfig,
    State,
    UsageError,
    balance_residuals,
    ddx,
    ddy,
    dealias,
    derive_abcd,
    dimensionalize,
    dispersion_omega,
    dynamic_pressure,
    fit_decay_exponent,
    helmholtz_solve,
    laplacian,
    leading_wave_amplitude,
    load_config,
    parse_config,
    read_snapshot,
    reconstruct_velocity_at_level,
    rhs,
    rk4_step,
    run_balance_study,
    simulate,
    write_snapshot,
)

__all__ = [name for name in dir() if not name.startswith("_")]
