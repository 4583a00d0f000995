"""Born-measure observables, Madelung residuals and split-step evolution."""

from ._core import (
    ConfigError,
    Field,
    Grid,
    Model,
    NumericalAbort,
    State,
    born_density,
    chi_square,
    coulomb_model,
    double_slit,
    drift_velocity,
    energy_field,
    expect_drift,
    expect_energy,
    field_from_values,
    free_model,
    gaussian_packet,
    harmonic_eigenstate,
    harmonic_model,
    hydrogen_grid,
    hydrogen_state,
    madelung_residuals,
    moment_table,
    osmotic_velocity,
    prob_box,
    qm_energy,
    qm_momentum,
    run,
    sample_positions,
    split_step,
    superpose,
    uncertainty,
)

__all__ = [name for name in dir() if not name.startswith("_")]
