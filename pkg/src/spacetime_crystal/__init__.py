"""Spacetime-symmetric quantum fields on a periodic (x, t) grid.

Fields are evolved in an auxiliary parameter tau, projected onto mass
shells, propagated with closed-form kernels, arranged into temporal
crystals, promoted to a truncated Fock space and embedded in discrete
Page-Wootters history states.
"""

from .errors import ConfigError, GridMismatch, InvariantViolation, NumericalWarning
from .grid import (
    GridSpec,
    SpacetimeField,
    Units,
    inner,
    make_gaussian,
    norm2,
    normalize,
    plane_wave,
    point_field,
    random_field,
    transform,
)
from .evolution import (
    EvolutionSpec,
    TauTrajectory,
    evolve,
    expect_p2,
    harmonic_potential,
    schrodinger_reference,
    stationarity_check,
)
from .massshell import (
    MassSpectrum,
    ShellSpec,
    commutator_delta,
    field_energy,
    frequency_split,
    kg_residual,
    pauli_jordan_closed_form,
    shell_project,
    tau_fourier,
)
from .propagator import PropagatorQuery, analytic_propagator, numeric_propagator_check, semigroup_error
from .crystal import (
    ChainState,
    CrystalSpec,
    WannierSpec,
    chain_spectrum,
    effective_mass,
    evolve_chain,
    hopping_J,
    wannier,
)
from .fock import (
    DensityMatrix,
    FockState,
    ModeSet,
    entanglement_entropy,
    reduced_density,
    single_particle_superposition,
)
from .pagewootters import (
    ClockSpec,
    HistoryState,
    aliasing_residual,
    build_history,
    conditional_state,
    constraint_residual,
)

__version__ = "0.1.0"

__all__ = [
    "ChainState",
    "ClockSpec",
    "ConfigError",
    "CrystalSpec",
    "DensityMatrix",
    "EvolutionSpec",
    "FockState",
    "GridMismatch",
    "GridSpec",
    "HistoryState",
    "InvariantViolation",
    "MassSpectrum",
    "ModeSet",
    "NumericalWarning",
    "PropagatorQuery",
    "ShellSpec",
    "SpacetimeField",
    "TauTrajectory",
    "Units",
    "WannierSpec",
    "aliasing_residual",
    "analytic_propagator",
    "build_history",
    "chain_spectrum",
    "commutator_delta",
    "conditional_state",
    "constraint_residual",
    "effective_mass",
    "entanglement_entropy",
    "evolve",
    "evolve_chain",
    "expect_p2",
    "field_energy",
    "frequency_split",
    "harmonic_potential",
    "hopping_J",
    "inner",
    "kg_residual",
    "make_gaussian",
    "norm2",
    "normalize",
    "numeric_propagator_check",
    "pauli_jordan_closed_form",
    "plane_wave",
    "point_field",
    "random_field",
    "reduced_density",
    "schrodinger_reference",
    "semigroup_error",
    "shell_project",
    "single_particle_superposition",
    "stationarity_check",
    "tau_fourier",
    "transform",
    "wannier",
]
