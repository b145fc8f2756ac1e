"""Quantum Fisher information of Stark probes with exponentially graded potentials."""

from .model import (
    PotentialProfile,
    ProbeClass,
    ProbeSpec,
    ProfileKind,
    SectorBasis,
    build_field_generator,
    build_mb_hamiltonian,
    build_mb_hamiltonian_sparse,
    build_sp_hamiltonian,
    neel_pattern,
    potential_values,
    sector_basis,
)
from .spectral import (
    EigenDecomposition,
    EigensolverError,
    StateSelector,
    eigendecompose,
    energy_gap,
    extremal_ground_pair,
    select_state,
)
from .equilibrium import (
    DegenerateStateError,
    BoundaryPeakError,
    FdConsistencyError,
    LevelCrossingError,
    QfiCurve,
    QfiMethod,
    SweepPointError,
    find_transition,
    fit_localized_decay,
    qfi_eigen_sum,
    qfi_fidelity_fd,
    qfi_point,
    sweep_equilibrium,
    zero_field_qfi,
)
from .dynamics import (
    InitialStateKind,
    NumericalConsistencyError,
    StatePair,
    TimeSeries,
    dh_state_spectral,
    evolve,
    initial_state,
    normalized_qfi,
    qfi_dynamic,
    qfi_dynamic_series,
    time_average,
)
from .bound import (
    LogScaledValue,
    appendix_qfi_sum,
    c_sum_closed,
    c_sum_direct,
    qfi_lower_bound,
    theta_factor,
    theta_limit,
)
from .scaling import (
    FitResult,
    fit_exponential_in_L,
    fit_hmax_scaling,
    fit_power_law,
    meta_fit_linear_in_a,
    precision_bound,
    rescaled_fom,
)

__version__ = "0.1.0"
