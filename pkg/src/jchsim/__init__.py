"""Simulator for the two-ion Jaynes-Cummings-Hubbard system.

Trapped-ion radial phonons hop between two sites while a sideband laser
couples each phonon mode to its ion's internal levels. The package builds
the truncated Hilbert space and Hamiltonians, propagates pulse schedules
(optionally with quasi-static laser frequency noise), and evaluates the
excitation-number statistics, instantaneous spectra, diabatic leakage and
sideband spectra used to characterise the insulator to superfluid
transfer.
"""

__version__ = "0.1.0"

from .fockspace import (  # noqa: E402
    Basis,
    BasisError,
    BasisState,
    CouplingKind,
    StateVector,
    TruncationConfig,
    build_basis,
    fidelity,
    full_basis,
    sector_basis,
    sector_projection,
)
from .model import (  # noqa: E402
    HermitianOperator,
    JCHParams,
    TrapConfig,
    anti_jc_hamiltonian,
    collective_mode_frequencies,
    collective_mode_ops,
    collective_number_operators,
    hamiltonian,
    hopping_rate,
    jc_coupling,
    jch_hamiltonian,
    number_operators,
    radial_correction,
)
from .observables import (  # noqa: E402
    EigenTrack,
    LeakageReport,
    VarianceReport,
    adiabatic_leakage_estimate,
    collective_occupations,
    expectation,
    ground_state_leakage,
    instantaneous_spectrum,
    phonon_variance_rocking_approx,
    rocking_variance_from_atomic,
    total_variance_bounds,
    variance,
    variance_report,
)
from .propagate import NoiseModel, Schedule, StepTooLargeError, Trajectory, evolve, evolve_noisy  # noqa: E402
from .protocol import (  # noqa: E402
    DynamicsParams,
    SweepParams,
    dynamics_schedule,
    state_atI,
    state_phSF,
    state_polaritonicSF,
    sweep_schedule,
)
from .spectroscopy import (  # noqa: E402
    Probe,
    SpectrumData,
    fit_sideband_spectrum,
    nbar_from_ratio,
    sideband_spectrum,
)
