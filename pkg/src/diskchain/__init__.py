"""Desk-scale simulator of a diamond microdisk chain quantum register:
whispering-gallery disk modes, photon hopping along a disk chain, and a
photon-mediated controlled-Z gate between two NV spins."""

__version__ = "0.1.0"

from .core import (CONSTANTS, PhysicalConstants, UNITS, UnitSystem,
                   energy_to_freq, freq_to_energy, freq_to_wavelength,
                   wavelength_to_freq)
from .specfun import CylinderFnValue, bessel_j, bessel_y, cylinder_value, \
    hankel1
from .wgm import (BelowCutoffError, DiskGeometry, FieldProfile,
                  NoSolutionError, WgmMode, axial_norm_integral,
                  field_profile, radial_residual, slab_effective_index,
                  solve_disk, solve_mode, thickness_for_index)
from .chain import (ChainGeometry, CouplingResult, OverlapIntegrals,
                    QuadratureError, SweepRow, ValidityWarning, chain_field,
                    coupling_kappa, coupling_sweep, dispersion, fit_loglinear,
                    overlap_integrals)
from .dynamics import (BASIS_LABELS, CzResult, DetuningPulse, GateFailure,
                       GateParams, NvParams, PhaseReport, PulseSchedule,
                       RegisterState, StepConvergenceError, Trajectory,
                       TwoLevelState, aux_leakage, build_hamiltonian, evolve,
                       excitation_expectation, extract_phases,
                       logical_populations, make_cz_schedule,
                       propagator_dispersive, propagator_resonant, run_cz)
from .config import ConfigError, SimConfig, default_config, load_config
from .verify import CheckResult, run_all

__all__ = [name for name in dir() if not name.startswith("_")]
