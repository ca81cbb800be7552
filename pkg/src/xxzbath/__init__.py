"""Exact non-Markovian entanglement dynamics of a two-qubit XXZ chain with
Dzyaloshinskii-Moriya interaction in a single-mode thermal bosonic bath."""
from .coefficients import (Branch, BranchCoefficients, CoefficientGrid, EigenFrequencies,
                           closed_form_branch00, closed_form_branch11, closed_form_grid,
                           eigenfrequencies, integrate_branch, integrate_sectors, ode_rhs_branch00,
                           ode_rhs_branch11)
from .entanglement import (ConcurrenceSeries, Method, XStateDensity, assemble_density,
                           assemble_density_series, concurrence_generic, concurrence_xstate,
                           detect_esd)
from .model import (InitialQubitState, ModelParams, ThermalDistribution, is_resonant,
                    thermal_weights, validate)
from .oracle import (HamiltonianMatrix, TruncatedSpace, build_hamiltonian, evolve_state,
                     reduced_density_oracle, reduced_density_series)
from .pipeline import concurrence_series, density_series
from .scenarios import ScenarioConfig, figure_preset, run, sweep_chi

__version__ = "0.1.0"
