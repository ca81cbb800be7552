"""Reduced-density and concurrence time series by each computational route."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import DEFAULT_ATOL, DEFAULT_RTOL, Branch, closed_form_grid, integrate_sectors
from .entanglement import ConcurrenceSeries, Method, assemble_density_series, concurrence_many
from .errors import PreconditionViolation
from .model import (DEFAULT_TAIL_EPSILON, InitialQubitState, ModelParams, is_resonant,
                    thermal_weights)
from .oracle import TruncatedSpace, build_hamiltonian, reduced_density_series


@dataclass(frozen=True)
class MethodResult:
    method: Method
    times: np.ndarray
    densities: np.ndarray
    series: ConcurrenceSeries


def closed_form_available(params: ModelParams) -> bool:
    return params.dz_sys == 0.0 and is_resonant(params)


def density_series(params: ModelParams, init: InitialQubitState, times, method: Method,
                   tail_epsilon: float = DEFAULT_TAIL_EPSILON, fock_extra: int = 0,
                   rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Reduced density matrices on ``times`` (must start at 0 for the ODE route)."""
    dist = thermal_weights(params.g_bath, params.temperature, tail_epsilon)
    times = np.asarray(times, dtype=float)
    occ = dist.occupations
    if method is Method.ORACLE:
        space = TruncatedSpace.for_distribution(dist, extra=fock_extra)
        h = build_hamiltonian(params, space)
        return reduced_density_series(params, init, dist, times, hamiltonian=h)
    if method is Method.CLOSED_FORM:
        if not closed_form_available(params):
            raise PreconditionViolation("closed forms need dz_sys == 0 and mu0 == 2 g_bath")
        g11 = closed_form_grid(params, Branch.ELEVEN, occ, times)
        g00 = closed_form_grid(params, Branch.ZERO_ZERO, occ, times)
    else:
        g11 = integrate_sectors(params, Branch.ELEVEN, occ, times, rtol, atol)
        g00 = integrate_sectors(params, Branch.ZERO_ZERO, occ, times, rtol, atol)
    return assemble_density_series(g11, g00, init, dist, params)


def concurrence_series(params: ModelParams, init: InitialQubitState, times, method: Method,
                       **kwargs) -> MethodResult:
    times = np.asarray(times, dtype=float)
    rhos = density_series(params, init, times, method, **kwargs)
    series = ConcurrenceSeries(times, concurrence_many(rhos), method, params.digest())
    return MethodResult(method, times, rhos, series)
