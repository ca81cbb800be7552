"""Physical parameters, initial qubit states and the thermal bath distribution.

Units: hbar = k_B = 1. Every coupling and the temperature share one energy
unit; times are in inverse energy.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    FerromagneticRegime,
    InvalidParameters,
    NonPositiveBathCoupling,
    NonPositiveTemperature,
)

DEFAULT_TAIL_EPSILON = 1e-10
RESONANCE_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the qubit pair, the bath mode and the temperature.

    mu0        qubit coupling to the z-field
    omega      inter-qubit XY exchange
    gamma_z    inter-qubit Ising coupling
    dz_sys     inter-qubit Dzyaloshinskii-Moriya strength
    g0         qubit-bath exchange
    g_bath     intra-bath coupling (mode energy is 2*g_bath)
    gamma_bath bath coupling to the field (constant energy shift)
    dz_bath    bath DM strength (enters only as a constant, no observable effect)
    temperature  k_B T
    """

    mu0: float = 4.0
    omega: float = 0.0
    gamma_z: float = 0.0
    dz_sys: float = 0.0
    g0: float = 2.0
    g_bath: float = 2.0
    gamma_bath: float = 0.0
    dz_bath: float = 0.0
    temperature: float = 4.0

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(ModelParams))


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged, or raise :class:`InvalidParameters`.

    Warns with :class:`FerromagneticRegime` (non-fatal) when gamma_z or omega
    is negative.
    """
    errors = []
    if not params.temperature > 0:
        errors.append(NonPositiveTemperature(f"temperature must be > 0, got {params.temperature}"))
    if not params.g_bath > 0:
        errors.append(NonPositiveBathCoupling(f"g_bath must be > 0, got {params.g_bath}"))
    if errors:
        raise InvalidParameters(errors)
    if params.gamma_z < 0 or params.omega < 0:
        warnings.warn(
            f"gamma_z={params.gamma_z}, omega={params.omega}: outside the antiferromagnetic regime",
            FerromagneticRegime,
            stacklevel=2,
        )
    return params


def is_resonant(params: ModelParams) -> bool:
    """mu0 == 2 g_bath up to a relative 1e-12."""
    target = 2.0 * params.g_bath
    return abs(params.mu0 - target) <= RESONANCE_RTOL * max(abs(params.mu0), abs(target))


@dataclass(frozen=True)
class InitialQubitState:
    """alpha|00> + beta|11>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")

    @classmethod
    def bell(cls) -> "InitialQubitState":
        s = 1.0 / math.sqrt(2.0)
        return cls(s, s)

    @classmethod
    def ground(cls) -> "InitialQubitState":
        return cls(1.0, 0.0)

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> "InitialQubitState":
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        return cls(alpha / norm, beta / norm)

    def vector(self) -> np.ndarray:
        """Amplitudes in the |00>, |01>, |10>, |11> basis."""
        return np.array([self.alpha, 0.0, 0.0, self.beta], dtype=complex)

    def concurrence(self) -> float:
        return 2.0 * abs(self.alpha) * abs(self.beta)


@dataclass(frozen=True)
class ThermalDistribution:
    """Geometric occupation weights p_n = (1 - q) q**n, n = 0..cutoff."""

    weights: np.ndarray
    cutoff: int
    tail_epsilon: float
    ratio: float

    @property
    def occupations(self) -> np.ndarray:
        return np.arange(self.cutoff + 1)

    @property
    def normalized_weights(self) -> np.ndarray:
        """Weights conditioned on n <= cutoff (sum to one)."""
        return self.weights / self.weights.sum()

    @property
    def tail(self) -> float:
        return self.ratio ** (self.cutoff + 1)


def thermal_weights(g_bath: float, temperature: float,
                    tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> ThermalDistribution:
    """Thermal occupation of the bath mode of energy 2 g_bath.

    The cutoff is the smallest N with q**(N+1) <= tail_epsilon, so the dropped
    probability mass never exceeds tail_epsilon.
    """
    if not 0.0 < tail_epsilon < 1.0:
        raise ValueError(f"tail_epsilon must lie in (0, 1), got {tail_epsilon}")
    if not g_bath > 0:
        raise NonPositiveBathCoupling(f"g_bath must be > 0, got {g_bath}")
    if not temperature > 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {temperature}")

    log_q = -2.0 * g_bath / temperature
    q = math.exp(log_q)
    if q == 0.0:
        cutoff = 0
    else:
        cutoff = max(0, math.ceil(math.log(tail_epsilon) / log_q) - 1)
        # guard the ceil against rounding on either side
        while q ** (cutoff + 1) > tail_epsilon:
            cutoff += 1
        while cutoff > 0 and q ** cutoff <= tail_epsilon:
            cutoff -= 1
    n = np.arange(cutoff + 1)
    weights = -math.expm1(log_q) * np.exp(log_q * n)
    return ThermalDistribution(weights=weights, cutoff=cutoff, tail_epsilon=tail_epsilon, ratio=q)
