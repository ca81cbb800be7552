"""Reduced density matrix assembly and two-qubit concurrence."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coefficients import Branch, BranchCoefficients, CoefficientGrid
from .errors import CoverageGap, FallbackToGeneric, NotADensityMatrix
from .model import InitialQubitState, ModelParams, ThermalDistribution

SIGMA_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))
DENSITY_TOL = 1e-8


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    ODE = "ode"
    ORACLE = "oracle"


@dataclass(frozen=True)
class XStateDensity:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex
    rho23: complex
    time: float = 0.0

    @classmethod
    def from_matrix(cls, rho: np.ndarray, time: float = 0.0) -> "XStateDensity":
        d = np.real(np.diag(rho))
        return cls(float(d[0]), float(d[1]), float(d[2]), float(d[3]),
                   complex(rho[0, 3]), complex(rho[1, 2]), float(time))

    def to_matrix(self) -> np.ndarray:
        rho = np.diag([self.rho11, self.rho22, self.rho33, self.rho44]).astype(complex)
        rho[0, 3], rho[3, 0] = self.rho14, np.conj(self.rho14)
        rho[1, 2], rho[2, 1] = self.rho23, np.conj(self.rho23)
        return rho

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44


@dataclass(frozen=True)
class ConcurrenceSeries:
    times: np.ndarray
    values: np.ndarray
    method: Method
    params_digest: str = ""

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("concurrence values must lie in [0, 1]")


# ---------------------------------------------------------------- assembly

def _covering(grid: CoefficientGrid, dist: ThermalDistribution) -> np.ndarray:
    lookup = {int(n): i for i, n in enumerate(grid.occupations)}
    missing = [n for n in range(dist.cutoff + 1) if n not in lookup]
    if missing:
        raise CoverageGap(f"{grid.branch.name} coefficients missing for n = {missing[:5]}...")
    return grid.values[[lookup[n] for n in range(dist.cutoff + 1)]]


def assemble_density_series(grid11: CoefficientGrid, grid00: CoefficientGrid, init: InitialQubitState,
                            dist: ThermalDistribution, params: ModelParams,
                            literal_stay_weight: bool = False) -> np.ndarray:
    """Thermal average of the branch amplitudes, shape (len(times), 4, 4).

    The |11>-branch stay amplitude enters rho44 with unit weight; the printed
    (n + 1) weight is available through ``literal_stay_weight`` for comparison.
    """
    if not np.array_equal(grid11.times, grid00.times):
        raise ValueError("branch grids must share the time grid")
    c11 = _covering(grid11, dist)
    c00 = _covering(grid00, dist)
    n = dist.occupations.astype(float)[:, None]
    p = dist.normalized_weights[:, None]
    a2, b2 = abs(init.alpha) ** 2, abs(init.beta) ** 2

    theta, ups, rho_, flat = (c11[..., k] for k in range(4))
    pounds, club, sect, im = (c00[..., k] for k in range(4))
    stay_w = (n + 1) if literal_stay_weight else 1.0
    sq = np.abs

    rho11 = np.sum(p * (a2 * sq(im) ** 2 + b2 * (n + 1) * (n + 2) * sq(theta) ** 2), axis=0)
    rho22 = np.sum(p * (a2 * n * sq(club) ** 2 + b2 * (n + 1) * sq(ups) ** 2), axis=0)
    rho33 = np.sum(p * (a2 * n * sq(sect) ** 2 + b2 * (n + 1) * sq(rho_) ** 2), axis=0)
    rho44 = np.sum(p * (a2 * n * (n - 1) * sq(pounds) ** 2 + b2 * stay_w * sq(flat) ** 2), axis=0)
    rho23 = np.sum(p * (a2 * n * club * sect.conj() + b2 * (n + 1) * ups * rho_.conj()), axis=0)
    phase = np.exp(4j * params.g_bath * grid11.times)
    rho14 = init.alpha * np.conj(init.beta) * phase * np.sum(p * im * flat.conj(), axis=0)

    out = np.zeros((grid11.times.size, 4, 4), dtype=complex)
    out[:, 0, 0], out[:, 1, 1], out[:, 2, 2], out[:, 3, 3] = rho11, rho22, rho33, rho44
    out[:, 0, 3], out[:, 3, 0] = rho14, rho14.conj()
    out[:, 1, 2], out[:, 2, 1] = rho23, rho23.conj()
    return out


def _grid_from_records(records: Sequence[BranchCoefficients], branch: Branch, t: float) -> CoefficientGrid:
    occ = np.array([r.n for r in records], dtype=int)
    values = np.stack([r.as_array() for r in records])[:, None, :]
    if any(r.branch is not branch for r in records):
        raise ValueError(f"expected {branch.name} coefficients")
    return CoefficientGrid(branch, occ, np.array([t]), values)


def assemble_density(coeffs11: Sequence[BranchCoefficients], coeffs00: Sequence[BranchCoefficients],
                     init: InitialQubitState, dist: ThermalDistribution, params: ModelParams,
                     t: float, literal_stay_weight: bool = False) -> XStateDensity:
    grid11 = _grid_from_records(coeffs11, Branch.ELEVEN, t)
    grid00 = _grid_from_records(coeffs00, Branch.ZERO_ZERO, t)
    rho = assemble_density_series(grid11, grid00, init, dist, params, literal_stay_weight)[0]
    return XStateDensity.from_matrix(rho, t)


# ---------------------------------------------------------------- concurrence

def concurrence_xstate(rho: XStateDensity, tol: float = 1e-9) -> float:
    """Concurrence from the closed X-state root list.

    Requires rho22 == rho33; the roots sqrt(rho11 rho44) +- |rho14| and
    sqrt(rho22 rho33) +- |rho23| are sorted before use, so crossings are safe.
    """
    if abs(rho.rho22 - rho.rho33) > tol:
        raise FallbackToGeneric(f"rho22 - rho33 = {rho.rho22 - rho.rho33:.3e}")
    outer = np.sqrt(max(rho.rho11 * rho.rho44, 0.0))
    inner = np.sqrt(max(rho.rho22 * rho.rho33, 0.0))
    roots = np.abs([outer + abs(rho.rho14), outer - abs(rho.rho14),
                    inner + abs(rho.rho23), inner - abs(rho.rho23)])
    roots = np.sort(roots)[::-1]
    return float(np.clip(roots[0] - roots[1:].sum(), 0.0, 1.0))


def _check_density(rho: np.ndarray, tol: float):
    herm = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)), axis=(-2, -1))
    trace = np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0)
    if np.any(herm > tol) or np.any(trace > tol):
        raise NotADensityMatrix(f"hermiticity {np.max(herm):.2e}, trace error {np.max(trace):.2e}")


def concurrence_generic_many(rhos: np.ndarray, tol: float = DENSITY_TOL) -> np.ndarray:
    """Wootters concurrence for a stack of 4x4 density matrices."""
    rhos = np.asarray(rhos, dtype=complex)
    _check_density(rhos, tol)
    rhos = 0.5 * (rhos + np.swapaxes(rhos.conj(), -1, -2))
    w, v = np.linalg.eigh(rhos)
    if np.any(w < -tol):
        raise NotADensityMatrix(f"negative eigenvalue {w.min():.2e}")
    # rho = X X^dagger; sqrt eig of rho Y rho* Y = singular values of X^T Y X
    x = v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]
    tau = np.swapaxes(x, -1, -2) @ SIGMA_YY @ x
    roots = np.linalg.svd(tau, compute_uv=False)  # descending
    c = roots[..., 0] - roots[..., 1:].sum(axis=-1)
    return np.clip(c, 0.0, 1.0)


def concurrence_generic(rho: np.ndarray, tol: float = DENSITY_TOL) -> float:
    return float(concurrence_generic_many(np.asarray(rho)[None], tol)[0])


def concurrence_from_eigenvalues(rho: np.ndarray) -> float:
    """Reference route: roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).

    Loses accuracy near rank-deficient states (square roots of round-off);
    kept as an independent check of :func:`concurrence_generic`.
    """
    r = rho @ SIGMA_YY @ rho.conj() @ SIGMA_YY
    ev = np.sort(np.sqrt(np.clip(np.real(np.linalg.eigvals(r)), 0.0, None)))[::-1]
    return float(max(ev[0] - ev[1:].sum(), 0.0))


def concurrence_many(rhos: np.ndarray, tol: float = DENSITY_TOL) -> np.ndarray:
    """Concurrence for X-form stacks with rho22 == rho33, generic otherwise."""
    rhos = np.asarray(rhos)
    values = concurrence_generic_many(rhos, tol)
    diag = np.real(np.diagonal(rhos, axis1=-2, axis2=-1))
    xlike = np.abs(diag[:, 1] - diag[:, 2]) <= 1e-9
    for i in np.flatnonzero(xlike):
        values[i] = concurrence_xstate(XStateDensity.from_matrix(rhos[i]))
    return values


# ---------------------------------------------------------------- sudden death

def detect_esd(series, threshold: float = 1e-6) -> list[tuple[float, float]]:
    """Maximal intervals where the concurrence stays <= threshold.

    Accepts a :class:`ConcurrenceSeries` or a ``(times, values)`` pair. Entry
    and exit times are linearly interpolated to the threshold crossing.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if isinstance(series, ConcurrenceSeries):
        t, c = series.times, series.values
    else:
        t, c = (np.asarray(a, dtype=float) for a in series)
    below = c <= threshold
    intervals = []
    i, n = 0, len(c)
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        start = t[i] if i == 0 else _crossing(t[i - 1], t[i], c[i - 1], c[i], threshold)
        end = t[j] if j == n - 1 else _crossing(t[j], t[j + 1], c[j], c[j + 1], threshold)
        intervals.append((float(start), float(end)))
        i = j + 1
    return intervals


def _crossing(t0, t1, c0, c1, level):
    if c1 == c0:
        return t0
    return t0 + (level - c0) * (t1 - t0) / (c1 - c0)
