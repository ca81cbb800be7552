"""Branch amplitudes of e^{-iHt}|11> and e^{-iHt}|00> per bath occupation n.

For an initial bath Fock state |n>, total excitation (qubit ones plus bosons)
is conserved, so each initial product state explores four basis states:

    |11,n>  ->  |00,n+2>, |01,n+1>, |10,n+1>, |11,n>      (branch ELEVEN)
    |00,n>  ->  |00,n>,   |01,n-1>, |10,n-1>, |11,n-2>    (branch ZERO_ZERO)

The reduced amplitudes stored here strip the bosonic matrix-element factors
and the sector reference phase, e.g. for ELEVEN

    <00,n+2| e^{-iHt} |11,n> = sqrt((n+1)(n+2)) e^{-i E_ref t} c_double_flip

with E_ref = 2 g (n+1) + gamma_z/2 + gamma_bath (ZERO_ZERO: 2 g (n-1) + ...).
The squared weights ``amplitude_weights`` then give the sector norm and the
occupation factors of the reduced density matrix.

Component order everywhere is (double_flip, single_a, single_b, stay), where
single_a is the |01> amplitude and single_b the |10> amplitude.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import PreconditionViolation, StepSizeUnderflow
from .model import ModelParams, is_resonant

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class Branch(enum.Enum):
    ELEVEN = "11"
    ZERO_ZERO = "00"


@dataclass(frozen=True)
class BranchCoefficients:
    branch: Branch
    n: int
    time: float
    c_double_flip: complex
    c_single_a: complex
    c_single_b: complex
    c_stay: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c_double_flip, self.c_single_a, self.c_single_b, self.c_stay])

    def sector_norm(self) -> float:
        return float(amplitude_weights(self.branch, self.n) @ (np.abs(self.as_array()) ** 2))


@dataclass(frozen=True)
class CoefficientGrid:
    """Reduced amplitudes for many occupations and times.

    ``values`` has shape (len(occupations), len(times), 4).
    """

    branch: Branch
    occupations: np.ndarray
    times: np.ndarray
    values: np.ndarray

    def at(self, i_n: int, i_t: int) -> BranchCoefficients:
        v = self.values[i_n, i_t]
        return BranchCoefficients(self.branch, int(self.occupations[i_n]), float(self.times[i_t]),
                                  complex(v[0]), complex(v[1]), complex(v[2]), complex(v[3]))

    def records_at(self, i_t: int) -> list[BranchCoefficients]:
        return [self.at(i, i_t) for i in range(len(self.occupations))]

    def sector_norms(self) -> np.ndarray:
        w = np.stack([amplitude_weights(self.branch, n) for n in self.occupations])
        return np.einsum("nk,ntk->nt", w, np.abs(self.values) ** 2)


def amplitude_weights(branch: Branch, n: int) -> np.ndarray:
    """Squared bosonic factors multiplying |c|^2 for each component."""
    if branch is Branch.ELEVEN:
        return np.array([(n + 1) * (n + 2), n + 1, n + 1, 1.0])
    return np.array([n * (n - 1), n, n, 1.0])


def initial_condition(branch: Branch) -> np.ndarray:
    # both branches start entirely in the "stay" component
    return np.array([0.0, 0.0, 0.0, 1.0], dtype=complex)


# ---------------------------------------------------------------- frequencies

@dataclass(frozen=True)
class EigenFrequencies:
    l_plus: float
    l_minus: float


def _frequency_pair(shift, g0, k):
    root = np.sqrt(shift ** 2 + 8.0 * g0 ** 2 * k)
    return (shift + root) / 2.0, (shift - root) / 2.0, root


def single_flip_shift(gamma_z: float, omega: float, literal: bool = False) -> float:
    """Energy of the aligned pairs minus the symmetric single-flip state.

    With the exchange normalisation of :mod:`xxzbath.oracle` this is
    gamma_z - omega; the printed resonant formulas use 2 gamma_z - omega.
    """
    return (2.0 * gamma_z if literal else gamma_z) - omega


def eigenfrequencies(gamma_z: float, omega: float, g0: float, n: int,
                     literal: bool = False) -> EigenFrequencies:
    """Resonant |11>-sector frequencies (s +- sqrt(s^2 + 8 g0^2 (3+2n)))/2.

    s is :func:`single_flip_shift`; ``literal`` selects s = 2 gamma_z - omega.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    lp, lm, _ = _frequency_pair(single_flip_shift(gamma_z, omega, literal), g0, 3 + 2 * n)
    return EigenFrequencies(float(lp), float(lm))


# ---------------------------------------------------------------- closed forms

def _require_closed_form_domain(params: ModelParams):
    if params.dz_sys != 0.0:
        raise PreconditionViolation("closed forms need dz_sys == 0; use the ODE path")
    if not is_resonant(params):
        raise PreconditionViolation("closed forms need mu0 == 2 g_bath; use the ODE path")


def _closed_form_11(params: ModelParams, n: np.ndarray, t: np.ndarray, literal: bool):
    n = np.asarray(n, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    out = np.zeros((n.shape[0], t.shape[1], 4), dtype=complex)
    g0 = params.g0
    if g0 == 0.0:
        out[..., 3] = 1.0
        return out
    shift = single_flip_shift(params.gamma_z, params.omega, literal)
    l1, l2, root = _frequency_pair(shift, g0, 3 + 2 * n)
    e1, e2 = np.exp(1j * l1 * t), np.exp(1j * l2 * t)
    f = e1 / l1 - e2 / l2
    out[..., 0] = -1.0 / (3 + 2 * n) + 2 * g0 ** 2 / root * f
    single_prefactor = g0 ** 2 if literal else g0
    out[..., 1] = out[..., 2] = -single_prefactor / root * (e1 - e2)
    out[..., 3] = (2 + n) / (3 + 2 * n) + 2 * g0 ** 2 * (1 + n) / root * f
    return out


def _closed_form_00(params: ModelParams, n: np.ndarray, t: np.ndarray, literal: bool):
    n_int = np.asarray(n)
    n = n_int.astype(float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    out = np.zeros((n.shape[0], t.shape[1], 4), dtype=complex)
    g0 = params.g0
    if literal:
        # printed forms, including the |11>-sector discriminant
        shift = single_flip_shift(params.gamma_z, params.omega, literal=True)
        l1, l2, root = _frequency_pair(shift, g0, 3 + 2 * n)
        e1, e2 = np.exp(1j * l1 * t), np.exp(1j * l2 * t)
        f = e1 / l1 - e2 / l2
        out[..., 3] = (n - 2) / (2 * n - 1) + 2 * g0 ** 2 * n / root * f
        out[..., 0] = -1.0 / (2 * n - 1) + 2 * g0 ** 2 * n / root * f
        out[..., 1] = out[..., 2] = -g0 ** 2 / root * (e1 - e2)
        return out

    out[..., 3] = 1.0
    live = (n_int >= 1) & (g0 != 0.0)
    if not live.any():
        return out
    nl = n[live]
    shift = single_flip_shift(params.gamma_z, params.omega)
    l1, l2, root = _frequency_pair(shift, g0, 2 * nl - 1)
    e1, e2 = np.exp(1j * l1 * t), np.exp(1j * l2 * t)
    f = e1 / l1 - e2 / l2
    block = np.empty((nl.shape[0], t.shape[1], 4), dtype=complex)
    block[..., 0] = np.where(nl >= 2, -1.0 / (2 * nl - 1) + 2 * g0 ** 2 / root * f, 0.0)
    block[..., 1] = block[..., 2] = -g0 / root * (e1 - e2)
    block[..., 3] = (nl - 1) / (2 * nl - 1) + 2 * g0 ** 2 * nl / root * f
    out[live] = block
    return out


def closed_form_grid(params: ModelParams, branch: Branch, occupations: Sequence[int],
                     times: Sequence[float], literal: bool = False) -> CoefficientGrid:
    """Analytic amplitudes for dz_sys = 0 on resonance.

    ``literal=True`` evaluates the printed formulas unchanged (for
    comparison reports only): shift 2 gamma_z - omega and single-flip
    prefactor g0**2 in the ELEVEN branch, and the printed ZERO_ZERO forms,
    which violate the t = 0 identity.
    """
    if not literal:
        _require_closed_form_domain(params)
    occ = np.asarray(occupations, dtype=int)
    times = np.asarray(times, dtype=float)
    if branch is Branch.ELEVEN:
        values = _closed_form_11(params, occ, times, literal)
    else:
        values = _closed_form_00(params, occ, times, literal)
    return CoefficientGrid(branch, occ, times, values)


def closed_form_branch11(params: ModelParams, n: int, t: float,
                         literal: bool = False) -> BranchCoefficients:
    return closed_form_grid(params, Branch.ELEVEN, [n], [t], literal).at(0, 0)


def closed_form_branch00(params: ModelParams, n: int, t: float,
                         literal: bool = False) -> BranchCoefficients:
    return closed_form_grid(params, Branch.ZERO_ZERO, [n], [t], literal).at(0, 0)


# ---------------------------------------------------------------- ODE systems

def ode_matrix(params: ModelParams, branch: Branch, n: int) -> np.ndarray:
    """Generator M of the reduced system, i dc/dt = M c.

    Components with a vanishing bosonic weight (|01>,|10> and |11> for
    ZERO_ZERO at n = 0, |11> at n = 1) are unphysical and held at zero.
    """
    detune = params.mu0 - 2.0 * params.g_bath
    g0 = params.g0
    single = -params.gamma_z
    hop_ab = params.omega - 1j * params.dz_sys  # <01|H|10>
    hop_ba = params.omega + 1j * params.dz_sys
    if branch is Branch.ELEVEN:
        down, up = n + 2, n + 1
        d_double, d_stay = -detune, detune
    else:
        down, up = n - 1, n
        d_double, d_stay = detune, -detune
    m = np.array([
        [d_double, g0, g0, 0.0],
        [g0 * down, single, hop_ab, g0],
        [g0 * down, hop_ba, single, g0],
        [0.0, g0 * up, g0 * up, d_stay],
    ], dtype=complex)
    dead = amplitude_weights(branch, n) == 0
    m[dead, :] = 0.0
    m[:, dead] = 0.0
    return m


def ode_rhs(params: ModelParams, branch: Branch, n: int, state) -> np.ndarray:
    return -1j * (ode_matrix(params, branch, n) @ np.asarray(state, dtype=complex))


def ode_rhs_branch11(params: ModelParams, n: int, state) -> np.ndarray:
    return ode_rhs(params, Branch.ELEVEN, n, state)


def ode_rhs_branch00(params: ModelParams, n: int, state) -> np.ndarray:
    return ode_rhs(params, Branch.ZERO_ZERO, n, state)


def _solve(m: np.ndarray, y0: np.ndarray, t0: float, t1: float, t_eval, rtol, atol):
    gen = -1j * m
    sol = solve_ivp(lambda _t, y: gen @ y, (t0, t1), y0, method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message)
    return sol.y.T


def propagate_reduced(params: ModelParams, branch: Branch, n: int, state, t0: float, t1: float,
                      rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> np.ndarray:
    """Integrate reduced amplitudes from t0 to t1 (either direction)."""
    y0 = np.asarray(state, dtype=complex)
    if t0 == t1:
        return y0.copy()
    return _solve(ode_matrix(params, branch, n), y0, t0, t1, [t1], rtol, atol)[-1]


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and start at 0")
    return t


def _integrate_values(params, branch, n, t, rtol, atol) -> np.ndarray:
    y0 = initial_condition(branch)
    if t.size == 1:
        return y0[None, :]
    return _solve(ode_matrix(params, branch, n), y0, 0.0, float(t[-1]), t, rtol, atol)


def integrate_branch(params: ModelParams, branch: Branch, n: int, t_grid,
                     rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> list[BranchCoefficients]:
    t = _check_grid(t_grid)
    vals = _integrate_values(params, branch, n, t, rtol, atol)
    return [BranchCoefficients(branch, n, float(ti), *map(complex, v)) for ti, v in zip(t, vals)]


def integrate_sectors(params: ModelParams, branch: Branch, occupations: Sequence[int], t_grid,
                      rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                      stacked: bool = True) -> CoefficientGrid:
    """Integrate every occupation sector onto a shared grid.

    ``stacked`` advances all sectors as one block-diagonal system; tolerances
    are divided by sqrt(#components) because the step controller uses an RMS
    error norm. ``stacked=False`` integrates each sector on its own.
    """
    t = _check_grid(t_grid)
    occ = np.asarray(occupations, dtype=int)
    if not stacked or occ.size == 1 or t.size == 1:
        values = np.stack([_integrate_values(params, branch, int(n), t, rtol, atol) for n in occ])
        return CoefficientGrid(branch, occ, t, values)
    gens = -1j * np.stack([ode_matrix(params, branch, int(n)) for n in occ])
    y0 = np.tile(initial_condition(branch), occ.size)
    scale = np.sqrt(y0.size)

    def rhs(_t, y):
        return np.einsum("nij,nj->ni", gens, y.reshape(-1, 4)).ravel()

    sol = solve_ivp(rhs, (0.0, float(t[-1])), y0, method="DOP853", t_eval=t,
                    rtol=rtol / scale, atol=atol / scale)
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message)
    values = sol.y.T.reshape(t.size, occ.size, 4).transpose(1, 0, 2)
    return CoefficientGrid(branch, occ, t, np.ascontiguousarray(values))
