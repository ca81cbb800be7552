"""Exact propagation on the two-qubit x truncated-Fock space.

Basis ordering is |q1 q2> (x) |n>, lexicographic, index = (2 q1 + q2)(M + 1) + n.

Spin conventions: S+|0> = |1>, S-|1> = |0>, S^z = +-1/2 on |1>/|0> for the
field term. The exchange part is 2[omega (SxSx + SySy) + gamma_z SzSz]: the
flip-flop matrix element is omega and the Ising term shifts aligned pairs by
+gamma_z/2 and anti-aligned pairs by -gamma_z/2, so gamma_z == omega is the
isotropic (XXX) point. The identity-proportional constant -2i D_z of the bath
Hamiltonian is dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DimensionOverflow, EigenFailure
from .model import InitialQubitState, ModelParams, ThermalDistribution

DEFAULT_MAX_DIM = 4096
FOCK_HEADROOM = 2
X_FORM_TOL = 1e-10

# positions outside the X pattern (diagonal + anti-diagonal) of a 4x4 matrix
OFF_X_MASK = np.ones((4, 4), dtype=bool)
OFF_X_MASK[np.arange(4), np.arange(4)] = False
OFF_X_MASK[np.arange(4), 3 - np.arange(4)] = False


@dataclass(frozen=True)
class TruncatedSpace:
    fock_cutoff: int

    def __post_init__(self):
        if self.fock_cutoff < 0:
            raise ValueError("fock_cutoff must be >= 0")

    @property
    def fock_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def total_dim(self) -> int:
        return 4 * self.fock_dim

    def index(self, qubits: int, n: int) -> int:
        return qubits * self.fock_dim + n

    @classmethod
    def for_distribution(cls, dist: ThermalDistribution, extra: int = 0) -> "TruncatedSpace":
        return cls(dist.cutoff + FOCK_HEADROOM + extra)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    matrix: np.ndarray
    space: TruncatedSpace
    hermitian: bool = field(default=True)

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        try:
            return scipy.linalg.eigh(self.matrix)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise EigenFailure(str(exc)) from exc


def _qubit_operators():
    up = np.array([[0.0, 0.0], [1.0, 0.0]])  # S+ in the (|0>, |1>) basis
    down = up.T
    sz = np.diag([-0.5, 0.5])
    eye = np.eye(2)
    k = np.kron
    return {
        "p1": k(up, eye), "p2": k(eye, up), "m1": k(down, eye), "m2": k(eye, down),
        "z1": k(sz, eye), "z2": k(eye, sz),
    }


def system_hamiltonian(params: ModelParams) -> np.ndarray:
    """4x4 two-qubit Hamiltonian in the |00>,|01>,|10>,|11> basis."""
    q = _qubit_operators()
    flip = q["p1"] @ q["m2"]
    flop = q["m1"] @ q["p2"]
    return (params.mu0 * (q["z1"] + q["z2"])
            + params.omega * (flip + flop)
            + 2.0 * params.gamma_z * (q["z1"] @ q["z2"])
            + 1j * params.dz_sys * (flip - flop))


def annihilation(fock_cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, fock_cutoff + 1)), 1)


def build_hamiltonian(params: ModelParams, space: TruncatedSpace,
                      max_dim: int = DEFAULT_MAX_DIM) -> HamiltonianMatrix:
    if space.total_dim > max_dim:
        raise DimensionOverflow(f"total dimension {space.total_dim} exceeds cap {max_dim}")
    q = _qubit_operators()
    b = annihilation(space.fock_cutoff)
    fock_eye = np.eye(space.fock_dim)
    bath = 2.0 * params.g_bath * (b.T @ b) + params.gamma_bath * fock_eye
    h = (np.kron(system_hamiltonian(params), fock_eye)
         + params.g0 * (np.kron(q["p1"] + q["p2"], b) + np.kron(q["m1"] + q["m2"], b.T))
         + np.kron(np.eye(4), bath))
    h = np.asarray(h, dtype=complex)
    hermitian = bool(np.max(np.abs(h - h.conj().T)) <= 1e-13)
    return HamiltonianMatrix(h, space, hermitian)


def excitation_operator(space: TruncatedSpace) -> np.ndarray:
    ones = np.array([0, 1, 1, 2], dtype=float)
    return np.diag(np.kron(ones, np.ones(space.fock_dim)) + np.kron(np.ones(4), np.arange(space.fock_dim)))


def evolve_state(h: HamiltonianMatrix, psi0, t):
    """e^{-iHt} psi0 for scalar t, or a stack over an array of times."""
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
        raise ValueError("psi0 must be normalised")
    if np.ndim(t) == 0 and t == 0:
        return psi0.copy()
    energies, vecs = h.eigensystem
    coeff = vecs.conj().T @ psi0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = (np.exp(-1j * np.outer(times, energies)) * coeff) @ vecs.T
    return out[0] if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class ReducedDensity:
    time: float
    matrix: np.ndarray

    @property
    def off_pattern(self) -> float:
        return float(np.max(np.abs(self.matrix[OFF_X_MASK])))

    @property
    def is_x_form(self) -> bool:
        return self.off_pattern <= X_FORM_TOL


def initial_product_states(init: InitialQubitState, space: TruncatedSpace, occupations) -> np.ndarray:
    """Columns alpha|00,n> + beta|11,n> for each n."""
    occ = np.asarray(occupations, dtype=int)
    psi = np.zeros((space.total_dim, occ.size), dtype=complex)
    cols = np.arange(occ.size)
    psi[space.index(0, 0) + occ, cols] = init.alpha
    psi[space.index(3, 0) + occ, cols] = init.beta
    return psi


def reduced_density_series(params: ModelParams, init: InitialQubitState, dist: ThermalDistribution,
                           times, space: TruncatedSpace | None = None,
                           hamiltonian: HamiltonianMatrix | None = None,
                           chunk: int = 64) -> np.ndarray:
    """Thermally averaged reduced density matrices, shape (len(times), 4, 4)."""
    if space is None:
        space = hamiltonian.space if hamiltonian is not None else TruncatedSpace.for_distribution(dist)
    if space.fock_cutoff < dist.cutoff + FOCK_HEADROOM:
        raise ValueError(f"fock_cutoff {space.fock_cutoff} < thermal cutoff {dist.cutoff} + {FOCK_HEADROOM}")
    h = hamiltonian if hamiltonian is not None else build_hamiltonian(params, space)
    energies, vecs = h.eigensystem
    psi0 = initial_product_states(init, space, dist.occupations) * np.sqrt(dist.normalized_weights)
    coeff = vecs.conj().T @ psi0                                   # (d, N)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    out = np.empty((times.size, 4, 4), dtype=complex)
    for start in range(0, times.size, chunk):
        tc = times[start:start + chunk]
        phases = np.exp(-1j * np.outer(energies, tc))               # (d, T)
        rotated = (phases[:, :, None] * coeff[:, None, :]).reshape(len(energies), -1)
        psi = (vecs @ rotated).reshape(4, space.fock_dim, tc.size, -1)  # (4, F, T, N)
        psi = psi.transpose(2, 0, 1, 3).reshape(tc.size, 4, -1)
        out[start:start + chunk] = psi @ np.swapaxes(psi.conj(), 1, 2)
    # t = 0 is the identity propagator; pin it exactly
    zero = times == 0.0
    if zero.any():
        v = init.vector()
        out[zero] = np.outer(v, v.conj())
    return out


def reduced_density_oracle(params: ModelParams, init: InitialQubitState, dist: ThermalDistribution,
                           t: float, space: TruncatedSpace | None = None) -> ReducedDensity:
    return ReducedDensity(float(t), reduced_density_series(params, init, dist, [t], space)[0])
