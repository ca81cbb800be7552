import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from xxzbath.errors import DimensionOverflow
from xxzbath.model import InitialQubitState, ModelParams, thermal_weights
from xxzbath.oracle import (TruncatedSpace, build_hamiltonian, evolve_state, excitation_operator,
                            reduced_density_oracle, reduced_density_series)

FIG3 = ModelParams(mu0=4.0, omega=1.0, gamma_z=0.5, g0=2.0, g_bath=2.0, temperature=4.0)


def brute_force_hamiltonian(p: ModelParams, m: int) -> np.ndarray:
    """Builds H by acting on each basis ket |a b, n> one term at a time."""
    f = m + 1
    dim = 4 * f
    h = np.zeros((dim, dim), dtype=complex)

    def idx(a, b, n):
        return (2 * a + b) * f + n

    for a in (0, 1):
        for b in (0, 1):
            for n in range(f):
                col = idx(a, b, n)
                za, zb = a - 0.5, b - 0.5
                h[col, col] += p.mu0 * (za + zb) + 2 * p.gamma_z * za * zb + 2 * p.g_bath * n + p.gamma_bath
                if (a, b) == (0, 1):   # S1+ S2- |01> = |10>
                    h[idx(1, 0, n), col] += p.omega + 1j * p.dz_sys
                if (a, b) == (1, 0):
                    h[idx(0, 1, n), col] += p.omega - 1j * p.dz_sys
                if n >= 1:             # S+ b
                    if a == 0:
                        h[idx(1, b, n - 1), col] += p.g0 * np.sqrt(n)
                    if b == 0:
                        h[idx(a, 1, n - 1), col] += p.g0 * np.sqrt(n)
                if n + 1 < f:          # S- b^dagger
                    if a == 1:
                        h[idx(0, b, n + 1), col] += p.g0 * np.sqrt(n + 1)
                    if b == 1:
                        h[idx(a, 0, n + 1), col] += p.g0 * np.sqrt(n + 1)
    return h


class TestHamiltonian:
    @pytest.mark.parametrize("params", [FIG3, FIG3.replace(dz_sys=1.3, gamma_bath=0.7, mu0=2.2)])
    def test_matches_brute_force(self, params):
        h = build_hamiltonian(params, TruncatedSpace(3)).matrix
        np.testing.assert_allclose(h, brute_force_hamiltonian(params, 3), atol=1e-14)

    def test_coupling_element(self):
        space = TruncatedSpace(6)
        h = build_hamiltonian(FIG3, space).matrix
        n = 4
        assert h[space.index(2, n + 1), space.index(3, n)] == pytest.approx(FIG3.g0 * np.sqrt(n + 1))
        assert h[space.index(1, n + 1), space.index(3, n)] == pytest.approx(FIG3.g0 * np.sqrt(n + 1))
        assert h[space.index(2, n), space.index(1, n)] == pytest.approx(FIG3.omega + 1j * FIG3.dz_sys)

    @pytest.mark.parametrize("dz", [0.0, 1.0, 2.0])
    def test_hermitian(self, dz):
        h = build_hamiltonian(FIG3.replace(dz_sys=dz), TruncatedSpace(20))
        assert h.hermitian
        assert np.max(np.abs(h.matrix - h.matrix.conj().T)) <= 1e-13

    @settings(max_examples=30, deadline=None)
    @given(mu0=st.floats(0, 8), om=st.floats(-3, 3), gz=st.floats(-3, 3), dz=st.floats(-3, 3),
           g0=st.floats(0, 3), g=st.floats(0.1, 3))
    def test_conserves_excitations(self, mu0, om, gz, dz, g0, g):
        p = ModelParams(mu0=mu0, omega=om, gamma_z=gz, dz_sys=dz, g0=g0, g_bath=g)
        space = TruncatedSpace(8)
        h = build_hamiltonian(p, space).matrix
        n_op = excitation_operator(space)
        assert np.max(np.abs(h @ n_op - n_op @ h)) <= 1e-12

    def test_diagonal_without_couplings(self):
        p = ModelParams(mu0=3.0, omega=0.0, gamma_z=0.0, g0=0.0, g_bath=1.0)
        space = TruncatedSpace(5)
        h = build_hamiltonian(p, space).matrix
        assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
        assert h[space.index(3, 0), space.index(3, 0)] == pytest.approx(3.0)
        assert h[space.index(0, 0), space.index(0, 0)] == pytest.approx(-3.0)

    def test_dimension_cap(self):
        with pytest.raises(DimensionOverflow):
            build_hamiltonian(FIG3, TruncatedSpace(100), max_dim=400)
        build_hamiltonian(FIG3, TruncatedSpace(99), max_dim=400)


class TestEvolution:
    def setup_method(self):
        self.space = TruncatedSpace(10)
        self.h = build_hamiltonian(FIG3.replace(dz_sys=0.7), self.space)
        rng = np.random.default_rng(7)
        psi = rng.normal(size=self.space.total_dim) + 1j * rng.normal(size=self.space.total_dim)
        self.psi = psi / np.linalg.norm(psi)

    def test_matches_expm(self):
        for t in (0.3, 2.0, 7.5):
            ref = scipy.linalg.expm(-1j * self.h.matrix * t) @ self.psi
            np.testing.assert_allclose(evolve_state(self.h, self.psi, t), ref, atol=1e-10)

    def test_identity_at_zero(self):
        np.testing.assert_array_equal(evolve_state(self.h, self.psi, 0.0), self.psi)

    def test_norm_drift(self):
        out = evolve_state(self.h, self.psi, np.linspace(0, 50, 501))
        assert np.max(np.abs(np.linalg.norm(out, axis=1) - 1.0)) < 1e-10

    def test_rejects_unnormalised(self):
        with pytest.raises(ValueError):
            evolve_state(self.h, 2 * self.psi, 1.0)


class TestReducedDensity:
    @pytest.mark.parametrize("dz", [0.0, 1.0])
    def test_density_properties(self, dz):
        p = FIG3.replace(dz_sys=dz)
        dist = thermal_weights(p.g_bath, p.temperature)
        rhos = reduced_density_series(p, InitialQubitState.bell(), dist, np.linspace(0, 10, 41))
        for rho in rhos:
            assert abs(np.trace(rho).real - 1) < 1e-12
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
            assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
        mask = np.ones((4, 4), bool)
        mask[np.arange(4), 3 - np.arange(4)] = False
        mask[np.diag_indices(4)] = False
        assert np.max(np.abs(rhos[:, mask])) < 1e-12

    def test_symmetric_populations_without_dm(self):
        dist = thermal_weights(2.0, 6.0)
        rho = reduced_density_oracle(FIG3, InitialQubitState.bell(), dist, 3.7).matrix
        assert rho[1, 1].real == pytest.approx(rho[2, 2].real, abs=1e-12)
        assert rho[1, 1].real == pytest.approx(rho[1, 2].real, abs=1e-12)
        assert abs(rho[1, 2].imag) < 1e-12

    def test_time_zero_is_initial_projector(self):
        init = InitialQubitState(0.6, 0.8j)
        dist = thermal_weights(2.0, 4.0)
        rho = reduced_density_oracle(FIG3, init, dist, 0.0)
        v = np.array([0.6, 0, 0, 0.8j])
        np.testing.assert_allclose(rho.matrix, np.outer(v, v.conj()), atol=1e-15)
        assert rho.is_x_form

    def test_fock_cutoff_converged(self):
        p = FIG3.replace(dz_sys=0.5)
        dist = thermal_weights(p.g_bath, p.temperature)
        t = np.linspace(0, 10, 21)
        a = reduced_density_series(p, InitialQubitState.bell(), dist, t)
        b = reduced_density_series(p, InitialQubitState.bell(), dist, t,
                                   space=TruncatedSpace.for_distribution(dist, extra=2))
        assert np.max(np.abs(a - b)) < 1e-8

    def test_rejects_short_space(self):
        dist = thermal_weights(2.0, 4.0)
        with pytest.raises(ValueError):
            reduced_density_series(FIG3, InitialQubitState.bell(), dist, [1.0], space=TruncatedSpace(dist.cutoff))
