import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xxzbath.coefficients import Branch, closed_form_grid, integrate_branch, integrate_sectors
from xxzbath.entanglement import (ConcurrenceSeries, Method, XStateDensity, assemble_density,
                                  assemble_density_series, concurrence_from_eigenvalues,
                                  concurrence_generic, concurrence_generic_many, concurrence_many,
                                  concurrence_xstate, detect_esd)
from xxzbath.errors import CoverageGap, FallbackToGeneric, NotADensityMatrix
from xxzbath.model import InitialQubitState, ModelParams, thermal_weights
from xxzbath.oracle import reduced_density_series

FIG2 = ModelParams(mu0=4.0, g0=2.0, g_bath=2.0, temperature=6.0)


def bell_projector():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return np.outer(v, v)


def werner(p):
    return p * bell_projector() + (1 - p) * np.eye(4) / 4


@st.composite
def x_states(draw, symmetric=True):
    """Random physical X-states: positivity of each 2x2 block bounds the coherences."""
    w = np.array([draw(st.floats(0, 1)) for _ in range(4)]) + 1e-3
    if symmetric:
        w[2] = w[1]
    w /= w.sum()
    r14 = draw(st.floats(0, 1)) * np.sqrt(w[0] * w[3]) * np.exp(1j * draw(st.floats(0, 6.3)))
    r23 = draw(st.floats(0, 1)) * np.sqrt(w[1] * w[2]) * np.exp(1j * draw(st.floats(0, 6.3)))
    return XStateDensity(w[0], w[1], w[2], w[3], r14, r23)


class TestXStateConcurrence:
    def test_bell(self):
        assert concurrence_xstate(XStateDensity(0.5, 0, 0, 0.5, 0.5, 0)) == pytest.approx(1.0, abs=1e-15)

    def test_product(self):
        assert concurrence_xstate(XStateDensity(1, 0, 0, 0, 0, 0)) == 0.0

    def test_coherence_limited(self):
        # 2 (|rho14| - sqrt(rho22 rho33)) = 2 (0.4 - 0.1)
        c = concurrence_xstate(XStateDensity(0.4, 0.1, 0.1, 0.4, 0.4, 0.0))
        assert c == pytest.approx(0.6, abs=1e-15)

    def test_single_excitation_coherence(self):
        c = concurrence_xstate(XStateDensity(0.0, 0.5, 0.5, 0.0, 0.0, 0.5j))
        assert c == pytest.approx(1.0, abs=1e-15)

    def test_asymmetric_populations_refused(self):
        with pytest.raises(FallbackToGeneric):
            concurrence_xstate(XStateDensity(0.25, 0.3, 0.2, 0.25, 0.1, 0.0))

    @settings(max_examples=200, deadline=None)
    @given(rho=x_states())
    def test_agrees_with_generic(self, rho):
        m = rho.to_matrix()
        assert concurrence_xstate(rho) == pytest.approx(concurrence_generic(m), abs=1e-10)

    def test_round_trip(self):
        rho = XStateDensity(0.1, 0.2, 0.3, 0.4, 0.05 + 0.1j, -0.02j, time=1.5)
        assert XStateDensity.from_matrix(rho.to_matrix(), 1.5) == rho
        assert rho.trace == pytest.approx(1.0)


class TestGenericConcurrence:
    @pytest.mark.parametrize("p", [0.0, 1 / 3, 0.5, 0.8, 1.0])
    def test_werner(self, p):
        assert concurrence_generic(werner(p)) == pytest.approx(max((3 * p - 1) / 2, 0.0), abs=1e-10)

    def test_maximally_mixed(self):
        assert concurrence_generic(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-14)

    def test_pure_states_match_amplitude_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            v /= np.linalg.norm(v)
            exact = 2 * abs(v[0] * v[3] - v[1] * v[2])
            assert concurrence_generic(np.outer(v, v.conj())) == pytest.approx(exact, abs=1e-12)

    def test_eigenvalue_route_on_mixed_states(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = a @ a.conj().T
            rho /= np.trace(rho).real
            assert concurrence_generic(rho) == pytest.approx(concurrence_from_eigenvalues(rho), abs=1e-9)

    def test_local_unitary_invariance(self):
        from scipy.stats import unitary_group
        u = np.kron(unitary_group.rvs(2, random_state=1), unitary_group.rvs(2, random_state=2))
        rho = werner(0.7)
        assert concurrence_generic(u @ rho @ u.conj().T) == pytest.approx(concurrence_generic(rho), abs=1e-12)

    @pytest.mark.parametrize("bad", [np.eye(4) / 2, np.diag([1.2, -0.2, 0, 0]),
                                     bell_projector() + 0.01j * np.triu(np.ones((4, 4)), 1)])
    def test_rejects_non_densities(self, bad):
        with pytest.raises(NotADensityMatrix):
            concurrence_generic(bad)

    def test_mixed_stack_dispatch(self):
        sym = XStateDensity(0.3, 0.2, 0.2, 0.3, 0.25, 0.1).to_matrix()
        asym = XStateDensity(0.3, 0.3, 0.1, 0.3, 0.25, 0.1).to_matrix()
        out = concurrence_many(np.stack([sym, asym]))
        np.testing.assert_allclose(out, concurrence_generic_many(np.stack([sym, asym])), atol=1e-12)


class TestInitialConcurrence:
    @settings(max_examples=100, deadline=None)
    @given(a=st.complex_numbers(max_magnitude=5), b=st.complex_numbers(max_magnitude=5))
    def test_global_phase_and_value(self, a, b):
        if abs(a) ** 2 + abs(b) ** 2 < 1e-6:
            return
        init = InitialQubitState.normalized(a, b)
        v = init.vector()
        c = concurrence_generic(np.outer(v, v.conj()))
        assert c == pytest.approx(init.concurrence(), abs=1e-12)
        w = v * np.exp(0.83j)
        assert concurrence_generic(np.outer(w, w.conj())) == pytest.approx(c, abs=1e-12)


class TestAssembly:
    def grids(self, params, dist, times, method="closed"):
        if method == "closed":
            return (closed_form_grid(params, Branch.ELEVEN, dist.occupations, times),
                    closed_form_grid(params, Branch.ZERO_ZERO, dist.occupations, times))
        return (integrate_sectors(params, Branch.ELEVEN, dist.occupations, times),
                integrate_sectors(params, Branch.ZERO_ZERO, dist.occupations, times))

    @pytest.mark.parametrize("init", [InitialQubitState.bell(), InitialQubitState.ground(),
                                      InitialQubitState(0.6, -0.8j)])
    def test_time_zero(self, init):
        dist = thermal_weights(2.0, 6.0)
        g11, g00 = self.grids(FIG2, dist, np.array([0.0]))
        rho = assemble_density_series(g11, g00, init, dist, FIG2)[0]
        v = init.vector()
        np.testing.assert_allclose(rho, np.outer(v, v.conj()), atol=1e-13)

    @pytest.mark.parametrize("params", [FIG2, FIG2.replace(omega=1.0, gamma_z=0.5, dz_sys=1.0, mu0=3.3)])
    def test_matches_oracle(self, params):
        dist = thermal_weights(params.g_bath, params.temperature)
        times = np.linspace(0, 10, 51)
        init = InitialQubitState(0.6, 0.8 * np.exp(0.4j))
        g11, g00 = self.grids(params, dist, times, method="ode")
        rho = assemble_density_series(g11, g00, init, dist, params)
        ref = reduced_density_series(params, init, dist, times)
        assert np.max(np.abs(rho - ref)) < 1e-9

    def test_printed_stay_weight_disagrees_with_oracle(self):
        dist = thermal_weights(2.0, 6.0)
        times = np.linspace(0, 10, 51)
        g11, g00 = self.grids(FIG2, dist, times)
        ref = reduced_density_series(FIG2, InitialQubitState.bell(), dist, times)
        literal = assemble_density_series(g11, g00, InitialQubitState.bell(), dist, FIG2,
                                          literal_stay_weight=True)
        unit = assemble_density_series(g11, g00, InitialQubitState.bell(), dist, FIG2)
        assert np.max(np.abs(literal[:, 3, 3] - ref[:, 3, 3])) > 1e-2
        assert np.max(np.abs(unit - ref)) < 1e-10

    def test_record_interface(self):
        dist = thermal_weights(2.0, 4.0)
        t = 2.0
        c11 = [integrate_branch(FIG2, Branch.ELEVEN, n, [0.0, t])[-1] for n in dist.occupations]
        c00 = [integrate_branch(FIG2, Branch.ZERO_ZERO, n, [0.0, t])[-1] for n in dist.occupations]
        rho = assemble_density(c11, c00, InitialQubitState.bell(), dist, FIG2, t)
        ref = reduced_density_series(FIG2, InitialQubitState.bell(), dist, [t])[0]
        np.testing.assert_allclose(rho.to_matrix(), ref, atol=1e-9)
        with pytest.raises(CoverageGap):
            assemble_density(c11[:-1], c00, InitialQubitState.bell(), dist, FIG2, t)

    def test_dm_breaks_population_symmetry_but_keeps_x_form(self):
        p = FIG2.replace(omega=1.0, gamma_z=0.5, dz_sys=2.0)
        dist = thermal_weights(p.g_bath, 4.0)
        g11, g00 = self.grids(p, dist, np.linspace(0, 10, 101), method="ode")
        rho = assemble_density_series(g11, g00, InitialQubitState.bell(), dist, p)
        assert np.max(np.abs(rho[:, 1, 1] - rho[:, 2, 2])) > 1e-2


class TestSuddenDeath:
    def test_never_dead(self):
        t = np.linspace(0, 5, 11)
        assert detect_esd((t, np.full_like(t, 0.3))) == []

    def test_single_dip(self):
        t = np.linspace(0, 5, 11)        # step 0.5
        c = np.where((t >= 2.0) & (t <= 3.5), 0.0, 0.4)
        c[3] = c[8] = 0.2                # linear ramps into and out of the dip
        iv = detect_esd((t, c), threshold=0.0)
        assert len(iv) == 1
        assert iv[0] == pytest.approx((2.0, 3.5))

    def test_interpolated_edges(self):
        t = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
        c = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
        assert detect_esd((t, c), threshold=0.5) == [(0.5, 3.5)]

    def test_dead_at_ends(self):
        t = np.linspace(0, 4, 5)
        c = np.array([0.0, 0.5, 0.5, 0.0, 0.0])
        iv = detect_esd(ConcurrenceSeries(t, c, Method.ORACLE), threshold=0.0)
        assert iv == [(0.0, 0.0), (3.0, 4.0)]

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError):
            detect_esd((np.arange(3.0), np.zeros(3)), threshold=-1.0)


def test_series_validation():
    with pytest.raises(ValueError):
        ConcurrenceSeries(np.array([0.0, 0.0]), np.array([0.1, 0.2]), Method.ODE)
    with pytest.raises(ValueError):
        ConcurrenceSeries(np.array([0.0, 1.0]), np.array([0.1, 1.2]), Method.ODE)
