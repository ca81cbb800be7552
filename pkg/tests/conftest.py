import numpy as np
import pytest

from xxzbath.model import ModelParams
from xxzbath.oracle import TruncatedSpace, build_hamiltonian, evolve_state

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sector_amplitudes(params: ModelParams, branch: str, n: int, t: float) -> np.ndarray:
    """Reduced branch amplitudes read off exact propagation (independent of the ODE/closed forms)."""
    space = TruncatedSpace(n + 3)
    h = build_hamiltonian(params, space)
    psi0 = np.zeros(space.total_dim, dtype=complex)
    if branch == "11":
        psi0[space.index(3, n)] = 1.0
        states = [(0, n + 2), (1, n + 1), (2, n + 1), (3, n)]
        weights = [(n + 1) * (n + 2), n + 1, n + 1, 1]
        ref = 2 * params.g_bath * (n + 1)
    else:
        psi0[space.index(0, n)] = 1.0
        states = [(3, n - 2), (1, n - 1), (2, n - 1), (0, n)]
        weights = [n * (n - 1), n, n, 1]
        ref = 2 * params.g_bath * (n - 1)
    ref += params.gamma_z / 2 + params.gamma_bath
    psi = evolve_state(h, psi0, t) * np.exp(1j * ref * t)
    out = np.zeros(4, dtype=complex)
    for k, ((q, m), w) in enumerate(zip(states, weights)):
        if w > 0:
            out[k] = psi[space.index(q, m)] / np.sqrt(w)
    return out
