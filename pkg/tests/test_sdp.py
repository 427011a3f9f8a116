import io

import numpy as np
import pytest

from qer.channel import amplitude_damping, choi_to_kraus, identity_channel, is_cptp, kraus_to_choi, tensor_power
from qer.codes import five_qubit_code, logical_states, spreading_transform
from qer.fidelity import data_matrix
from qer.linalg import ket_outer
from qer.sdp import (
    SdpConvergenceError,
    SdpProblem,
    certificate_ok,
    hermitian_basis,
    solve,
)

from conftest import random_cptp, random_density

# Five-qubit code, amplitude damping on every qubit, gamma = 0.1, maximally
# mixed source. Value from scripts/cross_solver_oracle.py: cvxpy 1.7.5 with
# CLARABEL at default tolerances, cost matrix rebuilt independently with
# column-stacked Choi operators.
CROSS_SOLVER_GAMMA_01 = 0.988171459700


def test_hermitian_basis_orthonormal():
    b = hermitian_basis(3).toarray()
    np.testing.assert_allclose(b.conj().T @ b, np.eye(9), atol=1e-15)
    for k in range(9):
        m = b[:, k].reshape(3, 3)
        np.testing.assert_allclose(m, m.conj().T)


def test_scalar_problem():
    sol = solve(SdpProblem(1, 1, np.array([[0.37]])))
    assert np.isclose(sol.primal_value, 0.37, atol=1e-9)
    assert np.isclose(sol.x.x[0, 0], 1)


def test_identity_channel_problem():
    rho = np.eye(2) / 2
    c = data_matrix(rho, identity_channel(2))
    sol = solve(SdpProblem(2, 2, c))
    assert np.isclose(sol.primal_value, 1, atol=1e-8)
    np.testing.assert_allclose(sol.x.x, ket_outer(np.eye(2)), atol=1e-6)
    assert certificate_ok(sol)


def test_rejects_non_hermitian_cost():
    with pytest.raises(ValueError):
        SdpProblem(1, 2, np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        SdpProblem(2, 2, np.eye(3))
    with pytest.raises(ValueError):
        solve(SdpProblem(1, 1, np.eye(1)), tol=0)


def test_tiny_asymmetry_is_absorbed():
    c = np.diag([1.0, 0.5, 0.2, 0.1]).astype(complex)
    c[0, 1] += 1e-14
    p = SdpProblem(2, 2, c)
    np.testing.assert_array_equal(p.cost, p.cost.conj().T)


def test_non_convergence_carries_best_iterate(rng):
    c = data_matrix(random_density(rng, 2), random_cptp(rng, 2, 3))
    with pytest.raises(SdpConvergenceError) as info:
        solve(SdpProblem(2, 3, c), tol=1e-9, max_iter=2)
    best = info.value.best
    assert best.iterations == 2 and best.gap > 0


@pytest.mark.parametrize("seed", range(8))
def test_random_problems_certificates(seed):
    rng = np.random.default_rng(seed)
    d_h, d_k = int(rng.integers(1, 4)), int(rng.integers(2, 6))
    spread = random_cptp(rng, d_h, d_k, n_kraus=int(rng.integers(1, 4)))
    rho = random_density(rng, d_h)
    sol = solve(SdpProblem(d_h, d_k, data_matrix(rho, spread)))
    assert certificate_ok(sol)
    assert sol.residuals.tp <= 1e-8
    assert sol.residuals.psd >= -1e-9
    assert sol.residuals.dual_psd >= -1e-8
    assert 0 <= sol.gap <= max(1e-6, 1e-6 * abs(sol.primal_value))
    # dual certificate: I (x) Y - C >= 0 and tr Y = dual value
    c = data_matrix(rho, spread)
    z = np.kron(np.eye(d_h), sol.dual_y) - c
    assert np.linalg.eigvalsh(z).min() >= -1e-8
    assert np.isclose(np.trace(sol.dual_y).real, sol.dual_value)
    # weak duality on every iterate
    assert all(r.dual >= r.primal - 1e-9 for r in sol.trace)
    # extracted recovery is a channel
    assert is_cptp(choi_to_kraus(sol.x), tol=1e-7)
    # optimality dominance over random recoveries
    for _ in range(10):
        r = random_cptp(rng, d_k, d_h, n_kraus=3)
        assert np.trace(kraus_to_choi(r).x @ c).real <= sol.primal_value + 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_solver_trace_output_and_monotone_path(seed):
    rng = np.random.default_rng(seed)
    c = data_matrix(random_density(rng, 2), random_cptp(rng, 2, 4, n_kraus=2))
    buf = io.StringIO()
    sol = solve(SdpProblem(2, 4, c), trace_stream=buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0].split()[:4] == ["iter", "primal", "dual", "gap"]
    assert len(lines) == sol.iterations + 2
    mus = [r.mu for r in sol.trace]
    assert all(b < a for a, b in zip(mus, mus[1:]))
    gaps = [r.gap for r in sol.trace]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    primal = [r.primal for r in sol.trace]
    dual = [r.dual for r in sol.trace]
    assert all(b >= a - 1e-12 for a, b in zip(primal, primal[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(dual, dual[1:]))


def test_deterministic(rng):
    c = data_matrix(random_density(rng, 2), random_cptp(rng, 2, 4, n_kraus=2))
    a = solve(SdpProblem(2, 4, c))
    b = solve(SdpProblem(2, 4, c))
    assert np.array_equal(a.x.x, b.x.x) and a.primal_value == b.primal_value


@pytest.fixture(scope="module")
def five_qubit_gamma01():
    enc = logical_states(five_qubit_code())
    spread = spreading_transform(tensor_power(amplitude_damping(0.1), 5), enc)
    c = data_matrix(np.eye(2) / 2, spread)
    return c, solve(SdpProblem(2, 32, c))


def test_cross_solver_oracle(five_qubit_gamma01):
    _, sol = five_qubit_gamma01
    assert abs(sol.primal_value - CROSS_SOLVER_GAMMA_01) < 1e-5
    assert certificate_ok(sol)
