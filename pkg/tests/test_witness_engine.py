import itertools

import numpy as np
import pytest

from src.errors import AssumptionViolationError, NonPositiveDenominatorError, ValidationError
from src.ghz_core import correlations, label_permutation, permute_correlations, werner_state
from src.witness_engine import (PARTITIONS, OracleConfig, as_witness, check_symmetric,
                                check_witness_validity, eigen_candidates, g_tilde, g_tilde_grid, is_symmetric,
                                k_from_m, lambda_all_partitions, lambda_antidiagonal, lambda_bruteforce,
                                lambda_max, lambda_reduced, lambda_symmetric, m_from_k, random_product_states,
                                relabel, werner_witness, witness_from_document, witness_operator, witness_report,
                                x_matrix)


def _symmetric_witness(rng, m7: float = 0.0) -> np.ndarray:
    m = np.zeros(15)
    m[6] = m7
    m[7], m[14] = rng.uniform(-1, 1, 2)
    m[8:14] = rng.uniform(-1, 1)
    return m


def test_werner_witness_lambda():
    M = werner_witness()
    assert lambda_symmetric(M) == pytest.approx(2.0, abs=1e-12)
    assert lambda_bruteforce(M, (3, 4)) == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("p", [0.15, 0.3, 0.5, 1.0])
def test_werner_witness_report(p):
    report = witness_report(werner_witness(), werner_state(p))
    assert report.expectation == pytest.approx(10 * p)
    assert report.L == pytest.approx(1 / (5 * p))
    assert report.entangled == (p > 0.2)


def test_flipped_witness_has_nonpositive_denominator():
    with pytest.raises(NonPositiveDenominatorError):
        witness_report(-werner_witness(), werner_state(0.5))


def test_k_m_round_trip():
    rng = np.random.default_rng(5)
    M = rng.normal(size=15)
    K = k_from_m(M)
    assert K[0] == pytest.approx(M[0])
    np.testing.assert_allclose(m_from_k(K), M, atol=1e-14)


def test_witness_validation():
    with pytest.raises(ValidationError):
        as_witness(np.ones(14))
    with pytest.raises(ValidationError):
        as_witness([np.nan] + [0.0] * 14)
    with pytest.raises(ValidationError):
        witness_from_document({"M": [0.0] * 15})
    with pytest.raises(ValidationError):
        witness_from_document({"coefficients": [1.0] * 15})
    np.testing.assert_allclose(witness_from_document({"M": list(werner_witness())}), werner_witness())


def test_symmetric_assumptions():
    M = werner_witness()
    check_symmetric(M)
    broken = M.copy()
    broken[0] = 0.1
    with pytest.raises(AssumptionViolationError):
        lambda_symmetric(broken)
    broken = M.copy()
    broken[9] = 0.5
    assert not is_symmetric(broken)
    with pytest.raises(AssumptionViolationError):
        lambda_antidiagonal(np.ones(15))


def test_eigen_candidates_match_numpy():
    rng = np.random.default_rng(6)
    for _ in range(50):
        M = rng.normal(size=15)
        pair = PARTITIONS[rng.integers(len(PARTITIONS))]
        angles = rng.uniform(0, np.pi, 4)
        x = x_matrix(M, pair, angles)
        assert max(eigen_candidates(x)) == pytest.approx(np.linalg.eigvalsh(x)[-1], abs=1e-12)


def test_eigen_candidates_reject_dense_matrix():
    with pytest.raises(ValidationError):
        eigen_candidates(np.ones((4, 4)))
    with pytest.raises(ValidationError):
        eigen_candidates(np.eye(3))


def test_g_tilde_matches_phase_grid():
    rng = np.random.default_rng(7)
    for _ in range(50):
        K = rng.normal(size=16)
        for sector in (1, 2):
            assert g_tilde(sector, K) == pytest.approx(g_tilde_grid(sector, K), abs=1e-6)
    with pytest.raises(ValidationError):
        g_tilde(3, np.zeros(16))


def test_antidiagonal_lambda_agrees_with_symmetric_form():
    rng = np.random.default_rng(8)
    for _ in range(20):
        M = _symmetric_witness(rng, m7=rng.uniform(-0.5, 0.5))
        assert lambda_antidiagonal(M) == pytest.approx(lambda_symmetric(M), abs=1e-12)
        assert lambda_max(M) == pytest.approx(lambda_symmetric(M), abs=1e-12)


def test_symmetric_lambda_matches_oracle():
    rng = np.random.default_rng(9)
    cfg = OracleConfig()
    for _ in range(3):
        M = _symmetric_witness(rng, m7=rng.uniform(-0.5, 0.5))
        assert lambda_all_partitions(M, cfg) == pytest.approx(lambda_symmetric(M), abs=1e-5)


@pytest.mark.slow
def test_symmetric_lambda_matches_oracle_full():
    rng = np.random.default_rng(10)
    for _ in range(200):
        M = _symmetric_witness(rng, m7=rng.uniform(-0.5, 0.5))
        assert lambda_all_partitions(M) == pytest.approx(lambda_symmetric(M), abs=1e-5)


def test_product_states_never_exceed_lambda():
    rng = np.random.default_rng(11)
    for _ in range(3):
        M = _symmetric_witness(rng)
        assert check_witness_validity(M, samples=20000, rng=rng) > -1e-9
    M = np.zeros(15)
    M[7:15] = rng.uniform(-1, 1, 8)
    assert check_witness_validity(M, lambda_antidiagonal(M), samples=20000, rng=rng) > -1e-9


def test_random_product_states_are_normalised():
    psi = random_product_states(np.random.default_rng(12), 500)
    np.testing.assert_allclose(np.linalg.norm(psi, axis=1), 1.0, atol=1e-12)


def test_witness_operator_expectation_on_ghz():
    op = witness_operator(werner_witness())
    ghz = np.zeros(16, dtype=complex)
    ghz[0] = ghz[15] = 1 / np.sqrt(2)
    assert (ghz.conj() @ op @ ghz).real == pytest.approx(10.0)


def test_oracle_config_from_config():
    cfg = OracleConfig.from_config({"oracle": {"grid": 12, "search_grid": 6, "refine_tol": "1e-5"}}, search=True)
    assert cfg.grid == 6
    assert cfg.refine_tol == pytest.approx(1e-5)
    assert OracleConfig.from_config({}).grid == 48


def test_reduced_candidates_bound_the_phase_grid():
    rng = np.random.default_rng(13)
    M = rng.normal(size=15)
    theta1, theta2 = 0.8, 2.1
    K = k_from_m(relabel(M, (3, 4)))
    reduced = lambda_reduced(K, theta1, theta2)
    phis = np.linspace(0, 2 * np.pi, 90, endpoint=False)
    best = np.max([eigen_candidates(x_matrix(M, (3, 4), (theta1, theta2, a, b))) for a in phis for b in phis],
                  axis=0)
    assert np.all(best <= np.array(reduced) + 1e-9)
    np.testing.assert_allclose(best, reduced, atol=0.05)


def _single(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _partial_expectation(M, pair, angles) -> np.ndarray:
    # <psi_c psi_d| M |psi_c psi_d> with the remaining qubits ordered (a, b)
    theta1, theta2, phi1, phi2 = angles
    a, b = sorted(pair)
    c, d = [q for q in range(1, 5) if q not in (a, b)]
    order = [c - 1, d - 1, a - 1, b - 1]
    op = witness_operator(M).reshape((2,) * 8).transpose(order + [q + 4 for q in order])
    psi1, psi2 = _single(theta1, phi1), _single(theta2, phi2)
    return np.einsum("i,j,ijklmnop,m,n->klop", psi1.conj(), psi2.conj(), op, psi1, psi2).reshape(4, 4)


def test_x_matrix_is_the_partial_expectation():
    rng = np.random.default_rng(14)
    for pair in PARTITIONS:
        M = rng.normal(size=15)
        angles = rng.uniform([0, 0, 0, 0], [np.pi, np.pi, 2 * np.pi, 2 * np.pi])
        np.testing.assert_allclose(x_matrix(M, pair, angles), _partial_expectation(M, pair, angles), atol=1e-12)


def _two_sector_witness(x: float) -> np.ndarray:
    K = np.zeros(16)
    K[[8, 10, 12, 14]] = 1.0, -1.0, -1.0, -1.0
    K[[9, 11, 13, 15]] = x, -x, -x, -x
    return m_from_k(K)


def _partition_g(M, pair):
    K = k_from_m(relabel(M, pair))
    return g_tilde(1, K), g_tilde(2, K)


@pytest.mark.parametrize("x", [0.0, 0.5, 1.0])
def test_unequal_sectors_raise_lambda_on_swapped_partitions(x):
    M = _two_sector_witness(x)
    np.testing.assert_allclose(M[7:15], np.array([1 + x, x - 1, -1 - x, x - 1, -1 - x, x - 1, -1 - x, 1 - x]) / 2)
    for pair in ((3, 4), (2, 3), (1, 3)):
        assert _partition_g(M, pair) == pytest.approx((1.0, x), abs=1e-12)
    for pair in ((2, 4), (1, 4), (1, 2)):
        assert _partition_g(M, pair) == pytest.approx((1 + x, 0.0), abs=1e-12)
    assert lambda_antidiagonal(M) == pytest.approx(1 + x, abs=1e-12)
    assert lambda_max(M) == pytest.approx(1 + x, abs=1e-12)


def test_unequal_sectors_oracle():
    M = _two_sector_witness(1.0)
    assert lambda_bruteforce(M, (2, 4)) == pytest.approx(2.0, abs=1e-6)
    assert lambda_bruteforce(M, (3, 4)) == pytest.approx(1.0, abs=1e-6)


def test_lambda_is_invariant_under_qubit_relabelling():
    rng = np.random.default_rng(15)
    R = correlations(werner_state(0.6))
    R[7:15] += rng.uniform(-0.05, 0.05, 8)
    for _ in range(5):
        M = np.zeros(15)
        M[6:15] = rng.uniform(-1, 1, 9)
        if M @ R <= 0:
            M = -M
        lam = lambda_antidiagonal(M)
        L = witness_report(M, R).L
        for order in itertools.permutations(range(4)):
            src = label_permutation(order)
            assert lambda_antidiagonal(M[src]) == pytest.approx(lam, abs=1e-10)
            assert witness_report(M[src], permute_correlations(R, order)).L == pytest.approx(L, rel=1e-10)


@pytest.mark.slow
def test_oracle_lambda_is_invariant_under_qubit_relabelling():
    rng = np.random.default_rng(16)
    M = rng.uniform(-1, 1, 15)
    lam = lambda_all_partitions(M)
    for order in ((1, 0, 2, 3), (2, 3, 0, 1), (3, 1, 0, 2)):
        assert lambda_all_partitions(M[label_permutation(order)]) == pytest.approx(lam, abs=1e-5)
