import numpy as np
import pytest

from src.criteria import (VERDICT_ENTANGLED, VERDICT_PASSES, TauConfig, criterion_I, criterion_I_prime,
                          criterion_II, criterion_III, criterion_IV, criterion_x, evaluate, l_min_bounds,
                          r1_tilde, r1_tilde_prime, r2_tilde, r_double_prime, tau, werner_threshold)
from src.errors import ValidationError
from src.ghz_core import (DIM, GhzDiagonalState, correlations, state_from_correlations, t_from_r, uniform_state,
                          werner_state)
from src.reference import asymmetric_gap_correlations
from src.symmetric_family import V_B, FamilyPoint, family_correlations, point_C


def _t(t8, t10, t12, t14, t9=0.0, t15=0.0):
    T = np.zeros(DIM)
    T[[8, 10, 12, 14]] = t8, t10, t12, t14
    T[9], T[15] = t9, t15
    return T


def test_r1_tilde_branches():
    assert r1_tilde(_t(0.3, -0.3, -0.3, -0.3)) == pytest.approx(1.2)
    assert r1_tilde(_t(0.2, 0.2, 0.2, 0.2)) == pytest.approx(2 * np.sqrt(2) * 0.2)
    assert r1_tilde(_t(1, 0, 0, 0)) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        r1_tilde(np.zeros(15))


def test_r2_tilde():
    assert r2_tilde(t_from_r(correlations(werner_state(0.4)))) == pytest.approx(0.0, abs=1e-15)
    assert r2_tilde(_t(0, 0, 0, 0, t9=0.3, t15=-0.2)) == pytest.approx(0.5)
    assert r2_tilde(np.zeros(DIM)) == 0


@pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.5, 0.9])
def test_criterion_I_on_werner(p):
    result = criterion_I(werner_state(p))
    assert result.margin == pytest.approx((1 - p) / 8 - p / 2, abs=1e-14)
    assert criterion_I_prime(werner_state(p)).margin == pytest.approx(result.margin, abs=1e-14)


def test_criterion_I_uniform_and_threshold():
    assert criterion_I(uniform_state()).margin == pytest.approx(1 / 8)
    assert criterion_I_prime(uniform_state()).margin == pytest.approx(1 / 8)
    assert werner_threshold() == pytest.approx(0.2, abs=1e-10)


def test_criterion_I_prime_sees_every_antidiagonal():
    p = np.full(DIM, 0.5 / 15)
    p[1] = 0.5
    state = GhzDiagonalState.from_probs(p)
    assert criterion_I(state).margin > 0
    assert criterion_I_prime(state).margin < 0


def test_criterion_II():
    pure = GhzDiagonalState.from_probs(np.eye(DIM)[0])
    assert criterion_II(correlations(pure)).margin == pytest.approx(-2.0)
    assert criterion_II(correlations(uniform_state())).margin == pytest.approx(1.0)


def test_criterion_II_on_family_line_EF():
    # p15 = 1/8 makes criterion II tight for every small p2
    for p2 in (0.0, 0.01, 0.015):
        R = family_correlations(FamilyPoint.from_probs(0.125, p2, 0.0))
        assert criterion_II(R).margin == pytest.approx(0.0, abs=1e-12)


def test_criterion_III_on_line_AB():
    at_b = criterion_III(family_correlations(FamilyPoint(0.0, V_B + 1e-9, 9.0)))
    assert at_b.applicable
    assert at_b.margin == pytest.approx(0.0, abs=1e-6)
    past_b = criterion_III(family_correlations(FamilyPoint(0.0, 0.75, 9.0)))
    assert past_b.applicable
    assert past_b.margin == pytest.approx(-0.0292, abs=5e-4)


def test_criterion_III_needs_opposite_signs():
    result = criterion_III(correlations(werner_state(0.5)))
    assert not result.applicable
    assert result.satisfied


def test_tau_values():
    assert tau(5.0) == pytest.approx(6.0, abs=1e-6)
    assert tau(0.6626275) == pytest.approx(3.3354, abs=2e-4)


def test_criterion_IV_tight_at_point_C():
    v, alpha, _ = point_C(0.0)
    result = criterion_IV(family_correlations(FamilyPoint(0.0, v, alpha)))
    assert result.applicable
    assert result.margin == pytest.approx(0.0, abs=1e-4)


def test_criterion_IV_detects_states_without_R15():
    R = correlations(werner_state(0.45))
    R[14] = 0.0
    state = state_from_correlations(R)
    result = criterion_IV(state)
    assert result.applicable
    assert result.detail["degenerate"]
    assert result.detail["r_double_prime"] == pytest.approx(r_double_prime(R).scan)
    assert result.detail["r_double_prime"] > 1
    assert result.margin == pytest.approx(1 - 0.45 - result.detail["r_double_prime"])
    assert not result.satisfied
    assert evaluate(state).IV.margin < 0

    assert criterion_IV(np.zeros(15)).margin > 0


@pytest.mark.parametrize("p15,p2,p16", [(0.09, 0.01, 0.0), (0.08, 0.03, 0.0), (0.04, 0.005, 0.3), (0.01, 0.12, 0.0)])
def test_criterion_IV_routes_agree(p15, p2, p16):
    R = family_correlations(FamilyPoint.from_probs(p15, p2, p16))
    assert R[7] * R[14] < 0
    both = r_double_prime(R)
    assert not both.degenerate
    assert both.agreement < 1e-6


def test_criterion_IV_follows_the_edge_ray_beyond_K_5():
    R = family_correlations(FamilyPoint.from_probs(0.14, 0.0, 0.0))
    assert -R[7] / R[14] == pytest.approx(6.0)
    both = r_double_prime(R)
    assert both.agreement < 1e-6
    assert both.value == pytest.approx(R[14] - R[7], abs=1e-9)
    assert criterion_IV(R).margin == pytest.approx(criterion_II(R).margin, abs=1e-9)


def _random_state(rng) -> GhzDiagonalState:
    return GhzDiagonalState.from_probs(rng.dirichlet(np.ones(DIM)))


@pytest.mark.parametrize("count", [20, pytest.param(500, marks=pytest.mark.slow)])
def test_criterion_IV_routes_agree_on_random_states(count):
    rng = np.random.default_rng(40)
    checked = 0
    while checked < count:
        R = correlations(_random_state(rng))
        if R[7] * R[14] >= 0:
            continue
        both = r_double_prime(R)
        assert both.agreement < 1e-6, R
        checked += 1


def test_criterion_I_prime_is_never_weaker():
    rng = np.random.default_rng(41)
    for _ in range(300):
        state = _random_state(rng)
        assert criterion_I_prime(state).margin <= criterion_I(state).margin + 1e-14


# margin of |R7| + |R8| + |R15| <= 1 per sign case (R7 >= 0, R8 >= 0, R15 >= 0), w = 1 - 2 p16
CRITERION_II_CASES = {
    (True, True, True): lambda p15, p2, w: 16 * p2 + 28 * p15 - 2 * w,
    (True, True, False): lambda p15, p2, w: 16 * p15,
    (True, False, True): lambda p15, p2, w: 16 * p2,
    (True, False, False): lambda p15, p2, w: 2 * w - 12 * p15,
    (False, True, True): lambda p15, p2, w: 2 - 2 * w + 12 * p15,
    (False, True, False): lambda p15, p2, w: 2 - 16 * p2,
    (False, False, True): lambda p15, p2, w: 2 - 16 * p15,
    (False, False, False): lambda p15, p2, w: 2 + 2 * w - 16 * p2 - 28 * p15,
}


def test_criterion_II_is_piecewise_linear_on_the_family():
    rng = np.random.default_rng(42)
    seen = set()
    for _ in range(1000):
        p16 = rng.choice([0.0, 0.25, 0.3, 0.45])
        bound = (1 - p16) / 7
        p15, p2 = rng.uniform(0, bound, 2)
        if p15 + p2 > bound:
            p15, p2 = bound - p15, bound - p2
        w = 1 - 2 * p16
        R = family_correlations(FamilyPoint.from_probs(p15, p2, p16))
        assert R[6] == pytest.approx(1 - 8 * (p2 + p15), abs=1e-12)
        assert R[7] == pytest.approx(w - 14 * p15, abs=1e-12)
        assert R[14] == pytest.approx(w - 8 * p2 - 6 * p15, abs=1e-12)
        case = (bool(R[6] >= 0), bool(R[7] >= 0), bool(R[14] >= 0))
        seen.add(case)
        assert criterion_II(R).margin == pytest.approx(CRITERION_II_CASES[case](p15, p2, w), abs=1e-12)
    assert {(True, True, True), (True, True, False), (True, False, True)} <= seen


def test_r1_tilde_prime_matches_criterion_III():
    R = family_correlations(FamilyPoint(0.0, 0.75, 9.0))
    assert r1_tilde_prime(R) == pytest.approx(criterion_III(R).detail["r1_tilde_prime"], rel=1e-9)


def test_matched_witness_bounds_on_werner():
    R = correlations(werner_state(0.4))
    assert l_min_bounds(R)["single_sector"] == pytest.approx(1 / (5 * 0.4))
    assert criterion_x(R, 0.0).margin == pytest.approx(1 - 5 * 0.4)
    with pytest.raises(ValidationError):
        criterion_x(R, 1.0)


def test_evaluate_verdicts():
    assert evaluate(werner_state(0.3)).verdict == VERDICT_ENTANGLED
    assert evaluate(werner_state(0.19)).verdict == VERDICT_PASSES
    assert evaluate(uniform_state()).verdict == VERDICT_PASSES
    report = evaluate(asymmetric_gap_correlations())
    assert report.verdict == VERDICT_ENTANGLED
    assert not report.II.satisfied
    doc = report.to_dict()
    assert set(doc) == {"I", "Iprime", "II", "III", "IV", "verdict"}


def test_tau_config_from_config():
    cfg = TauConfig.from_config({"criteria": {"tau_points": 500, "m9_normalization": "both"},
                                 "tolerances": {"product": "1e-13"}})
    assert cfg.points == 500
    assert cfg.m9_normalization == "both"
    assert cfg.product_tol == pytest.approx(1e-13)
    assert TauConfig.from_config({}) == TauConfig()
