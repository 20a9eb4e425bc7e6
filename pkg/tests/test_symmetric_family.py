import numpy as np
import pytest

from src.criteria import criterion_I, criterion_II
from src.errors import FamilyRegimeError, NegativeProbabilityError, ValidationError
from src.reference import landmark_references
from src.symmetric_family import (CSV_HEADER, V_B, V_G, FamilyPoint, boundary, boundary_rows, cd_curve,
                                  eta_of_K, family_correlations, family_K, tangency_curves, landmarks, layout,
                                  mirror_vertex, point_C, point_D_first_layout, quartic_alpha,
                                  quartic_coefficients, quartic_residual, quartic_roots, segment_lines, to_state)


def test_family_point_coordinates():
    pt = FamilyPoint.from_probs(0.04, 0.01, 0.1)
    assert pt.v == pytest.approx(0.8)
    assert pt.alpha == pytest.approx(0.8 / 0.05)
    assert pt.p15 == pytest.approx(0.04)
    assert pt.p2 == pytest.approx(0.01)
    assert pt.p1 == pytest.approx(1 - 0.1 - 7 * 0.05)
    assert to_state(pt).p.sum() == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        FamilyPoint(0.5, 0.5, 8.0)
    with pytest.raises(ValidationError):
        FamilyPoint(0.0, 1.5, 8.0)
    with pytest.raises(ValidationError):
        FamilyPoint.from_probs(0.0, 0.0)


def test_unphysical_point_reports_p1():
    pt = FamilyPoint(0.0, 0.5, 6.0)
    with pytest.raises(NegativeProbabilityError) as info:
        to_state(pt)
    assert info.value.index == 1
    # correlations are still defined outside the state set
    assert family_correlations(pt).shape == (15,)


def test_family_K_is_correlation_ratio():
    rng = np.random.default_rng(20)
    for _ in range(20):
        pt = FamilyPoint(0.0, rng.uniform(0.05, 0.95), rng.uniform(8.5, 12.0))
        R = family_correlations(pt)
        assert pt.K == pytest.approx(-R[7] / R[14], rel=1e-10)
        assert family_K(pt.v, pt.alpha) == pytest.approx(pt.K)


def test_quartic_coefficients_are_perfect_squares_on_criterion_I_lines():
    np.testing.assert_allclose(quartic_coefficients(9.0), [256, -320, 68, 20, 1])
    np.testing.assert_allclose(quartic_coefficients(5.0), [256, -704, 644, -220, 25])
    np.testing.assert_allclose(quartic_coefficients(9.0), np.polymul([16, -10, -1], [16, -10, -1]))
    np.testing.assert_allclose(quartic_coefficients(5.0), np.polymul([16, -22, 5], [16, -22, 5]))


def test_quartic_mirror_symmetry():
    rng = np.random.default_rng(21)
    for v, alpha in rng.uniform([0, 4], [1, 10], size=(20, 2)):
        assert quartic_residual(1 - v, 14 - alpha) == pytest.approx(quartic_residual(v, alpha), abs=1e-8)


def test_quartic_double_roots():
    assert quartic_roots(9.0) == pytest.approx([V_B], abs=1e-9)
    assert quartic_roots(5.0) == pytest.approx([V_G], abs=1e-9)
    with pytest.raises(ValidationError):
        quartic_roots(np.inf)


def test_quartic_alpha_contains_line_AB():
    assert min(quartic_alpha(V_B), key=lambda a: abs(a - 9)) == pytest.approx(9.0, abs=1e-6)
    for v in (0.76, 0.8):
        for alpha in quartic_alpha(v):
            assert quartic_residual(v, alpha) == pytest.approx(0.0, abs=1e-8)


def test_layout_regimes():
    assert layout(0.0) == "first"
    assert layout(2 / 9) == "second"
    assert layout(0.3) == "second"
    for p16 in (0.1, 0.5, 0.7):
        with pytest.raises(FamilyRegimeError):
            layout(p16)


def test_cd_curve_ends_at_K_5():
    assert cd_curve(5.0, p16=0.0) == pytest.approx((10 / 11, 80 / 11), abs=1e-6)
    assert cd_curve(5.0, p16=0.3) == pytest.approx((1.0, 22 / 3), abs=1e-6)


def test_point_C_and_D():
    v, alpha, k = point_C(0.0)
    ref, tol = landmark_references(0.0)["C"]
    assert v == pytest.approx(ref["v"], abs=tol)
    assert alpha == pytest.approx(ref["alpha"], abs=tol)
    assert k == pytest.approx(ref["K"], abs=tol)
    assert point_C(0.3)[:2] == pytest.approx((v, alpha))
    _, alpha_d, k_d = point_D_first_layout()
    assert alpha_d == pytest.approx(8.0, abs=1e-9)
    assert k < k_d < 5.0


@pytest.mark.parametrize("p16", [0.0, 0.3])
def test_landmarks_match_reference(p16):
    marks = landmarks(p16)
    for label, (ref, tol) in landmark_references(p16).items():
        assert marks[label].point.v == pytest.approx(ref["v"], abs=tol), label
        assert marks[label].point.alpha == pytest.approx(ref["alpha"], abs=tol), label
        if "p2" in ref:
            assert marks[label].point.p2 == pytest.approx(ref["p2"], abs=1e-9), label


def test_second_layout_mirror_pairs():
    marks = landmarks(0.3)
    for a, b in (("C", "H"), ("D", "I"), ("B", "G")):
        v, alpha = mirror_vertex(marks[a].point.v, marks[a].point.alpha)
        assert marks[b].point.v == pytest.approx(v, abs=1e-9)
        assert marks[b].point.alpha == pytest.approx(alpha, abs=1e-9)
    assert marks["I"].point.p2 == pytest.approx(0.06)
    assert marks["J"].point.p2 == pytest.approx(0.05)


def test_criteria_tight_at_corners():
    marks = landmarks(0.3)
    assert criterion_I(family_correlations(marks["A"].point)).margin == pytest.approx(0.0, abs=1e-12)
    assert criterion_II(family_correlations(marks["A"].point)).margin == pytest.approx(0.0, abs=1e-12)
    assert criterion_II(family_correlations(marks["E"].point)).margin == pytest.approx(0.0, abs=1e-12)
    assert criterion_I(family_correlations(marks["F"].point)).margin == pytest.approx(0.0, abs=1e-12)


def test_eta_vanishes_at_point_C():
    _, _, k_c = point_C(0.3)
    assert eta_of_K(k_c, p16=0.3).eta == pytest.approx(0.0, abs=1e-6)
    beyond = eta_of_K(2.0, p16=0.3)
    assert not beyond.negative
    assert beyond.eta >= 0
    mirrored = eta_of_K(2.0, p16=0.3, mirror=True)
    assert mirrored.eta == pytest.approx(beyond.eta, abs=1e-9)


@pytest.mark.parametrize("p16,labels", [
    (0.0, ["AB", "BC", "CDE", "EF", "FG", "GH", "AH"]),
    (0.3, ["AB", "BC", "CD", "DE", "EF", "FG", "GH", "HI", "IJ", "AJ"]),
])
def test_boundary_is_closed(p16, labels):
    segments = boundary(p16, n=10)
    assert [s.label for s in segments] == labels
    for prev, nxt in zip(segments, segments[1:] + segments[:1]):
        np.testing.assert_allclose(prev.coords()[-1], nxt.coords()[0], atol=1e-4)
    assert all(len(s.points) == 10 for s in segments)


def test_boundary_criteria_labels():
    criteria = {s.label: s.criterion for s in boundary(0.0, n=4)}
    assert criteria == {"AB": "I", "BC": "III", "CDE": "IV", "EF": "II", "FG": "physical", "GH": "II", "AH": "II"}
    for pt in next(s for s in boundary(0.0, n=4) if s.label == "FG").points:
        assert pt.p1 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValidationError):
        boundary(0.3, n=1)


def test_boundary_rows():
    rows = boundary_rows(boundary(0.3, n=3))
    assert len(rows) == 30
    assert all(len(row) == len(CSV_HEADER) for row in rows)
    assert rows[0][:2] == ["AB", "I"]


def test_criterion_III_and_IV_curves_touch_at_C():
    curves = tangency_curves(n=30)
    assert len(curves["criterion_III"]) == 30
    assert len(curves["criterion_IV"]) == 30
    tangency = curves["tangency"]
    assert tangency["difference"] <= 1e-2 * max(1.0, abs(tangency["slope_III"]))


def test_segment_lines_cover_both_layouts():
    lines = segment_lines()
    labels = {s.label for s in boundary(0.3, n=2)} | {s.label for s in boundary(0.0, n=2)}
    straight = {label for label in labels if label not in ("BC", "CD", "CDE", "HI")}
    assert straight - {"AJ"} <= set(lines)
    assert lines["AB"]["criterion"] == "I"
    assert lines["physical"]["criterion"] == "physical"


@pytest.mark.parametrize("label,p16,v,alpha,signs", [
    ("DE", 0.0, 1.0, 7.5, (True, False, True)),
    ("IJ", 0.0, 0.0, 7.5, (True, True, False)),
    ("GH", 0.0, 0.1, 7.2, (False, True, False)),
    ("EF", 0.0, 0.9, 7.2, (False, False, True)),
    ("EF", 0.3, 0.9, 5.4, (True, False, False)),
])
def test_segment_lines_sign_cases(label, p16, v, alpha, signs):
    R = family_correlations(FamilyPoint(p16, v, alpha))
    assert (R[6] >= 0, R[7] >= 0, R[14] >= 0) == signs
    assert criterion_II(R).margin == pytest.approx(0.0, abs=1e-12)
    assert label in segment_lines()
