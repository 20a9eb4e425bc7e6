"""
Tripartite-separability criteria for GHZ-diagonal states

Every criterion reports a signed margin: nonnegative when the state passes,
negative by the depth of the violation otherwise. Criteria I and I' are
stated on density-matrix entries, the rest on the correlation vector.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError, ValidationError
from .ghz_core import (DIM, GhzDiagonalState, as_correlations, density_matrix_from_probs, probs_from_correlations,
                       t_from_r, werner_state)
from .witness_engine import GAMMA, g_tilde_rows

logger = logging.getLogger("ghzwl.criteria")

VERDICT_ENTANGLED = "detected-entangled"
VERDICT_PASSES = "passes-C2"

# Antidiagonal entries (i, 17-i) read by criterion I, 1-based
CRITERION_I_CORNERS = ((1, 16), (4, 13), (5, 12), (8, 9))
EVEN_BLOCK = (1, 4, 6, 7)
ODD_BLOCK = (2, 3, 5, 8)
SCAN_RESCORE_ROWS = 25


@dataclass(frozen=True)
class TauConfig:
    points: int = 10000
    s_min: float = 1e-6
    xatol: float = 1e-10
    scan_points: int = 2000
    m9_normalization: Any = "auto"
    product_tol: float = 1e-14
    applicability_tol: float = 1e-12

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "TauConfig":
        section = config.get("criteria", {})
        tolerances = config.get("tolerances", {})
        return cls(
            points=int(section.get("tau_points", cls.points)),
            s_min=float(section.get("tau_s_min", cls.s_min)),
            xatol=float(section.get("tau_xatol", cls.xatol)),
            scan_points=int(section.get("r2_scan_points", cls.scan_points)),
            m9_normalization=section.get("m9_normalization", cls.m9_normalization),
            product_tol=float(tolerances.get("product", cls.product_tol)),
            applicability_tol=float(tolerances.get("applicability", cls.applicability_tol)),
        )


@dataclass
class CriterionResult:
    applicable: bool
    margin: float
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return (not self.applicable) or self.margin >= 0

    def to_dict(self) -> Dict[str, Any]:
        out = {"applicable": self.applicable, "satisfied": self.satisfied,
               "margin": self.margin if self.applicable else None}
        out.update(self.detail)
        return out


@dataclass
class CriterionReport:
    I: CriterionResult
    Iprime: CriterionResult
    II: CriterionResult
    III: CriterionResult
    IV: CriterionResult

    @property
    def verdict(self) -> str:
        results = (self.I, self.Iprime, self.II, self.III, self.IV)
        if any(r.applicable and r.margin < 0 for r in results):
            return VERDICT_ENTANGLED
        return VERDICT_PASSES

    def to_dict(self) -> Dict[str, Any]:
        return {"I": self.I.to_dict(), "Iprime": self.Iprime.to_dict(), "II": self.II.to_dict(),
                "III": self.III.to_dict(), "IV": self.IV.to_dict(), "verdict": self.verdict}


def _r1_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    # rows: (n, 4) = (T8, T10, T12, T14)
    t = rows @ GAMMA
    corner = np.max(np.abs(t), axis=1)
    a, b, c, d = rows.T
    prod = a * b * c * d
    q = np.stack([b * c * d, a * c * d, a * b * d, a * b * c], axis=1) @ GAMMA
    interior = (prod > tol) & (np.prod(q, axis=1) >= 0)
    safe = np.where(interior, prod, 1.0)
    value = (a * b + c * d) * (a * c + b * d) * (a * d + b * c) / safe
    return np.where(interior, np.sqrt(np.clip(value, 0.0, None)), corner)


def r1_tilde(T: Sequence[float], tol: float = 1e-14) -> float:
    """
    Largest sum_i K_i T_i / g1 over the (K_8, K_10, K_12, K_14) sector

    Args:
        T: T vector T_0..T_15
        tol: Products at or below this count as nonpositive
    """
    T = np.asarray(T, dtype=float)
    if T.shape != (DIM,):
        raise ValidationError(f"Expected 16 T components, got {T.size}")
    return float(_r1_rows(T[[8, 10, 12, 14]][None, :], tol)[0])


def r1_tilde_branch(T: Sequence[float], tol: float = 1e-14) -> str:
    """Which branch r1_tilde takes: "interior" or "corner" """
    T = np.asarray(T, dtype=float)
    a, b, c, d = T[[8, 10, 12, 14]]
    prod = a * b * c * d
    if prod <= tol:
        return "corner"
    q = np.array([b * c * d, a * c * d, a * b * d, a * b * c]) @ GAMMA
    return "interior" if np.prod(q) >= 0 else "corner"


def r2_tilde(T: Sequence[float]) -> float:
    T = np.asarray(T, dtype=float)
    return float(abs(T[9]) + abs(T[15]))


def _rho_from(source) -> np.ndarray:
    probs = source.p if isinstance(source, GhzDiagonalState) else probs_from_correlations(as_correlations(source))
    return density_matrix_from_probs(probs)


def _diagonal_half_min(rho: np.ndarray) -> float:
    even = sum(rho[j - 1, j - 1].real for j in EVEN_BLOCK)
    odd = sum(rho[j - 1, j - 1].real for j in ODD_BLOCK)
    return 0.5 * min(even, odd)


def criterion_I(state, tol: float = 1e-14) -> CriterionResult:
    """
    Criterion I on density-matrix entries

    Args:
        state: GhzDiagonalState or a correlation vector
    """
    rho = _rho_from(state)
    corners = max(abs(rho[i - 1, j - 1]) for i, j in CRITERION_I_CORNERS)
    margin = float(_diagonal_half_min(rho) - corners)

    R = as_correlations(state)
    T = t_from_r(R)
    detail: Dict[str, Any] = {}
    if r1_tilde_branch(T, tol) == "corner":
        slack = 1 - abs(R[6]) - r1_tilde(T, tol)
        if abs(slack / 8 - margin) > 1e-12:
            raise DomainError(f"Criterion I forms disagree: {margin} vs {slack / 8}")
        detail["correlation_slack"] = float(slack)
    return CriterionResult(True, margin, detail)


def criterion_I_prime(state) -> CriterionResult:
    """Criterion I with every antidiagonal entry in the maximum"""
    rho = _rho_from(state)
    corners = max(abs(rho[i - 1, DIM - i]) for i in range(1, DIM + 1))
    half_min = _diagonal_half_min(rho)
    quarter = 0.25 * min(sum(rho[j - 1, j - 1].real for j in EVEN_BLOCK + tuple(DIM + 1 - k for k in EVEN_BLOCK)),
                         sum(rho[j - 1, j - 1].real for j in ODD_BLOCK + tuple(DIM + 1 - k for k in ODD_BLOCK)))
    bound = max(half_min, quarter)
    return CriterionResult(True, float(bound - corners), {"quarter_sum_bound": float(quarter)})


def criterion_II(R: Sequence[float]) -> CriterionResult:
    R = as_correlations(R)
    return CriterionResult(True, float(1 - (abs(R[6]) + abs(R[7]) + abs(R[14]))))


def criterion_x(R: Sequence[float], x: float, tol: float = 1e-14) -> CriterionResult:
    """|R7| + R1~ + x R2~ <= 1 for x in [0, 1); x = 0 is the plain matched-witness bound"""
    if not 0 <= x < 1:
        raise ValidationError(f"x must lie in [0, 1), got {x}")
    R = as_correlations(R)
    T = t_from_r(R)
    return CriterionResult(True, float(1 - abs(R[6]) - r1_tilde(T, tol) - x * r2_tilde(T)))


def l_min_bounds(R: Sequence[float]) -> Dict[str, float]:
    """
    Closed-form matched-witness values of L

    "single_sector" uses the largest |t| of each sector, "equal_sectors" the
    M_9 = 0 witness family. Infinite when the denominator vanishes.
    """
    R = as_correlations(R)
    T = t_from_r(R)
    r1 = float(np.max(np.abs(T[[8, 10, 12, 14]] @ GAMMA)))
    r2 = float(np.max(np.abs(T[[9, 11, 13, 15]] @ GAMMA)))

    def inv(x: float) -> float:
        return 1 / x if x > 0 else float("inf")

    return {"single_sector": inv(abs(R[6]) + max(r1, r2)),
            "equal_sectors": inv(abs(R[6]) + abs(R[7]) + abs(R[14]))}


def r1_tilde_prime(R: Sequence[float], tol: float = 1e-14) -> float:
    """r1_tilde evaluated on T' = (R8, S/4, S/4, -R15) with S = R8 + ... + R15"""
    R = as_correlations(R)
    S = R[7:15].sum()
    T = np.zeros(DIM)
    T[[8, 10, 12, 14]] = R[7], S / 4, S / 4, -R[14]
    return r1_tilde(T, tol)


def criterion_III(R: Sequence[float], tol: float = 1e-12) -> CriterionResult:
    R = as_correlations(R)
    r8, r15 = R[7], R[14]
    S = R[7:15].sum()
    applicable = bool(r8 * r15 < -tol and abs(8 * r8 * r15) >= abs(S * (r8 + r15)))
    if not applicable:
        return CriterionResult(False, float("nan"))
    root = np.sqrt(max(0.0, 1 - S ** 2 / (16 * r8 * r15)))
    rhs = abs(r8 - r15) * root
    return CriterionResult(True, float(1 - abs(R[6]) - rhs), {"r1_tilde_prime": float(rhs)})


def t_abs(s):
    """
    |t| as a function of s on (0, 1]

    Written as (2-s)(4/(w+u) - 1) with u = 2-s and w = sqrt((1-s)(4-s^2)),
    which has no cancellation as s approaches 0.
    """
    s = np.asarray(s, dtype=float)
    u = 2 - s
    w = np.sqrt(np.clip((1 - s) * (4 - s ** 2), 0.0, None))
    return u * (4 / (w + u) - 1)


def _tau_ratio(s, K: float, offset: float):
    t = t_abs(s)
    return (s * (1 - K) + t * (1 + K) + K - 1 + offset) / (2 - s + t)


def tau(K: float, offset: float = 6.0, cfg: Optional[TauConfig] = None) -> float:
    """
    Maximum over s of the criterion IV ratio

    offset is -(R9 + ... + R14)/R15, equal to 6 on the symmetric family.

    Raises:
        DomainError: The scan finds no finite value
    """
    cfg = cfg or TauConfig()
    if not np.isfinite(K):
        raise DomainError(f"tau needs a finite K, got {K}")
    s = np.linspace(cfg.s_min, 1.0, cfg.points)
    values = _tau_ratio(s, K, offset)
    finite = np.isfinite(values)
    if not np.any(finite):
        raise DomainError(f"No finite tau candidate for K = {K}")
    values = np.where(finite, values, -np.inf)
    i = int(np.argmax(values))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]
    best = float(values[i])
    if hi > lo:
        res = minimize_scalar(lambda x: -_tau_ratio(x, K, offset), bounds=(lo, hi), method="bounded",
                              options={"xatol": cfg.xatol})
        if res.success and -res.fun > best:
            best = float(-res.fun)
    return best


def _constraint_residual(a, b):
    # g1 of the (M8, M9..M14, M15) = (a, -1, b) witness minus |M7|
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    rows = np.stack([a + 1, np.full(a.shape, -2.0), np.full(a.shape, -2.0), -1 - b], axis=-1)
    g = g_tilde_rows(rows.reshape(-1, 4)).reshape(a.shape)
    return g - np.maximum(np.abs(a - 1), np.abs(b - 1))


def _normalizations(R: np.ndarray, setting) -> list:
    if setting in ("auto", None):
        return [-1.0 if R[14] >= 0 else 1.0]
    if setting == "both":
        return [-1.0, 1.0]
    value = float(setting)
    if value not in (-1.0, 1.0):
        raise ValidationError(f"m9_normalization must be -1, 1, auto or both, got {setting!r}")
    return [value]


def _ratio(a: float, b: float, R: np.ndarray, signs: list) -> float:
    den = max(abs(a - 1), abs(b - 1))
    if den <= 0:
        return -np.inf
    base = (a * R[7] + b * R[14] - R[8:14].sum()) / den
    return max(-sign * base for sign in signs)


def _route_a_at(b: float, R: np.ndarray, signs: list, s_grid: np.ndarray) -> float:
    # Best objective over the constraint roots at fixed M15 = b
    a_grid = 2 * (s_grid - 1) - b
    resid = _constraint_residual(a_grid, b)
    roots = list(a_grid[np.abs(resid) < 1e-12])
    crossing = np.flatnonzero(resid[:-1] * resid[1:] < 0)
    for k in crossing:
        roots.append(brentq(lambda a: float(_constraint_residual(a, b)), a_grid[k], a_grid[k + 1], xtol=1e-14))
    return max((_ratio(a, b, R, signs) for a in roots), default=-np.inf)


def _route_a_ray(R: np.ndarray, signs: list) -> float:
    # Limits M15 -> +-inf along M8 = -M15, where g1 = |M7| holds for all |M15| >= 3
    edge = R[14] - R[7]
    return max(-sign * direction * edge for sign in signs for direction in (1.0, -1.0))


def r_double_prime_scan(R: Sequence[float], cfg: Optional[TauConfig] = None) -> float:
    """
    Criterion IV quantity by a direct search over M15

    M9..M14 are fixed by the normalization, M8 is solved from g1 = |M7| =
    max(|M8 + M9|, |M9 + M15|) and the ratio sum_i M_i R_i / |M7| is maximised
    along the resulting one-parameter witness family. The ends M15 -> +-inf
    of the family enter as limits.
    """
    cfg = cfg or TauConfig()
    R = as_correlations(R)
    signs = _normalizations(R, cfg.m9_normalization)
    s_grid = np.linspace(0.0, 1.0, 201)
    b_grid = np.linspace(-8.0, 8.0, cfg.scan_points)

    B, Sg = np.meshgrid(b_grid, s_grid, indexing="ij")
    A = 2 * (Sg - 1) - B
    resid = _constraint_residual(A, B)
    den = np.maximum(np.abs(A - 1), np.abs(B - 1))
    base = (A * R[7] + B * R[14] - R[8:14].sum()) / den
    hit = np.zeros_like(resid, dtype=bool)
    hit[:, :-1] |= resid[:, :-1] * resid[:, 1:] <= 0
    hit |= np.abs(resid) < 1e-12
    if not np.any(hit):
        raise DomainError("Witness constraint has no solution on the M15 scan range")
    best_grid = np.max([np.where(hit, -sign * base, -np.inf) for sign in signs], axis=0)
    # grid values use unrefined roots; rescore the leading rows exactly
    leading = np.argsort(np.max(best_grid, axis=1))[::-1][:SCAN_RESCORE_ROWS]
    exact = [_route_a_at(b_grid[k], R, signs, s_grid) for k in leading]
    i = int(leading[int(np.argmax(exact))])

    best = max(exact)
    lo, hi = b_grid[max(i - 1, 0)], b_grid[min(i + 1, b_grid.size - 1)]
    res = minimize_scalar(lambda b: -_route_a_at(b, R, signs, s_grid), bounds=(lo, hi), method="bounded",
                          options={"xatol": cfg.xatol})
    if np.isfinite(res.fun):
        best = max(best, float(-res.fun))
    best = max(best, _route_a_ray(R, signs))
    if not np.isfinite(best):
        raise DomainError("Witness constraint roots could not be refined")
    return float(best)


def r_double_prime_tau(R: Sequence[float], cfg: Optional[TauConfig] = None, tol: float = 1e-12) -> float:
    """
    Criterion IV quantity as |R15| tau(-R8/R15) with the generalised offset

    The witness family continues past s = 1 along M8 = -M15, whose supremum
    1 + K takes over from tau when K + 1 exceeds the offset.
    """
    R = as_correlations(R)
    r15 = R[14]
    if abs(r15) <= tol:
        raise DomainError("R15 = 0: the tau route is undefined")
    K = -R[7] / r15
    offset = -R[8:14].sum() / r15
    return float(abs(r15) * max(tau(K, offset, cfg), 1 + K))


@dataclass(frozen=True)
class RDoublePrime:
    value: float
    scan: float
    tau_route: Optional[float]
    degenerate: bool

    @property
    def agreement(self) -> Optional[float]:
        return None if self.tau_route is None else abs(self.scan - self.tau_route)


def r_double_prime(R: Sequence[float], cfg: Optional[TauConfig] = None) -> RDoublePrime:
    """
    Criterion IV quantity by both routes

    The scan value is returned; the tau route is absent (degenerate) when R15 = 0.
    """
    cfg = cfg or TauConfig()
    R = as_correlations(R)
    scan = r_double_prime_scan(R, cfg)
    if abs(R[14]) <= cfg.applicability_tol:
        logger.warning("R15 vanishes; criterion IV quantity from the scan route only")
        return RDoublePrime(value=scan, scan=scan, tau_route=None, degenerate=True)
    via_tau = r_double_prime_tau(R, cfg, cfg.applicability_tol)
    if abs(via_tau - scan) > 1e-6:
        logger.warning(f"Criterion IV routes differ: scan {scan:.9f} vs tau {via_tau:.9f}")
    return RDoublePrime(value=scan, scan=scan, tau_route=via_tau, degenerate=False)


def criterion_IV(R: Sequence[float], cfg: Optional[TauConfig] = None, cross_check: bool = False) -> CriterionResult:
    """
    |R7| + R'' <= 1

    Uses the tau route; cross_check also runs the direct scan and reports both.
    With R15 = 0 the tau route is undefined and the scan value is used, flagged
    as degenerate.
    """
    cfg = cfg or TauConfig()
    R = as_correlations(R)
    if abs(R[14]) <= cfg.applicability_tol:
        value = r_double_prime(R, cfg).value
        detail = {"r_double_prime": value, "r_double_prime_scan": value, "degenerate": True}
        return CriterionResult(True, float(1 - abs(R[6]) - value), detail)
    value = r_double_prime_tau(R, cfg, cfg.applicability_tol)
    detail: Dict[str, Any] = {"r_double_prime": value}
    if cross_check:
        detail["r_double_prime_scan"] = r_double_prime_scan(R, cfg)
    return CriterionResult(True, float(1 - abs(R[6]) - value), detail)


def evaluate(state, cfg: Optional[TauConfig] = None, cross_check: bool = False) -> CriterionReport:
    """
    Run criteria I, I', II, III and IV

    Args:
        state: GhzDiagonalState, or a correlation vector for points that are
            only given through R
    """
    cfg = cfg or TauConfig()
    R = as_correlations(state)
    report = CriterionReport(
        I=criterion_I(state, cfg.product_tol),
        Iprime=criterion_I_prime(state),
        II=criterion_II(R),
        III=criterion_III(R, cfg.applicability_tol),
        IV=criterion_IV(R, cfg, cross_check),
    )
    logger.debug(f"Criteria verdict {report.verdict}: {report.to_dict()}")
    return report


def werner_threshold() -> float:
    """Werner weight at which the criterion I margin vanishes"""
    return float(brentq(lambda p: criterion_I(werner_state(p)).margin, 0.0, 1.0, xtol=1e-15))
