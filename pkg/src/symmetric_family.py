"""
Highly symmetric GHZ-diagonal family

States with p2 = ... = p8 and p9 = ... = p15, written through
w = 1 - 2 p16, alpha = w/(p2 + p15) and v = p15/(p2 + p15). Criteria I and II
reduce to straight lines in the (v, alpha) plane, criterion III to a quartic
in v and criterion IV to a curve parametrised by K = -R8/R15. Two boundary
layouts are supported: p16 = 0, and p16 in [2/9, 1/2) where every boundary
point keeps R7 >= 0.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .criteria import TauConfig, criterion_III, tau
from .errors import DomainError, FamilyRegimeError, NegativeProbabilityError, ValidationError
from .ghz_core import DIM, SIGN_TABLE, GhzDiagonalState

logger = logging.getLogger("ghzwl.symmetric_family")

# Lower end of the p16 range with the ten-landmark layout
P16_SECOND_LAYOUT = 2 / 9
V_B = (5 + np.sqrt(41)) / 16
V_G = (11 - np.sqrt(41)) / 16
ASSEMBLY_GAP = 1e-4


@dataclass(frozen=True)
class FamilyPoint:
    p16: float
    v: float
    alpha: float

    def __post_init__(self):
        if not 0 <= self.p16 < 0.5:
            raise ValidationError(f"p16 must be in [0, 1/2), got {self.p16}")
        if not -1e-12 <= self.v <= 1 + 1e-12:
            raise ValidationError(f"v must be in [0, 1], got {self.v}")
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def from_probs(cls, p15: float, p2: float, p16: float = 0.0) -> "FamilyPoint":
        if p15 < 0 or p2 < 0 or p15 + p2 <= 0:
            raise ValidationError(f"Need p15, p2 >= 0 with a positive sum, got ({p15}, {p2})")
        total = p15 + p2
        return cls(p16=p16, v=p15 / total, alpha=(1 - 2 * p16) / total)

    @property
    def w(self) -> float:
        return 1 - 2 * self.p16

    @property
    def p15(self) -> float:
        return self.v * self.w / self.alpha

    @property
    def p2(self) -> float:
        return (1 - self.v) * self.w / self.alpha

    @property
    def p1(self) -> float:
        return 1 - self.p16 - 7 * self.w / self.alpha

    @property
    def K(self) -> float:
        return family_K(self.v, self.alpha)

    def mirror(self) -> "FamilyPoint":
        """(v, alpha) -> (1 - v, 14 - alpha)"""
        return FamilyPoint(self.p16, min(max(1 - self.v, 0.0), 1.0), 14 - self.alpha)

    def to_dict(self) -> Dict[str, float]:
        return {"v": self.v, "alpha": self.alpha, "p15": self.p15, "p2": self.p2, "p1": self.p1, "p16": self.p16}


def family_probs(pt: FamilyPoint) -> np.ndarray:
    """Raw probability vector, p1 unchecked"""
    p = np.empty(DIM)
    p[0] = pt.p1
    p[1:8] = pt.p2
    p[8:15] = pt.p15
    p[15] = pt.p16
    return p


def family_correlations(pt: FamilyPoint) -> np.ndarray:
    """R1..R15 of the family point, valid even where p1 < 0"""
    return family_probs(pt) @ SIGN_TABLE


def to_state(pt: FamilyPoint, tol: float = 1e-12) -> GhzDiagonalState:
    """
    GHZ-diagonal state of a family point

    Raises:
        NegativeProbabilityError: p1 < -tol
    """
    if pt.p1 < -tol:
        raise NegativeProbabilityError(1, pt.p1)
    return GhzDiagonalState.from_probs(family_probs(pt), tol=tol)


def family_K(v: float, alpha: float) -> float:
    """-K8/K15 on the family, equal to -R8/R15"""
    return (14 * v - alpha) / (alpha - 8 + 2 * v)


def quartic_coefficients(alpha: float) -> np.ndarray:
    """Coefficients a4..a0 of the criterion III quartic in v"""
    return np.array([
        256.0,
        96 * alpha - 1184,
        1364 - 144 * alpha,
        60 * alpha - 520,
        (alpha - 10) ** 2,
    ])


def quartic_residual(v, alpha):
    return np.polyval(quartic_coefficients(alpha), v)


def quartic_roots(alpha: float, tol: float = 1e-10, double_tol: float = 1e-8) -> List[float]:
    """
    Real roots of the criterion III quartic in [0, 1]

    Companion-matrix roots are polished with Newton steps. A candidate where
    the derivative also vanishes is polished on the derivative, since Newton
    on the quartic itself stalls at a double root.
    """
    if not np.isfinite(alpha):
        raise ValidationError(f"alpha must be finite, got {alpha}")
    coeffs = quartic_coefficients(alpha)
    deriv = np.polyder(coeffs)
    second = np.polyder(deriv)
    roots = []
    for z in np.roots(coeffs):
        if abs(z.imag) > 1e-4:
            continue
        x = float(z.real)
        d_roots = [float(r.real) for r in np.roots(deriv) if abs(r.imag) < 1e-6]
        near = min(d_roots, key=lambda r: abs(r - x)) if d_roots else None
        if near is not None and abs(near - x) < 1e-3 and abs(np.polyval(coeffs, near)) < double_tol:
            x = near
            poly, dpoly = deriv, second
        else:
            poly, dpoly = coeffs, deriv
        for _ in range(50):
            d = np.polyval(dpoly, x)
            if d == 0:
                break
            step = np.polyval(poly, x) / d
            x -= step
            if abs(step) < tol * 1e-3:
                break
        if -tol <= x <= 1 + tol and all(abs(x - r) > 1e-7 for r in roots):
            roots.append(min(max(x, 0.0), 1.0))
    return sorted(roots)


def quartic_alpha(v: float) -> Tuple[float, float]:
    """
    The two alpha roots of the quartic at fixed v

    The quartic is quadratic in alpha: alpha^2 + b alpha + c.

    Raises:
        DomainError: No real alpha for this v
    """
    b = 96 * v ** 3 - 144 * v ** 2 + 60 * v - 20
    c = 256 * v ** 4 - 1184 * v ** 3 + 1364 * v ** 2 - 520 * v + 100
    disc = b * b - 4 * c
    if disc < -1e-12:
        raise DomainError(f"No real criterion III curve at v = {v}")
    root = np.sqrt(max(disc, 0.0))
    return ((-b - root) / 2, (-b + root) / 2)


def cd_curve(K: float, p16: Optional[float] = None, cfg: Optional[TauConfig] = None) -> Tuple[float, float]:
    """
    Criterion IV equality curve on the family

    Args:
        K: -R8/R15 along the curve
        p16: When given, points with R7 < 0 (alpha < 8(1 - 2 p16)) switch to
            the branch where |R7| = 8w/alpha - 1
        cfg: tau settings

    Returns:
        (v, alpha)
    """
    t = tau(K, 6.0, cfg)
    v = 0.5 * (1 + (K + 1) / t)
    alpha = 7 + (7 - K) / t
    if p16 is not None:
        w = 1 - 2 * p16
        if alpha < 8 * w:
            denom = 8 * w * t - 2 * (7 - K)
            if denom <= 0:
                raise DomainError(f"Criterion IV curve has no R7 < 0 point at K = {K}, p16 = {p16}")
            alpha = w * (56 * t - 8 * (7 - K)) / denom
            spread = (2 * alpha - 8 * w) / (w * t)
            v = (spread - alpha + 8) / 2
    return float(v), float(alpha)


def _c_residual(K: float, cfg: Optional[TauConfig]) -> float:
    v, alpha = cd_curve(K, cfg=cfg)
    return float(quartic_residual(v, alpha))


@lru_cache(maxsize=8)
def _point_C(cfg: TauConfig) -> Tuple[float, float, float]:
    ks = np.linspace(0.3, 1.5, 61)
    res = np.array([_c_residual(k, cfg) for k in ks])
    candidates = []
    for i in range(ks.size - 1):
        if res[i] == 0 or res[i] * res[i + 1] < 0:
            candidates.append(brentq(_c_residual, ks[i], ks[i + 1], args=(cfg,), xtol=1e-14))
    for i in range(1, ks.size - 1):
        if abs(res[i]) <= abs(res[i - 1]) and abs(res[i]) <= abs(res[i + 1]):
            opt = minimize_scalar(lambda k: abs(_c_residual(k, cfg)), bounds=(ks[i - 1], ks[i + 1]),
                                  method="bounded", options={"xatol": 1e-13})
            candidates.append(float(opt.x))

    best = None
    for k in candidates:
        v, alpha = cd_curve(k, cfg=cfg)
        if abs(quartic_residual(v, alpha)) > 1e-6:
            continue
        iii = criterion_III(family_correlations(FamilyPoint(0.0, v, alpha)))
        if not iii.applicable:
            continue
        if best is None or abs(iii.margin) < best[0]:
            best = (abs(iii.margin), v, alpha, k)
    if best is None:
        raise DomainError("Criterion III and IV curves do not meet for K in [0.3, 1.5]")
    _, v, alpha, k = best
    logger.debug(f"Point C at K = {k:.9f}: v = {v:.9f}, alpha = {alpha:.9f}")
    return v, alpha, k


def point_C(p16: float = 0.0, cfg: Optional[TauConfig] = None) -> Tuple[float, float, float]:
    """
    Meeting point of the criterion III quartic and the criterion IV curve

    The (v, alpha) coordinates do not depend on p16 as long as R7 >= 0 there.

    Returns:
        (v_C, alpha_C, K_C)

    Raises:
        DomainError: No intersection in the known K range
    """
    v, alpha, k = _point_C(cfg or TauConfig())
    if alpha < 8 * (1 - 2 * p16):
        raise DomainError(f"Point C has R7 < 0 at p16 = {p16}")
    return v, alpha, k


@lru_cache(maxsize=8)
def _k_at_alpha_8(cfg: TauConfig) -> float:
    _, _, k_c = _point_C(cfg)
    return float(brentq(lambda k: (7 - k) - tau(k, 6.0, cfg), k_c, 5.0, xtol=1e-14))


def point_D_first_layout(cfg: Optional[TauConfig] = None) -> Tuple[float, float, float]:
    """Point on the p16 = 0 criterion IV arc where R7 changes sign (alpha = 8)"""
    cfg = cfg or TauConfig()
    k = _k_at_alpha_8(cfg)
    v, alpha = cd_curve(k, cfg=cfg)
    return v, alpha, k


def mirror_vertex(v: float, alpha: float) -> Tuple[float, float]:
    return 1 - v, 14 - alpha


@dataclass
class EtaSolution:
    eta: float
    residual: float
    negative: bool
    r0: float
    r1: float
    r3: float


def normalized_antidiagonal(R: np.ndarray) -> Tuple[float, float, float, float]:
    """
    Antidiagonal correlations scaled by 1 - |R7|

    The sign is chosen so that R15 comes out positive; mirrored arcs carry
    R15 < 0 and share the same scaled values.

    Returns:
        (a, b, u0, sign) with a = R8', b = R15' and u0 = (R8 + 6 R9 + R15)'/4
    """
    scale = 1 - abs(R[6])
    if scale <= 0:
        raise DomainError("1 - |R7| vanishes; no antidiagonal weight to split")
    sign = 1.0 if R[14] >= 0 else -1.0
    a = sign * R[7] / scale
    b = sign * R[14] / scale
    u0 = sign * (R[7] + 6 * R[8] + R[14]) / (4 * scale)
    return float(a), float(b), float(u0), sign


def cd_targets(a: float, b: float, u0: float, eta: float) -> Tuple[float, float, float]:
    """(r0, r1, r3) of the pure criterion-III part after removing eta of the XX(XX+YY) part"""
    scale = 1 - eta
    return (a + eta) / scale, (u0 + eta / 2) / scale, -b / scale


def eta_residual(a: float, b: float, u0: float, eta):
    """
    1 - eta - |a - b + eta| sqrt(1 - u^2/((a + eta) b)) with u = u0 + eta/2

    Zero exactly when the targets from cd_targets satisfy
    (r0 + r3)^2 (r0 r3 + r1^2) = r0 r3. NaN where the root is not real.
    """
    eta = np.asarray(eta, dtype=float)
    u = u0 + eta / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = 1 - u ** 2 / ((a + eta) * b)
        out = 1 - eta - np.abs(a - b + eta) * np.sqrt(arg)
    return np.where(np.isfinite(out), out, np.nan)


def _realizable(a: float, b: float, u0: float, eta: float) -> bool:
    if eta >= 1:
        return False
    r0, _, r3 = cd_targets(a, b, u0, eta)
    return r0 * r3 >= -1e-12 and abs(r0 + r3) <= 1 + 1e-9


def eta_of_K(K: float, p16: float = 0.3, mirror: bool = False, cfg: Optional[TauConfig] = None) -> EtaSolution:
    """
    Weight of the XX(XX+YY) part needed along the criterion IV arc

    Args:
        K: Position on the arc
        p16: Family parameter; only matters where R7 < 0
        mirror: Use the mirrored arc (HI)
        cfg: tau settings

    Returns:
        EtaSolution; negative is set when only a negative root exists,
        which happens below K_C

    Raises:
        DomainError: No realizable root in [-0.5, 1)
    """
    v, alpha = cd_curve(K, p16=p16, cfg=cfg)
    pt = FamilyPoint(p16, min(max(v, 0.0), 1.0), alpha)
    if mirror:
        pt = pt.mirror()
    return eta_from_correlations(family_correlations(pt))


def eta_from_correlations(R: np.ndarray) -> EtaSolution:
    """eta for a point given by its correlations; see eta_of_K"""
    a, b, u0, _ = normalized_antidiagonal(R)

    grid = np.linspace(-0.5, 0.999, 3000)
    values = eta_residual(a, b, u0, grid)
    roots = []
    for i in range(grid.size - 1):
        f0, f1 = values[i], values[i + 1]
        if np.isnan(f0) or np.isnan(f1):
            continue
        if f0 == 0:
            roots.append(float(grid[i]))
        elif f0 * f1 < 0:
            roots.append(float(brentq(lambda x: float(eta_residual(a, b, u0, x)), grid[i], grid[i + 1], xtol=1e-15)))
    # tangential zeros
    for i in range(1, grid.size - 1):
        f = values[i - 1:i + 2]
        if np.any(np.isnan(f)) or not (f[1] >= f[0] and f[1] >= f[2]) or abs(f[1]) > 1e-3:
            continue
        opt = minimize_scalar(lambda x: -float(eta_residual(a, b, u0, x)), bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": 1e-14})
        if abs(opt.fun) < 1e-9:
            roots.append(float(opt.x))

    roots = [r for r in roots if _realizable(a, b, u0, r)]
    if not roots:
        raise DomainError(f"No realizable eta for R8' = {a:.6g}, R15' = {b:.6g}")
    nonneg = [r for r in roots if r >= -1e-9]
    eta = min(nonneg) if nonneg else max(roots)
    r0, r1, r3 = cd_targets(a, b, u0, eta)
    residual = float(eta_residual(a, b, u0, eta))
    if eta < -1e-9:
        logger.warning(f"Negative eta = {eta:.3e}; sufficiency ends at point C")
    return EtaSolution(eta=float(max(eta, 0.0) if eta > -1e-9 else eta), residual=residual,
                       negative=bool(eta < -1e-9), r0=r0, r1=r1, r3=r3)


def segment_lines() -> Dict[str, Dict[str, str]]:
    """Criterion I and II equality lines in (v, alpha) with their sign cases"""
    return {
        "AB": {"criterion": "I", "line": "alpha = 9"},
        "FG": {"criterion": "I", "line": "alpha = 5 (p16 >= 2/9)"},
        "AH": {"criterion": "II", "line": "alpha = 8 + 6v (R8, R15 >= 0)"},
        "DE": {"criterion": "II", "line": "v = 1 (R8 < 0 <= R15)"},
        "EF": {"criterion": "II",
               "line": "alpha = 6v (R7 >= 0 > R8, R15); alpha = 8v(1 - 2 p16) when R7, R8 < 0 <= R15"},
        "GH": {"criterion": "II", "line": "alpha = 8(1 - 2 p16)(1 - v) (R7 < 0, R8 >= 0 > R15)"},
        "IJ": {"criterion": "II", "line": "v = 0 (R8 >= 0 > R15)"},
        "physical": {"criterion": "physical", "line": "alpha = 7 (1 - 2 p16)/(1 - p16), p1 = 0"},
    }


def layout(p16: float) -> str:
    """
    Which boundary layout applies

    Raises:
        FamilyRegimeError: p16 outside {0} and [2/9, 1/2)
    """
    if abs(p16) <= 1e-12:
        return "first"
    if P16_SECOND_LAYOUT - 1e-12 <= p16 < 0.5:
        return "second"
    raise FamilyRegimeError(f"No boundary layout for p16 = {p16}; supported: 0 and [2/9, 1/2)")


@dataclass
class Landmark:
    label: str
    point: FamilyPoint
    K: Optional[float] = None

    def to_dict(self) -> Dict[str, float]:
        row = {"label": self.label}
        row.update(self.point.to_dict())
        if self.K is not None:
            row["K"] = self.K
        return row


def landmarks(p16: float, cfg: Optional[TauConfig] = None) -> Dict[str, Landmark]:
    """
    Corner points of the boundary for this p16

    With p16 = 0 the table holds A..H, F and G sitting on the physical line
    alpha = 7; otherwise A..J.
    """
    cfg = cfg or TauConfig()
    kind = layout(p16)
    v_c, a_c, k_c = point_C(p16, cfg)

    def mark(label, v, alpha, K=None):
        return Landmark(label, FamilyPoint(p16, min(max(v, 0.0), 1.0), alpha), K)

    table = [mark("A", 1 / 6, 9.0), mark("B", V_B, 9.0), mark("C", v_c, a_c, k_c)]
    if kind == "first":
        v_d, a_d, k_d = point_D_first_layout(cfg)
        v_e, a_e = cd_curve(5.0, p16=0.0, cfg=cfg)
        table += [mark("D", v_d, a_d, k_d), mark("E", v_e, a_e, 5.0),
                  mark("F", 7 / 8, 7.0), mark("G", 1 / 8, 7.0), mark("H", 0.0, 8.0)]
    else:
        v_d, a_d = cd_curve(5.0, p16=p16, cfg=cfg)
        table += [mark("D", v_d, a_d, 5.0), mark("E", 1.0, 6.0), mark("F", 5 / 6, 5.0), mark("G", V_G, 5.0),
                  mark("H", *mirror_vertex(v_c, a_c), k_c), mark("I", *mirror_vertex(v_d, a_d), 5.0),
                  mark("J", 0.0, 8.0)]
    return {m.label: m for m in table}


@dataclass
class BoundarySegment:
    label: str
    criterion: str
    points: List[FamilyPoint] = field(default_factory=list)

    def coords(self) -> np.ndarray:
        """(p15, p2) pairs, one row per point"""
        return np.array([[pt.p15, pt.p2] for pt in self.points])

    def vertices(self) -> np.ndarray:
        return np.array([[pt.v, pt.alpha] for pt in self.points])


def _line(p16: float, start: Landmark, end: Landmark, n: int) -> List[FamilyPoint]:
    s, e = start.point, end.point
    return [FamilyPoint(p16, s.v + t * (e.v - s.v), s.alpha + t * (e.alpha - s.alpha)) for t in np.linspace(0, 1, n)]


def _quartic_arc(p16: float, b: Landmark, c: Landmark, n: int) -> List[Tuple[float, float]]:
    v_b, a_b = b.point.v, b.point.alpha
    v_c, a_c = c.point.v, c.point.alpha
    arc = []
    for t in np.linspace(0, 1, n):
        v = v_b + t * (v_c - v_b)
        guess = a_b + t * (a_c - a_b)
        arc.append((v, min(quartic_alpha(v), key=lambda a: abs(a - guess))))
    return arc


def _cd_arc(p16: float, k_start: float, k_end: float, n: int, cfg: TauConfig) -> List[Tuple[float, float]]:
    return [cd_curve(k, p16=p16, cfg=cfg) for k in np.linspace(k_start, k_end, n)]


def _points(p16: float, vertices, mirror: bool = False) -> List[FamilyPoint]:
    out = []
    for v, alpha in vertices:
        if mirror:
            v, alpha = mirror_vertex(v, alpha)
        out.append(FamilyPoint(p16, min(max(v, 0.0), 1.0), alpha))
    return out


def boundary(p16: float, n: int = 50, cfg: Optional[TauConfig] = None) -> List[BoundarySegment]:
    """
    Boundary of the triseparable set in the family, as a closed loop of segments

    Args:
        p16: 0 or a value in [2/9, 1/2)
        n: Points per segment
        cfg: tau settings

    Raises:
        ValidationError: n < 2
        DomainError: Consecutive segments leave a gap above ASSEMBLY_GAP
    """
    if n < 2:
        raise ValidationError(f"Need at least 2 points per segment, got {n}")
    cfg = cfg or TauConfig()
    marks = landmarks(p16, cfg)
    m = marks.__getitem__
    k_c = m("C").K
    bc = _quartic_arc(p16, m("B"), m("C"), n)

    if layout(p16) == "first":
        segments = [
            BoundarySegment("AB", "I", _line(p16, m("A"), m("B"), n)),
            BoundarySegment("BC", "III", _points(p16, bc)),
            BoundarySegment("CDE", "IV", _points(p16, _cd_arc(p16, k_c, 5.0, n, cfg))),
            BoundarySegment("EF", "II", _line(p16, m("E"), m("F"), n)),
            BoundarySegment("FG", "physical", _line(p16, m("F"), m("G"), n)),
            BoundarySegment("GH", "II", _line(p16, m("G"), m("H"), n)),
            BoundarySegment("AH", "II", _line(p16, m("H"), m("A"), n)),
        ]
    else:
        cd = _cd_arc(p16, k_c, 5.0, n, cfg)
        segments = [
            BoundarySegment("AB", "I", _line(p16, m("A"), m("B"), n)),
            BoundarySegment("BC", "III", _points(p16, bc)),
            BoundarySegment("CD", "IV", _points(p16, cd)),
            BoundarySegment("DE", "II", _line(p16, m("D"), m("E"), n)),
            BoundarySegment("EF", "II", _line(p16, m("E"), m("F"), n)),
            BoundarySegment("FG", "I", _line(p16, m("F"), m("G"), n)),
            BoundarySegment("GH", "III", _points(p16, bc, mirror=True)),
            BoundarySegment("HI", "IV", _points(p16, cd, mirror=True)),
            BoundarySegment("IJ", "II", _line(p16, m("I"), m("J"), n)),
            BoundarySegment("AJ", "II", _line(p16, m("J"), m("A"), n)),
        ]

    for prev, nxt in zip(segments, segments[1:] + segments[:1]):
        gap = float(np.max(np.abs(prev.coords()[-1] - nxt.coords()[0])))
        if gap > ASSEMBLY_GAP:
            raise DomainError(f"Segments {prev.label} and {nxt.label} leave a gap of {gap:.3e}")
    logger.debug(f"Assembled {len(segments)} boundary segments for p16 = {p16}")
    return segments


CSV_HEADER = ("segment_label", "criterion", "v", "alpha", "p15", "p2", "p1", "p16")


def boundary_rows(segments: List[BoundarySegment]) -> List[List[str]]:
    rows = []
    for seg in segments:
        for pt in seg.points:
            rows.append([seg.label, seg.criterion] +
                        [f"{x:.9g}" for x in (pt.v, pt.alpha, pt.p15, pt.p2, pt.p1, pt.p16)])
    return rows


def tangency_curves(n: int = 200, cfg: Optional[TauConfig] = None) -> Dict[str, object]:
    """
    Criterion III and IV curves in the (alpha, v) plane around point C

    Returns:
        {"criterion_III": [(alpha, v)...], "criterion_IV": [(alpha, v)...],
         "C": {...}, "tangency": {"slope_III", "slope_IV", "difference"}}
        where the slopes are dv/dalpha at C
    """
    cfg = cfg or TauConfig()
    v_c, a_c, k_c = point_C(0.0, cfg)
    b_mark = Landmark("B", FamilyPoint(0.0, V_B, 9.0))
    beyond = Landmark("C+", FamilyPoint(0.0, min(v_c + 0.02, 1.0), a_c))
    iii = [(a, v) for v, a in _quartic_arc(0.0, b_mark, beyond, n)]
    iv = [(a, v) for v, a in (cd_curve(k, cfg=cfg) for k in np.linspace(max(k_c - 0.3, 0.05), k_c + 0.6, n))]

    h = 1e-5
    a_lo = min(quartic_alpha(v_c - h), key=lambda a: abs(a - a_c))
    a_hi = min(quartic_alpha(v_c + h), key=lambda a: abs(a - a_c))
    slope_iii = 2 * h / (a_hi - a_lo)
    v_lo, al_lo = cd_curve(k_c - h, cfg=cfg)
    v_hi, al_hi = cd_curve(k_c + h, cfg=cfg)
    slope_iv = (v_hi - v_lo) / (al_hi - al_lo)
    return {
        "criterion_III": iii,
        "criterion_IV": iv,
        "C": {"v": v_c, "alpha": a_c, "K": k_c},
        "tangency": {"slope_III": slope_iii, "slope_IV": slope_iv, "difference": abs(slope_iii - slope_iv)},
    }
