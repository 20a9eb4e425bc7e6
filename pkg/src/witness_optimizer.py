"""
Matched-witness search

Minimises L = Lambda / Tr(rho M) over witness coefficients with M_1..M_6 = 0
and |M_7| pinned to Lambda. With S = sum_{i>=8} M_i R_i and Lambda_a the
antidiagonal part of Lambda this reads L = Lambda_a / (Lambda_a |R_7| + S).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .criteria import criterion_I, criterion_II, evaluate, VERDICT_PASSES
from .errors import DomainError, ValidationError
from .ghz_core import DIM, PAULI_LABELS, GhzDiagonalState, as_correlations, werner_state
from .reference import (ASYMMETRIC_GAP_L_ASYMMETRIC, ASYMMETRIC_GAP_L_SYMMETRIC,
                        asymmetric_gap_correlations)
from .symmetric_family import FamilyPoint, to_state
from .utils import thread_count
from .witness_engine import coordinate_ascent, lambda_antidiagonal, lambda_symmetric

logger = logging.getLogger("ghzwl.optimizer")

MODES = ("symmetric", "asymmetric")
SCAN_HEADER = ("p15", "p2", "L_min")


@dataclass(frozen=True)
class OptimizerConfig:
    mode: str = "symmetric"
    multistarts: int = 200
    seed: int = 7
    step_tol: float = 1e-6
    polish_top: int = 5
    scan_multistarts: int = 24
    scan_grid: int = 60
    threads: int = 1
    max_draws: int = 1000

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"Mode must be one of {MODES}, got {self.mode!r}")
        if self.multistarts < 1:
            raise ValidationError(f"Need at least one multistart, got {self.multistarts}")
        if self.step_tol <= 0:
            raise ValidationError(f"step_tol must be positive, got {self.step_tol}")

    @classmethod
    def from_config(cls, config: Dict[str, Any], mode: Optional[str] = None,
                    seed: Optional[int] = None) -> "OptimizerConfig":
        section = config.get("optimizer", {})
        return cls(
            mode=mode or section.get("mode", cls.mode),
            multistarts=int(section.get("multistarts", cls.multistarts)),
            seed=int(section.get("seed", cls.seed) if seed is None else seed),
            step_tol=float(section.get("step_tol", cls.step_tol)),
            polish_top=int(section.get("polish_top", cls.polish_top)),
            scan_multistarts=int(section.get("scan_multistarts", cls.scan_multistarts)),
            scan_grid=int(section.get("scan_grid", cls.scan_grid)),
            threads=thread_count(config),
        )


@dataclass
class OptimizerResult:
    L_min: float
    M: np.ndarray
    mode: str
    seed: int
    starts: int = 0
    rejected_draws: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"L_min": float(self.L_min), "M": [float(m) for m in self.M],
                "mode": self.mode, "seed": self.seed}


class MatchedObjective:
    """
    L as a function of the free witness parameters

    Symmetric mode takes x = (M_8, M_9, M_15) with M_9..M_14 tied together;
    asymmetric mode takes x = (M_8, ..., M_15).
    """

    def __init__(self, R: Sequence[float], mode: str):
        if mode not in MODES:
            raise ValidationError(f"Mode must be one of {MODES}, got {mode!r}")
        self.R = as_correlations(R)
        self.mode = mode
        self.r7 = abs(float(self.R[6]))
        if mode == "symmetric":
            self.weights = np.array([self.R[7], self.R[8:14].sum(), self.R[14]])
        else:
            self.weights = self.R[7:15].copy()

    @property
    def size(self) -> int:
        return self.weights.size

    def expand(self, x: Sequence[float]) -> np.ndarray:
        """Full M_1..M_15 with M_7 = 0"""
        m = np.zeros(len(PAULI_LABELS))
        if self.mode == "symmetric":
            m[7], m[8:14], m[14] = x[0], x[1], x[2]
        else:
            m[7:15] = x
        return m

    def denominator(self, x: Sequence[float]) -> float:
        return float(self.weights @ np.asarray(x, dtype=float))

    def antidiagonal_lambda(self, x: Sequence[float]) -> float:
        m = self.expand(x)
        if self.mode == "symmetric":
            return lambda_symmetric(m)
        return lambda_antidiagonal(m)

    def __call__(self, x: Sequence[float]) -> float:
        s = self.denominator(x)
        if not s > 0:
            return np.inf
        lam = self.antidiagonal_lambda(x)
        return lam / (lam * self.r7 + s)

    def witness(self, x: Sequence[float]) -> np.ndarray:
        """Full coefficients with |M_7| = Lambda and the sign of R_7"""
        m = self.expand(x)
        m[6] = np.copysign(self.antidiagonal_lambda(x), self.R[6])
        return m


def _descend(objective: MatchedObjective, start: np.ndarray, cfg: OptimizerConfig) -> Tuple[np.ndarray, float]:
    x, neg = coordinate_ascent(lambda y: -objective(y), start, 0.25, cfg.step_tol)
    return x, -neg


def _one_start(objective: MatchedObjective, seed_seq: np.random.SeedSequence,
               cfg: OptimizerConfig) -> Tuple[float, np.ndarray, int]:
    rng = np.random.default_rng(seed_seq)
    for draw in range(cfg.max_draws):
        start = rng.uniform(-1.0, 1.0, size=objective.size)
        if objective.denominator(start) > 0:
            x, value = _descend(objective, start, cfg)
            return value, x, draw
    return np.inf, np.zeros(objective.size), cfg.max_draws


def _polish(objective: MatchedObjective, x: np.ndarray, cfg: OptimizerConfig) -> Tuple[np.ndarray, float]:
    best_x, best = x, objective(x)
    for _ in range(2):
        res = minimize(objective, best_x, method="Nelder-Mead",
                       options={"xatol": cfg.step_tol, "fatol": 1e-12, "maxiter": 4000})
        cand_x, cand = _descend(objective, np.asarray(res.x, dtype=float), cfg)
        if not cand < best - 1e-15:
            break
        best_x, best = cand_x, cand
    return best_x, best


def minimize_L(state, cfg: Optional[OptimizerConfig] = None, multistarts: Optional[int] = None) -> OptimizerResult:
    """
    Smallest L found by multistart coordinate descent plus Nelder-Mead polish

    Args:
        state: GhzDiagonalState or a correlation vector
        cfg: Optimizer settings; mode selects the search space
        multistarts: Override cfg.multistarts

    Returns:
        OptimizerResult with the achieving witness (M_7 included)

    Raises:
        DomainError: Every antidiagonal correlation vanishes
    """
    cfg = cfg or OptimizerConfig()
    R = as_correlations(state)
    if np.max(np.abs(R[7:15])) < 1e-14:
        raise DomainError("All antidiagonal correlations vanish; no witness has a positive expectation")
    objective = MatchedObjective(R, cfg.mode)
    n_starts = multistarts or cfg.multistarts
    children = np.random.SeedSequence(cfg.seed).spawn(n_starts)

    logger.debug(f"{cfg.mode} search: {n_starts} starts on {cfg.threads} threads")
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        outcomes = list(pool.map(lambda child: _one_start(objective, child, cfg), children))

    order = sorted(range(n_starts), key=lambda i: (outcomes[i][0], i))
    if not np.isfinite(outcomes[order[0]][0]):
        raise DomainError(f"No start with a positive denominator in {cfg.max_draws} draws")

    best_x, best = outcomes[order[0]][1], outcomes[order[0]][0]
    for i in order[:cfg.polish_top]:
        if not np.isfinite(outcomes[i][0]):
            continue
        x, value = _polish(objective, outcomes[i][1], cfg)
        if value < best:
            best_x, best = x, value

    scale = np.max(np.abs(best_x))
    M = objective.witness(best_x / scale)
    rejected = sum(o[2] for o in outcomes)
    logger.info(f"{cfg.mode} L_min = {best:.6f} ({n_starts} starts, {rejected} rejected draws)")
    return OptimizerResult(L_min=float(best), M=M, mode=cfg.mode, seed=cfg.seed,
                           starts=n_starts, rejected_draws=rejected)


def _triangle_probs(p15: float, p2: float, p16: float) -> np.ndarray:
    p = np.empty(DIM)
    p[0] = 1 - p16 - 7 * (p15 + p2)
    p[1:8] = p2
    p[8:15] = p15
    p[15] = p16
    return p


@dataclass
class ScanResult:
    """
    L_min on a square grid over (p15, p2)

    values[i, j] belongs to (axis[i], axis[j]); points outside the physical
    triangle hold NaN.
    """
    p16: float
    axis: np.ndarray
    values: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float, float]]:
        inside = np.argwhere(~np.isnan(self.values))
        return [(float(self.axis[i]), float(self.axis[j]), float(self.values[i, j])) for i, j in inside]

    def rows(self) -> List[List[str]]:
        return [[f"{p15:.9g}", f"{p2:.9g}", f"{L:.9g}"] for p15, p2, L in self.points]

    def level_set(self, level: float = 1.0) -> np.ndarray:
        """
        Linear-interpolated crossings of L = level between grid neighbours

        Returns:
            Array of (p15, p2) rows
        """
        n = self.axis.size
        crossings = []
        for i in range(n):
            for j in range(n):
                La = self.values[i, j]
                for bi, bj in ((i + 1, j), (i, j + 1)):
                    if bi >= n or bj >= n:
                        continue
                    Lb = self.values[bi, bj]
                    if not (np.isfinite(La) and np.isfinite(Lb)) or (La - level) * (Lb - level) >= 0:
                        continue
                    t = (level - La) / (Lb - La)
                    crossings.append((self.axis[i] + t * (self.axis[bi] - self.axis[i]),
                                      self.axis[j] + t * (self.axis[bj] - self.axis[j])))
        return np.array(crossings).reshape(-1, 2)


def scan_numeric_boundary(p16: float = 0.0, grid: Optional[int] = None,
                          cfg: Optional[OptimizerConfig] = None) -> ScanResult:
    """
    Asymmetric-mode L_min over a grid of the physical (p15, p2) triangle

    Points where every antidiagonal correlation vanishes are recorded as inf.

    Args:
        p16: Weight of the last basis state, in [0, 1/2)
        grid: Grid points per axis (default cfg.scan_grid)
        cfg: Optimizer settings; the mode is forced to asymmetric and
            scan_multistarts replaces multistarts
    """
    if not 0 <= p16 < 0.5:
        raise ValidationError(f"p16 must lie in [0, 1/2), got {p16}")
    base = cfg or OptimizerConfig()
    grid = base.scan_grid if grid is None else grid
    if grid < 2:
        raise ValidationError(f"Need at least 2 grid points per axis, got {grid}")
    cfg = replace(base, mode="asymmetric", multistarts=base.scan_multistarts, polish_top=min(base.polish_top, 2))
    top = (1 - p16) / 7
    axis = np.linspace(0.0, top, grid)
    values = np.full((grid, grid), np.nan)
    for i, p15 in enumerate(axis):
        for j, p2 in enumerate(axis):
            if p15 + p2 > top * (1 + 1e-12):
                continue
            state = GhzDiagonalState.from_probs(_triangle_probs(p15, p2, p16))
            try:
                values[i, j] = minimize_L(state, cfg).L_min
            except DomainError as e:
                logger.debug(f"({p15:.4f}, {p2:.4f}): {e}")
                values[i, j] = np.inf
    logger.info(f"Scanned {int(np.sum(~np.isnan(values)))} points at p16 = {p16}")
    return ScanResult(p16=p16, axis=axis, values=values)


@dataclass
class HierarchyReport:
    entries: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(entry["holds"] for entry in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "entries": self.entries}


def verify_hierarchy(cfg: Optional[OptimizerConfig] = None) -> HierarchyReport:
    """
    Numerical evidence for the strict inclusions between the criterion sets

    Checks a family state past line EF that criterion I accepts and
    criterion II rejects, the correlation vector on which asymmetric
    witnesses beat every symmetric one, and a Werner state below threshold
    that passes every criterion.
    """
    cfg = cfg or OptimizerConfig()
    report = HierarchyReport()

    # Line EF of the p16 = 0 layout sits on p15 = 1/8; larger p15 leaves it
    state = to_state(FamilyPoint.from_probs(0.13, 0.01, 0.0))
    margin_I = criterion_I(state).margin
    margin_II = criterion_II(as_correlations(state)).margin
    report.entries.append({
        "name": "criterion_I_weaker_than_II",
        "p15": 0.13, "p2": 0.01, "p16": 0.0,
        "margin_I": margin_I, "margin_II": margin_II,
        "holds": margin_I >= 0 > margin_II,
    })

    R = asymmetric_gap_correlations()
    sym = minimize_L(R, replace(cfg, mode="symmetric"))
    asym = minimize_L(R, replace(cfg, mode="asymmetric"))
    report.entries.append({
        "name": "asymmetric_beats_symmetric",
        "L_symmetric": sym.L_min, "L_asymmetric": asym.L_min,
        "published_symmetric": ASYMMETRIC_GAP_L_SYMMETRIC, "published_asymmetric": ASYMMETRIC_GAP_L_ASYMMETRIC,
        "holds": asym.L_min < sym.L_min,
    })

    werner = evaluate(werner_state(0.19))
    report.entries.append({
        "name": "werner_below_threshold_passes",
        "p": 0.19, "verdict": werner.verdict,
        "holds": werner.verdict == VERDICT_PASSES,
    })

    for entry in report.entries:
        level = logging.INFO if entry["holds"] else logging.WARNING
        logger.log(level, f"{entry['name']}: {'holds' if entry['holds'] else 'FAILS'}")
    return report
