"""
Witness operators M = sum_i M_i P_i and their maximum over tripartite product states

The maximum Lambda over 1|1|2 product states is computed analytically when the
coefficients allow it and otherwise by a deterministic grid-and-refine angle
search over all six partitions.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import AssumptionViolationError, NonPositiveDenominatorError, ValidationError
from .ghz_core import (DIM, FLIPPED_PAIRS, PAULI_LABELS, as_correlations, label_permutation,
                       pauli_matrix, t_from_r)

logger = logging.getLogger("ghzwl.witness_engine")

N_COEFFS = len(PAULI_LABELS)

GAMMA = np.ones((4, 4)) - 2 * np.eye(4)

SECTOR_INDICES = {1: np.array([8, 10, 12, 14]), 2: np.array([9, 11, 13, 15])}

# Two-qubit party of each tripartite partition, 1-based qubits
PARTITIONS: Tuple[Tuple[int, int], ...] = ((3, 4), (2, 4), (2, 3), (1, 4), (1, 3), (1, 2))


@dataclass(frozen=True)
class OracleConfig:
    grid: int = 48
    refine_tol: float = 1e-7

    @classmethod
    def from_config(cls, config: Dict[str, Any], search: bool = False) -> "OracleConfig":
        section = config.get("oracle", {})
        grid = section.get("search_grid" if search else "grid", 24 if search else cls.grid)
        return cls(grid=int(grid), refine_tol=float(section.get("refine_tol", cls.refine_tol)))


@dataclass(frozen=True)
class WitnessReport:
    expectation: float
    lambda_: float
    L: float
    entangled: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"expectation": self.expectation, "lambda": self.lambda_, "L": self.L,
                "entangled": self.entangled}


def as_witness(M: Sequence[float]) -> np.ndarray:
    m = np.asarray(M, dtype=float)
    if m.shape != (N_COEFFS,):
        raise ValidationError(f"Expected 15 witness coefficients, got {m.size}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("Witness coefficients must be finite")
    return m


def witness_from_document(doc: Dict[str, Any]) -> np.ndarray:
    """Parse {"M": [15 numbers]}"""
    if not isinstance(doc, dict) or "M" not in doc:
        raise ValidationError('Witness document needs an "M" block')
    m = as_witness(doc["M"])
    if not np.any(m):
        raise ValidationError("Witness coefficients are all zero")
    return m


def werner_witness() -> np.ndarray:
    """Optimal witness for GHZ + white noise, Lambda = 2"""
    m = np.zeros(N_COEFFS)
    m[6] = 2.0
    m[7] = m[14] = 1.0
    m[8:14] = -1.0
    return m


def k_from_m(M: Sequence[float]) -> np.ndarray:
    """
    K coefficients K_0..K_15

    K_{2i}, K_{2i+1} = M_{2i} +- M_{2i+1} with M_0 = 0; pairs 4 and 7 take the
    difference first. This mirrors t_from_r so that sum K_i T_i = sum M_i R_i.
    """
    m = np.concatenate([[0.0], as_witness(M)])
    k = np.empty(DIM)
    for i in range(DIM // 2):
        plus = m[2 * i] + m[2 * i + 1]
        minus = m[2 * i] - m[2 * i + 1]
        k[2 * i], k[2 * i + 1] = (minus, plus) if i in FLIPPED_PAIRS else (plus, minus)
    return k


def m_from_k(K: Sequence[float]) -> np.ndarray:
    k = np.asarray(K, dtype=float)
    if k.shape != (DIM,):
        raise ValidationError(f"Expected 16 K coefficients, got {k.size}")
    m = np.empty(DIM)
    for i in range(DIM // 2):
        first, second = k[2 * i], k[2 * i + 1]
        if i in FLIPPED_PAIRS:
            first, second = second, first
        m[2 * i] = (first + second) / 2
        m[2 * i + 1] = (first - second) / 2
    return m[1:]


def relabel(M: Sequence[float], pair: Tuple[int, int]) -> np.ndarray:
    """
    Coefficients seen from a partition whose two-qubit party is `pair`

    The singles keep their relative order and become qubits 1 and 2; the pair
    becomes qubits 3 and 4.
    """
    if tuple(pair) not in PARTITIONS and tuple(reversed(pair)) not in PARTITIONS:
        raise ValidationError(f"Not a two-qubit party: {pair}")
    a, b = sorted(pair)
    c, d = [q for q in range(1, 5) if q not in (a, b)]
    return as_witness(M)[label_permutation((c - 1, d - 1, a - 1, b - 1))]


def _sector_g(K: np.ndarray, sector: int, phi1, phi2):
    c1, s1, c2, s2 = np.cos(phi1), np.sin(phi1), np.cos(phi2), np.sin(phi2)
    if sector == 1:
        return K[8] * c1 * c2 - 1j * K[10] * c1 * s2 - 1j * K[12] * s1 * c2 + K[14] * s1 * s2
    return K[9] * c1 * c2 + 1j * K[11] * c1 * s2 + 1j * K[13] * s1 * c2 + K[15] * s1 * s2


def _x_entries(K: np.ndarray, theta1, theta2, phi1, phi2):
    c1, c2 = np.cos(theta1), np.cos(theta2)
    ss = np.sin(theta1) * np.sin(theta2)
    m11 = K[0] + K[2] * c2 + K[4] * c1 + K[6] * c1 * c2
    m22 = K[1] - K[3] * c2 - K[5] * c1 + K[7] * c1 * c2
    m33 = K[1] + K[3] * c2 + K[5] * c1 + K[7] * c1 * c2
    m44 = K[0] - K[2] * c2 - K[4] * c1 + K[6] * c1 * c2
    return m11, m22, m33, m44, ss * _sector_g(K, 1, phi1, phi2), ss * _sector_g(K, 2, phi1, phi2)


def x_matrix(M: Sequence[float], partition: Tuple[int, int], angles: Sequence[float]) -> np.ndarray:
    """
    Partial expectation <psi1|<psi2| M |psi1>|psi2> on the two-qubit party

    Args:
        M: Witness coefficients M_1..M_15
        partition: Two-qubit party, e.g. (3, 4)
        angles: (theta1, theta2, phi1, phi2) Bloch angles of the two singles

    Returns:
        4x4 complex X-type matrix in the |00>, |01>, |10>, |11> basis
    """
    K = k_from_m(relabel(M, partition))
    m11, m22, m33, m44, m14, m23 = _x_entries(K, *angles)
    x = np.diag(np.array([m11, m22, m33, m44], dtype=complex))
    x[0, 3], x[3, 0] = m14, np.conj(m14)
    x[1, 2], x[2, 1] = m23, np.conj(m23)
    return x


def _block_max(a, d, b):
    return 0.5 * (a + d + np.sqrt((a - d) ** 2 + 4 * np.abs(b) ** 2))


def eigen_candidates(x: np.ndarray, tol: float = 1e-12) -> Tuple[float, float]:
    """
    Largest eigenvalues of the two 2x2 blocks of an X-type matrix

    Raises:
        ValidationError: Input is not 4x4 Hermitian X-type
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (4, 4):
        raise ValidationError(f"Expected a 4x4 matrix, got shape {x.shape}")
    mask = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))
    scale = max(1.0, float(np.max(np.abs(x))))
    if np.max(np.abs(x[~mask]), initial=0.0) > tol * scale:
        raise ValidationError("Matrix is not of X type")
    if np.max(np.abs(x - x.conj().T)) > tol * scale:
        raise ValidationError("Matrix is not Hermitian")
    lam1 = _block_max(x[0, 0].real, x[3, 3].real, x[0, 3])
    lam2 = _block_max(x[1, 1].real, x[2, 2].real, x[1, 2])
    return float(lam1), float(lam2)


def g_tilde(sector: int, K: Sequence[float], tol: float = 1e-14) -> float:
    """
    Maximum of |g_sector(phi1, phi2)| over both phases

    The square-root expression applies when xi*beta*gamma*delta > tol and the
    q-product is nonnegative; otherwise the maximum sits on a corner and
    equals the largest |K| of the sector.
    """
    if sector not in SECTOR_INDICES:
        raise ValidationError(f"Sector must be 1 or 2, got {sector}")
    row = np.asarray(K, dtype=float)[SECTOR_INDICES[sector]]
    return float(g_tilde_rows(row[None, :], tol)[0])


def g_tilde_rows(rows: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """
    Vectorised g_tilde over sector rows

    Args:
        rows: Array of shape (n, 4), each row (K_a, K_b, K_c, K_d) of one sector

    Returns:
        Array of length n
    """
    rows = np.asarray(rows, dtype=float)
    corner = np.max(np.abs(rows), axis=1)
    xi, beta, gamma, delta = (0.25 * rows @ GAMMA).T
    prod = xi * beta * gamma * delta
    q = np.stack([xi * beta * gamma, xi * beta * delta, xi * gamma * delta, beta * gamma * delta], axis=1) @ GAMMA
    interior = (prod > tol) & (np.prod(q, axis=1) >= 0)
    safe = np.where(interior, prod, 1.0)
    value = (xi * beta + gamma * delta) * (xi * gamma + beta * delta) * (xi * delta + beta * gamma) / safe
    stationary = np.sqrt(np.clip(value, 0.0, None))
    return np.where(interior, np.maximum(corner, stationary), corner)


def g_tilde_grid(sector: int, K: Sequence[float], grid: int = 48, tol: float = 1e-9) -> float:
    """Grid-and-refine maximum of |g_sector|; independent check of g_tilde"""
    K = np.asarray(K, dtype=float)
    phis = np.linspace(0, np.pi, grid, endpoint=False)
    p1, p2 = np.meshgrid(phis, phis, indexing="ij")
    values = np.abs(_sector_g(K, sector, p1, p2))
    best = np.unravel_index(np.argmax(values), values.shape)
    point = np.array([phis[best[0]], phis[best[1]]])

    def objective(x):
        return float(np.abs(_sector_g(K, sector, x[0], x[1])))

    return coordinate_ascent(objective, point, np.pi / grid, tol)[1]


def lambda_reduced(K: Sequence[float], theta1: float, theta2: float) -> Tuple[float, float]:
    """Eigenvalue candidates with both phases already maximised"""
    K = np.asarray(K, dtype=float)
    c1, c2 = np.cos(theta1), np.cos(theta2)
    ss = np.sin(theta1) * np.sin(theta2)
    lam1 = K[0] + K[6] * c1 * c2 + np.sqrt((K[2] * c2 + K[4] * c1) ** 2 + (ss * g_tilde(1, K)) ** 2)
    lam2 = K[1] + K[7] * c1 * c2 + np.sqrt((K[3] * c2 + K[5] * c1) ** 2 + (ss * g_tilde(2, K)) ** 2)
    return float(lam1), float(lam2)


def check_symmetric(M: Sequence[float], tol: float = 1e-12) -> None:
    """
    Raise unless M_1..M_6 vanish and M_9..M_14 coincide

    Raises:
        AssumptionViolationError: Either condition fails beyond tol
    """
    m = as_witness(M)
    if np.max(np.abs(m[:6])) > tol:
        raise AssumptionViolationError(f"M_1..M_6 must vanish, max |M_i| = {np.max(np.abs(m[:6])):.3e}")
    spread = np.ptp(m[8:14])
    if spread > tol:
        raise AssumptionViolationError(f"M_9..M_14 must be equal, spread = {spread:.3e}")


def is_symmetric(M: Sequence[float], tol: float = 1e-12) -> bool:
    try:
        check_symmetric(M, tol)
    except AssumptionViolationError:
        return False
    return True


def lambda_symmetric(M: Sequence[float], tol: float = 1e-12) -> float:
    """Lambda = max(|M_7|, g1, g2) for permutation-symmetric coefficients"""
    check_symmetric(M, tol)
    K = k_from_m(M)
    return max(abs(float(M[6])), g_tilde(1, K), g_tilde(2, K))


def lambda_antidiagonal(M: Sequence[float], tol: float = 1e-12) -> float:
    """
    Analytic Lambda when M_1..M_6 vanish

    Each partition contributes max(|M_7|, g1', g2') with its relabelled
    coefficients.
    """
    m = as_witness(M)
    if np.max(np.abs(m[:6])) > tol:
        raise AssumptionViolationError("lambda_antidiagonal needs M_1..M_6 = 0")
    best = abs(float(m[6]))
    for pair in PARTITIONS:
        K = k_from_m(relabel(m, pair))
        best = max(best, g_tilde(1, K), g_tilde(2, K))
    return best


def coordinate_ascent(objective, start: np.ndarray, step: float, tol: float) -> Tuple[np.ndarray, float]:
    """Axis-by-axis ascent; the step halves whenever no axis move improves"""
    x = np.array(start, dtype=float)
    fx = objective(x)
    while step >= tol:
        improved = False
        for axis in range(x.size):
            for direction in (1.0, -1.0):
                trial = x.copy()
                trial[axis] += direction * step
                ft = objective(trial)
                if ft > fx:
                    x, fx, improved = trial, ft, True
                    break
        if not improved:
            step /= 2
    return x, fx


def lambda_bruteforce(M: Sequence[float], partition: Tuple[int, int] = (3, 4),
                      cfg: Optional[OracleConfig] = None) -> float:
    """
    Angle-search maximum of max(lambda1, lambda2) for one partition

    Stage one evaluates the full grid^4 angle grid. For fixed thetas each
    candidate grows with |g_j|, so the phase grid is maximised per sector first
    and combined with the theta grid. Stage two refines every candidate from
    its best grid point by coordinate ascent with step halving.
    """
    cfg = cfg or OracleConfig()
    K = k_from_m(relabel(M, partition))
    thetas = np.linspace(0, np.pi, cfg.grid)
    phis = np.linspace(0, 2 * np.pi, cfg.grid, endpoint=False)
    p1, p2 = np.meshgrid(phis, phis, indexing="ij")
    t1, t2 = np.meshgrid(thetas, thetas, indexing="ij")

    results = []
    for sector, (row_a, row_d) in ((1, (0, 3)), (2, (1, 2))):
        gabs = np.abs(_sector_g(K, sector, p1, p2))
        phi_best = np.unravel_index(np.argmax(gabs), gabs.shape)
        entries = _x_entries(K, t1, t2, phis[phi_best[0]], phis[phi_best[1]])
        a, d = entries[row_a], entries[row_d]
        values = _block_max(a, d, entries[4 + sector - 1])
        th_best = np.unravel_index(np.argmax(values), values.shape)
        start = np.array([thetas[th_best[0]], thetas[th_best[1]], phis[phi_best[0]], phis[phi_best[1]]])

        def objective(x, sector=sector, row_a=row_a, row_d=row_d):
            e = _x_entries(K, *x)
            return float(_block_max(e[row_a], e[row_d], e[4 + sector - 1]))

        _, value = coordinate_ascent(objective, start, np.pi / cfg.grid, cfg.refine_tol)
        results.append(max(value, float(values[th_best])))

    logger.debug(f"Brute-force Lambda for partition {partition}: {results}")
    return max(results)


def lambda_all_partitions(M: Sequence[float], cfg: Optional[OracleConfig] = None) -> float:
    """Brute-force Lambda maximised over the six tripartite partitions"""
    return max(lambda_bruteforce(M, pair, cfg) for pair in PARTITIONS)


def lambda_max(M: Sequence[float], cfg: Optional[OracleConfig] = None, tol: float = 1e-12) -> float:
    """
    Lambda by the cheapest exact route available

    Symmetric coefficients use the closed form, coefficients with M_1..M_6 = 0
    use the per-partition closed form, anything else the angle oracle.
    """
    m = as_witness(M)
    if is_symmetric(m, tol):
        return lambda_symmetric(m, tol)
    if np.max(np.abs(m[:6])) <= tol:
        return lambda_antidiagonal(m, tol)
    logger.warning("No closed form for these coefficients, using the angle oracle")
    return lambda_all_partitions(m, cfg)


def witness_operator(M: Sequence[float]) -> np.ndarray:
    """Dense 16x16 operator sum_i M_i P_i"""
    m = as_witness(M)
    return sum(coef * pauli_matrix(label) for coef, label in zip(m, PAULI_LABELS))


def _random_qubits(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    vecs = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def random_product_states(rng: np.random.Generator, n: int) -> np.ndarray:
    """
    Random 1|1|2 product states over uniformly drawn partitions

    Returns:
        Array of shape (n, 16)
    """
    out = np.empty((n, DIM), dtype=complex)
    choice = rng.integers(len(PARTITIONS), size=n)
    for idx, (a, b) in enumerate(PARTITIONS):
        rows = np.flatnonzero(choice == idx)
        if rows.size == 0:
            continue
        c, d = [q for q in range(1, 5) if q not in (a, b)]
        psi_c = _random_qubits(rng, rows.size, 2)
        psi_d = _random_qubits(rng, rows.size, 2)
        psi_ab = _random_qubits(rng, rows.size, 4).reshape(-1, 2, 2)
        tensor = np.einsum("ni,nj,nkl->nijkl", psi_c, psi_d, psi_ab)
        # Axes 1..4 currently hold qubits (c, d, a, b)
        order = [c, d, a, b]
        tensor = np.transpose(tensor, [0] + [1 + order.index(q) for q in range(1, 5)])
        out[rows] = tensor.reshape(rows.size, DIM)
    return out


def check_witness_validity(M: Sequence[float], lam: Optional[float] = None, samples: int = 100000,
                           rng: Optional[np.random.Generator] = None) -> float:
    """
    Smallest sampled <W> for W = Lambda I - M over random product states

    A value below about -1e-9 means Lambda underestimates the maximum.
    """
    rng = rng or np.random.default_rng(0)
    lam = lambda_max(M) if lam is None else lam
    op = witness_operator(M)
    worst = np.inf
    for start in range(0, samples, 10000):
        psi = random_product_states(rng, min(10000, samples - start))
        values = np.einsum("ni,ij,nj->n", psi.conj(), op, psi).real
        worst = min(worst, float(np.min(lam - values)))
    return worst


def witness_report(M: Sequence[float], state, cfg: Optional[OracleConfig] = None) -> WitnessReport:
    """
    Expectation, Lambda and L = Lambda / expectation of a witness on a state

    Args:
        M: Witness coefficients
        state: GhzDiagonalState or a correlation vector R_1..R_15

    Raises:
        NonPositiveDenominatorError: sum K_i T_i <= 0
    """
    m = as_witness(M)
    R = as_correlations(state)
    expectation = float(m @ R)
    via_t = float(k_from_m(m) @ t_from_r(R))
    if abs(expectation - via_t) > 1e-12 * max(1.0, abs(expectation)):
        raise ValidationError(f"sum M R = {expectation} and sum K T = {via_t} disagree")
    if via_t <= 0:
        raise NonPositiveDenominatorError(f"Witness expectation {via_t:.6g} is not positive; flip the signs of M")
    lam = lambda_max(m, cfg)
    L = lam / via_t
    return WitnessReport(expectation=via_t, lambda_=lam, L=L, entangled=L < 1)
