"""
Four-qubit GHZ-diagonal states

Conventions used throughout the package:
  - qubit 1 is the most significant bit of a computational basis index
  - basis labels j and matrix indices are 1-based, so rho_entry(rho, 1, 16)
    is the corner entry of the 16x16 density matrix
  - Pauli strings are indexed 1..15 in the order of PAULI_LABELS; index 0 is
    the identity and never carries a coefficient
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .errors import NegativeProbabilityError, ValidationError

logger = logging.getLogger("ghzwl.ghz_core")

N_QUBITS = 4
DIM = 16

PAULI_LABELS: Tuple[str, ...] = (
    "IIZZ", "IZIZ", "IZZI", "ZIIZ", "ZIZI", "ZZII", "ZZZZ",
    "XXXX", "XXYY", "XYXY", "XYYX", "YXXY", "YXYX", "YYXX", "YYYY",
)
LABEL_INDEX: Dict[str, int] = {label: i + 1 for i, label in enumerate(PAULI_LABELS)}

# Pairs (2i, 2i+1) whose sum/difference roles are swapped in the T and K maps
FLIPPED_PAIRS = (4, 7)

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(label: str) -> np.ndarray:
    """
    Dense 2^n x 2^n matrix of a Pauli string

    Args:
        label: String over I, X, Y, Z; the first symbol acts on qubit 1

    Returns:
        Complex matrix
    """
    try:
        return reduce(np.kron, [_PAULI[s] for s in label])
    except KeyError:
        raise ValidationError(f"Not a Pauli string: {label!r}")


def _bits(index: int) -> str:
    return format(index, f"0{N_QUBITS}b")


def partner(j: int) -> int:
    """Basis label sharing the same antidiagonal pair as j"""
    return DIM + 1 - j


def ghz_basis_state(j: int) -> np.ndarray:
    """
    GHZ basis vector |GHZ_j>

    For j <= 8, j-1 reads 0x2x3x4 and the state is (|0x> + |1x'>)/sqrt(2);
    for j >= 9, j-1 reads 1x'2x'3x'4 and the state is (|0x> - |1x'>)/sqrt(2),
    where x' is the bitwise complement of x.

    Args:
        j: Basis label 1..16

    Returns:
        Unit vector of length 16
    """
    if not isinstance(j, (int, np.integer)) or not 1 <= j <= DIM:
        raise ValidationError(f"GHZ basis index must be in 1..16, got {j!r}")
    b = j - 1
    low, high = (b, DIM - 1 - b) if b < DIM // 2 else (DIM - 1 - b, b)
    sign = 1.0 if b < DIM // 2 else -1.0
    vec = np.zeros(DIM, dtype=complex)
    vec[low] = 1 / np.sqrt(2)
    vec[high] = sign / np.sqrt(2)
    return vec


GHZ_BASIS = np.array([ghz_basis_state(j) for j in range(1, DIM + 1)])


def _sign_from_rule(label: str, j: int) -> float:
    # Phase picked up by each computational component under the string
    b = j - 1
    low = b if b < DIM // 2 else DIM - 1 - b
    sign = 1.0 if b < DIM // 2 else -1.0
    bits_low = _bits(low)
    if set(label) <= {"I", "Z"}:
        return float((-1) ** sum(int(bits_low[q]) for q, s in enumerate(label) if s == "Z"))

    def phase(bits: str) -> complex:
        c = 1 + 0j
        for q, s in enumerate(label):
            if s == "Y":
                c *= 1j if bits[q] == "0" else -1j
        return c

    bits_high = _bits(DIM - 1 - low)
    return float((sign * (phase(bits_low) + phase(bits_high)) / 2).real)


# S[j-1, i-1] = <GHZ_j| P_i |GHZ_j>, each entry +-1
SIGN_TABLE = np.array([[_sign_from_rule(label, j) for label in PAULI_LABELS] for j in range(1, DIM + 1)])


@dataclass(frozen=True, eq=False)
class GhzDiagonalState:
    """
    Probability vector over the GHZ basis

    Use from_probs() to build one; it validates and clamps round-off.
    """
    p: np.ndarray

    @classmethod
    def from_probs(cls, probs: Iterable[float], tol: float = 1e-12) -> "GhzDiagonalState":
        p = np.asarray(list(probs), dtype=float)
        if p.shape != (DIM,):
            raise ValidationError(f"Expected 16 probabilities, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("Probabilities must be finite")
        worst = int(np.argmin(p))
        if p[worst] < -tol:
            raise NegativeProbabilityError(worst + 1, float(p[worst]))
        total = p.sum()
        if abs(total - 1) > max(tol, 1e-12) * DIM:
            raise ValidationError(f"Probabilities sum to {total!r}, not 1")
        if np.any(p < 0):
            p = np.clip(p, 0.0, None)
            p = p / p.sum()
        p.setflags(write=False)
        return cls(p)

    def prob(self, j: int) -> float:
        """p_j with a 1-based label"""
        return float(self.p[j - 1])


def uniform_state() -> GhzDiagonalState:
    return GhzDiagonalState.from_probs(np.full(DIM, 1 / DIM))


def werner_state(p: float) -> GhzDiagonalState:
    """GHZ_1 mixed with white noise: p |GHZ_1><GHZ_1| + (1-p) I/16"""
    if not 0 <= p <= 1:
        raise ValidationError(f"Werner weight must be in [0, 1], got {p}")
    probs = np.full(DIM, (1 - p) / DIM)
    probs[0] += p
    return GhzDiagonalState.from_probs(probs)


def density_matrix(state: GhzDiagonalState) -> np.ndarray:
    """
    16x16 density matrix sum_j p_j |GHZ_j><GHZ_j|

    Only entries (j, j) and (j, 17-j) are nonzero.
    """
    return density_matrix_from_probs(state.p)


def density_matrix_from_probs(p: Sequence[float]) -> np.ndarray:
    """Same as density_matrix for a raw weight vector; no positivity check"""
    return np.einsum("j,ja,jb->ab", np.asarray(p, dtype=float), GHZ_BASIS, GHZ_BASIS.conj())


def rho_entry(rho: np.ndarray, i: int, j: int) -> complex:
    """Entry rho_{i,j} with 1-based indices"""
    if not (1 <= i <= DIM and 1 <= j <= DIM):
        raise ValidationError(f"Matrix index ({i}, {j}) out of range 1..16")
    return rho[i - 1, j - 1]


def correlations(state: GhzDiagonalState) -> np.ndarray:
    """
    Correlation vector R_1..R_15 via the sign table

    Returns:
        Array of length 15; R[i-1] is the expectation of PAULI_LABELS[i-1]
    """
    return state.p @ SIGN_TABLE


def correlations_by_trace(state: GhzDiagonalState) -> np.ndarray:
    """Correlation vector computed as Tr(rho P_i) with dense matrices"""
    rho = density_matrix(state)
    return np.array([np.trace(rho @ pauli_matrix(label)).real for label in PAULI_LABELS])


def _as_r(R: Sequence[float]) -> np.ndarray:
    r = np.asarray(R, dtype=float)
    if r.shape != (len(PAULI_LABELS),):
        raise ValidationError(f"Expected 15 correlations, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise ValidationError("Correlations must be finite")
    return r


def as_correlations(source) -> np.ndarray:
    """R vector of a state, or a validated copy of a raw correlation sequence"""
    if isinstance(source, GhzDiagonalState):
        return correlations(source)
    return _as_r(source)


def t_from_r(R: Sequence[float]) -> np.ndarray:
    """
    T vector T_0..T_15 from R_1..R_15

    T_{2i}, T_{2i+1} = (R_{2i} +- R_{2i+1})/2 with R_0 = 0; the pairs i = 4
    and i = 7 take the difference first.
    """
    r = np.concatenate([[0.0], _as_r(R)])
    t = np.empty(DIM)
    for i in range(DIM // 2):
        plus = (r[2 * i] + r[2 * i + 1]) / 2
        minus = (r[2 * i] - r[2 * i + 1]) / 2
        t[2 * i], t[2 * i + 1] = (minus, plus) if i in FLIPPED_PAIRS else (plus, minus)
    return t


def state_from_correlations(R: Sequence[float], tol: float = 1e-12) -> GhzDiagonalState:
    """
    Invert the correlation map

    Raises:
        NegativeProbabilityError: R lies outside the state set
    """
    return GhzDiagonalState.from_probs(probs_from_correlations(R), tol=tol)


def probs_from_correlations(R: Sequence[float]) -> np.ndarray:
    """Linear inverse of the correlation map; entries may come out negative"""
    design = np.hstack([np.ones((DIM, 1)), SIGN_TABLE]).T
    return np.linalg.solve(design, np.concatenate([[1.0], _as_r(R)]))


def label_permutation(order: Sequence[int]) -> np.ndarray:
    """
    Index map induced by reordering the qubits

    Args:
        order: New qubit order as 0-based positions, e.g. (2, 3, 0, 1)

    Returns:
        Integer array src such that the relabelled vector is v[src]
    """
    if sorted(order) != list(range(N_QUBITS)):
        raise ValidationError(f"Not a qubit permutation: {order}")
    src = np.empty(len(PAULI_LABELS), dtype=int)
    for k, label in enumerate(PAULI_LABELS):
        new_label = "".join(label[q] for q in order)
        src[LABEL_INDEX[new_label] - 1] = k
    return src


def permute_correlations(R: Sequence[float], order: Sequence[int]) -> np.ndarray:
    """Correlations of the state with its qubits reordered"""
    return _as_r(R)[label_permutation(order)]


def state_to_document(state: GhzDiagonalState) -> Dict[str, list]:
    """JSON-ready document carrying both representations"""
    return {"probs": state.p.tolist(), "correlations": correlations(state).tolist()}


def state_from_document(doc: Dict[str, Sequence[float]], tol: float = 1e-12) -> GhzDiagonalState:
    """
    Parse {"probs": [...]} or {"correlations": [...]}

    When both blocks are present the probabilities win and the correlations
    are checked against them.
    """
    if not isinstance(doc, dict):
        raise ValidationError("State document must be a JSON object")
    if "probs" in doc:
        state = GhzDiagonalState.from_probs(doc["probs"], tol=tol)
        if "correlations" in doc:
            mismatch = np.max(np.abs(correlations(state) - _as_r(doc["correlations"])))
            if mismatch > 1e-8:
                raise ValidationError(f"probs and correlations disagree by {mismatch:.3e}")
        return state
    if "correlations" in doc:
        return state_from_correlations(doc["correlations"], tol=tol)
    raise ValidationError('State document needs a "probs" or "correlations" block')
