"""
Explicit tripartite-separable decompositions of family boundary states

Every construction starts from a seed |psi_a>|psi_b>|psi_cd>: two single-qubit
states and one two-qubit state. Twirling over the 16 GHZ stabilizer Paulis
projects it onto the GHZ-diagonal set, and averaging over the 24 qubit
permutations makes it symmetric; the result is a mixture of 384 product
terms whose correlations are the permutation average of the seed's Pauli
expectations. A fully separable diagonal corrector, built from twirled
computational basis states, fixes the R1..R7 sector.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .criteria import TauConfig, criterion_I, criterion_II, criterion_III, criterion_IV
from .errors import AssumptionViolationError, InfeasibleError, ValidationError
from .ghz_core import (DIM, N_QUBITS, PAULI_LABELS, GhzDiagonalState, density_matrix, pauli_matrix,
                       permute_correlations, state_from_correlations)
from .symmetric_family import (FamilyPoint, cd_curve, cd_targets, eta_from_correlations, family_correlations,
                               normalized_antidiagonal, to_state)

logger = logging.getLogger("ghzwl.separable_constructions")

_PAULI_1Q = {s: pauli_matrix(s) for s in "IXYZ"}
_LABEL_MATRICES = np.array([pauli_matrix(label) for label in PAULI_LABELS])
PERMUTATIONS = tuple(itertools.permutations(range(N_QUBITS)))

# GHZ stabilizer group up to phases: even-weight Z strings and their XXXX products
_EVEN_Z = tuple(
    "".join("Z" if q in c else "I" for q in range(N_QUBITS))
    for k in (0, 2, 4) for c in itertools.combinations(range(N_QUBITS), k)
)
TWIRL_GROUP: Tuple[str, ...] = _EVEN_Z + tuple(z.replace("I", "X").replace("Z", "Y") for z in _EVEN_Z)

# Smallest |cos phi_+| for which the criterion I seed has an admissible phi_-
COS_PLUS_MIN = (np.sqrt(41) - 3) / 8


def qubit_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>"""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def bloch_angles(u: np.ndarray) -> Tuple[float, float]:
    """(theta, phi) of a single-qubit vector, global phase dropped"""
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.norm(u)
    theta = 2 * np.arctan2(abs(u[1]), abs(u[0]))
    phi = float(np.angle(u[1]) - np.angle(u[0])) if abs(u[0]) > 1e-15 and abs(u[1]) > 1e-15 else 0.0
    return float(theta), phi


def pair_state(kind: str, chi: float) -> np.ndarray:
    """(|00> + e^{i chi}|11>)/sqrt2 for kind "phi", (|01> + e^{i chi}|10>)/sqrt2 for "psi" """
    vec = np.zeros(4, dtype=complex)
    if kind == "phi":
        vec[0], vec[3] = 1, np.exp(1j * chi)
    elif kind == "psi":
        vec[1], vec[2] = 1, np.exp(1j * chi)
    else:
        raise ValidationError(f"Unknown pair state kind {kind!r}")
    return vec / np.sqrt(2)


@dataclass
class ProductTerm:
    """
    weight * |a>|b>|cd>, with |cd> on the qubits in pair (1-based, ascending)
    and the single-qubit states on the remaining qubits in ascending order
    """
    weight: float
    pair: Tuple[int, int]
    singles: Tuple[np.ndarray, np.ndarray]
    pair_vector: np.ndarray

    @property
    def single_qubits(self) -> Tuple[int, int]:
        rest = [q for q in range(1, N_QUBITS + 1) if q not in self.pair]
        return rest[0], rest[1]

    def vector(self) -> np.ndarray:
        """16-component state vector, qubit 1 most significant"""
        a, b = self.single_qubits
        tensor = np.einsum("i,j,kl->ijkl", self.singles[0], self.singles[1], self.pair_vector.reshape(2, 2))
        order = [a - 1, b - 1, self.pair[0] - 1, self.pair[1] - 1]
        return np.transpose(tensor, np.argsort(order)).reshape(DIM)

    def apply_pauli(self, label: str) -> "ProductTerm":
        a, b = self.single_qubits
        singles = (_PAULI_1Q[label[a - 1]] @ self.singles[0], _PAULI_1Q[label[b - 1]] @ self.singles[1])
        local = np.kron(_PAULI_1Q[label[self.pair[0] - 1]], _PAULI_1Q[label[self.pair[1] - 1]])
        return ProductTerm(self.weight, self.pair, singles, local @ self.pair_vector)

    def permute(self, perm: Sequence[int]) -> "ProductTerm":
        """Move old qubit q (0-based) to position perm[q]"""
        a, b = self.single_qubits
        na, nb = perm[a - 1] + 1, perm[b - 1] + 1
        singles = self.singles if na < nb else (self.singles[1], self.singles[0])
        p0, p1 = perm[self.pair[0] - 1] + 1, perm[self.pair[1] - 1] + 1
        vec = self.pair_vector
        if p0 > p1:
            p0, p1 = p1, p0
            vec = vec.reshape(2, 2).T.reshape(4)
        return ProductTerm(self.weight, (p0, p1), singles, vec)

    def to_dict(self) -> Dict[str, Any]:
        angles = [bloch_angles(s) for s in self.singles]
        return {
            "weight": self.weight,
            "partition": {"singles": list(self.single_qubits), "pair": list(self.pair)},
            "bloch": [{"theta": t, "phi": p} for t, p in angles],
            "pair_state": {"re": self.pair_vector.real.tolist(), "im": self.pair_vector.imag.tolist()},
        }


@dataclass
class Seed:
    """Product state before twirling; single qubits 1, 2 and pair (3, 4)"""
    theta1: float
    phi1: float
    theta2: float
    phi2: float
    kind: str = "phi"
    chi: float = 0.0

    def term(self, weight: float = 1.0) -> ProductTerm:
        return ProductTerm(weight, (3, 4),
                           (qubit_state(self.theta1, self.phi1), qubit_state(self.theta2, self.phi2)),
                           pair_state(self.kind, self.chi))


def pauli_expectations(vec: np.ndarray) -> np.ndarray:
    """<psi|P_i|psi> for the 15 GHZ stabilizer strings"""
    return np.einsum("a,iab,b->i", vec.conj(), _LABEL_MATRICES, vec).real


def symmetrized_correlations(seed: Seed) -> np.ndarray:
    """R1..R15 of the twirled, permutation-averaged seed"""
    base = pauli_expectations(seed.term().vector())
    return np.mean([permute_correlations(base, order) for order in PERMUTATIONS], axis=0)


def twirl(term: ProductTerm) -> List[ProductTerm]:
    """Sixteen stabilizer images, each with 1/16 of the weight"""
    out = []
    for g in TWIRL_GROUP:
        image = term.apply_pauli(g)
        image.weight = term.weight / len(TWIRL_GROUP)
        out.append(image)
    return out


def symmetrize(terms: List[ProductTerm]) -> List[ProductTerm]:
    """Average over the 24 qubit permutations"""
    out = []
    for term in terms:
        for perm in PERMUTATIONS:
            image = term.permute(perm)
            image.weight = term.weight / len(PERMUTATIONS)
            out.append(image)
    return out


def expand_seed(seed: Seed, weight: float) -> List[ProductTerm]:
    return symmetrize(twirl(seed.term(weight)))


def _closed(R1: float, R7: float, R8: float, R9: float, R15: float) -> np.ndarray:
    return np.array([R1] * 6 + [R7, R8] + [R9] * 6 + [R15])


def rho1_seed(phi1: float, phi2: float, sign: float = 1.0) -> Seed:
    """Criterion I seed; sign = -1 negates every antidiagonal correlation"""
    chi = -(phi1 + phi2) + (0.0 if sign > 0 else np.pi)
    return Seed(np.pi / 2, phi1, np.pi / 2, phi2, "phi", chi)


def rho1_bar(phi1: float, phi2: float, route: str = "closed") -> GhzDiagonalState:
    """
    Symmetrized criterion I state

    Args:
        route: "closed" for the closed form, "terms" for the seed average
    """
    if route == "terms":
        return state_from_correlations(symmetrized_correlations(rho1_seed(phi1, phi2)))
    cp, cm, sp = np.cos(phi1 + phi2), np.cos(phi1 - phi2), np.sin(phi1 + phi2)
    R = _closed(1 / 6, 0.0, 0.5 * (cp ** 2 + cp * cm), -(1 + sp ** 2) / 6, 0.5 * (cp ** 2 - cp * cm))
    return state_from_correlations(R)


def rho23_seed(theta: float, phi: float) -> Seed:
    return Seed(theta, phi, theta, -phi, "phi", 0.0)


def rho45_seed(theta: float, phi: float) -> Seed:
    return Seed(theta, phi, np.pi - theta, phi, "psi", 0.0)


def rho23_bar(theta: float, phi: float, route: str = "closed") -> GhzDiagonalState:
    if route == "terms":
        return state_from_correlations(symmetrized_correlations(rho23_seed(theta, phi)))
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return state_from_correlations(_closed((1 + c2) / 6, c2, s2 * np.cos(phi) ** 2, -s2 / 6, s2 * np.sin(phi) ** 2))


def rho45_bar(theta: float, phi: float, route: str = "closed") -> GhzDiagonalState:
    if route == "terms":
        return state_from_correlations(symmetrized_correlations(rho45_seed(theta, phi)))
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return state_from_correlations(_closed(-(1 + c2) / 6, c2, s2 * np.cos(phi) ** 2, s2 / 6, s2 * np.sin(phi) ** 2))


def r_values(phi1: float, phi2: float, phi3: float) -> Tuple[float, float, float, float]:
    """(r0, r1, r2, r3) of the criterion III seed"""
    c1, c2, c3 = np.cos(phi1), np.cos(phi2), np.cos(phi3)
    s1, s2, s3 = np.sin(phi1), np.sin(phi2), np.sin(phi3)
    return c1 * c2 * c3, c1 * s2 * s3, s1 * c2 * s3, s1 * s2 * c3


def rho7_seed(theta: float, phi1: float, phi2: float, phi3: float) -> Seed:
    return Seed(theta, phi1, theta, phi2, "phi", phi3)


def rho7_bar(theta: float, phi1: float, phi2: float, phi3: float, route: str = "closed") -> GhzDiagonalState:
    if route == "terms":
        return state_from_correlations(symmetrized_correlations(rho7_seed(theta, phi1, phi2, phi3)))
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    r0, r1, r2, r3 = r_values(phi1, phi2, phi3)
    return state_from_correlations(_closed((1 + c2) / 6, c2, s2 * r0, s2 * (-r0 + r3 + 2 * r1 + 2 * r2) / 6, -s2 * r3))


def rho8_seed(theta: float) -> Seed:
    return Seed(theta, 0.0, np.pi - theta, np.pi, "psi", 0.0)


def rho8_bar(theta: float, route: str = "closed") -> GhzDiagonalState:
    if route == "terms":
        return state_from_correlations(symmetrized_correlations(rho8_seed(theta)))
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    return state_from_correlations(_closed(-(1 + c2) / 6, c2, -s2, -s2 / 6, 0.0))


def _basis_vector(bits: str) -> np.ndarray:
    vec = np.zeros(DIM, dtype=complex)
    vec[int(bits, 2)] = 1
    return vec


def _bit_state(bit: str) -> np.ndarray:
    return np.array([1, 0], dtype=complex) if bit == "0" else np.array([0, 1], dtype=complex)


def _corrector_orbit(k: int) -> List[str]:
    return [format(b, "04b") for b in range(DIM) if bin(b).count("1") in (k, N_QUBITS - k)]


# Hamming-weight classes 0 (0000, 1111), 1 (weight 1 and 3) and 2
CORRECTOR_CLASSES = (0, 1, 2)
CORRECTOR_CORRELATIONS = np.array([
    np.mean([pauli_expectations(_basis_vector(b)) for b in _corrector_orbit(k)], axis=0) for k in CORRECTOR_CLASSES
])


def corrector_terms(weights: Sequence[float]) -> List[ProductTerm]:
    """Fully separable diagonal state with the given class weights"""
    terms = []
    for k, c in zip(CORRECTOR_CLASSES, weights):
        orbit = _corrector_orbit(k)
        for bits in orbit:
            singles = (_bit_state(bits[0]), _bit_state(bits[1]))
            pair = np.zeros(4, dtype=complex)
            pair[int(bits[2:], 2)] = 1
            terms.append(ProductTerm(c / len(orbit), (3, 4), singles, pair))
    return terms


@dataclass
class Decomposition:
    """
    Weighted product terms claimed to sum to target

    target is a GhzDiagonalState, or a plain density matrix for hand-built
    checks.
    """
    terms: List[ProductTerm]
    target: Any
    label: str = ""
    parameters: Dict[str, Any] = field(default_factory=dict)

    def target_matrix(self) -> np.ndarray:
        if isinstance(self.target, GhzDiagonalState):
            return density_matrix(self.target)
        return np.asarray(self.target, dtype=complex)

    def assembled_matrix(self) -> np.ndarray:
        vectors = np.array([t.vector() for t in self.terms])
        weights = np.array([t.weight for t in self.terms])
        return np.einsum("n,na,nb->ab", weights, vectors, vectors.conj())

    def to_document(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"label": self.label, "parameters": self.parameters,
                               "terms": [t.to_dict() for t in self.terms]}
        if isinstance(self.target, GhzDiagonalState):
            doc["target"] = {"probs": self.target.p.tolist()}
        return doc


@dataclass
class VerifyReport:
    n_terms: int
    weight_sum: float
    min_weight: float
    max_norm_error: float
    max_residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return (self.min_weight >= 0 and abs(self.weight_sum - 1) <= self.tolerance
                and self.max_norm_error <= 1e-12 and self.max_residual <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {"n_terms": self.n_terms, "weight_sum": self.weight_sum, "min_weight": self.min_weight,
                "max_norm_error": self.max_norm_error, "max_residual": self.max_residual,
                "tolerance": self.tolerance, "ok": self.ok}


def verify(dec: Decomposition, tol: float = 1e-8) -> VerifyReport:
    """
    Check weights, factor norms and the reassembled density matrix

    Failures are reported through the fields, not raised.
    """
    weights = np.array([t.weight for t in dec.terms])
    norms = [np.linalg.norm(s) for t in dec.terms for s in t.singles] + \
            [np.linalg.norm(t.pair_vector) for t in dec.terms]
    residual = np.max(np.abs(dec.assembled_matrix() - dec.target_matrix()))
    report = VerifyReport(
        n_terms=len(dec.terms),
        weight_sum=float(weights.sum()),
        min_weight=float(weights.min()),
        max_norm_error=float(np.max(np.abs(np.array(norms) - 1))),
        max_residual=float(residual),
        tolerance=tol,
    )
    if not report.ok:
        logger.warning(f"Decomposition {dec.label or '<unnamed>'} failed verification: {report.to_dict()}")
    return report


def _seed_a(phi1: float, phi2: float, chi: float):
    # Phi pair; eps < 0 turns the second single over so that R7 changes sign
    return lambda theta, eps: Seed(theta, phi1, theta if eps > 0 else np.pi - theta, phi2, "phi", chi)


def _seed_b(phi1: float, phi2: float, chi: float):
    return lambda theta, eps: Seed(theta, phi1, np.pi - theta if eps > 0 else theta, phi2, "psi", chi)


_CORRECTOR_SYSTEM = np.vstack([np.ones((1, len(CORRECTOR_CLASSES))), CORRECTOR_CORRELATIONS.T])


def _corrector_weights(R: np.ndarray, parts, W: float, anti_norm: float, eps: int):
    S = min(anti_norm / W, 1.0)
    theta = float(np.arcsin(np.sqrt(S)))
    seeds_R = W * sum(f * symmetrized_correlations(build(theta, eps)) for f, build in parts)
    rhs = np.concatenate([[1 - W], R - seeds_R])
    c = np.linalg.lstsq(_CORRECTOR_SYSTEM, rhs, rcond=None)[0]
    return c, theta


def _assemble(pt: FamilyPoint, parts, anti_norm: float, label: str, parameters: Dict[str, Any],
              fixed_weight: Optional[float] = None) -> Decomposition:
    R = family_correlations(pt)
    eps = 1 if R[6] >= 0 else -1
    parts = [(f, build) for f, build in parts if f > 1e-15]

    def slack(W):
        return float(np.min(_corrector_weights(R, parts, W, anti_norm, eps)[0]))

    if fixed_weight is not None:
        W = fixed_weight
    elif anti_norm >= 1 - 1e-15:
        W = 1.0
    else:
        grid = np.linspace(anti_norm, 1.0, 41)
        values = [slack(W) for W in grid]
        i = int(np.argmax(values))
        W = float(grid[i])
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        opt = minimize_scalar(lambda x: -slack(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if -opt.fun > values[i]:
            W = float(opt.x)

    c, theta = _corrector_weights(R, parts, W, anti_norm, eps)
    if np.min(c) < -1e-10:
        raise InfeasibleError(f"{label}: diagonal corrector needs a negative weight", float(np.min(c)))
    c = np.clip(c, 0.0, None)

    terms: List[ProductTerm] = []
    for f, build in parts:
        terms += expand_seed(build(theta, eps), W * f)
    terms += corrector_terms(c)
    params = dict(parameters)
    params.update({"seed_weight": W, "theta": theta, "corrector": c.tolist()})
    logger.debug(f"{label} at (v, alpha) = ({pt.v:.6f}, {pt.alpha:.6f}): {params}")
    return Decomposition(terms, to_state(pt), label, params)


def _require_equality(name: str, result, tol: float) -> None:
    if not result.applicable or abs(result.margin) > tol:
        margin = result.margin if result.applicable else float("nan")
        raise AssumptionViolationError(f"Point is not on the criterion {name} boundary (margin {margin:.3e})")


def decompose_line_AB_FG(pt: FamilyPoint, tol: float = 1e-8) -> Decomposition:
    """
    Criterion I line: kappa times the symmetrized criterion I seed plus a
    diagonal corrector

    Raises:
        AssumptionViolationError: Criterion I not tight at pt
        InfeasibleError: cos^2 phi_+ outside [((sqrt41 - 3)/8)^2, 1]
    """
    R = family_correlations(pt)
    _require_equality("I", criterion_I(R), tol)
    r8, r15 = R[7], R[14]
    sigma = 1.0 if r8 + 7 * r15 >= 0 else -1.0
    kappa = sigma * (r8 + 7 * r15) / 2
    if kappa > 8 / 9 + 1e-12:
        raise InfeasibleError("kappa above 8/9", kappa)
    cp2 = sigma * (r8 + r15) / kappa
    if not COS_PLUS_MIN ** 2 - 1e-12 <= cp2 <= 1 + 1e-12:
        raise InfeasibleError("cos^2 phi_+ outside the admissible interval", cp2)
    cp = np.sqrt(np.clip(cp2, 0.0, 1.0))
    cm = sigma * (r8 - r15) / (kappa * cp)
    if abs(cm) > 1 + 1e-9:
        raise InfeasibleError("no phi_- for this phi_+", cm)
    phi_p, phi_m = np.arccos(cp), np.arccos(np.clip(cm, -1.0, 1.0))
    phi1, phi2 = (phi_p + phi_m) / 2, (phi_p - phi_m) / 2
    parts = [(1.0, lambda theta, eps: rho1_seed(phi1, phi2, sigma))]
    return _assemble(pt, parts, kappa, "criterion I line",
                     {"kappa": kappa, "cos2_phi_plus": float(cp2), "phi1": phi1, "phi2": phi2, "sign": sigma},
                     fixed_weight=kappa)


def decompose_line_II(pt: FamilyPoint, tol: float = 1e-8) -> Decomposition:
    """
    Criterion II line as a mixture of two symmetrized seeds plus a corrector

    R8 and R15 of one sign use a Phi-pair seed with phases (phi, -phi) and a
    Psi-pair seed with (phi, phi); opposite signs use (phi, phi) and
    (phi', -phi') with a pi pair phase, which needs K = -R8/R15 >= 5.

    Raises:
        AssumptionViolationError: Criterion II not tight at pt
        InfeasibleError: The sign case has no admissible mixing weight
    """
    R = family_correlations(pt)
    _require_equality("II", criterion_II(R), tol)
    r8, r15 = R[7], R[14]
    norm = abs(r8) + abs(r15)
    if norm <= 1e-14:
        raise InfeasibleError("no antidiagonal weight on this line")
    q = abs(r15) / norm
    if r8 * r15 >= 0:
        sigma = 1.0 if r8 + r15 >= 0 else -1.0
        p = (1 + 6 * q) / 2
        if p > 1 + 1e-12:
            raise InfeasibleError("mixing weight above 1", p)
        p = min(p, 1.0)
        phi = float(np.arcsin(np.sqrt(q)))
        chi = 0.0 if sigma > 0 else np.pi
        parts = [(p, _seed_a(phi, -phi, chi)), (1 - p, _seed_b(phi, phi, chi))]
        params = {"case": "same-sign", "p": p, "phi": phi, "sign": sigma}
    else:
        sigma = 1.0 if r15 > 0 else -1.0
        lo, hi = max(abs(8 * q - 1) / 2, 0.0), (1 - 4 * q) / 2
        if lo > hi + 1e-12:
            raise InfeasibleError("K = -R8/R15 below 5", -r8 / r15)
        p = (lo + min(hi, 1.0)) / 2
        x, y = (8 * q - 1 + 2 * p) / 4, (1 - 2 * p - 4 * q) / 4
        sa = np.clip(x / p, 0.0, 1.0) if p > 0 else 0.0
        sb = np.clip(y / (1 - p), 0.0, 1.0) if p < 1 else 0.0
        phi, phi_b = float(np.arcsin(np.sqrt(sa))), float(np.arcsin(np.sqrt(sb)))
        chi = np.pi if sigma > 0 else 0.0
        parts = [(p, _seed_a(phi, phi, chi)), (1 - p, _seed_b(phi_b, -phi_b, chi))]
        params = {"case": "opposite-sign", "p": p, "phi": phi, "phi_prime": phi_b, "sign": sigma}
    return _assemble(pt, parts, norm, "criterion II line", params)


def _arc_parts(R: np.ndarray, eta: float):
    a, b, u0, sigma = normalized_antidiagonal(R)
    r0, r1, r3 = cd_targets(a, b, u0, eta)
    c3 = r0 + r3
    if abs(c3) > 1 + 1e-9 or abs(c3) < 1e-14:
        raise InfeasibleError("cos phi3 out of range", c3)
    sin2 = r3 / c3
    if not -1e-9 <= sin2 <= 1 + 1e-9:
        raise InfeasibleError("sin^2 phi out of range", sin2)
    phi = float(np.arcsin(np.sqrt(np.clip(sin2, 0.0, 1.0))))
    s3 = np.copysign(np.sqrt(max(0.0, 1 - c3 ** 2)), r1)
    mismatch = abs(np.cos(phi) * np.sin(phi) * s3 - r1)
    if mismatch > 1e-7:
        raise InfeasibleError("r targets violate (r0 + r3)^2 (r0 r3 + r1^2) = r0 r3", mismatch)
    phi3 = float(np.arctan2(s3, np.clip(c3, -1.0, 1.0)))
    shift = 0.0 if sigma > 0 else np.pi
    parts = [(1 - eta, _seed_a(phi, phi, phi3 + shift))]
    if eta > 0:
        parts.append((eta, _seed_b(0.0, np.pi, shift)))
    return parts, {"eta": eta, "phi": phi, "phi3": phi3, "r": [r0, r1, r3], "sign": sigma}


def decompose_curve_BC(pt: FamilyPoint, tol: float = 1e-8) -> Decomposition:
    """
    Criterion III curve: one symmetrized seed with equal single-qubit phases

    Raises:
        AssumptionViolationError: Criterion III inapplicable or strict at pt
        InfeasibleError: The target r values are not realizable
    """
    R = family_correlations(pt)
    _require_equality("III", criterion_III(R), tol)
    parts, params = _arc_parts(R, 0.0)
    return _assemble(pt, parts, 1 - abs(R[6]), "criterion III curve", params)


def decompose_curve_IV(pt: FamilyPoint, cfg: Optional[TauConfig] = None, tol: float = 1e-8) -> Decomposition:
    """
    Criterion IV arc: the criterion III seed mixed with eta of the
    XX(XX+YY) seed

    Raises:
        InfeasibleError: eta comes out negative (beyond point C)
    """
    R = family_correlations(pt)
    _require_equality("IV", criterion_IV(R, cfg), tol)
    solution = eta_from_correlations(R)
    if solution.negative:
        raise InfeasibleError("negative eta; sufficiency ends at point C", solution.eta)
    parts, params = _arc_parts(R, solution.eta)
    return _assemble(pt, parts, 1 - abs(R[6]), "criterion IV curve", params)


def decompose_curve_CD(K: float, p16: float = 0.3, mirror: bool = False,
                       cfg: Optional[TauConfig] = None) -> Decomposition:
    """Decomposition of the criterion IV arc point with parameter K; mirror selects HI"""
    v, alpha = cd_curve(K, p16=p16, cfg=cfg)
    pt = FamilyPoint(p16, min(max(v, 0.0), 1.0), alpha)
    return decompose_curve_IV(pt.mirror() if mirror else pt, cfg)


def decompose_family_point(pt: FamilyPoint, criterion: str, cfg: Optional[TauConfig] = None) -> Decomposition:
    """Dispatch on the criterion that bounds the segment holding pt"""
    if criterion == "I":
        return decompose_line_AB_FG(pt)
    if criterion == "II":
        return decompose_line_II(pt)
    if criterion == "III":
        return decompose_curve_BC(pt)
    if criterion == "IV":
        return decompose_curve_IV(pt, cfg)
    raise ValidationError(f"No construction for boundary segments of kind {criterion!r}")
