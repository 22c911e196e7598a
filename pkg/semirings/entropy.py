"""
Binary information measures S(p), their n-ary extensions and axiom reports.

All evaluators accept numpy arrays and follow the 0·log 0 = 0 convention
through ``scipy.special.xlogy``.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.special import xlogy

from .exceptions import SemiringValidationError
from .solvers import simplex_grid

logger = logging.getLogger(__name__)

KINDS = ('shannon', 'renyi', 'tsallis', 'kl')
SHANNON_LIMIT = 1e-8
SUM_TOL = 1e-12


@dataclass(frozen=True)
class Measure:
    """
    A binary information measure.

    For ``kl`` the stored measure is S(p) = -KL(p; q), so S(q) = 0 is its
    maximum and S(0) = log(1 - q). Tsallis uses the normalisation
    phi(alpha) = 1 - alpha.
    """
    kind: str
    C: float = 1.0
    alpha: Optional[float] = None
    q: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SemiringValidationError(f"Unknown measure kind {self.kind!r}; expected one of {', '.join(KINDS)}.")
        if self.kind == 'shannon' and not self.C > 0:
            raise SemiringValidationError(f"Shannon scale C must be positive, got {self.C!r}.")
        if self.kind in ('renyi', 'tsallis'):
            if self.alpha is None or not self.alpha > 0 or math.isinf(self.alpha):
                raise SemiringValidationError(f"{self.kind} order alpha must be a positive real, got {self.alpha!r}.")
        if self.kind == 'kl':
            if self.q is None or not 0 < self.q < 1:
                raise SemiringValidationError(f"KL reference q must lie in (0, 1), got {self.q!r}.")

    @property
    def spec(self) -> str:
        if self.kind == 'shannon':
            return 'shannon' if self.C == 1.0 else f'shannon:{self.C!r}'
        if self.kind == 'kl':
            return f'kl:{self.q!r}'
        return f'{self.kind}:{self.alpha!r}'

    @property
    def is_shannon_limit(self) -> bool:
        return self.kind in ('renyi', 'tsallis') and abs(self.alpha - 1.0) <= SHANNON_LIMIT

    @property
    def is_commutative(self) -> bool:
        return self.kind != 'kl' or self.q == 0.5

    def __call__(self, p):
        return binary_values(self, p)

    def maximum(self) -> float:
        """max_p S(p): attained at p = 1/2, or at p = q for KL."""
        if self.kind == 'kl':
            return 0.0
        return float(binary_values(self, 0.5))

    def flipped(self) -> 'Measure':
        """The measure p -> S(1 - p); only KL changes (q -> 1 - q)."""
        if self.kind == 'kl':
            return Measure('kl', q=1.0 - self.q)
        return self


def parse_measure(spec: str) -> Measure:
    """Build a Measure from ``shannon[:C]``, ``renyi:a``, ``tsallis:a`` or ``kl:q``."""
    kind, _, argument = str(spec).strip().partition(':')
    kind = kind.strip().lower()
    try:
        value = float(argument) if argument.strip() else None
    except ValueError:
        raise SemiringValidationError(f"Measure parameter in {spec!r} is not a number.")
    if kind == 'shannon':
        return Measure('shannon', C=1.0 if value is None else value)
    if value is None:
        raise SemiringValidationError(f"Measure {spec!r} needs a parameter, e.g. '{kind}:0.5'.")
    if kind in ('renyi', 'tsallis'):
        return Measure(kind, alpha=value)
    if kind == 'kl':
        return Measure('kl', q=value)
    raise SemiringValidationError(f"Unknown measure spec {spec!r}.")


def _shannon(p, C=1.0):
    return -C * (xlogy(p, p) + xlogy(1.0 - p, 1.0 - p))


def binary_values(m: Measure, p):
    """S(p) for arrays already known to lie in [0, 1] up to rounding."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    if m.kind == 'shannon':
        return _shannon(p, m.C)
    if m.is_shannon_limit:
        return _shannon(p)
    if m.kind == 'renyi':
        return np.log(p ** m.alpha + (1.0 - p) ** m.alpha) / (1.0 - m.alpha)
    if m.kind == 'tsallis':
        return (1.0 - p ** m.alpha - (1.0 - p) ** m.alpha) / (m.alpha - 1.0)
    # -KL(p; q)
    return -(xlogy(p, p) - p * math.log(m.q) + xlogy(1.0 - p, 1.0 - p) - (1.0 - p) * math.log1p(-m.q))


def entropy2(m: Measure, p):
    """S(p) for a scalar or array p in [0, 1]."""
    values = np.asarray(p, dtype=float)
    if np.any(np.isnan(values)) or np.any(values < 0) or np.any(values > 1):
        raise SemiringValidationError(f"Probabilities must lie in [0, 1], got {p!r}.")
    result = binary_values(m, values)
    return float(result) if np.ndim(result) == 0 else result


def check_simplex(probs: Sequence[float]) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise SemiringValidationError("A probability vector must be a nonempty list.")
    if np.any(np.isnan(probs)) or np.any(probs < 0):
        raise SemiringValidationError(f"Probabilities must be nonnegative, got {probs.tolist()!r}.")
    if abs(probs.sum() - 1.0) > SUM_TOL:
        raise SemiringValidationError(f"Probabilities must sum to 1 (sum is {probs.sum()!r}).")
    return probs


def chain_values(m: Measure, P) -> np.ndarray:
    """
    Chain extension along the last axis of P:

        S_n(p) = sum_{j<n} r_j S(p_j / r_j),  r_j = 1 - sum_{i<j} p_i,

    where r_j is taken as the tail sum p_j + ... + p_n and terms with
    r_j = 0 vanish.
    """
    P = np.asarray(P, dtype=float)
    tails = np.cumsum(P[..., ::-1], axis=-1)[..., ::-1]
    rest = tails[..., :-1]
    head = P[..., :-1]
    positive = rest > 0
    ratio = np.where(positive, head / np.where(positive, rest, 1.0), 0.0)
    terms = np.where(positive, rest * binary_values(m, ratio), 0.0)
    return terms.sum(axis=-1)


def direct_values(m: Measure, P) -> np.ndarray:
    """Symmetric n-ary closed forms f(sum g(p_i)) along the last axis of P."""
    P = np.clip(np.asarray(P, dtype=float), 0.0, 1.0)
    if m.kind == 'kl':
        raise SemiringValidationError("The KL measure has no direct n-ary form.")
    if m.kind == 'shannon':
        return -m.C * xlogy(P, P).sum(axis=-1)
    if m.is_shannon_limit:
        return -xlogy(P, P).sum(axis=-1)
    powers = (P ** m.alpha).sum(axis=-1)
    if m.kind == 'renyi':
        return np.log(powers) / (1.0 - m.alpha)
    return (1.0 - powers) / (m.alpha - 1.0)


def entropy_chain(m: Measure, probs: Sequence[float]) -> float:
    return float(chain_values(m, check_simplex(probs)))


def entropy_n(m: Measure, probs: Sequence[float]) -> float:
    return float(direct_values(m, check_simplex(probs)))


def independence_defect(m: Measure, ps: Sequence[float], qs: Sequence[float]) -> float:
    """
    |S(p x q) - S(p) - S(q) - k S(p) S(q)| for the joint law of independent
    systems, with k = 0 for Shannon and Renyi and k = 1 - alpha for Tsallis.
    """
    ps, qs = check_simplex(ps), check_simplex(qs)
    joint = np.outer(ps, qs).ravel()
    k = (1.0 - m.alpha) if m.kind == 'tsallis' and not m.is_shannon_limit else 0.0
    sp, sq = float(direct_values(m, ps)), float(direct_values(m, qs))
    return abs(float(direct_values(m, joint)) - sp - sq - k * sp * sq)


@dataclass
class AxiomReport:
    measure: str
    alpha: float
    tol: float
    defects: Dict[str, float] = field(default_factory=dict)
    witnesses: Dict[str, list] = field(default_factory=dict)

    @property
    def passed(self) -> Dict[str, bool]:
        return {name: value <= self.tol for name, value in self.defects.items()}

    def as_dict(self) -> dict:
        data = asdict(self)
        data['passed'] = self.passed
        return data


def _worst(defect: np.ndarray, *coords: np.ndarray):
    index = int(np.argmax(defect))
    return float(defect[index]), [float(c[index]) for c in coords]


def _grouping_terms(m: Measure, s, p1, p2):
    """S(p1) + (1-p1)^s S(p2/(1-p1)) - S(p1+p2) - (p1+p2)^s S(p1/(p1+p2))."""
    rest = 1.0 - p1
    joined = p1 + p2
    right = np.where(rest > 0, rest ** s * binary_values(m, np.where(rest > 0, p2 / np.where(rest > 0, rest, 1.0), 0.0)), 0.0)
    left = np.where(joined > 0, joined ** s * binary_values(m, np.where(joined > 0, p1 / np.where(joined > 0, joined, 1.0), 0.0)), 0.0)
    return np.abs(binary_values(m, p1) + right - binary_values(m, joined) - left)


def axiom_report(m: Measure, grid_step: float, tol: float, alpha: Optional[float] = None) -> AxiomReport:
    """
    Maximum axiom defects of m over a probability grid of the given step.

    ``alpha`` is the exponent of the alpha-associativity check; it defaults
    to the Tsallis order for Tsallis measures and to 1 otherwise.
    """
    if not 0 < grid_step <= 0.1:
        raise SemiringValidationError(f"grid_step must lie in (0, 0.1], got {grid_step!r}.")
    if alpha is None:
        alpha = m.alpha if m.kind == 'tsallis' else 1.0
    report = AxiomReport(measure=m.spec, alpha=float(alpha), tol=float(tol))

    steps = int(round(1.0 / grid_step))
    p = np.linspace(0.0, 1.0, steps + 1)
    report.defects['commutativity'], report.witnesses['commutativity'] = _worst(
        np.abs(binary_values(m, p) - binary_values(m, 1.0 - p)), p)
    report.defects['left_identity'] = abs(float(binary_values(m, 0.0)))
    report.defects['right_identity'] = abs(float(binary_values(m, 1.0)))

    pairs = simplex_grid(3, steps)
    p1, p2 = pairs[:, 0], pairs[:, 1]
    report.defects['associativity'], report.witnesses['associativity'] = _worst(
        _grouping_terms(m, 1.0, p1, p2), p1, p2)
    report.defects['alpha_associativity'], report.witnesses['alpha_associativity'] = _worst(
        _grouping_terms(m, alpha, p1, p2), p1, p2)

    report.defects['khinchin'], report.witnesses['khinchin'] = _khinchin_defect(m, max(grid_step, 0.02))
    logger.debug("axiom report for %s: %s", m.spec, report.defects)
    return report


def _khinchin_defect(m: Measure, step: float):
    """Grouping defect of the chain extension: S_4(p) vs S_2(g) + sum g_i S_2(p | group i)."""
    P = simplex_grid(4, int(round(1.0 / step)))
    g1, g2 = P[:, 0] + P[:, 1], P[:, 2] + P[:, 3]
    groups = np.stack([g1, g2], axis=-1)

    def conditional(block, total):
        safe = np.where(total > 0, total, 1.0)[:, None]
        return np.where(total[:, None] > 0, block / safe, np.array([1.0, 0.0]))

    grouped = (chain_values(m, groups)
               + g1 * chain_values(m, conditional(P[:, :2], g1))
               + g2 * chain_values(m, conditional(P[:, 2:], g2)))
    defect = np.abs(chain_values(m, P) - grouped)
    index = int(np.argmax(defect))
    return float(defect[index]), P[index].tolist()
