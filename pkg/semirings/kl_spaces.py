"""
KL-deformed additions parameterised by binary sequences, multifractal
statistics of Cantor-type sets, and the multivariate (hyperfield) sum.
"""
import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from .entropy import Measure
from .exceptions import SemiringValidationError
from .solvers import SolverSettings
from .tropical import tropical_add, tropical_value
from .witt import WittContext, commutator, oplus

logger = logging.getLogger(__name__)

TupleValue = Tuple[float, ...]

ENUMERATION_LIMIT = 12
MAX_PRODUCT_N = 4
DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class BitString:
    bits: Tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise SemiringValidationError("A bit string must be nonempty.")
        if any(bit not in (0, 1) for bit in self.bits):
            raise SemiringValidationError("Bits must be 0 or 1.")

    @classmethod
    def parse(cls, text: str) -> 'BitString':
        text = str(text).strip()
        if not text or set(text) - {'0', '1'}:
            raise SemiringValidationError(f"{text!r} is not a nonempty string of 0s and 1s.")
        return cls(tuple(int(ch) for ch in text))

    def __str__(self):
        return ''.join(str(bit) for bit in self.bits)

    def __len__(self):
        return len(self.bits)


def digit_frequency(s: BitString) -> float:
    """a_n / n, the share of 1s in the prefix."""
    return sum(s.bits) / len(s.bits)


def bitflip(s: BitString) -> BitString:
    return BitString(tuple(1 - bit for bit in s.bits))


def kl_measure(s: BitString) -> Measure:
    """The measure -KL(.; q(s)); all-0 and all-1 prefixes are outside KL's domain."""
    return Measure('kl', q=digit_frequency(s))


def tuple_value(coords: Sequence) -> TupleValue:
    values = tuple(tropical_value(c) for c in coords)
    if not values:
        raise SemiringValidationError("A tuple value needs at least one coordinate.")
    return values


def _same_length(*tuples: Sequence) -> int:
    lengths = {len(t) for t in tuples}
    if len(lengths) != 1:
        raise SemiringValidationError(f"Length mismatch: {sorted(lengths)}.")
    return lengths.pop()


def pointwise_oplus(qs: Sequence[float], xs: Sequence, ys: Sequence, T: float,
                    solver: Optional[SolverSettings] = None) -> TupleValue:
    """Coordinate i is x_i (+) y_i for the measure -KL(.; q_i) at temperature T."""
    _same_length(qs, xs, ys)
    xs, ys = tuple_value(xs), tuple_value(ys)
    solver = solver or SolverSettings()
    return tuple(
        oplus(WittContext(Measure('kl', q=float(q)), T, solver=solver), x, y).value
        for q, x, y in zip(qs, xs, ys)
    )


def cantor_report(prefix: BitString, T: float, x: float, y: float,
                  solver: Optional[SolverSettings] = None) -> dict:
    """
    The addition indexed by a prefix: its value, commutator, and the check
    that flipping the digits is undone by swapping the arguments.
    """
    solver = solver or SolverSettings()
    ctx = WittContext(kl_measure(prefix), T, solver=solver)
    flipped = WittContext(kl_measure(bitflip(prefix)), T, solver=solver)
    value = oplus(ctx, x, y).value
    return {
        'prefix': str(prefix),
        'q': ctx.measure.q,
        'oplus': value,
        'comm_defect': commutator(ctx, x, y),
        'flipped_check': abs(value - oplus(flipped, y, x).value),
    }


def multifractal_stats(q: float, p: float, lambda1: float, lambda2: float) -> dict:
    """
    Local entropy h = q log p + (1-q) log(1-p), local dimension h / log(lambda1)
    and Lyapunov exponent q log(lambda1) + (1-q) log(lambda2).
    """
    if not 0 <= q <= 1:
        raise SemiringValidationError(f"q must lie in [0, 1], got {q!r}.")
    for name, value in (('p', p), ('lambda1', lambda1), ('lambda2', lambda2)):
        if not 0 < value < 1:
            raise SemiringValidationError(f"{name} must lie in (0, 1), got {value!r}.")
    local_entropy = q * math.log(p) + (1 - q) * math.log1p(-p)
    return {
        'local_entropy': local_entropy,
        'local_dim': local_entropy / math.log(lambda1),
        'lyapunov': q * math.log(lambda1) + (1 - q) * math.log(lambda2),
    }


def _coordinatewise_min(xs: TupleValue, ys: TupleValue) -> FrozenSet[TupleValue]:
    choices = []
    for x, y in zip(xs, ys):
        if math.isinf(x) and math.isinf(y):
            choices.append((x,))
        else:
            choices.append((tropical_add(x, y),))
    if any(math.isinf(c[0]) for c in choices):
        # Every candidate has infinite trace; all coordinate choices tie.
        choices = [tuple({x, y}) for x, y in zip(xs, ys)]
    return frozenset(product(*choices))


def hyper_add(xs: Sequence, ys: Sequence) -> FrozenSet[TupleValue]:
    """
    All tuples (z_1..z_n), z_i in {x_i, y_i}, with the smallest coordinate
    sum (the largest trace in the semiring order). Enumerated up to
    ENUMERATION_LIMIT coordinates, coordinate-wise beyond.
    """
    n = _same_length(xs, ys)
    xs, ys = tuple_value(xs), tuple_value(ys)
    if n > ENUMERATION_LIMIT:
        return _coordinatewise_min(xs, ys)
    masks = np.array(list(product((False, True), repeat=n)), dtype=bool)
    candidates = np.where(masks, np.array(ys)[None, :], np.array(xs)[None, :])
    traces = candidates.sum(axis=1)
    best = traces.min()
    return frozenset(tuple(float(v) for v in row) for row in candidates[traces == best])


def marginal_minimizers(qs: Sequence[float], xs: Sequence, ys: Sequence, T: float,
                        solver: Optional[SolverSettings] = None) -> Tuple[float, ...]:
    """The equilibrium fractions p_i of the coordinate-wise KL additions."""
    _same_length(qs, xs, ys)
    solver = solver or SolverSettings()
    return tuple(
        oplus(WittContext(Measure('kl', q=float(q)), T, solver=solver), x, y).argmin_p
        for q, x, y in zip(qs, tuple_value(xs), tuple_value(ys))
    )


def oplus_marginal(qs: Sequence[float], xs: Sequence, ys: Sequence, T: float,
                   tie_tol: float = DEFAULT_TIE_TOL,
                   solver: Optional[SolverSettings] = None) -> FrozenSet[TupleValue]:
    """
    min over (p_1..p_n) of sum_i p_i x_i + (1 - p_i) y_i + T KL(p_i; q_i),
    reported as the set of coordinate-value tuples at the minimisers.

    The objective separates by coordinate and each coordinate is strictly
    convex in p_i for T > 0, so every coordinate has exactly one minimiser
    and the set is always a singleton. ``tie_tol`` is validated but never
    changes the result. The multivalued hyperfield sum is the T -> 0
    limit, ``hyper_add``.
    """
    if not T > 0:
        raise SemiringValidationError("oplus_marginal needs T > 0.")
    if not tie_tol > 0:
        raise SemiringValidationError("tie_tol must be positive.")
    _same_length(qs, xs, ys)
    solver = solver or SolverSettings()
    values = []
    for q, x, y in zip(qs, tuple_value(xs), tuple_value(ys)):
        found = oplus(WittContext(Measure('kl', q=float(q)), T, solver=solver), x, y)
        if found.multiplicity_hint:
            logger.debug("tied minimisers for q=%s at (%s, %s)", q, x, y)
        values.append(found.value)
    return frozenset([tuple(values)])


def kl_divergence(p: float, q: float) -> float:
    """Binary KL(p; q) with the 0 log 0 = 0 convention."""
    return float(xlogy(p, p / q) + xlogy(1.0 - p, (1.0 - p) / (1.0 - q)))


def kl_product_defect(ps: Sequence[float], qs: Sequence[float]) -> float:
    """
    |KL(prod p; prod q) - sum_i KL(p_i; q_i)| with the left side summed over
    all 2^n outcomes of the product Bernoulli laws.
    """
    n = _same_length(ps, qs)
    if n > MAX_PRODUCT_N:
        raise SemiringValidationError(f"Product enumeration supports n <= {MAX_PRODUCT_N}, got {n}.")
    for value in list(ps) + list(qs):
        if not 0 < value < 1:
            raise SemiringValidationError(f"Bernoulli parameters must lie in (0, 1), got {value!r}.")
    ps, qs = np.asarray(ps, dtype=float), np.asarray(qs, dtype=float)
    outcomes = np.array(list(product((0, 1), repeat=n)), dtype=bool)
    joint_p = np.prod(np.where(outcomes, ps, 1.0 - ps), axis=1)
    joint_q = np.prod(np.where(outcomes, qs, 1.0 - qs), axis=1)
    joint = float(np.sum(xlogy(joint_p, joint_p / joint_q)))
    marginal = sum(kl_divergence(p, q) for p, q in zip(ps, qs))
    return abs(joint - marginal)
