"""
Entropy-deformed additions on the min-plus carrier.

    x (+)_{S,T} y = min_p  p x + (1 - p) y - T S(p)

plus the exponent-deformed variant, the n-ary operation over the simplex,
closed forms where they exist, and the algebraic defect functionals.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .entropy import Measure, binary_values, chain_values
from .exceptions import NumericalError, SemiringValidationError
from .solvers import BatchMinimum, SolverSettings, minimize_simplex, minimize_unit_interval
from .tropical import tropical_value

logger = logging.getLogger(__name__)

DEFORMED_GRID_N = 2048
MAX_NARY = 6


@dataclass(frozen=True)
class WittContext:
    """Measure, temperature (k_B = 1) and solver settings; defines the addition."""
    measure: Measure
    T: float = 1.0
    deform_alpha: Optional[float] = None
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if math.isnan(self.T) or self.T < 0 or math.isinf(self.T):
            raise SemiringValidationError(f"Temperature must be a finite nonnegative real, got {self.T!r}.")
        if self.deform_alpha is not None and not self.deform_alpha > 0:
            raise SemiringValidationError(f"deform_alpha must be positive, got {self.deform_alpha!r}.")

    @property
    def deformed(self) -> bool:
        return self.deform_alpha is not None and self.deform_alpha != 1.0

    def at(self, T: float) -> 'WittContext':
        return replace(self, T=T)

    def with_measure(self, measure: Measure) -> 'WittContext':
        return replace(self, measure=measure)


@dataclass(frozen=True)
class OplusResult:
    value: float
    argmin_p: float
    multiplicity_hint: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _carrier_array(values) -> np.ndarray:
    array = np.atleast_1d(np.asarray(values, dtype=float))
    if np.any(np.isnan(array)):
        raise SemiringValidationError("NaN is not an element of the tropical semifield.")
    if np.any(array == -np.inf):
        raise SemiringValidationError("-inf is not representable in the min-plus carrier.")
    return array


def oplus_many(ctx: WittContext, xs, ys) -> BatchMinimum:
    """
    Row-wise x (+) y for broadcastable arrays of carrier values.

    Infinite arguments are resolved analytically: x = inf forces p = 0,
    y = inf forces p = 1. At T = 0 the undeformed operation is min(x, y).
    """
    x, y = np.broadcast_arrays(_carrier_array(xs), _carrier_array(ys))
    x, y = x.ravel(), y.ravel()
    S, T = ctx.measure, ctx.T
    values = np.empty(x.size)
    argmins = np.zeros(x.size)
    multiple = np.zeros(x.size, dtype=bool)

    x_inf, y_inf = np.isinf(x), np.isinf(y)
    values[x_inf & y_inf] = np.inf
    only_x = x_inf & ~y_inf
    values[only_x] = y[only_x] - T * float(binary_values(S, 0.0))
    only_y = y_inf & ~x_inf
    values[only_y] = x[only_y] - T * float(binary_values(S, 1.0))
    argmins[only_y] = 1.0

    finite = ~(x_inf | y_inf)
    if np.any(finite):
        xf, yf = x[finite], y[finite]
        if ctx.deformed:
            a = ctx.deform_alpha

            def objective(p, x, y):
                return p ** a * x + (1.0 - p) ** a * y - T * binary_values(S, p)

            found = minimize_unit_interval(objective, xf, yf, settings=ctx.solver,
                                           grid_n=max(ctx.solver.grid_n, DEFORMED_GRID_N))
            values[finite] = found.values
        elif T == 0:
            found = BatchMinimum(values=np.minimum(xf, yf),
                                 argmins=np.where(xf < yf, 1.0, 0.0),
                                 multiple=xf == yf)
            values[finite] = found.values
        else:
            # Work relative to y: p x + (1-p) y = y + p (x - y).
            def objective(p, d):
                return p * d - T * binary_values(S, p)

            found = minimize_unit_interval(objective, xf - yf, settings=ctx.solver)
            values[finite] = yf + found.values
        argmins[finite] = found.argmins
        multiple[finite] = found.multiple
        if not np.all(np.isfinite(values[finite])):
            raise NumericalError("a finite pair of arguments produced an infinite sum.")
    return BatchMinimum(values=values, argmins=argmins, multiple=multiple)


def oplus(ctx: WittContext, x, y) -> OplusResult:
    """x (+)_{S,T} y with its equilibrium fraction p_T. Uses the deformed objective when ctx carries one."""
    found = oplus_many(ctx, tropical_value(x), tropical_value(y))
    return OplusResult(value=float(found.values[0]), argmin_p=float(found.argmins[0]),
                       multiplicity_hint=bool(found.multiple[0]))


def oplus_deformed(ctx: WittContext, x, y) -> float:
    """min_s s^a x + (1-s)^a y - T S(s) for a = ctx.deform_alpha."""
    if ctx.deform_alpha is None:
        raise SemiringValidationError("oplus_deformed needs a context with deform_alpha set.")
    return oplus(ctx, x, y).value


def _closed_form_temperature(ctx: WittContext) -> float:
    if ctx.measure.kind not in ('shannon', 'kl'):
        raise SemiringValidationError(f"No closed form for {ctx.measure.spec}; only shannon and kl have one.")
    if ctx.deformed:
        raise SemiringValidationError("Closed forms exist only for the undeformed operation.")
    if not ctx.T > 0:
        raise SemiringValidationError("Closed forms need T > 0.")
    return ctx.T * ctx.measure.C if ctx.measure.kind == 'shannon' else ctx.T


def _neg_t_logsumexp(T, exponents, weights):
    exponents = np.asarray(exponents, dtype=float)
    if np.all(exponents == -np.inf):
        return math.inf
    return float(-T * logsumexp(exponents, b=weights))


def oplus_closed(ctx: WittContext, x, y, form: str = 'variational') -> float:
    """
    Closed forms of the addition.

    Shannon: -T log(e^{-x/T} + e^{-y/T}).
    KL, ``form='variational'``: -T log(q e^{-x/T} + (1-q) e^{-y/T}), the exact
    minimum of the defining objective. ``form='published'`` gives
    -T log(e^{-x/(qT)} + e^{-y/((1-q)T)}), kept for comparison only.
    """
    T = _closed_form_temperature(ctx)
    x, y = tropical_value(x), tropical_value(y)
    if ctx.measure.kind == 'shannon':
        return _neg_t_logsumexp(T, [-x / T, -y / T], None)
    q = ctx.measure.q
    if form == 'variational':
        return _neg_t_logsumexp(T, [-x / T, -y / T], [q, 1.0 - q])
    if form == 'published':
        return _neg_t_logsumexp(T, [-x / (q * T), -y / ((1.0 - q) * T)], None)
    raise SemiringValidationError(f"Unknown closed form {form!r}; expected 'variational' or 'published'.")


def oplus_max_times(ctx: WittContext, a: float, b: float) -> float:
    """The Shannon addition read in the max-times semifield: (a^{1/T} + b^{1/T})^T."""
    if ctx.measure.kind != 'shannon':
        raise SemiringValidationError("The max-times form is defined for the Shannon measure.")
    if min(a, b) < 0 or math.isnan(a) or math.isnan(b):
        raise SemiringValidationError("max-times elements are nonnegative reals.")
    if ctx.T == 0:
        return max(a, b)
    T = ctx.T * ctx.measure.C
    if a == 0 and b == 0:
        return 0.0
    logs = [math.log(v) / T if v > 0 else -math.inf for v in (a, b)]
    return math.exp(T * logsumexp(logs))


def oplus_nary(ctx: WittContext, xs: Sequence, family=None) -> float:
    """
    min over the simplex of sum p_i x_i - T S_n(p).

    ``family`` supplies S_n through ``family.values(P)`` (rows of P are
    points of the n-simplex); the chain extension of ctx.measure is used
    when it is omitted. Infinite entries pin their p_i to 0.
    """
    x = _carrier_array([tropical_value(v) for v in xs])
    n = x.size
    if n < 2:
        raise SemiringValidationError("oplus_nary needs at least two arguments.")
    if n > MAX_NARY:
        raise SemiringValidationError(f"oplus_nary supports at most {MAX_NARY} arguments, got {n}.")
    if ctx.deformed:
        raise SemiringValidationError("oplus_nary is defined for the undeformed operation only.")

    def entropy(P):
        if family is None:
            return chain_values(ctx.measure, P)
        return family.values(P)

    if ctx.T == 0:
        return float(np.min(x))
    support = np.flatnonzero(np.isfinite(x))
    if support.size == 0:
        return math.inf

    def embed(P):
        full = np.zeros(P.shape[:-1] + (n,))
        full[..., support] = P
        return full

    shift = float(np.min(x[support]))
    energies = x[support] - shift
    if support.size == 1:
        vertex = embed(np.ones((1, 1)))
        return shift + float(energies[0] - ctx.T * entropy(vertex)[0])

    def objective(P):
        return P @ energies - ctx.T * entropy(embed(P))

    value, point = minimize_simplex(objective, support.size, ctx.solver)
    logger.debug("oplus_nary over %d finite arguments settled at %s", support.size, point)
    result = shift + value
    if not math.isfinite(result):
        raise NumericalError("oplus_nary produced a non-finite value from finite arguments.")
    return result


def gap(a, b) -> np.ndarray:
    """|a - b| with gap(inf, inf) = 0."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    with np.errstate(invalid='ignore'):
        distance = np.abs(a - b)
    return np.where(a == b, 0.0, distance)


def commutator_many(ctx: WittContext, xs, ys) -> np.ndarray:
    return gap(oplus_many(ctx, xs, ys).values, oplus_many(ctx, ys, xs).values)


def associator_many(ctx: WittContext, xs, ys, zs) -> np.ndarray:
    right = oplus_many(ctx, xs, oplus_many(ctx, ys, zs).values).values
    left = oplus_many(ctx, oplus_many(ctx, xs, ys).values, zs).values
    return gap(right, left)


def commutator(ctx: WittContext, x, y) -> float:
    """|x (+) y - y (+) x|."""
    return float(commutator_many(ctx, [tropical_value(x)], [tropical_value(y)])[0])


def associator(ctx: WittContext, x, y, z) -> float:
    """|x (+) (y (+) z) - (x (+) y) (+) z|."""
    return float(associator_many(ctx, [tropical_value(x)], [tropical_value(y)], [tropical_value(z)])[0])


def defect_report(ctx: WittContext, kind: str, samples: int, seed: int,
                  low: float = -3.0, high: float = 3.0) -> dict:
    """
    Largest commutator (``kind='comm'``) or associator (``kind='assoc'``)
    over seeded uniform samples from [low, high].
    """
    if samples < 1:
        raise SemiringValidationError("samples must be positive.")
    rng = np.random.default_rng(seed)
    if kind == 'comm':
        points = rng.uniform(low, high, size=(samples, 2))
        defects = commutator_many(ctx, points[:, 0], points[:, 1])
    elif kind == 'assoc':
        points = rng.uniform(low, high, size=(samples, 3))
        defects = associator_many(ctx, points[:, 0], points[:, 1], points[:, 2])
    else:
        raise SemiringValidationError(f"Unknown defect kind {kind!r}; expected 'comm' or 'assoc'.")
    worst = int(np.argmax(defects))
    return {
        'kind': kind,
        'commutative_measure': ctx.measure.is_commutative,
        'max_defect': float(defects[worst]),
        'mean_defect': float(np.mean(defects)),
        'witness': [float(v) for v in points[worst]],
    }


def kl_closed_form_report(ctx: WittContext, samples: int = 200, seed: int = 0,
                          low: float = -4.0, high: float = 4.0) -> dict:
    """Compare both KL closed forms against the minimised objective on seeded pairs."""
    if ctx.measure.kind != 'kl':
        raise SemiringValidationError("The closed-form report is defined for KL measures.")
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(low, high, size=(samples, 2))
    numeric = oplus_many(ctx, pairs[:, 0], pairs[:, 1]).values
    errors = {}
    for form in ('variational', 'published'):
        closed = np.array([oplus_closed(ctx, x, y, form=form) for x, y in pairs])
        errors[form] = float(np.max(np.abs(closed - numeric)))
    match = min(errors, key=errors.get)
    logger.info("KL closed forms vs oracle for %s at T=%s: %s", ctx.measure.spec, ctx.T, errors)
    return {
        'q': ctx.measure.q,
        'T': ctx.T,
        'samples': samples,
        'variational_max_error': errors['variational'],
        'published_max_error': errors['published'],
        'oracle_match': match,
    }
