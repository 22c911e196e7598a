"""
The successor function lambda(x, T) = x (+) 0 and the identities it carries.

lambda encodes the whole binary operation, x (+) y = lambda(x - y) + y, and
is the Legendre transform of T S, so T S(p) = min_x p x - lambda(x).
"""
import csv
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, TextIO

import numpy as np
from scipy.optimize import bisect

from .entropy import binary_values
from .exceptions import SemiringValidationError
from .witt import OplusResult, WittContext, oplus, oplus_closed, oplus_many

logger = logging.getLogger(__name__)

BISECT_XTOL = 1e-12
DEFAULT_STEP = 1e-4
RECOVERY_SPAN = 40.0


@dataclass(frozen=True)
class SuccessorCurve:
    ctx: WittContext
    xs: np.ndarray
    values: np.ndarray
    argmins: np.ndarray

    def write_csv(self, stream: TextIO) -> None:
        """Rows ``x,lambda,argmin_p`` with shortest round-trip floats."""
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(['x', 'lambda', 'argmin_p'])
        for x, value, p in zip(self.xs, self.values, self.argmins):
            writer.writerow([repr(float(x)), repr(float(value)), repr(float(p))])


def successor(ctx: WittContext, x) -> OplusResult:
    return oplus(ctx, x, 0.0)


def successor_many(ctx: WittContext, xs) -> np.ndarray:
    return oplus_many(ctx, xs, 0.0).values


def _tsallis_successor(ctx: WittContext, x: float) -> float:
    """
    Solve T S'(p) = x for the Tsallis measure; outside the range of S'
    the minimiser sits at p = 0 (lambda = 0) or p = 1 (lambda = x).
    """
    a, T = ctx.measure.alpha, ctx.T
    scale = a / (a - 1.0)

    def slope_gap(p):
        return T * scale * ((1.0 - p) ** (a - 1.0) - p ** (a - 1.0)) - x

    if a > 1:
        lo, hi = 0.0, 1.0
    else:
        # S' is unbounded at both ends; stay on representable interior points.
        lo, hi = np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0)
    if slope_gap(lo) <= 0:
        p = lo
    elif slope_gap(hi) >= 0:
        p = hi
    else:
        p = bisect(slope_gap, lo, hi, xtol=BISECT_XTOL)
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return x
    return p * x - T * float(binary_values(ctx.measure, p))


def successor_closed(ctx: WittContext, x, form: str = 'variational') -> float:
    """
    Closed or piecewise-closed lambda for shannon, kl and tsallis.

    Shannon: -T log(1 + e^{-x/T}); KL: the closed forms of oplus_closed at
    y = 0; Tsallis: inverse of the derivative by bisection, with the flat
    branches 0 and x where the derivative range is bounded (alpha > 1).
    """
    m = ctx.measure
    if m.kind == 'renyi' and not m.is_shannon_limit:
        raise SemiringValidationError("The Renyi successor has no closed form.")
    if ctx.deformed:
        raise SemiringValidationError("Closed successor forms exist only for the undeformed operation.")
    x = float(x)
    if math.isinf(x):
        return successor(ctx, x).value
    if ctx.T == 0:
        return min(x, 0.0)
    if m.kind in ('shannon', 'kl'):
        return oplus_closed(ctx, x, 0.0, form=form)
    if m.is_shannon_limit:
        return -ctx.T * float(np.logaddexp(0.0, -x / ctx.T))
    return _tsallis_successor(ctx, x)


def entropy_from_curve(curve: SuccessorCurve, ps) -> np.ndarray:
    """min over the curve grid of p x - lambda(x), for each p."""
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    return np.min(ps[:, None] * curve.xs[None, :] - curve.values[None, :], axis=1)


def recover_entropy(ctx: WittContext, p: float, x_grid) -> float:
    """T S(p) read back from the successor function sampled on x_grid."""
    if not ctx.T > 0:
        raise SemiringValidationError("Entropy recovery needs T > 0.")
    if not 0 <= p <= 1:
        raise SemiringValidationError(f"p must lie in [0, 1], got {p!r}.")
    xs = np.asarray(x_grid, dtype=float)
    span = RECOVERY_SPAN * ctx.T
    if xs.size < 2 or xs.min() > -span or xs.max() < span:
        raise SemiringValidationError(f"x_grid must span at least [-{span}, {span}].")
    values = successor_many(ctx, xs)
    curve = SuccessorCurve(ctx=ctx, xs=xs, values=values, argmins=np.zeros_like(xs))
    return float(entropy_from_curve(curve, p)[0])


def cumulant_residuals(ctx: WittContext, x: float, h: float = DEFAULT_STEP) -> Dict[str, float]:
    """
    Residuals of the Euler relation lambda = x d_x lambda + T d_T lambda and
    of the first cumulant lambda - T d_T lambda = p_T(x) x, with central
    differences of step h * max(1, |x|, T).
    """
    if not ctx.T > 0:
        raise SemiringValidationError("Cumulant identities need T > 0.")
    if not 1e-6 <= h <= 1e-2:
        raise SemiringValidationError(f"h must lie in [1e-6, 1e-2], got {h!r}.")
    x = float(x)
    step = h * max(1.0, abs(x), ctx.T)
    t_step = min(step, ctx.T / 2)

    centre = successor(ctx, x)
    left, right = successor_many(ctx, [x - step, x + step])
    d_x = (right - left) / (2 * step)
    colder = successor(ctx.at(ctx.T - t_step), x).value
    hotter = successor(ctx.at(ctx.T + t_step), x).value
    d_T = (hotter - colder) / (2 * t_step)

    lam = centre.value
    return {
        'euler': abs(lam - x * d_x - ctx.T * d_T),
        'first_cumulant': abs(lam - ctx.T * d_T - centre.argmin_p * x),
        'argmin_p': centre.argmin_p,
    }


def sample_curve(ctx: WittContext, x_min: float, x_max: float, step: float) -> SuccessorCurve:
    """Successor values and equilibrium fractions on the inclusive grid x_min, x_min + step, ..., x_max."""
    if not x_min < x_max:
        raise SemiringValidationError("x_min must be smaller than x_max.")
    if not step > 0:
        raise SemiringValidationError("step must be positive.")
    count = int(math.floor((x_max - x_min) / step + 1e-9)) + 1
    xs = x_min + step * np.arange(count)
    found = oplus_many(ctx, xs, 0.0)
    logger.info("sampled %d successor points for %s at T=%s", count, ctx.measure.spec, ctx.T)
    return SuccessorCurve(ctx=ctx, xs=xs, values=found.values, argmins=found.argmins)


def skew_defect(ctx: WittContext, xs: Iterable[float]) -> float:
    """max |lambda(x) - lambda(-x) - x|; zero exactly when S is commutative."""
    xs = np.asarray(list(xs), dtype=float)
    return float(np.max(np.abs(successor_many(ctx, xs) - successor_many(ctx, -xs) - xs)))


def associativity_defect(ctx: WittContext, xs, ys) -> float:
    """max |lambda(x - lambda(y)) + lambda(y) - lambda(lambda(x - y) + y)| over paired xs, ys."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    lam_y = successor_many(ctx, ys)
    left = successor_many(ctx, xs - lam_y) + lam_y
    right = successor_many(ctx, successor_many(ctx, xs - ys) + ys)
    return float(np.max(np.abs(left - right)))


def envelope_defect(ctx: WittContext, xs) -> float:
    """
    Largest violation of min(0, x) - T max S <= lambda(x) <= min(0, x) over xs.

    Needs S >= 0 with S(0) = S(1) = 0, so KL measures and deformed
    contexts are rejected.
    """
    if ctx.measure.kind == 'kl':
        raise SemiringValidationError("The successor envelope needs a nonnegative entropy; KL is not one.")
    if ctx.deformed:
        raise SemiringValidationError("The successor envelope is defined for the undeformed operation only.")
    xs = np.asarray(xs, dtype=float)
    upper = np.minimum(0.0, xs)
    lower = upper - ctx.T * ctx.measure.maximum()
    values = successor_many(ctx, xs)
    excess = np.maximum(lower - values, values - upper)
    return float(max(0.0, np.max(excess)))
