"""
The min-plus carrier R ∪ {+∞}.

Values are plain floats. ``math.inf`` is the additive identity (the zero of
the semifield) and ``0.0`` the multiplicative one. The max-times semifield
R_{>=0} is reached through ``to_max_times`` / ``from_max_times``.
"""
import math
from typing import Union

from .exceptions import NumericalError, SemiringValidationError

TropicalValue = float

INFINITY: TropicalValue = math.inf
ONE: TropicalValue = 0.0


def tropical_value(x: Union[float, int, str]) -> TropicalValue:
    """Validate and coerce a carrier element. Accepts 'inf' / 'oo' spellings."""
    try:
        if isinstance(x, str):
            text = x.strip().lower()
            x = math.inf if text in ('inf', '+inf', 'oo', 'infinity') else float(text)
        x = float(x)
    except (TypeError, ValueError):
        raise SemiringValidationError(f"{x!r} is not a real number or inf.")
    if math.isnan(x):
        raise SemiringValidationError("NaN is not an element of the tropical semifield.")
    if x == -math.inf:
        raise SemiringValidationError("-inf is not representable in the min-plus carrier.")
    return x


def is_zero(x: TropicalValue) -> bool:
    return x == math.inf


def tropical_add(x: TropicalValue, y: TropicalValue) -> TropicalValue:
    return x if x <= y else y


def tropical_mul(x: TropicalValue, y: TropicalValue) -> TropicalValue:
    if x == math.inf or y == math.inf:
        return math.inf
    result = x + y
    if math.isinf(result):
        raise NumericalError(f"tropical product {x!r} + {y!r} overflowed.")
    return result


def frobenius(x: TropicalValue, r: float) -> TropicalValue:
    """The r-th Frobenius power r·x. By convention frobenius(∞, 0) = 0."""
    if r < 0 or math.isnan(r):
        raise SemiringValidationError(f"Frobenius exponent must be >= 0, got {r!r}.")
    if x == math.inf:
        return ONE if r == 0 else math.inf
    result = r * x
    if math.isinf(result):
        raise NumericalError(f"frobenius({x!r}, {r!r}) overflowed.")
    return result


def semiring_leq(x: TropicalValue, y: TropicalValue) -> bool:
    """x ⩽ y in the semiring order, i.e. x ⊕ y = y. ∞ is the bottom element."""
    return tropical_add(x, y) == y


def to_max_times(x: TropicalValue) -> float:
    if x == math.inf:
        return 0.0
    try:
        return math.exp(-x)
    except OverflowError:
        raise NumericalError(f"to_max_times({x!r}) overflowed.") from None


def from_max_times(a: float) -> TropicalValue:
    if math.isnan(a) or a < 0:
        raise SemiringValidationError(f"max-times elements are nonnegative reals, got {a!r}.")
    if a == 0:
        return math.inf
    return -math.log(a)
