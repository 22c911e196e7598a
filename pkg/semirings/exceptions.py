from django.core.exceptions import ValidationError


class SemiringValidationError(ValidationError):
    """An argument lies outside the domain of the operation it was given to."""


class TreeParseError(SemiringValidationError):
    """Tree text does not follow TREE := LABEL | '(' TREE (WS TREE)+ ')'."""


class TreeArityError(SemiringValidationError):
    """An internal node has fewer than 2 or more than v children."""


class TreeLabelError(SemiringValidationError):
    """Leaf labels are not a permutation of 1..n."""


class NumericalError(ArithmeticError):
    """A solver failed to converge or a finite value overflowed to infinity."""
