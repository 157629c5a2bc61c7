"""Exception types shared across the package."""


class QDiscError(Exception):
    """Base class for all qdisc errors."""


class DomainError(QDiscError):
    """Arguments outside the mathematical domain of an operation."""


class PoleError(QDiscError):
    """Evaluation requested at (or numerically indistinguishable from) a pole."""


class RangeError(QDiscError):
    """Index outside the configured grid range."""


class CapacityError(QDiscError):
    """A result would exceed configured truncation horizons.

    Raised instead of silently truncating: sector overflow in products,
    support pushed past the grid horizon, or a series tail bound that
    cannot be brought below tolerance within the configured term budget.
    """


class QuadratureError(QDiscError):
    """Adaptive quadrature failed to converge within the refinement budget."""
