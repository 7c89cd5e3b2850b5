"""Exceptions shared by several modules."""


class NTooSmall(ValueError):
    """A closed-form count needs at least two tensor factors / classes."""


class OnDiagonal(ValueError):
    """A point lies outside the configuration space (collision with z or itself)."""


class CoincidingPoints(ValueError):
    """The marked points z are not pairwise distinct."""
