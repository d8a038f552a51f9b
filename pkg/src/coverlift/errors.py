"""Exception types shared across the package."""

from __future__ import annotations


class CoverliftError(Exception):
    """Base class for all package errors."""


class ValidationError(CoverliftError):
    """Invalid input, configuration, or violated precondition."""


class VariantMismatchError(ValidationError):
    """A point/deck variant does not belong to the given cover or side."""


class MapUndefinedError(CoverliftError):
    """A closed-form map descriptor is undefined at a sample point."""


class ResolutionError(CoverliftError):
    """A continuation step exceeds the isometry radius; refine the grid.

    `index` identifies the offending sample (int for paths, tuple for grids).
    """

    def __init__(self, message: str, index=None, step: float | None = None):
        super().__init__(message)
        self.index = index
        self.step = step


class ObstructionError(CoverliftError):
    """Grid lifting is inconsistent on some plaquette cycle.

    `cycle` is the list of cell multi-indices of a minimal lattice cycle whose
    monodromy is nontrivial; it serializes as a cell-index list.
    """

    def __init__(self, message: str, cycle=None):
        super().__init__(message)
        self.cycle = list(cycle) if cycle is not None else []

    def cycle_as_lists(self) -> list[list[int]]:
        return [list(c) for c in self.cycle]


class PairBudgetError(CoverliftError):
    """The dense pair count exceeds the configured budget."""


class ScheduleError(ValidationError):
    """A ball schedule violates one of its validity conditions.

    `condition` names the violated condition: "containment", "disjointness",
    "accumulation", "sphere-separation" or "summability".
    """

    def __init__(self, message: str, condition: str):
        super().__init__(message)
        self.condition = condition
