"""Compensated summation with a fixed accumulation order.

All quadrature loops in the package reduce through these helpers (or through
the equivalent in-kernel pattern: fixed-size partial blocks merged in block
order), which makes every reported value independent of thread count and
reproducible bit-for-bit across reruns.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np


class CompensatedSum:
    """Neumaier (improved Kahan) accumulator."""

    __slots__ = ("total", "_comp")

    def __init__(self) -> None:
        self.total = 0.0
        self._comp = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self._comp += (self.total - t) + x
        else:
            self._comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self._comp


def neumaier_sum(values: Iterable[float] | np.ndarray) -> float:
    """Sum `values` in their given order with Neumaier compensation."""
    acc = CompensatedSum()
    if isinstance(values, np.ndarray):
        for x in values.ravel():
            acc.add(float(x))
    else:
        for x in values:
            acc.add(float(x))
    return acc.value
