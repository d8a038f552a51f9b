"""Uniform cell-center discretizations of maps on intervals and cubes.

Values are stored packed: shape ``(n,)`` / ``(n, ambient)`` for paths and
``(n,)*m`` / ``(n,)*m + (ambient,)`` for grids, always in canonical form.
Cell centers sit at ``a + (i + 1/2) h``, so no quadrature node ever lies on
the domain boundary, on the pair-sum diagonal, or on construction interfaces.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import MapUndefinedError, ValidationError
from .geometry import (
    ManifoldPoint,
    PointKind,
    canonicalize_values,
    kind_of_point,
    point_from_value,
    point_to_value,
)

SCHEMA_VERSION = 1


# ============================================================
# Fractional smoothness parameters
# ============================================================

@dataclass(frozen=True)
class FractionalParams:
    """The pair (s, p) with the derived product sp, 0 < s < 1 and p >= 1."""

    s: float
    p: float
    sp: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise ValidationError("s must lie in (0, 1)")
        if not self.p >= 1.0:
            raise ValidationError("p must be >= 1")
        object.__setattr__(self, "sp", self.s * self.p)


# ============================================================
# Sampled maps
# ============================================================

class SampledPath:
    """Manifold-valued samples at the n cell centers of an interval (a, b)."""

    def __init__(self, a: float, b: float, kind: PointKind, values: np.ndarray,
                 mask: np.ndarray | None = None):
        if not a < b:
            raise ValidationError("need a < b")
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        if n < 2:
            raise ValidationError("need at least 2 cells")
        if kind.is_scalar:
            if values.ndim != 1:
                raise ValidationError("scalar kinds store a 1-d value array")
        else:
            if values.ndim != 2 or values.shape[1] != kind.ambient:
                raise ValidationError("vector kinds store an (n, ambient) value array")
        self.a = float(a)
        self.b = float(b)
        self.kind = kind
        self.values = values
        self.n = n
        self.mask = None if mask is None else np.asarray(mask, dtype=bool)
        if self.mask is not None and self.mask.shape != (n,):
            raise ValidationError("mask must have shape (n,)")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.h

    def point(self, i: int) -> ManifoldPoint:
        return point_from_value(self.kind, self.values[i])

    def points(self) -> list[ManifoldPoint]:
        return [self.point(i) for i in range(self.n)]

    def with_values(self, values: np.ndarray, kind: PointKind | None = None) -> "SampledPath":
        return SampledPath(self.a, self.b, kind or self.kind, values, self.mask)

    def reversed(self) -> "SampledPath":
        vals = self.values[::-1].copy()
        mask = None if self.mask is None else self.mask[::-1].copy()
        return SampledPath(self.a, self.b, self.kind, vals, mask)

    def to_json(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "kind": "path",
            "domain": [self.a, self.b],
            "n": self.n,
            "m": 1,
            "point_kind": self.kind.to_json(),
            "values": self.values.tolist(),
        }
        if self.mask is not None:
            d["mask"] = [int(i) for i in np.flatnonzero(self.mask)]
        return d

    @staticmethod
    def from_json(d: dict) -> "SampledPath":
        kind = PointKind.from_json(d["point_kind"])
        values = np.asarray(d["values"], dtype=float)
        mask = None
        if d.get("mask"):
            mask = np.zeros(values.shape[0], dtype=bool)
            mask[np.asarray(d["mask"], dtype=int)] = True
        return SampledPath(d["domain"][0], d["domain"][1], kind, values, mask)


class GridMap:
    """Manifold-valued samples at the cell centers of a cube a + (0, side)^m.

    ``mask`` marks undefined cells (True = masked); values there are NaN.
    """

    def __init__(self, origin: Sequence[float], side: float, m: int, n: int,
                 kind: PointKind, values: np.ndarray, mask: np.ndarray | None = None):
        if m < 1:
            raise ValidationError("need m >= 1")
        if side <= 0:
            raise ValidationError("need side > 0")
        if n < 2:
            raise ValidationError("need at least 2 cells per axis")
        origin = np.asarray(origin, dtype=float).reshape(m)
        values = np.asarray(values, dtype=float)
        cell_shape = (n,) * m
        expected = cell_shape if kind.is_scalar else cell_shape + (kind.ambient,)
        if values.shape != expected:
            raise ValidationError(f"values shape {values.shape} != expected {expected}")
        self.origin = origin
        self.side = float(side)
        self.m = m
        self.n = n
        self.kind = kind
        self.values = values
        self.mask = None if mask is None else np.asarray(mask, dtype=bool)
        if self.mask is not None and self.mask.shape != cell_shape:
            raise ValidationError("mask must have one flag per cell")

    @property
    def h(self) -> float:
        return self.side / self.n

    @property
    def cell_count(self) -> int:
        return self.n ** self.m

    @property
    def masked_fraction(self) -> float:
        if self.mask is None:
            return 0.0
        return float(np.count_nonzero(self.mask)) / self.cell_count

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + (np.arange(self.n) + 0.5) * self.h

    def cell_center(self, idx: Sequence[int]) -> np.ndarray:
        return self.origin + (np.asarray(idx, dtype=float) + 0.5) * self.h

    def radial_sq(self, center: Sequence[float]) -> np.ndarray:
        """Squared distance of every cell center to `center`, shape (n,)*m."""
        center = np.asarray(center, dtype=float).reshape(self.m)
        out = np.zeros((self.n,) * self.m)
        for ax in range(self.m):
            shape = [1] * self.m
            shape[ax] = self.n
            out = out + ((self.axis_centers(ax) - center[ax]) ** 2).reshape(shape)
        return out

    def point(self, idx: Sequence[int]) -> ManifoldPoint:
        return point_from_value(self.kind, self.values[tuple(idx)])

    def with_values(self, values: np.ndarray, kind: PointKind | None = None) -> "GridMap":
        return GridMap(self.origin, self.side, self.m, self.n, kind or self.kind,
                       values, self.mask)

    def with_mask(self, mask: np.ndarray | None) -> "GridMap":
        return GridMap(self.origin, self.side, self.m, self.n, self.kind,
                       self.values, mask)

    def to_json(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "kind": "grid",
            "origin": self.origin.tolist(),
            "side": self.side,
            "m": self.m,
            "n": self.n,
            "point_kind": self.kind.to_json(),
            "values": self.values.reshape(self.cell_count, -1).tolist()
            if not self.kind.is_scalar else self.values.ravel().tolist(),
        }
        if self.mask is not None:
            d["mask"] = [int(i) for i in np.flatnonzero(self.mask.ravel())]
        return d

    @staticmethod
    def from_json(d: dict) -> "GridMap":
        kind = PointKind.from_json(d["point_kind"])
        m, n = d["m"], d["n"]
        cell_shape = (n,) * m
        values = np.asarray(d["values"], dtype=float)
        values = values.reshape(cell_shape if kind.is_scalar else cell_shape + (kind.ambient,))
        mask = None
        if d.get("mask"):
            mask = np.zeros(n ** m, dtype=bool)
            mask[np.asarray(d["mask"], dtype=int)] = True
            mask = mask.reshape(cell_shape)
        return GridMap(d["origin"], d["side"], m, n, kind, values, mask)


def map_to_json_str(obj) -> str:
    return json.dumps(obj.to_json(), sort_keys=True)


def map_from_json_str(s: str):
    d = json.loads(s)
    if d.get("kind") == "path":
        return SampledPath.from_json(d)
    if d.get("kind") == "grid":
        return GridMap.from_json(d)
    raise ValidationError("JSON does not describe a path or grid")


# ============================================================
# Subset selectors
# ============================================================

@dataclass(frozen=True)
class WholeDomain:
    def label(self) -> str:
        return "whole"


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        c = self.center if isinstance(self.center, tuple) else (
            tuple(np.atleast_1d(np.asarray(self.center, dtype=float)).tolist()))
        object.__setattr__(self, "center", c)
        if self.radius <= 0:
            raise ValidationError("ball radius must be positive")

    def label(self) -> str:
        return f"ball(c={list(self.center)},r={self.radius})"


@dataclass(frozen=True)
class Annulus:
    center: tuple
    r_in: float
    r_out: float

    def __post_init__(self):
        c = self.center if isinstance(self.center, tuple) else (
            tuple(np.atleast_1d(np.asarray(self.center, dtype=float)).tolist()))
        object.__setattr__(self, "center", c)
        if not 0 <= self.r_in < self.r_out:
            raise ValidationError("annulus needs 0 <= r_in < r_out")

    def label(self) -> str:
        return f"annulus(c={list(self.center)},{self.r_in},{self.r_out})"


@dataclass(frozen=True)
class CellMask:
    """Explicit selected cells, as flat cell indices."""

    indices: frozenset

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(int(i) for i in self.indices))

    def label(self) -> str:
        return f"cells({len(self.indices)})"


SubsetSelector = WholeDomain | Ball | Annulus | CellMask


def _selector_center(sel, m: int) -> np.ndarray:
    c = np.asarray(sel.center, dtype=float).reshape(-1)
    if c.size == 1 and m > 1:
        c = np.full(m, c[0])
    if c.size != m:
        raise ValidationError("selector center dimension does not match the domain")
    return c


def select_cells(domain, selector: SubsetSelector) -> np.ndarray:
    """Boolean selected-cell array for a path or grid (masked cells excluded).

    A cell is selected iff its center satisfies the selector predicate.
    """
    if isinstance(domain, SampledPath):
        x = domain.centers()
        if isinstance(selector, WholeDomain):
            sel = np.ones(domain.n, dtype=bool)
        elif isinstance(selector, Ball):
            c = _selector_center(selector, 1)[0]
            sel = np.abs(x - c) < selector.radius
        elif isinstance(selector, Annulus):
            c = _selector_center(selector, 1)[0]
            r = np.abs(x - c)
            sel = (r > selector.r_in) & (r < selector.r_out)
        elif isinstance(selector, CellMask):
            sel = np.zeros(domain.n, dtype=bool)
            sel[list(selector.indices)] = True
        else:
            raise ValidationError(f"unknown selector {selector!r}")
        if domain.mask is not None:
            sel &= ~domain.mask
        return sel
    if isinstance(domain, GridMap):
        if isinstance(selector, WholeDomain):
            sel = np.ones((domain.n,) * domain.m, dtype=bool)
        elif isinstance(selector, Ball):
            c = _selector_center(selector, domain.m)
            sel = domain.radial_sq(c) < selector.radius ** 2
        elif isinstance(selector, Annulus):
            c = _selector_center(selector, domain.m)
            r2 = domain.radial_sq(c)
            sel = (r2 > selector.r_in ** 2) & (r2 < selector.r_out ** 2)
        elif isinstance(selector, CellMask):
            sel = np.zeros(domain.cell_count, dtype=bool)
            sel[list(selector.indices)] = True
            sel = sel.reshape((domain.n,) * domain.m)
        else:
            raise ValidationError(f"unknown selector {selector!r}")
        if domain.mask is not None:
            sel &= ~domain.mask
        return sel
    raise ValidationError("domain must be a SampledPath or GridMap")


def restrict(domain, selector: SubsetSelector):
    """Same-type map whose mask is the complement of the selector."""
    sel = select_cells(domain, selector)
    if not sel.any():
        raise ValidationError("selector selects no cells")
    return (domain.with_mask(~sel) if isinstance(domain, GridMap)
            else SampledPath(domain.a, domain.b, domain.kind, domain.values, ~sel))


# ============================================================
# Samplers
# ============================================================

def sample_path(f: Callable[[float], ManifoldPoint], a: float, b: float, n: int,
                kind: PointKind | None = None) -> SampledPath:
    """Sample a closed-form map at the n cell centers of (a, b)."""
    if n < 2:
        raise ValidationError("need n >= 2")
    h = (b - a) / n
    pts = []
    for i in range(n):
        x = a + (i + 0.5) * h
        pt = f(x)
        if kind is None:
            kind = kind_of_point(pt)
        elif kind_of_point(pt) != kind:
            raise ValidationError(f"descriptor returned kind {kind_of_point(pt)} != {kind}")
        pts.append(point_to_value(pt))
    values = np.asarray(pts, dtype=float)
    return SampledPath(a, b, kind, values)


def sample_grid(f: Callable[[np.ndarray], ManifoldPoint], origin: Sequence[float],
                side: float, m: int, n: int, kind: PointKind | None = None) -> GridMap:
    """Sample a closed-form map at cube cell centers.

    Cells where the descriptor raises MapUndefinedError are masked and the
    resulting GridMap carries the mask; everything else is an error.
    """
    if n < 2:
        raise ValidationError("need n >= 2")
    origin = np.asarray(origin, dtype=float).reshape(m)
    h = side / n
    cell_shape = (n,) * m
    mask = np.zeros(cell_shape, dtype=bool)
    first_value = None
    rows = {}
    for idx in itertools.product(range(n), repeat=m):
        x = origin + (np.asarray(idx, dtype=float) + 0.5) * h
        try:
            pt = f(x)
        except MapUndefinedError:
            mask[idx] = True
            continue
        if kind is None:
            kind = kind_of_point(pt)
        elif kind_of_point(pt) != kind:
            raise ValidationError(f"descriptor returned kind {kind_of_point(pt)} != {kind}")
        rows[idx] = point_to_value(pt)
        if first_value is None:
            first_value = rows[idx]
    if kind is None:
        raise ValidationError("descriptor was undefined at every cell")
    if kind.is_scalar:
        values = np.full(cell_shape, np.nan)
    else:
        values = np.full(cell_shape + (kind.ambient,), np.nan)
    for idx, v in rows.items():
        values[idx] = v
    return GridMap(origin, side, m, n, kind, values, mask if mask.any() else None)


def grid_from_values(origin, side: float, m: int, n: int, kind: PointKind,
                     values: np.ndarray, mask: np.ndarray | None = None) -> GridMap:
    """Wrap precomputed (already canonical) packed values into a GridMap."""
    return GridMap(origin, side, m, n, kind, canonicalize_values(kind, values), mask)
