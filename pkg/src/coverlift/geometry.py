"""Model Riemannian coverings with exact distances, fibers and deck actions.

Three covering families are supported:

* ``UniversalCircle`` -- the real line over the unit circle, ``t -> (cos t, sin t)``;
* ``DFold(d)`` -- a circle of radius ``d`` (parametrized by arclength) over the
  unit circle, arclength ``l -> angle l mod 2*pi``, which makes the covering a
  literal local isometry;
* ``Antipodal(m)`` -- the unit sphere ``S^m`` over real projective space, with
  projective points stored as sign-canonicalized unit vectors.

All operations are pure functions of immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ResolutionError, ValidationError, VariantMismatchError

TWO_PI = 2.0 * math.pi

# Sign canonicalization / unit-norm tolerance for sphere and projective points.
ZERO_THRESHOLD = 1e-12
UNIT_NORM_TOL = 1e-12

# Default safety margin below inj(N) for continuation steps.
DEFAULT_TOL_INJ = 1e-9


# ============================================================
# Point kinds (array-level value spaces)
# ============================================================

@dataclass(frozen=True)
class PointKind:
    """Value space of a sampled map: one of real / circle / sphere / proj.

    ``radius`` is set for circles (arclength values live in ``[0, 2*pi*radius)``),
    ``ambient`` for spheres and projective spaces (unit vectors in R^ambient).
    """

    family: str
    radius: float | None = None
    ambient: int | None = None

    def __post_init__(self):
        if self.family not in ("real", "circle", "sphere", "proj"):
            raise ValidationError(f"unknown point kind family {self.family!r}")
        if self.family == "circle" and (self.radius is None or self.radius <= 0):
            raise ValidationError("circle kind needs radius > 0")
        if self.family in ("sphere", "proj") and (self.ambient is None or self.ambient < 2):
            raise ValidationError("sphere/proj kind needs ambient >= 2")

    @property
    def is_scalar(self) -> bool:
        return self.family in ("real", "circle")

    @property
    def circumference(self) -> float:
        if self.family != "circle":
            raise ValidationError("circumference only defined for circle kinds")
        return TWO_PI * self.radius

    def to_json(self) -> dict:
        d = {"family": self.family}
        if self.radius is not None:
            d["radius"] = self.radius
        if self.ambient is not None:
            d["ambient"] = self.ambient
        return d

    @staticmethod
    def from_json(d: dict) -> "PointKind":
        return PointKind(d["family"], d.get("radius"), d.get("ambient"))


REAL_KIND = PointKind("real")


def circle_kind(radius: float = 1.0) -> PointKind:
    return PointKind("circle", radius=float(radius))


def sphere_kind(m: int) -> PointKind:
    return PointKind("sphere", ambient=m + 1)


def proj_kind(m: int) -> PointKind:
    return PointKind("proj", ambient=m + 1)


# ============================================================
# Manifold points
# ============================================================

def canonical_angle(theta: float, circumference: float) -> float:
    """Reduce an arclength value to [0, circumference), ties at the cut -> 0."""
    r = math.fmod(theta, circumference)
    if r < 0.0:
        r += circumference
    if r >= circumference:  # fmod rounding can land exactly on the cut
        r = 0.0
    return r


def canonicalize_sign(v: np.ndarray) -> np.ndarray:
    """Flip sign so the first coordinate with |v_i| > 1e-12 is positive."""
    for x in v:
        if abs(x) > ZERO_THRESHOLD:
            return -v if x < 0.0 else v
    return v


@dataclass(frozen=True)
class RealLine:
    t: float


class CircleAngle:
    """Point on a circle of radius r, stored as arclength in [0, 2*pi*r)."""

    __slots__ = ("theta", "radius")

    def __init__(self, theta: float, radius: float = 1.0):
        if radius <= 0:
            raise ValidationError("circle radius must be positive")
        self.radius = float(radius)
        self.theta = canonical_angle(float(theta), TWO_PI * self.radius)

    def __repr__(self):
        return f"CircleAngle({self.theta!r}, {self.radius!r})"

    def __eq__(self, other):
        return (
            isinstance(other, CircleAngle)
            and self.theta == other.theta
            and self.radius == other.radius
        )

    def __hash__(self):
        return hash(("circle", self.theta, self.radius))


def _as_unit_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError("sphere/projective points need a vector of length >= 2")
    if abs(float(np.linalg.norm(arr)) - 1.0) > UNIT_NORM_TOL:
        raise ValidationError("vector is not unit to 1e-12")
    return arr


class SpherePoint:
    """Unit vector in R^{m+1}."""

    __slots__ = ("v",)

    def __init__(self, v):
        arr = _as_unit_vector(v)
        arr.setflags(write=False)
        self.v = arr

    def __repr__(self):
        return f"SpherePoint({self.v.tolist()!r})"

    def __eq__(self, other):
        return isinstance(other, SpherePoint) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(("sphere", self.v.tobytes()))


class ProjPoint:
    """Projective point, stored as the sign-canonical unit representative."""

    __slots__ = ("v",)

    def __init__(self, v):
        arr = canonicalize_sign(_as_unit_vector(v)).copy()
        arr.setflags(write=False)
        self.v = arr

    def __repr__(self):
        return f"ProjPoint({self.v.tolist()!r})"

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(("proj", self.v.tobytes()))


ManifoldPoint = Union[RealLine, CircleAngle, SpherePoint, ProjPoint]


def kind_of_point(pt: ManifoldPoint) -> PointKind:
    if isinstance(pt, RealLine):
        return REAL_KIND
    if isinstance(pt, CircleAngle):
        return circle_kind(pt.radius)
    if isinstance(pt, SpherePoint):
        return sphere_kind(len(pt.v) - 1)
    if isinstance(pt, ProjPoint):
        return proj_kind(len(pt.v) - 1)
    raise VariantMismatchError(f"not a manifold point: {pt!r}")


def point_to_value(pt: ManifoldPoint):
    """Packed numeric value (float for scalar kinds, vector otherwise)."""
    if isinstance(pt, RealLine):
        return pt.t
    if isinstance(pt, CircleAngle):
        return pt.theta
    return np.asarray(pt.v, dtype=float)


def point_from_value(kind: PointKind, value) -> ManifoldPoint:
    if kind.family == "real":
        return RealLine(float(value))
    if kind.family == "circle":
        return CircleAngle(float(value), kind.radius)
    if kind.family == "sphere":
        return SpherePoint(value)
    return ProjPoint(value)


# ============================================================
# Covering specifications
# ============================================================

@dataclass(frozen=True)
class UniversalCircle:
    """pi: R -> S^1, t -> (cos t, sin t); deck group Z, inj = pi, diam = inf."""

    @property
    def inj(self) -> float:
        return math.pi

    @property
    def diam_total(self) -> float:
        return math.inf

    @property
    def base_kind(self) -> PointKind:
        return circle_kind(1.0)

    @property
    def total_kind(self) -> PointKind:
        return REAL_KIND

    @property
    def fiber_size(self) -> int | None:
        return None


@dataclass(frozen=True)
class DFold:
    """d-fold self-cover of the circle; total space a circle of radius d."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("DFold needs d >= 2")

    @property
    def inj(self) -> float:
        return math.pi

    @property
    def diam_total(self) -> float:
        return math.pi * self.d

    @property
    def base_kind(self) -> PointKind:
        return circle_kind(1.0)

    @property
    def total_kind(self) -> PointKind:
        return circle_kind(float(self.d))

    @property
    def fiber_size(self) -> int | None:
        return self.d


@dataclass(frozen=True)
class Antipodal:
    """pi: S^m -> RP^m identifying antipodes; deck group {id, -id}."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("Antipodal needs m >= 1")

    @property
    def inj(self) -> float:
        return math.pi / 2.0

    @property
    def diam_total(self) -> float:
        return math.pi

    @property
    def base_kind(self) -> PointKind:
        return proj_kind(self.m)

    @property
    def total_kind(self) -> PointKind:
        return sphere_kind(self.m)

    @property
    def fiber_size(self) -> int | None:
        return 2


CoveringSpec = Union[UniversalCircle, DFold, Antipodal]


def cover_from_name(name: str, d: int = 2, m: int = 1) -> CoveringSpec:
    """Build a cover from a CLI-style name: universal | dfold | antipodal."""
    key = name.strip().lower()
    if key in ("universal", "universalcircle", "universal-circle"):
        return UniversalCircle()
    if key in ("dfold", "d-fold"):
        return DFold(d)
    if key in ("antipodal", "projective"):
        return Antipodal(m)
    raise ValidationError(f"unknown cover name {name!r}")


# ============================================================
# Deck elements
# ============================================================

@dataclass(frozen=True)
class IntShift:
    """Shift by 2*pi*k on the real line."""

    k: int


@dataclass(frozen=True)
class ModShift:
    """Arclength shift by 2*pi*k on the radius-d circle, k taken mod d."""

    k: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("ModShift needs d >= 2")
        object.__setattr__(self, "k", self.k % self.d)


@dataclass(frozen=True)
class Sign:
    """Identity or antipodal map of the sphere."""

    s: int

    def __post_init__(self):
        if self.s not in (-1, 1):
            raise ValidationError("Sign must be +1 or -1")


DeckElement = Union[IntShift, ModShift, Sign]


def deck_identity(cover: CoveringSpec) -> DeckElement:
    if isinstance(cover, UniversalCircle):
        return IntShift(0)
    if isinstance(cover, DFold):
        return ModShift(0, cover.d)
    if isinstance(cover, Antipodal):
        return Sign(1)
    raise VariantMismatchError(f"not a cover: {cover!r}")


def deck_elements(cover: CoveringSpec, window: int | None = None) -> list[DeckElement]:
    """Enumerate deck elements (bounded by `window` for the infinite group)."""
    if isinstance(cover, UniversalCircle):
        if window is None:
            raise ValidationError("UniversalCircle deck group is infinite; pass window")
        return [IntShift(k) for k in range(-window, window + 1)]
    if isinstance(cover, DFold):
        return [ModShift(k, cover.d) for k in range(cover.d)]
    if isinstance(cover, Antipodal):
        return [Sign(1), Sign(-1)]
    raise VariantMismatchError(f"not a cover: {cover!r}")


# ============================================================
# Variant checking helpers
# ============================================================

def _require_total(cover: CoveringSpec, pt: ManifoldPoint) -> None:
    k = kind_of_point(pt)
    if k != cover.total_kind:
        raise VariantMismatchError(
            f"point kind {k} is not the total space of {cover!r} (expected {cover.total_kind})"
        )


def _require_base(cover: CoveringSpec, pt: ManifoldPoint) -> None:
    k = kind_of_point(pt)
    if k != cover.base_kind:
        raise VariantMismatchError(
            f"point kind {k} is not the base space of {cover!r} (expected {cover.base_kind})"
        )


# ============================================================
# Covering map operations
# ============================================================

def project(cover: CoveringSpec, pt: ManifoldPoint) -> ManifoldPoint:
    """Evaluate the covering map at a total-space point, in canonical form."""
    _require_total(cover, pt)
    if isinstance(cover, UniversalCircle):
        return CircleAngle(pt.t, 1.0)
    if isinstance(cover, DFold):
        return CircleAngle(pt.theta, 1.0)
    return ProjPoint(pt.v)


def dist(cover: CoveringSpec, side: str, a: ManifoldPoint, b: ManifoldPoint) -> float:
    """Geodesic distance between two points on the named side of the cover."""
    if side == "base":
        _require_base(cover, a)
        _require_base(cover, b)
        kind = cover.base_kind
    elif side == "total":
        _require_total(cover, a)
        _require_total(cover, b)
        kind = cover.total_kind
    else:
        raise ValidationError("side must be 'base' or 'total'")
    return point_dist(kind, a, b)


def point_dist(kind: PointKind, a: ManifoldPoint, b: ManifoldPoint) -> float:
    """Kind-level geodesic distance (points must share the kind)."""
    if kind_of_point(a) != kind or kind_of_point(b) != kind:
        raise VariantMismatchError("points do not match the requested kind")
    if kind.family == "real":
        return abs(a.t - b.t)
    if kind.family == "circle":
        gap = abs(a.theta - b.theta)
        return min(gap, kind.circumference - gap)
    dot = float(np.dot(a.v, b.v))
    if kind.family == "sphere":
        return math.acos(max(-1.0, min(1.0, dot)))
    return math.acos(max(-1.0, min(1.0, abs(dot))))


def fiber(cover: CoveringSpec, pt: ManifoldPoint, window: int | None = None) -> list[ManifoldPoint]:
    """All preimages of a base point (finite covers) or the 2*window+1
    representatives t + 2*pi*k of the universal cover."""
    _require_base(cover, pt)
    if isinstance(cover, UniversalCircle):
        if window is None or window < 0:
            raise ValidationError("fiber of UniversalCircle is infinite; pass window >= 0")
        return [RealLine(pt.theta + TWO_PI * k) for k in range(-window, window + 1)]
    if isinstance(cover, DFold):
        return [CircleAngle(pt.theta + TWO_PI * k, float(cover.d)) for k in range(cover.d)]
    w = pt.v
    return [SpherePoint(w), SpherePoint(-np.asarray(w))]


def local_lift(
    cover: CoveringSpec,
    base: ManifoldPoint,
    target: ManifoldPoint,
    tol_inj: float = DEFAULT_TOL_INJ,
) -> ManifoldPoint:
    """Unique fiber point over `target` at total-space distance d_N(pi(base), target).

    Requires d_N(pi(base), target) < inj(N) - tol_inj; otherwise the step
    exceeds the isometry radius and a ResolutionError asks the caller to refine.
    """
    _require_total(cover, base)
    _require_base(cover, target)
    d = point_dist(cover.base_kind, project(cover, base), target)
    if not d < cover.inj - tol_inj:
        raise ResolutionError(
            f"step {d:.6g} reaches inj(N) - tol = {cover.inj - tol_inj:.6g}; refine the sampling",
            step=d,
        )
    if isinstance(cover, UniversalCircle):
        delta = math.remainder(target.theta - base.t, TWO_PI)
        return RealLine(base.t + delta)
    if isinstance(cover, DFold):
        delta = math.remainder(target.theta - base.theta, TWO_PI)
        return CircleAngle(base.theta + delta, float(cover.d))
    w = target.v
    return SpherePoint(w) if float(np.dot(base.v, w)) >= 0.0 else SpherePoint(-np.asarray(w))


def deck_apply(cover: CoveringSpec, tau: DeckElement, pt: ManifoldPoint) -> ManifoldPoint:
    """Apply a deck transformation to a total-space point."""
    _require_total(cover, pt)
    if isinstance(cover, UniversalCircle):
        if not isinstance(tau, IntShift):
            raise VariantMismatchError("UniversalCircle deck elements are IntShift")
        return RealLine(pt.t + TWO_PI * tau.k)
    if isinstance(cover, DFold):
        if not isinstance(tau, ModShift) or tau.d != cover.d:
            raise VariantMismatchError(f"DFold({cover.d}) deck elements are ModShift mod {cover.d}")
        return CircleAngle(pt.theta + TWO_PI * tau.k, float(cover.d))
    if not isinstance(tau, Sign):
        raise VariantMismatchError("Antipodal deck elements are Sign")
    return SpherePoint(pt.v if tau.s == 1 else -np.asarray(pt.v))


def deck_compose(cover: CoveringSpec, tau1: DeckElement, tau2: DeckElement) -> DeckElement:
    """Group composition tau1 o tau2."""
    if isinstance(cover, UniversalCircle):
        if not (isinstance(tau1, IntShift) and isinstance(tau2, IntShift)):
            raise VariantMismatchError("UniversalCircle deck elements are IntShift")
        return IntShift(tau1.k + tau2.k)
    if isinstance(cover, DFold):
        if not (isinstance(tau1, ModShift) and isinstance(tau2, ModShift)):
            raise VariantMismatchError("DFold deck elements are ModShift")
        if tau1.d != cover.d or tau2.d != cover.d:
            raise VariantMismatchError("ModShift modulus does not match the cover")
        return ModShift(tau1.k + tau2.k, cover.d)
    if not (isinstance(tau1, Sign) and isinstance(tau2, Sign)):
        raise VariantMismatchError("Antipodal deck elements are Sign")
    return Sign(tau1.s * tau2.s)


def deck_invert(cover: CoveringSpec, tau: DeckElement) -> DeckElement:
    if isinstance(tau, IntShift):
        return IntShift(-tau.k)
    if isinstance(tau, ModShift):
        return ModShift(-tau.k, tau.d)
    return tau  # Sign elements are involutions


def deck_between(cover: CoveringSpec, src: ManifoldPoint, dst: ManifoldPoint,
                 tol: float = 1e-9) -> DeckElement:
    """Deck element mapping `src` to `dst` (both in one fiber, within tol)."""
    _require_total(cover, src)
    _require_total(cover, dst)
    if isinstance(cover, UniversalCircle):
        k = round((dst.t - src.t) / TWO_PI)
        cand = RealLine(src.t + TWO_PI * k)
        if abs(cand.t - dst.t) > tol:
            raise VariantMismatchError("points are not in one fiber (universal cover)")
        return IntShift(int(k))
    if isinstance(cover, DFold):
        diff = math.remainder(dst.theta - src.theta, TWO_PI * cover.d)
        k = round(diff / TWO_PI)
        tau = ModShift(int(k), cover.d)
        if point_dist(cover.total_kind, deck_apply(cover, tau, src), dst) > tol:
            raise VariantMismatchError("points are not in one fiber (d-fold cover)")
        return tau
    if point_dist(cover.total_kind, src, dst) <= tol:
        return Sign(1)
    if point_dist(cover.total_kind, SpherePoint(-np.asarray(src.v)), dst) <= tol:
        return Sign(-1)
    raise VariantMismatchError("points are not in one fiber (antipodal cover)")


# ============================================================
# Array-level distances (used by quadrature and lifting loops)
# ============================================================

def values_dist(kind: PointKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise geodesic distance between packed value arrays.

    Scalar kinds take shape (...,); sphere/proj take shape (..., ambient).
    """
    if kind.family == "real":
        return np.abs(a - b)
    if kind.family == "circle":
        circ = kind.circumference
        gap = np.abs(a - b)
        return np.minimum(gap, circ - gap)
    dots = np.clip(np.sum(a * b, axis=-1), -1.0, 1.0)
    if kind.family == "proj":
        dots = np.abs(dots)
    return np.arccos(dots)


def canonicalize_values(kind: PointKind, values: np.ndarray) -> np.ndarray:
    """Canonicalize a packed value array (wrap angles, fix projective signs)."""
    if kind.family == "real":
        return np.asarray(values, dtype=float)
    if kind.family == "circle":
        circ = kind.circumference
        out = np.mod(np.asarray(values, dtype=float), circ)
        out[out >= circ] = 0.0
        return out
    arr = np.asarray(values, dtype=float).copy()
    if kind.family == "proj":
        flat = arr.reshape(-1, arr.shape[-1])
        for i in range(flat.shape[0]):
            flat[i] = canonicalize_sign(flat[i])
    return arr
