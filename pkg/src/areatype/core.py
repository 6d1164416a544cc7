"""Core value types: planar points, ordered configurations, area-type
vectors, 2x2 unimodular maps, and the signed-area primitive.

All types are immutable values and all operations are pure functions, so
everything here is safe to share between concurrent workers.

Coordinates may be floats or exact rationals (int / fractions.Fraction).
Every geometric operation is plain field arithmetic, so exact inputs give
exact outputs; the float backend is used everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Point2",
    "Configuration",
    "AreaType",
    "UnimodularMap",
    "wedge",
    "area_type",
    "degeneracy",
    "apply_map",
    "sample_unimodular",
    "pair_labels",
]

Scalar = float | int | Fraction


def _check_finite(value: Scalar, name: str) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


def _is_exact(value: Scalar) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Point2:
    """A point of the plane.  Constructors reject NaN and infinities."""

    x: Scalar
    y: Scalar

    def __post_init__(self) -> None:
        _check_finite(self.x, "x")
        _check_finite(self.y, "y")

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.x) and _is_exact(self.y)

    def norm(self) -> float:
        return math.hypot(float(self.x), float(self.y))

    def as_pair(self) -> tuple[Scalar, Scalar]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Configuration:
    """An ordered tuple of at least two planar points.

    Order is significant: index i (1-based in the math, 0-based here) is
    the label of the point, and the first two points play a special role
    in degeneracy and canonicalization.
    """

    points: tuple[Point2, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a configuration needs at least 2 points")
        if not all(isinstance(p, Point2) for p in self.points):
            raise TypeError("points must be Point2 instances")

    @property
    def k(self) -> int:
        """Number of points minus one."""
        return len(self.points) - 1

    @property
    def is_exact(self) -> bool:
        return all(p.is_exact for p in self.points)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[Scalar]]) -> "Configuration":
        return cls(tuple(Point2(p[0], p[1]) for p in pairs))

    def as_array(self) -> np.ndarray:
        """(k+1, 2) float array of the points."""
        return np.array([[float(p.x), float(p.y)] for p in self.points])

    def to_json(self) -> dict:
        return {"k": self.k, "points": [[_plain(p.x), _plain(p.y)] for p in self.points]}

    @classmethod
    def from_json(cls, obj: dict) -> "Configuration":
        conf = cls.from_pairs(obj["points"])
        if "k" in obj and obj["k"] != conf.k:
            raise ValueError(f"k={obj['k']} does not match {len(obj['points'])} points")
        return conf


def _plain(v: Scalar):
    """JSON-friendly scalar (Fractions become floats)."""
    if isinstance(v, Fraction):
        return float(v)
    return v


def pair_labels(k: int) -> list[tuple[int, int]]:
    """1-based index pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 2)]


@dataclass(frozen=True)
class AreaType:
    """Vector of signed parallelogram areas over all point pairs of a
    configuration, ordered lexicographically by the 1-based pair (i, j)."""

    k: int
    entries: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        expected = self.k * (self.k + 1) // 2
        if len(self.entries) != expected:
            raise ValueError(f"expected {expected} entries for k={self.k}, got {len(self.entries)}")

    def entry(self, i: int, j: int) -> Scalar:
        """Signed area for the 1-based pair (i, j) with i < j."""
        if not 1 <= i < j <= self.k + 1:
            raise ValueError(f"pair ({i},{j}) out of range for k={self.k}")
        return self.entries[pair_labels(self.k).index((i, j))]

    def as_array(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries])

    def to_json(self) -> dict:
        return {"k": self.k, "entries": [_plain(e) for e in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "AreaType":
        return cls(k=obj["k"], entries=tuple(obj["entries"]))


@dataclass(frozen=True)
class UnimodularMap:
    """A real 2x2 matrix, row-major entries (a, b; c, d).

    Maps produced by `sample_unimodular` have determinant 1.  The matrix
    returned by `matching_transform` has determinant equal to the ratio of
    the first area-type entries of its arguments, which is 1 exactly when
    those entries agree; callers use `det` to detect the mismatch.

    `conditioning`, when present, is the degeneracy value of the source
    configuration the map was computed from: small values mean the matrix
    inversion involved was poorly conditioned.
    """

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    conditioning: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for name in "abcd":
            _check_finite(getattr(self, name), name)

    @property
    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def is_unimodular(self, tol: float = 1e-9) -> bool:
        if all(_is_exact(v) for v in (self.a, self.b, self.c, self.d)):
            return self.det == 1
        return abs(float(self.det) - 1.0) <= tol

    @classmethod
    def identity(cls) -> "UnimodularMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, theta: float) -> "UnimodularMap":
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    def as_array(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def __call__(self, p: Point2) -> Point2:
        return Point2(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)

    def to_json(self) -> dict:
        return {"matrix": [[_plain(self.a), _plain(self.b)], [_plain(self.c), _plain(self.d)]]}

    @classmethod
    def from_json(cls, obj: dict) -> "UnimodularMap":
        (a, b), (c, d) = obj["matrix"]
        return cls(a, b, c, d)


def wedge(a: Point2, b: Point2) -> Scalar:
    """Signed area spanned by a and b: the determinant of the matrix with
    a and b as columns, a.x*b.y - a.y*b.x.  Antisymmetric and bilinear."""
    return a.x * b.y - a.y * b.x


def area_type(x: Configuration) -> AreaType:
    """The vector of pairwise signed areas, in lexicographic pair order."""
    pts = x.points
    entries = tuple(
        wedge(pts[i - 1], pts[j - 1]) for i, j in pair_labels(x.k)
    )
    return AreaType(k=x.k, entries=entries)


def degeneracy(x: Configuration) -> Scalar:
    """|wedge(x1, x2)|: x is c-non-degenerate iff this is >= c."""
    return abs(wedge(x.points[0], x.points[1]))


def apply_map(g: UnimodularMap, x: Configuration) -> Configuration:
    """Apply g to every point.  When det(g) = 1 the area type is preserved
    (exactly over rationals, to rounding over floats)."""
    return Configuration(tuple(g(p) for p in x.points))


_MIN_RAW_DET = 1e-6


def sample_unimodular(bound: float, rng: np.random.Generator | int) -> UnimodularMap:
    """Draw a random determinant-1 map with all entries <= bound in magnitude.

    Entries are drawn uniformly from [-bound, bound]; draws whose raw
    determinant magnitude is below 1e-6 are rejected and resampled, the
    sign is fixed by swapping columns, and the matrix is renormalized to
    determinant 1.  Renormalized draws that exceed the entry bound are
    also resampled, so the loop is pure rejection and the result is
    deterministic for a given seed.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    while True:
        m = rng.uniform(-bound, bound, size=4)
        det = m[0] * m[3] - m[1] * m[2]
        if abs(det) < _MIN_RAW_DET:
            continue
        if det < 0:
            m = m[[1, 0, 3, 2]]  # swap columns
            det = -det
        g = m / math.sqrt(det)
        if np.abs(g).max() <= bound:
            return UnimodularMap(float(g[0]), float(g[1]), float(g[2]), float(g[3]))
