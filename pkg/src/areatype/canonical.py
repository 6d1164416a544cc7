"""Orbit machinery for the unimodular group action on configurations.

Two non-degenerate configurations have the same area type exactly when a
unique determinant-1 map carries one onto the other.  This module computes
that matching map, the canonical orbit representative

    A(x) = (1, 0, 0, w12, g x3, ..., g x{k+1}),

stored as its 2k-1 free coordinates t = (t1, ..., t_{2k-1}), and the
quantitative two-way stability bounds relating area-type discrepancy to
distance between canonical forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    Configuration,
    Point2,
    Scalar,
    UnimodularMap,
    _plain,
    area_type,
    degeneracy,
    wedge,
)
from .errors import DegenerateInput, PreconditionViolated

__all__ = [
    "CanonicalForm",
    "StabilityReport",
    "DEGENERACY_FLOOR",
    "matching_transform",
    "canonical_form",
    "canonical_distance",
    "same_area_type",
    "stability_check",
]

# Below this (float) wedge magnitude the 2x2 inverse has no significant
# digits at unit scale, so the configuration is treated as degenerate.
DEGENERACY_FLOOR = 1e-12


@dataclass(frozen=True)
class CanonicalForm:
    """The 2k-1 free coordinates of the canonical orbit representative.

    Layout: t[0] = wedge(x1, x2), and (t[2j-1], t[2j]) for j = 1..k-1 are
    the images of x{j+2} under the canonicalizing map.  `conditioning`
    carries degeneracy(x) of the source configuration.
    """

    k: int
    t: tuple[Scalar, ...]
    conditioning: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.t) != 2 * self.k - 1:
            raise ValueError(f"expected {2 * self.k - 1} coordinates for k={self.k}")
        if self.t[0] == 0:
            raise ValueError("t[0] must be nonzero (degenerate configurations have no canonical form)")

    def reconstruct(self) -> Configuration:
        """The configuration ((1,0), (0,t1), (t2,t3), ...) realizing this form."""
        one = Fraction(1) if all(not isinstance(v, float) for v in self.t) else 1.0
        pts = [Point2(one, 0 * one), Point2(0 * one, self.t[0])]
        for j in range(1, self.k):
            pts.append(Point2(self.t[2 * j - 1], self.t[2 * j]))
        return Configuration(tuple(pts))

    def as_list(self) -> list[float]:
        return [float(v) for v in self.t]

    def to_json(self) -> dict:
        return {"k": self.k, "t": [_plain(v) for v in self.t]}

    @classmethod
    def from_json(cls, obj: dict) -> "CanonicalForm":
        return cls(k=obj["k"], t=tuple(obj["t"]))


def _require_nondegenerate(x: Configuration, what: str) -> Scalar:
    w = wedge(x.points[0], x.points[1])
    if x.is_exact:
        if w == 0:
            raise DegenerateInput(f"{what}: first two points are linearly dependent")
    elif abs(float(w)) < DEGENERACY_FLOOR:
        raise DegenerateInput(
            f"{what}: |wedge(x1, x2)| = {abs(float(w)):.3e} is below the degeneracy floor"
        )
    return w


def matching_transform(x: Configuration, y: Configuration) -> UnimodularMap:
    """The map g = (y1 y2)(x1 x2)^-1 carrying x1, x2 onto y1, y2.

    If x and y have equal area types then g carries every point of x onto
    the corresponding point of y, and det(g) = 1.  In general det(g) is
    the ratio wedge(y1, y2) / wedge(x1, x2); callers can compare residuals
    g x^i vs y^i for i >= 3 to detect a mismatch.
    """
    if x.k != y.k:
        raise ValueError(f"configurations have different sizes: k={x.k} vs k={y.k}")
    wx = _require_nondegenerate(x, "matching_transform")
    _require_nondegenerate(y, "matching_transform (second argument)")
    if x.is_exact and y.is_exact:
        wx = Fraction(wx)  # keep integer-coordinate inputs on the exact path
    x1, x2 = x.points[0], x.points[1]
    y1, y2 = y.points[0], y.points[1]
    # (x1 x2)^-1 = adj / wx, adj = [[x2.y, -x2.x], [-x1.y, x1.x]]
    a = (y1.x * x2.y - y2.x * x1.y) / wx
    b = (y2.x * x1.x - y1.x * x2.x) / wx
    c = (y1.y * x2.y - y2.y * x1.y) / wx
    d = (y2.y * x1.x - y1.y * x2.x) / wx
    return UnimodularMap(a, b, c, d, conditioning=float(abs(wx)))


def canonical_form(x: Configuration) -> CanonicalForm:
    """Free coordinates of the canonical orbit representative of x.

    The canonicalizing map g sends x1 to (1, 0) and x2 to (0, wedge(x1, x2)),
    and its images reduce to ratios of signed areas:

        g x^j = ( wedge(x^j, x2) / wedge(x1, x2),  wedge(x1, x^j) ).

    Configurations have equal canonical forms exactly when they have equal
    area types (to rounding, over floats).
    """
    w = _require_nondegenerate(x, "canonical_form")
    div = Fraction(w) if x.is_exact else w  # exact division for int coordinates
    pts = x.points
    t: list[Scalar] = [w]
    for j in range(2, x.k + 1):
        p = pts[j]
        t.append(wedge(p, pts[1]) / div)
        t.append(wedge(pts[0], p))
    return CanonicalForm(k=x.k, t=tuple(t), conditioning=float(abs(w)))


def canonical_distance(x: Configuration, y: Configuration) -> float:
    """Euclidean distance between the canonical-form coordinates of x and y."""
    if x.k != y.k:
        raise ValueError(f"configurations have different sizes: k={x.k} vs k={y.k}")
    tx = canonical_form(x).t
    ty = canonical_form(y).t
    return math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(tx, ty)))


def same_area_type(x: Configuration, y: Configuration, tol: float) -> bool:
    """True iff the area-type vectors agree entrywise within tol (sup norm).

    Works for degenerate configurations too, since it compares area types
    directly.  For c-non-degenerate unit-disk configurations the stability
    bounds tie this to `canonical_distance`: agreement within eps forces
    distance below sqrt(5k)/c * eps, and distance below eps forces
    entrywise agreement within 6 * eps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if x.k != y.k:
        raise ValueError(f"configurations have different sizes: k={x.k} vs k={y.k}")
    ax = area_type(x).entries
    ay = area_type(y).entries
    return max(abs(float(a) - float(b)) for a, b in zip(ax, ay)) < tol


@dataclass(frozen=True)
class StabilityReport:
    """Evaluation of both quantitative stability implications for one pair.

    Direction (i): if all area entries agree within eps, the canonical
    forms are within sqrt(5k)/c * eps.  Direction (ii): if the canonical
    forms are within eps, all area entries agree within 6 * eps.  Each
    premise and bound is evaluated independently; a direction's implication
    holds when its premise fails or its bound is satisfied.
    """

    k: int
    c: float
    eps: float
    max_area_discrepancy: float
    canonical_distance: float
    bound_i: float
    bound_ii: float
    premise_i_holds: bool
    bound_i_satisfied: bool
    premise_ii_holds: bool
    bound_ii_satisfied: bool
    premise_i_slack: float
    bound_i_slack: float
    premise_ii_slack: float
    bound_ii_slack: float

    @property
    def implication_i_ok(self) -> bool:
        return (not self.premise_i_holds) or self.bound_i_satisfied

    @property
    def implication_ii_ok(self) -> bool:
        return (not self.premise_ii_holds) or self.bound_ii_satisfied

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c": self.c,
            "eps": self.eps,
            "max_area_discrepancy": self.max_area_discrepancy,
            "canonical_distance": self.canonical_distance,
            "bound_i": self.bound_i,
            "bound_ii": self.bound_ii,
            "premise_i_holds": self.premise_i_holds,
            "bound_i_satisfied": self.bound_i_satisfied,
            "premise_ii_holds": self.premise_ii_holds,
            "bound_ii_satisfied": self.bound_ii_satisfied,
            "premise_i_slack": self.premise_i_slack,
            "bound_i_slack": self.bound_i_slack,
            "premise_ii_slack": self.premise_ii_slack,
            "bound_ii_slack": self.bound_ii_slack,
            "implication_i_ok": self.implication_i_ok,
            "implication_ii_ok": self.implication_ii_ok,
        }


_NORM_SLACK = 1e-9  # float tolerance on the closed-unit-disk precondition


def stability_check(x: Configuration, y: Configuration, c: float, eps: float) -> StabilityReport:
    """Evaluate both stability implications for a pair of configurations.

    Preconditions (raising PreconditionViolated when unmet): both
    configurations c-non-degenerate with 0 < c < 1, all points in the
    closed unit disk, and 0 < eps < 1.
    """
    if x.k != y.k:
        raise ValueError(f"configurations have different sizes: k={x.k} vs k={y.k}")
    if not 0 < c < 1:
        raise PreconditionViolated(f"c must be in (0, 1), got {c}")
    if not 0 < eps < 1:
        raise PreconditionViolated(f"eps must be in (0, 1), got {eps}")
    for name, conf in (("x", x), ("y", y)):
        dg = float(degeneracy(conf))
        if dg < c:
            raise PreconditionViolated(f"{name} is not {c}-non-degenerate: degeneracy {dg:.3e}")
        worst = max(p.norm() for p in conf.points)
        if worst > 1.0 + _NORM_SLACK:
            raise PreconditionViolated(f"{name} has a point of norm {worst:.6f} > 1")

    k = x.k
    ax = area_type(x).entries
    ay = area_type(y).entries
    max_diff = max(abs(float(a) - float(b)) for a, b in zip(ax, ay))
    dist = canonical_distance(x, y)

    bound_i = math.sqrt(5 * k) / c * eps
    bound_ii = 6 * eps
    return StabilityReport(
        k=k,
        c=c,
        eps=eps,
        max_area_discrepancy=max_diff,
        canonical_distance=dist,
        bound_i=bound_i,
        bound_ii=bound_ii,
        premise_i_holds=max_diff < eps,
        bound_i_satisfied=dist < bound_i,
        premise_ii_holds=dist < eps,
        bound_ii_satisfied=max_diff < bound_ii,
        premise_i_slack=eps - max_diff,
        bound_i_slack=bound_i - dist,
        premise_ii_slack=eps - dist,
        bound_ii_slack=bound_ii - max_diff,
    )
