"""Counting distinct area types of tuples drawn from the polar lattice.

The rotation normalization T subtracts the minimum angular index from a
tuple, which is an exact rotation in symbolic coordinates.  Equal
normalized keys force equal area types (the pairwise signed area
(r r'/q^2) sin(pi (a'-a) / 2q) depends only on r values and angular
differences), so the number of distinct keys is an exact integer upper
bound for the number of distinct area types.  The float path dedups
canonical-form vectors at a tolerance and is reported alongside, never
merged with, the exact bound.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InsufficientData
from .generators import LatticeSpec, SymbolicPoint

__all__ = [
    "NormalizedKey",
    "CountReport",
    "FitResult",
    "DEFAULT_BUDGET",
    "resolve_budget",
    "t_normalize",
    "count_area_types_exact_upper",
    "count_area_types_float",
    "scaling_fit",
]

DEFAULT_BUDGET = 10 ** 9
_CHUNK = 1 << 20  # flat tuple ids per chunk; fixed so results never depend on threads


def resolve_budget(budget: int | None) -> int:
    """Explicit argument, else the AREATYPE_BUDGET env var, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("AREATYPE_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class NormalizedKey:
    """Rotation-normalized tuple: ordered (r, a_offset) pairs with the
    minimum angular offset equal to zero."""

    q: int
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        offs = [a for _, a in self.entries]
        if min(offs) != 0:
            raise ValueError("minimum angular offset must be 0")
        if any(not 0 <= a <= self.q for a in offs):
            raise ValueError("angular offsets must stay in [0, q]")


@dataclass(frozen=True)
class CountReport:
    q: int
    k: int
    exact_upper: int
    float_count: int
    degenerate_excluded: int
    tolerance: float

    def __post_init__(self) -> None:
        if self.float_count > self.exact_upper:
            raise ValueError(
                f"float_count {self.float_count} exceeds exact upper bound {self.exact_upper}"
            )

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "exact_upper": self.exact_upper,
            "float_count": self.float_count,
            "degenerate_excluded": self.degenerate_excluded,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CountReport":
        return cls(
            q=obj["q"],
            k=obj["k"],
            exact_upper=obj["exact_upper"],
            float_count=obj["float_count"],
            degenerate_excluded=obj["degenerate_excluded"],
            tolerance=obj["tolerance"],
        )


def t_normalize(points: Sequence[SymbolicPoint]) -> NormalizedKey:
    """Rotate clockwise until some point sits on the x-axis: subtract the
    minimum angular index from every point.  Exact, order-preserving, and
    idempotent; all points stay in the first quadrant."""
    if not points:
        raise ValueError("empty tuple")
    q = points[0].q
    if any(p.q != q for p in points):
        raise ValueError("all points must share the same q")
    a_min = min(p.a for p in points)
    return NormalizedKey(q=q, entries=tuple((p.r, p.a - a_min) for p in points))


def _lattice_arrays(spec: LatticeSpec) -> tuple[np.ndarray, np.ndarray]:
    r = np.arange(spec.r_min, spec.q + 1, dtype=np.int64)
    a = np.arange(spec.q + 1, dtype=np.int64)
    R, A = np.meshgrid(r, a, indexing="ij")
    return R.ravel(), A.ravel()


def _check_budget(spec: LatticeSpec, k: int, budget: int | None) -> int:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    cap = resolve_budget(budget)
    total = spec.point_count() ** (k + 1)
    if total > cap:
        raise BudgetExceeded(
            f"{total} ordered tuples exceed the budget of {cap} "
            f"(override with AREATYPE_BUDGET or an explicit budget)"
        )
    return total


def _chunk_ranges(total: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]


def _decode(lo: int, hi: int, P: int, k: int) -> np.ndarray:
    """Point indices of flat tuple ids [lo, hi): (hi-lo, k+1) array."""
    flat = np.arange(lo, hi, dtype=np.int64)
    idx = np.empty((hi - lo, k + 1), dtype=np.int64)
    for pos in range(k, -1, -1):
        idx[:, pos] = flat % P
        flat //= P
    return idx


def _map_chunks(fn, ranges, threads: int):
    if threads <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda lohi: fn(*lohi), ranges))


def count_area_types_exact_upper(
    spec: LatticeSpec, k: int, budget: int | None = None, threads: int = 1
) -> int:
    """Number of distinct rotation-normalized keys over all ordered
    (k+1)-tuples of lattice points.  Integer arithmetic only; the chunk
    layout is fixed, so the result is independent of thread count."""
    total = _check_budget(spec, k, budget)
    rs, as_ = _lattice_arrays(spec)
    P = len(rs)

    def chunk_keys(lo: int, hi: int) -> np.ndarray:
        idx = _decode(lo, hi, P, k)
        a = as_[idx]
        a -= a.min(axis=1, keepdims=True)
        keys = np.empty((hi - lo, 2 * (k + 1)), dtype=np.int64)
        keys[:, 0::2] = rs[idx]
        keys[:, 1::2] = a
        return np.unique(keys, axis=0)

    parts = _map_chunks(chunk_keys, _chunk_ranges(total), threads)
    merged = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)
    return len(np.unique(merged, axis=0))


def count_area_types_float(
    spec: LatticeSpec,
    k: int,
    tol: float = 1e-9,
    budget: int | None = None,
    threads: int = 1,
) -> CountReport:
    """Distinct canonical-form vectors at tolerance `tol` over the same
    tuple space, reported next to the exact key bound.

    Enumeration fixes the minimum angular index to zero (grouping tuples
    by their rotation normalization, which preserves canonical forms), so
    positions are evaluated at exact offset angles.  For k = 1 the area
    type is the raw signed area, zero included, and nothing is excluded;
    for k >= 2 tuples whose first two points share an angular index are
    degenerate and counted separately.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = _check_budget(spec, k, budget)
    rs, as_ = _lattice_arrays(spec)
    P = len(rs)
    q = spec.q

    def chunk_forms(lo: int, hi: int) -> tuple[np.ndarray, int]:
        idx = _decode(lo, hi, P, k)
        a = as_[idx]
        keep = a.min(axis=1) == 0
        idx, a = idx[keep], a[keep]
        r = rs[idx]
        theta = (np.pi / (2 * q)) * a
        rho = r / q
        pts = np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=-1)
        if k == 1:
            w = pts[:, 0, 0] * pts[:, 1, 1] - pts[:, 0, 1] * pts[:, 1, 0]
            forms = w[:, None]
            ndeg = 0
        else:
            dega = a[:, 0] == a[:, 1]
            ndeg = int(dega.sum())
            sub = pts[~dega]
            w = sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0]
            forms = np.empty((len(sub), 2 * k - 1))
            forms[:, 0] = w
            for j in range(2, k + 1):
                p = sub[:, j, :]
                forms[:, 2 * j - 3] = (p[:, 0] * sub[:, 1, 1] - p[:, 1] * sub[:, 1, 0]) / w
                forms[:, 2 * j - 2] = sub[:, 0, 0] * p[:, 1] - sub[:, 0, 1] * p[:, 0]
        snapped = np.round(forms / tol).astype(np.int64)
        return np.unique(snapped, axis=0), ndeg

    parts = _map_chunks(chunk_forms, _chunk_ranges(total), threads)
    degenerate = sum(nd for _, nd in parts)
    arrays = [arr for arr, _ in parts]
    merged = arrays[0] if len(arrays) == 1 else np.concatenate(arrays, axis=0)
    float_count = len(np.unique(merged, axis=0))
    exact_upper = count_area_types_exact_upper(spec, k, budget=budget, threads=threads)
    return CountReport(
        q=spec.q,
        k=k,
        exact_upper=exact_upper,
        float_count=float_count,
        degenerate_excluded=degenerate,
        tolerance=tol,
    )


@dataclass(frozen=True)
class FitResult:
    slope: float
    r2: float


def scaling_fit(points: Sequence[tuple[float, float]]) -> FitResult:
    """Ordinary least squares of log(count) against log(q).

    Needs at least 3 points with positive coordinates.  A constant count
    sequence fits perfectly with slope 0 (R^2 reported as 1)."""
    if len(points) < 3:
        raise InsufficientData(f"need >= 3 points, got {len(points)}")
    if any(q <= 0 or c <= 0 for q, c in points):
        raise InsufficientData("all (q, count) values must be positive")
    logq = np.log([q for q, _ in points])
    logc = np.log([c for _, c in points])
    slope, intercept = np.polyfit(logq, logc, 1)
    pred = slope * logq + intercept
    ss_res = float(((logc - pred) ** 2).sum())
    ss_tot = float(((logc - logc.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return FitResult(slope=float(slope), r2=r2)
