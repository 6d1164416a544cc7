"""Test-set construction: polar lattice grids and their thickened
neighborhoods, angle-separated annulus pieces, and synthetic fractal grid
measures with a prescribed box-counting dimension.

The polar lattice is the image of the 1/q-spaced half-lattice in
[1/2, 1] x [0, 1] under (x, y) |-> x * (cos(pi y / 2), sin(pi y / 2)),
a quarter-annulus grid whose pairwise signed areas have the closed form
(r r' / q^2) * sin(pi (a' - a) / (2 q)).
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Point2
from .errors import InsufficientSpread

__all__ = [
    "LatticeSpec",
    "SymbolicPoint",
    "GridMeasure",
    "lattice_points",
    "polar_image",
    "polar_positions",
    "neighborhood_sample",
    "neighborhood_positions",
    "angle_partition",
    "angle_partition_indices",
    "cantor_measure_grid",
    "grid_box_dimension",
    "annulus_cloud",
    "segment_cloud",
    "save_grid_measure",
    "load_grid_measure",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Half-lattice with spacing 1/q, thickened by radius q^(-2/s)."""

    q: int
    s: float

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if not 0 < self.s < 2:
            raise ValueError(f"s must be in (0, 2), got {self.s}")

    @property
    def radius(self) -> float:
        """Thickening radius of each lattice cell."""
        return self.q ** (-2.0 / self.s)

    @property
    def r_min(self) -> int:
        return (self.q + 1) // 2  # ceil(q / 2)

    def point_count(self) -> int:
        return (self.q - self.r_min + 1) * (self.q + 1)


@dataclass(frozen=True)
class SymbolicPoint:
    """Integer lattice coordinates (r, a) at scale q, denoting the exact
    point (r/q) * (cos(pi a / (2q)), sin(pi a / (2q)))."""

    r: int
    a: int
    q: int

    def __post_init__(self) -> None:
        r_min = (self.q + 1) // 2
        if not r_min <= self.r <= self.q:
            raise ValueError(f"r={self.r} outside [{r_min}, {self.q}]")
        if not 0 <= self.a <= self.q:
            raise ValueError(f"a={self.a} outside [0, {self.q}]")


def lattice_points(spec: LatticeSpec) -> list[SymbolicPoint]:
    """All (r, a) with ceil(q/2) <= r <= q and 0 <= a <= q, r-major order."""
    return [
        SymbolicPoint(r, a, spec.q)
        for r in range(spec.r_min, spec.q + 1)
        for a in range(spec.q + 1)
    ]


def polar_image(p: SymbolicPoint) -> Point2:
    """The plane point (r/q) * (cos(pi a / 2q), sin(pi a / 2q)), inside the
    quarter annulus 1/2 <= |.| <= 1."""
    rho = p.r / p.q
    theta = math.pi * p.a / (2 * p.q)
    return Point2(rho * math.cos(theta), rho * math.sin(theta))


def polar_positions(spec: LatticeSpec) -> np.ndarray:
    """Float positions of all lattice cell centers, (count, 2), matching
    the order of `lattice_points`."""
    r = np.arange(spec.r_min, spec.q + 1)
    a = np.arange(spec.q + 1)
    R, A = np.meshgrid(r, a, indexing="ij")
    rho = R.ravel() / spec.q
    theta = np.pi * A.ravel() / (2 * spec.q)
    return np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=1)


def neighborhood_positions(
    spec: LatticeSpec,
    points_per_cell: int,
    rng: np.random.Generator | int,
    include_centers: bool = False,
) -> np.ndarray:
    """Uniform samples from the q^(-2/s)-ball of every lattice cell, mapped
    through the polar parameterization.  Cell blocks are contiguous and the
    draw order is fixed, so output depends only on (spec, seed).

    With include_centers=True the exact cell centers are prepended.
    """
    if points_per_cell < 1:
        raise ValueError("points_per_cell must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    r = np.arange(spec.r_min, spec.q + 1)
    a = np.arange(spec.q + 1)
    R, A = np.meshgrid(r, a, indexing="ij")
    cx = np.repeat(R.ravel() / spec.q, points_per_cell)
    cy = np.repeat(A.ravel() / spec.q, points_per_cell)
    rho = spec.radius * np.sqrt(rng.random(cx.size))
    phi = 2 * np.pi * rng.random(cx.size)
    x = cx + rho * np.cos(phi)
    y = cy + rho * np.sin(phi)
    pts = np.stack(
        [x * np.cos(np.pi * y / 2), x * np.sin(np.pi * y / 2)], axis=1
    )
    if include_centers:
        pts = np.concatenate([polar_positions(spec), pts], axis=0)
    return pts


def neighborhood_sample(
    spec: LatticeSpec, points_per_cell: int, rng: np.random.Generator | int
) -> list[Point2]:
    """List-of-points view of `neighborhood_positions` (same draws)."""
    pts = neighborhood_positions(spec, points_per_cell, rng)
    return [Point2(float(x), float(y)) for x, y in pts]


def _angles(xy: np.ndarray) -> np.ndarray:
    return np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2 * np.pi)


def angle_partition_indices(
    xy: np.ndarray, count: int, delta: float
) -> list[np.ndarray]:
    """Index form of `angle_partition` for an (n, 2) array of points.

    Splits [0, 2pi) into equal sectors of width delta, then greedily picks
    `count` populated sectors, heaviest first, skipping sectors adjacent
    (circularly) to an already chosen one.  Points from different chosen
    sectors subtend angle >= delta at the origin because at least one empty
    sector separates them.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(xy) == 0:
        raise ValueError("no points to partition")
    if count == 1:
        return [np.arange(len(xy))]
    n_sectors = round(2 * np.pi / delta)
    if n_sectors < 2 or abs(n_sectors * delta - 2 * np.pi) > 1e-9:
        raise ValueError(f"delta={delta} does not evenly divide 2*pi")
    sector = np.minimum((_angles(xy) / delta).astype(np.int64), n_sectors - 1)
    pops = np.bincount(sector, minlength=n_sectors)
    order = np.lexsort((np.arange(n_sectors), -pops))  # heaviest first, index tiebreak
    chosen: list[int] = []
    blocked = np.zeros(n_sectors, dtype=bool)
    for sec in order:
        if pops[sec] == 0 or blocked[sec]:
            continue
        chosen.append(int(sec))
        blocked[sec] = True
        blocked[(sec - 1) % n_sectors] = True
        blocked[(sec + 1) % n_sectors] = True
        if len(chosen) == count:
            break
    if len(chosen) < count:
        raise InsufficientSpread(
            f"only {len(chosen)} non-adjacent populated sectors, need {count}"
        )
    return [np.nonzero(sector == sec)[0] for sec in chosen]


def angle_partition(
    points: Sequence[Point2], count: int, delta: float
) -> list[list[Point2]]:
    """Partition points into `count` disjoint angle-separated subsets.

    Any two points from different subsets subtend angle >= delta at the
    origin.  Subsets are whole angular sectors, chosen greedily by
    population; points in unselected sectors are discarded.  Raises
    InsufficientSpread when fewer than `count` non-adjacent populated
    sectors exist.
    """
    xy = np.array([[float(p.x), float(p.y)] for p in points])
    groups = angle_partition_indices(xy, count, delta)
    return [[points[i] for i in idx] for idx in groups]


@dataclass
class GridMeasure:
    """Probability measure on the N x N dyadic grid over the unit square.

    weights[row, col] is the mass of the cell with center
    ((col + 1/2) / N, (row + 1/2) / N); cell_size is 1/N.  `s`, when set,
    is the box dimension the generator aimed for.  Treat instances as
    immutable values.
    """

    weights: np.ndarray
    s: float | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square 2-D array")
        n = w.shape[0]
        if n & (n - 1) or n < 2:
            raise ValueError(f"grid side must be a power of two >= 2, got {n}")
        if (w < 0).any():
            raise ValueError("weights must be non-negative")
        total = w.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass must be 1, got {total!r}")
        self.weights = w

    @property
    def N(self) -> int:
        return self.weights.shape[0]

    @property
    def cell_size(self) -> float:
        return 1.0 / self.N

    def support_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(points (m, 2), masses (m,)) over the occupied cells."""
        rows, cols = np.nonzero(self.weights)
        pts = np.stack([(cols + 0.5) / self.N, (rows + 0.5) / self.N], axis=1)
        return pts, self.weights[rows, cols]

    def to_json(self) -> dict:
        return {"N": self.N, "s": self.s, "total_mass": float(self.weights.sum())}


def _cantor_axis(dim: float, levels: int, rng: np.random.Generator) -> np.ndarray:
    """Surviving cell indices of a 1-D dyadic Cantor construction.

    At level n exactly round(2^(dim*n)) cells survive.  Every parent keeps
    at least one child; the parents keeping both are spread evenly along
    the axis (random phase), which keeps the survivor set close to
    self-similar and the leaf masses near-uniform.
    """
    cells = np.array([0], dtype=np.int64)
    count = 1
    for n in range(1, levels + 1):
        target = int(round(2.0 ** (dim * n)))
        target = max(count, min(2 * count, target))
        extra = target - count
        both = np.zeros(count, dtype=bool)
        if extra == count:
            both[:] = True
        elif extra:
            step = count / extra
            idx = np.unique((np.floor(rng.random() * step + np.arange(extra) * step)).astype(np.int64) % count)
            if len(idx) < extra:
                pool = np.setdiff1d(np.arange(count), idx)
                idx = np.concatenate([idx, rng.choice(pool, size=extra - len(idx), replace=False)])
            both[idx] = True
        solo = ~both
        keep_right = rng.integers(0, 2, size=count).astype(bool)
        left, right = 2 * cells, 2 * cells + 1
        cells = np.sort(
            np.concatenate(
                [left[both], right[both], np.where(keep_right[solo], right[solo], left[solo])]
            )
        )
        count = target
    return cells


def cantor_measure_grid(
    s: float, N: int, rng: np.random.Generator | int
) -> GridMeasure:
    """Synthetic grid measure whose support has box dimension s.

    Product of two 1-D dyadic Cantor constructions of dimension s/2 each,
    with uniform mass on the surviving product cells.  s = 2 produces the
    full grid with uniform weights 1/N^2.  Valid range 0 < s <= 2.
    """
    if not 0 < s <= 2:
        raise ValueError(f"s must be in (0, 2], got {s}")
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    levels = int(math.log2(N))
    xs = _cantor_axis(s / 2, levels, rng)
    ys = _cantor_axis(s / 2, levels, rng)
    weights = np.zeros((N, N))
    weights[np.ix_(ys, xs)] = 1.0 / (len(xs) * len(ys))
    return GridMeasure(weights, s=s)


def grid_box_dimension(measure: GridMeasure, min_level: int = 2) -> tuple[float, float]:
    """Box-counting dimension of the support: slope of log2(occupied cells)
    against dyadic level, with R^2 of the fit.  Levels below min_level are
    skipped (too few cells to be informative)."""
    occ = measure.weights > 0
    N = measure.N
    levels = int(math.log2(N))
    ns, counts = [], []
    for n in range(min_level, levels + 1):
        side = 2 ** n
        f = N // side
        c = occ.reshape(side, f, side, f).any(axis=(1, 3)).sum()
        ns.append(n)
        counts.append(int(c))
    ns_arr = np.array(ns, dtype=float)
    logs = np.log2(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(ns_arr, logs, 1)
    pred = slope * ns_arr + intercept
    ss_res = float(((logs - pred) ** 2).sum())
    ss_tot = float(((logs - logs.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def annulus_cloud(
    n: int,
    rng: np.random.Generator | int,
    r_inner: float = 0.5,
    r_outer: float = 1.0,
) -> np.ndarray:
    """n points uniform (by area) on the annulus r_inner <= |.| <= r_outer."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    r2 = rng.uniform(r_inner ** 2, r_outer ** 2, n)
    theta = 2 * np.pi * rng.random(n)
    r = np.sqrt(r2)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


def segment_cloud(
    n: int,
    rng: np.random.Generator | int,
    half_thickness: float = 1e-3,
    half_length: float = 1.0,
) -> np.ndarray:
    """n points uniform on a thickened diameter segment through the origin:
    |x| <= half_length, |y| <= half_thickness."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    x = rng.uniform(-half_length, half_length, n)
    y = rng.uniform(-half_thickness, half_thickness, n)
    return np.stack([x, y], axis=1)


_MAGIC = b"GMES"


def save_grid_measure(measure: GridMeasure, path: str | Path) -> None:
    """Write the binary grid format: 16-byte header (magic "GMES", N as
    uint32 LE, s as float64 LE) followed by the row-major float64 weights,
    plus a JSON sidecar at <path>.json."""
    path = Path(path)
    s_val = math.nan if measure.s is None else float(measure.s)
    header = _MAGIC + struct.pack("<I", measure.N) + struct.pack("<d", s_val)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(measure.weights, dtype="<f8").tobytes())
    sidecar = {"schema": "areatype/v1", **measure.to_json()}
    with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_grid_measure(path: str | Path) -> GridMeasure:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != _MAGIC:
            raise ValueError(f"{path}: not a grid-measure file (bad magic)")
        n = struct.unpack("<I", header[4:8])[0]
        s_val = struct.unpack("<d", header[8:16])[0]
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"{path}: expected {n * n} weights, found {data.size}")
    return GridMeasure(data.reshape(n, n).copy(), s=None if math.isnan(s_val) else s_val)
