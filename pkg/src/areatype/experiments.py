"""Reproducible experiment drivers shared by the CLI and the acceptance
suite: the thickened-lattice box-measure sweep, the density L2 ladder, and
the dyadic-norm slope fit.

All randomness flows from a single integer seed through fixed
SeedSequence spawns, and all enumeration uses fixed chunk spans, so every
driver returns identical results for identical configurations regardless
of thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .counting import FitResult, scaling_fit
from .errors import BudgetExceeded
from .generators import (
    GridMeasure,
    LatticeSpec,
    annulus_cloud,
    cantor_measure_grid,
    neighborhood_positions,
    segment_cloud,
)
from .scaling_lab import FlatHistogram, LpNormTable, lp_norms, measure_estimate, nu_density, nu_l2

__all__ = [
    "BoxMeasureRow",
    "box_measure_point",
    "box_measure_sweep",
    "NuL2Row",
    "nu_l2_ladder",
    "lp_slope_run",
    "build_measure",
]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class BoxMeasureRow:
    q: int
    k: int
    s: float
    eps: float
    points: int
    tuples: int
    occupied: int
    estimate: float

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "s": self.s,
            "eps": self.eps,
            "points": self.points,
            "tuples": self.tuples,
            "occupied": self.occupied,
            "estimate": self.estimate,
        }


def _enumerate_forms_occupancy(
    pts: np.ndarray, k: int, eps: float, c0: float, threads: int
) -> tuple[FlatHistogram, int]:
    """Occupancy histogram of canonical forms over all ordered (k+1)-tuples
    of `pts` whose first pair is c0-non-degenerate."""
    n = len(pts)
    total = n ** (k + 1)
    px, py = pts[:, 0].copy(), pts[:, 1].copy()
    ranges = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]

    def run_chunk(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = bounds
        flat = np.arange(lo, hi, dtype=np.int64)
        idx = np.empty((hi - lo, k + 1), dtype=np.int64)
        for pos in range(k, -1, -1):
            idx[:, pos] = flat % n
            flat //= n
        x = px[idx]
        y = py[idx]
        w12 = x[:, 0] * y[:, 1] - y[:, 0] * x[:, 1]
        keep = np.abs(w12) >= c0
        x, y, w12 = x[keep], y[keep], w12[keep]
        forms = np.empty((len(x), 2 * k - 1))
        forms[:, 0] = w12
        for j in range(2, k + 1):
            forms[:, 2 * j - 3] = (x[:, j] * y[:, 1] - y[:, j] * x[:, 1]) / w12
            forms[:, 2 * j - 2] = x[:, 0] * y[:, j] - y[:, 0] * x[:, j]
        snapped = np.floor(forms / eps).astype(np.int64)
        return np.unique(snapped, axis=0, return_counts=True)

    if threads <= 1:
        parts = [run_chunk(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, ranges))

    rows = np.concatenate([p[0] for p in parts], axis=0)
    counts = np.concatenate([p[1] for p in parts])
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    totals = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(totals, inverse.ravel(), counts)
    return FlatHistogram.from_arrays(k, eps, uniq, totals), total


def box_measure_point(
    q: int,
    k: int,
    s: float,
    seed: int,
    points_per_cell: int = 3,
    c0: float = 0.1,
    eps: float | None = None,
    budget: int | None = None,
    threads: int = 1,
) -> tuple[BoxMeasureRow, FlatHistogram]:
    """Measure estimate of the canonical-form image of the thickened polar
    lattice at one q.

    The point cloud is every cell center plus points_per_cell - 1 uniform
    draws from each cell's ball; eps defaults to the thickening radius
    q^(-2/s).  Tuples whose first pair spans area below c0 have unbounded
    canonical coordinates and correspond to the degenerate class, so they
    are excluded (c0 is q-independent, which leaves the scaling law
    untouched).
    """
    if points_per_cell < 1:
        raise ValueError("points_per_cell must be >= 1")
    spec = LatticeSpec(q, s)
    eps_val = spec.radius if eps is None else eps
    rng = np.random.default_rng(np.random.SeedSequence([seed, q]))
    if points_per_cell == 1:
        from .generators import polar_positions

        pts = polar_positions(spec)
    else:
        pts = neighborhood_positions(spec, points_per_cell - 1, rng, include_centers=True)
    total = len(pts) ** (k + 1)
    cap = budget if budget is not None else 10 ** 9
    if total > cap:
        raise BudgetExceeded(f"{total} tuples exceed budget {cap}")
    hist, tuples = _enumerate_forms_occupancy(pts, k, eps_val, c0, threads)
    row = BoxMeasureRow(
        q=q,
        k=k,
        s=s,
        eps=eps_val,
        points=len(pts),
        tuples=tuples,
        occupied=hist.occupied,
        estimate=measure_estimate(hist),
    )
    return row, hist


def box_measure_sweep(
    qs: list[int],
    k: int,
    s: float,
    seed: int,
    points_per_cell: int = 3,
    c0: float = 0.1,
    budget: int | None = None,
    threads: int = 1,
) -> tuple[list[BoxMeasureRow], FitResult]:
    """Box-measure estimates across a q sweep plus the log-log slope fit.
    The reference exponent is (2k+1) - 2(2k-1)/s."""
    rows = [
        box_measure_point(
            q, k, s, seed, points_per_cell=points_per_cell, c0=c0, budget=budget, threads=threads
        )[0]
        for q in qs
    ]
    fit = scaling_fit([(r.q, r.estimate) for r in rows])
    return rows, fit


def build_measure(
    kind: str,
    seed: int,
    cloud_size: int = 1_000_000,
    s: float | None = None,
    grid_n: int = 256,
    half_thickness: float = 1e-3,
):
    """Named source measures for the density experiments.

    annulus: uniform cloud on 1/2 <= |.| <= 1; segment: uniform cloud on a
    thickened diameter through the origin; cantor: fractal grid measure of
    dimension s; uniform: the full grid (cantor at s = 2).
    """
    ss = np.random.SeedSequence([seed, 101])
    rng = np.random.default_rng(ss)
    if kind == "annulus":
        return annulus_cloud(cloud_size, rng)
    if kind == "segment":
        return segment_cloud(cloud_size, rng, half_thickness=half_thickness)
    if kind == "cantor":
        if s is None:
            raise ValueError("cantor measure needs s")
        return cantor_measure_grid(s, grid_n, rng)
    if kind == "uniform":
        return cantor_measure_grid(2.0, grid_n, rng)
    raise ValueError(f"unknown measure kind {kind!r}")


@dataclass(frozen=True)
class NuL2Row:
    eps: float
    occupied: int
    total: int
    l2: float

    def to_json(self) -> dict:
        return {"eps": self.eps, "occupied": self.occupied, "total": self.total, "l2": self.l2}


def nu_l2_ladder(
    mu,
    k: int,
    eps_list: list[float],
    samples: int,
    seed: int,
    pieces: int | None = None,
    delta: float | None = None,
    threads: int = 1,
    share_draws: bool = False,
) -> list[NuL2Row]:
    """Density L2 estimates across an eps ladder.

    By default each eps draws fresh tuples from a derived seed.  With
    share_draws=True every eps replays the identical sample stream, making
    the ladder a paired comparison: ratios between rungs then measure the
    pure effect of the cell size, with no Monte Carlo noise between rungs.
    """
    root = np.random.SeedSequence([seed, 202])
    if share_draws:
        children = [root] * len(eps_list)
    else:
        children = root.spawn(len(eps_list))
    rows = []
    for eps, child in zip(eps_list, children):
        h = nu_density(
            mu,
            k,
            eps,
            samples,
            np.random.default_rng(child),
            pieces=pieces,
            delta=delta,
            threads=threads,
        )
        rows.append(NuL2Row(eps=eps, occupied=h.occupied, total=h.total, l2=nu_l2(h)))
    return rows


def lp_slope_run(
    s: float, grid_n: int, j_list: list[int], seed: int, cutoff: str = "bump"
) -> LpNormTable:
    """Dyadic norm table of a generated measure of dimension s."""
    mu: GridMeasure = cantor_measure_grid(s, grid_n, np.random.default_rng(np.random.SeedSequence([seed, 303])))
    return lp_norms(mu, s, j_list, cutoff=cutoff)
