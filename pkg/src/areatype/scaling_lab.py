"""Numerical probes of the measure-theoretic scaling laws.

Three instruments:

* ``box_count`` covers a stream of canonical-form vectors with eps-cells
  and estimates the (2k-1)-dimensional measure as occupied * eps^(2k-1).
* ``nu_density`` Monte Carlo samples (k+1)-tuples from a planar measure,
  pushes them to canonical forms, and histograms on the eps-grid; its L2
  size is a blow-up detector for measures concentrated near a line
  through the origin.
* ``lp_piece`` / ``lp_norms`` extract the dyadic frequency rings of a
  grid measure by FFT and fit the growth of their sup / L2 norms, which
  for a dimension-s measure scale like 2^(j(2-s)) and 2^(j(2-s)/2).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .batch import canonical_forms
from .canonical import CanonicalForm
from .errors import DegenerateExcess, ScaleOutOfRange
from .generators import GridMeasure, angle_partition_indices

__all__ = [
    "FlatHistogram",
    "LpPiece",
    "LpNormRow",
    "LpNormTable",
    "box_count",
    "measure_estimate",
    "nu_density",
    "nu_l2",
    "lp_piece",
    "lp_lowpass",
    "lp_norms",
]

_CHUNK = 1 << 19  # samples per Monte Carlo chunk; fixed for thread independence


@dataclass
class FlatHistogram:
    """Sparse occupancy histogram over the eps-grid of the (2k-1)-flat."""

    k: int
    eps: float
    cells: dict[tuple[int, ...], int]
    total: int

    @property
    def dim(self) -> int:
        return 2 * self.k - 1

    @property
    def occupied(self) -> int:
        return len(self.cells)

    @classmethod
    def from_arrays(
        cls, k: int, eps: float, cell_rows: np.ndarray, counts: np.ndarray
    ) -> "FlatHistogram":
        cells = {tuple(map(int, row)): int(c) for row, c in zip(cell_rows, counts)}
        return cls(k=k, eps=eps, cells=cells, total=int(counts.sum()))

    def merge(self, other: "FlatHistogram") -> "FlatHistogram":
        if (self.k, self.eps) != (other.k, other.eps):
            raise ValueError("histograms have different k or eps")
        cells = dict(self.cells)
        for key, c in other.cells.items():
            cells[key] = cells.get(key, 0) + c
        return FlatHistogram(self.k, self.eps, cells, self.total + other.total)

    def summary(self) -> dict:
        return {
            "k": self.k,
            "eps": self.eps,
            "occupied": self.occupied,
            "total": self.total,
            "estimate": measure_estimate(self),
        }


def _snap_unique(forms: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    snapped = np.floor(forms / eps).astype(np.int64)
    return np.unique(snapped, axis=0, return_counts=True)


def box_count(
    forms: np.ndarray | Iterable[CanonicalForm], eps: float, k: int | None = None
) -> FlatHistogram:
    """Snap canonical-form vectors to the eps-grid and count occupancy.

    `forms` is an (n, 2k-1) float array or an iterable of CanonicalForm.
    The measure estimate is occupied * eps^(2k-1); halving eps can only
    split cells, so the occupied count is non-increasing under doubling.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(forms, np.ndarray):
        arr = np.atleast_2d(forms)
    else:
        rows = [f.as_list() for f in forms]
        arr = np.array(rows) if rows else np.empty((0, 0))
    if arr.size == 0:
        if k is None:
            raise ValueError("k is required for an empty stream")
        return FlatHistogram(k=k, eps=eps, cells={}, total=0)
    dim = arr.shape[1]
    inferred = (dim + 1) // 2
    if k is None:
        k = inferred
    elif 2 * k - 1 != dim:
        raise ValueError(f"forms have {dim} coordinates, expected {2 * k - 1} for k={k}")
    rows, counts = _snap_unique(arr, eps)
    return FlatHistogram.from_arrays(k, eps, rows, counts)


def measure_estimate(h: FlatHistogram) -> float:
    """Covering-measure estimate: occupied cells times eps^(2k-1)."""
    return h.occupied * h.eps ** h.dim


class _MeasureSampler:
    """Uniform-weight draws of plane points from a grid measure or a
    weighted point cloud, optionally restricted to angle-separated pieces
    (coordinate i of each tuple then samples piece i)."""

    def __init__(self, mu, k: int, pieces: int | None, delta: float | None):
        if isinstance(mu, GridMeasure):
            atoms, masses = mu.support_centers()
            self._jitter = mu.cell_size
        elif isinstance(mu, tuple):
            atoms = np.asarray(mu[0], dtype=float)
            masses = np.asarray(mu[1], dtype=float)
            self._jitter = 0.0
        else:
            atoms = np.asarray(mu, dtype=float)
            masses = np.full(len(atoms), 1.0 / len(atoms))
            self._jitter = 0.0
        if atoms.ndim != 2 or atoms.shape[1] != 2:
            raise ValueError("point cloud must have shape (n, 2)")
        if (masses < 0).any():
            raise ValueError("weights must be non-negative")
        masses = masses / masses.sum()

        if pieces is None:
            groups = [np.arange(len(atoms))]
        else:
            if pieces != k + 1:
                raise ValueError(f"need exactly k+1 = {k + 1} pieces, got {pieces}")
            if delta is None:
                raise ValueError("delta is required when pieces are requested")
            groups = angle_partition_indices(atoms, pieces, delta)
        self._atoms = atoms
        self._cdfs = []
        self._index = []
        for g in groups:
            w = masses[g]
            if w.sum() <= 0:
                raise ValueError("an angular piece carries no mass")
            self._cdfs.append(np.cumsum(w / w.sum()))
            self._index.append(g)
        self._npieces = len(groups)

    def draw(self, n: int, k: int, rng: np.random.Generator) -> np.ndarray:
        """(n, k+1, 2) tuple coordinates."""
        out = np.empty((n, k + 1, 2))
        for i in range(k + 1):
            g = i % self._npieces
            pos = np.searchsorted(self._cdfs[g], rng.random(n), side="right")
            pos = np.minimum(pos, len(self._cdfs[g]) - 1)
            pts = self._atoms[self._index[g][pos]]
            if self._jitter:
                pts = pts + (rng.random((n, 2)) - 0.5) * self._jitter
            out[:, i, :] = pts
        return out


def nu_density(
    mu,
    k: int,
    eps: float,
    samples: int,
    rng: np.random.Generator | int,
    pieces: int | None = None,
    delta: float | None = None,
    threads: int = 1,
) -> FlatHistogram:
    """Empirical pushforward density histogram on the eps-grid.

    Draws `samples` independent (k+1)-tuples from the product measure,
    computes canonical forms, and accumulates eps-grid counts.  `mu` is a
    GridMeasure (cell draws are jittered uniformly within the cell), an
    (n, 2) point cloud, or a (points, weights) pair.  With `pieces` set
    (must equal k+1, with `delta` the sector width) the tuple coordinates
    are restricted to angle-separated sectors; by default coordinates are
    drawn i.i.d. from mu.

    For k >= 2, tuples below the degeneracy floor carry no canonical form
    and are dropped from the histogram; if more than half of all samples
    are dropped this raises DegenerateExcess, the signature of a measure
    concentrated on a line through the origin.  For k = 1 the signed area
    itself (zero included) is the coordinate, so nothing is dropped.

    Chunk boundaries and per-chunk seeds are fixed, so the result depends
    only on the seed, never on `threads`.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    sampler = _MeasureSampler(mu, k, pieces, delta)

    bounds = [(lo, min(lo + _CHUNK, samples)) for lo in range(0, samples, _CHUNK)]
    seeds = rng.spawn(len(bounds))

    def run_chunk(args) -> tuple[np.ndarray, np.ndarray, int]:
        (lo, hi), chunk_rng = args
        confs = sampler.draw(hi - lo, k, chunk_rng)
        if k == 1:
            w = confs[:, 0, 0] * confs[:, 1, 1] - confs[:, 0, 1] * confs[:, 1, 0]
            forms = w[:, None]
            dropped = 0
        else:
            forms, kept = canonical_forms(confs)
            dropped = int((~kept).sum())
        rows, counts = _snap_unique(forms, eps)
        return rows, counts, dropped

    work = list(zip(bounds, seeds))
    if threads <= 1:
        results = [run_chunk(w) for w in work]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, work))

    dropped = sum(r[2] for r in results)
    if dropped * 2 > samples:
        raise DegenerateExcess(
            f"{dropped} of {samples} sampled tuples were degenerate; "
            "the measure is concentrated on a line through the origin"
        )
    all_rows = np.concatenate([r[0] for r in results], axis=0)
    all_counts = np.concatenate([r[1] for r in results])
    uniq, inverse = np.unique(all_rows, axis=0, return_inverse=True)
    totals = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(totals, inverse.ravel(), all_counts)
    return FlatHistogram.from_arrays(k, eps, uniq, totals)


def nu_l2(h: FlatHistogram, samples: int | None = None) -> float:
    """L2 norm of the empirical mollified density:

        sqrt( sum_cells (count / (samples * eps^(2k-1)))^2 * eps^(2k-1) ).

    `samples` defaults to the histogram total (exact when nothing was
    dropped during sampling)."""
    n = h.total if samples is None else samples
    if n <= 0:
        raise ValueError("sample count must be positive")
    cell_vol = h.eps ** h.dim
    dens_sq = sum((c / (n * cell_vol)) ** 2 for c in h.cells.values())
    return math.sqrt(dens_sq * cell_vol)


# ---------------------------------------------------------------------------
# Dyadic frequency decomposition


def _smoothstep(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def _log_radius(N: int) -> np.ndarray:
    f = np.fft.fftfreq(N, d=1.0 / N)
    R = np.hypot(f[:, None], f[None, :])
    with np.errstate(divide="ignore"):
        u = np.log2(np.where(R > 0, R, 1.0))
    u[R == 0] = -np.inf
    return u

def _ring_multiplier(N: int, j: int, cutoff: str) -> np.ndarray:
    """Radial frequency cutoff evaluated at scale 2^j.

    "bump": quintic spline in log|xi|, 1 on [2^j, 2^(j+1)], supported in
    [2^(j-1), 2^(j+2)].  "partition": chi(u) - chi(u-1) with chi a quintic
    step, supported in (2^(j-1), 2^(j+1)); consecutive j telescope to 1,
    which is the family the reconstruction identity needs.
    """
    u = _log_radius(N) - j
    if cutoff == "bump":
        m = np.where(u < 0.0, _smoothstep(u + 1.0), 1.0 - _smoothstep(u - 1.0))
    elif cutoff == "partition":
        m = _smoothstep(u + 1.0) - _smoothstep(u)
    else:
        raise ValueError(f"unknown cutoff {cutoff!r}")
    m[np.isneginf(u)] = 0.0
    return m


@dataclass
class LpPiece:
    """One dyadic frequency ring of a grid measure, as a real density grid.

    Spectrum is supported (up to numerical leakage) in the closed ring
    2^(j-1) <= |xi| <= 2^(j+2).  imag_residue records the magnitude of the
    imaginary part discarded after the inverse transform."""

    j: int
    values: np.ndarray
    imag_residue: float

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt((self.values ** 2).mean()))


def _nyquist_guard(N: int, j: int) -> None:
    if j < 0:
        raise ValueError("j must be >= 0")
    # The ring may touch N/2 exactly: the multiplier vanishes there.
    if 2 ** (j + 2) > N // 2:
        raise ScaleOutOfRange(
            f"ring top 2^{j + 2} = {2 ** (j + 2)} exceeds Nyquist {N // 2} for N={N}"
        )


def lp_piece(mu: GridMeasure, j: int, cutoff: str = "bump") -> LpPiece:
    """Extract the 2^j frequency ring of the measure's density.

    The grid weights are treated as a density (weight * N^2) so that sup
    and L2 norms carry continuum normalization."""
    N = mu.N
    _nyquist_guard(N, j)
    spectrum = np.fft.fft2(mu.weights * (N * N))
    piece = np.fft.ifft2(_ring_multiplier(N, j, cutoff) * spectrum)
    residue = float(np.abs(piece.imag).max())
    return LpPiece(j=j, values=piece.real, imag_residue=residue)


def lp_lowpass(mu: GridMeasure, j: int, cutoff: str = "partition") -> LpPiece:
    """Complementary low-frequency part: multiplier chi(log2|xi| - j),
    equal to 1 for |xi| <= 2^(j-1) and 0 for |xi| >= 2^j (DC included)."""
    N = mu.N
    _nyquist_guard(N, max(j - 2, 0))
    if cutoff != "partition":
        raise ValueError("lowpass is defined for the partition cutoff")
    mult = _smoothstep(_log_radius(N) - j + 1.0)
    mult = 1.0 - mult
    spectrum = np.fft.fft2(mu.weights * (N * N))
    piece = np.fft.ifft2(mult * spectrum)
    return LpPiece(j=j, values=piece.real, imag_residue=float(np.abs(piece.imag).max()))


@dataclass(frozen=True)
class LpNormRow:
    j: int
    sup_norm: float
    l2_norm: float


@dataclass
class LpNormTable:
    rows: list[LpNormRow]
    sup_slope: float
    l2_slope: float
    expected_sup_slope: float
    expected_l2_slope: float

    def to_json(self) -> dict:
        return {
            "rows": [{"j": r.j, "sup_norm": r.sup_norm, "l2_norm": r.l2_norm} for r in self.rows],
            "sup_slope": self.sup_slope,
            "l2_slope": self.l2_slope,
            "expected_sup_slope": self.expected_sup_slope,
            "expected_l2_slope": self.expected_l2_slope,
        }


_ZERO_FLOOR = 1e-12


def _log2_slope(js: Sequence[int], norms: Sequence[float]) -> float:
    """Least-squares slope of log2(norm) against j.  Norms at or below the
    numerical floor are excluded; a spectrally empty sequence (fewer than
    two usable rows) has slope 0 by convention."""
    usable = [(j, v) for j, v in zip(js, norms) if v > _ZERO_FLOOR]
    if len(usable) < 2:
        return 0.0
    xs = np.array([j for j, _ in usable], dtype=float)
    ys = np.log2([v for _, v in usable])
    return float(np.polyfit(xs, ys, 1)[0])


def lp_norms(
    mu: GridMeasure, s: float, j_range: Sequence[int], cutoff: str = "bump"
) -> LpNormTable:
    """Sup and L2 norms of the dyadic pieces over j_range, with fitted
    log2 slopes and the reference exponents (2-s) and (2-s)/2."""
    js = sorted(j_range)
    if not js:
        raise ValueError("j_range is empty")
    rows = []
    for j in js:
        piece = lp_piece(mu, j, cutoff=cutoff)
        rows.append(LpNormRow(j=j, sup_norm=piece.sup_norm, l2_norm=piece.l2_norm))
    return LpNormTable(
        rows=rows,
        sup_slope=_log2_slope(js, [r.sup_norm for r in rows]),
        l2_slope=_log2_slope(js, [r.l2_norm for r in rows]),
        expected_sup_slope=2.0 - s,
        expected_l2_slope=(2.0 - s) / 2.0,
    )
