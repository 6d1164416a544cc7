"""Vectorized float kernels over arrays of configurations.

Shapes: a batch of n configurations of k+1 points is an (n, k+1, 2) float
array.  These kernels power the enumeration and Monte Carlo labs; the
scalar API in `core` / `canonical` defines the semantics they mirror.
"""

from __future__ import annotations

import numpy as np

from .canonical import DEGENERACY_FLOOR

__all__ = [
    "wedge_cols",
    "pair_index_arrays",
    "area_types",
    "degeneracies",
    "canonical_forms",
    "matching_transforms",
    "apply_maps",
    "sample_unimodular_batch",
    "sample_disk_configurations",
]


def wedge_cols(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Signed areas for broadcastable stacks of points (..., 2)."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def pair_index_arrays(k: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based (i, j) arrays over all pairs i < j of k+1 labels, lex order."""
    ii, jj = np.triu_indices(k + 1, 1)
    return ii, jj


def area_types(confs: np.ndarray) -> np.ndarray:
    """(n, k+1, 2) -> (n, k(k+1)/2) pairwise signed areas."""
    k = confs.shape[1] - 1
    ii, jj = pair_index_arrays(k)
    return wedge_cols(confs[:, ii, :], confs[:, jj, :])


def degeneracies(confs: np.ndarray) -> np.ndarray:
    return np.abs(wedge_cols(confs[:, 0, :], confs[:, 1, :]))


def canonical_forms(
    confs: np.ndarray, floor: float = DEGENERACY_FLOOR
) -> tuple[np.ndarray, np.ndarray]:
    """Canonical coordinates for the non-degenerate rows of a batch.

    Returns (forms, kept): forms has shape (m, 2k-1) for the m rows whose
    first-pair wedge magnitude is >= floor, kept is the boolean row mask.
    Coordinates follow the scalar layout: t1 = w12, then per extra point
    the pair (wedge(xj, x2)/w12, wedge(x1, xj)).
    """
    n, kp1, _ = confs.shape
    k = kp1 - 1
    w12 = wedge_cols(confs[:, 0, :], confs[:, 1, :])
    kept = np.abs(w12) >= floor
    sub = confs[kept]
    w = w12[kept]
    forms = np.empty((len(sub), 2 * k - 1))
    forms[:, 0] = w
    for j in range(2, k + 1):
        p = sub[:, j, :]
        forms[:, 2 * j - 3] = wedge_cols(p, sub[:, 1, :]) / w
        forms[:, 2 * j - 2] = wedge_cols(sub[:, 0, :], p)
    return forms, kept


def matching_transforms(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Batched (y1 y2)(x1 x2)^-1: (n, k+1, 2) x 2 -> (n, 2, 2)."""
    w = wedge_cols(x[:, 0, :], x[:, 1, :])
    x1, x2 = x[:, 0, :], x[:, 1, :]
    y1, y2 = y[:, 0, :], y[:, 1, :]
    g = np.empty((len(x), 2, 2))
    g[:, 0, 0] = (y1[:, 0] * x2[:, 1] - y2[:, 0] * x1[:, 1]) / w
    g[:, 0, 1] = (y2[:, 0] * x1[:, 0] - y1[:, 0] * x2[:, 0]) / w
    g[:, 1, 0] = (y1[:, 1] * x2[:, 1] - y2[:, 1] * x1[:, 1]) / w
    g[:, 1, 1] = (y2[:, 1] * x1[:, 0] - y1[:, 1] * x2[:, 0]) / w
    return g


def apply_maps(g: np.ndarray, confs: np.ndarray) -> np.ndarray:
    """Apply per-row 2x2 maps: (n, 2, 2), (n, k+1, 2) -> (n, k+1, 2)."""
    return np.einsum("nab,npb->npa", g, confs)


def sample_unimodular_batch(bound: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n determinant-1 maps with entries <= bound, as an (n, 2, 2) array.

    Same rejection scheme as `core.sample_unimodular`, vectorized.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    out = np.empty((n, 2, 2))
    have = 0
    while have < n:
        want = n - have
        m = rng.uniform(-bound, bound, size=(max(2 * want, 64), 2, 2))
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        m = m[np.abs(det) >= 1e-6]
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        neg = det < 0
        m[neg] = m[neg][:, :, ::-1]
        g = m / np.sqrt(np.abs(det))[:, None, None]
        g = g[np.abs(g).max(axis=(1, 2)) <= bound]
        take = min(len(g), want)
        out[have:have + take] = g[:take]
        have += take
    return out


def sample_disk_configurations(
    n: int,
    k: int,
    rng: np.random.Generator,
    min_degeneracy: float = 0.0,
    max_norm: float = 1.0,
) -> np.ndarray:
    """n configurations of k+1 points uniform in the disk of radius max_norm,
    rejected until |wedge(x1, x2)| >= min_degeneracy."""
    out = np.empty((n, k + 1, 2))
    have = 0
    while have < n:
        want = n - have
        m = max(2 * want, 64)
        r = max_norm * np.sqrt(rng.random((m, k + 1)))
        th = 2 * np.pi * rng.random((m, k + 1))
        confs = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
        if min_degeneracy > 0:
            confs = confs[degeneracies(confs) >= min_degeneracy]
        take = min(len(confs), want)
        out[have:have + take] = confs[:take]
        have += take
    return out
