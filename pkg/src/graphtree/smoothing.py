"""Neighborhood smoothing estimators for the edge probability matrix.

Two variants. The per-node variant smooths over one neighborhood per node.
The modified variant builds one neighborhood per ordered pair (i, j), with
row and column j of A deleted before squaring, so the entries averaged for
P_hat[i][j] are independent of everything involving node j.

Deleting row/column j never materializes a zeroed copy: with sq = A @ A held
as raw counts, entry (i, k) of (d_j A)^2 / n equals (sq[i,k] - A[i,j] *
A[j,k]) / n. Keeping the subtraction in integer arithmetic with one final
division makes the fast path bitwise equal to the obvious zeroed-matrix
computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling import check_adjacency

__all__ = [
    "SmoothingConfig",
    "EstimationErrors",
    "bandwidth",
    "quantile_rank",
    "deleted_square_entry",
    "pair_distance_dj",
    "neighborhood_of_pair",
    "estimate_modified",
    "estimate_original",
    "estimate_edge_probabilities",
    "modified_neighborhood_sizes",
    "original_neighborhood_sizes",
    "column_distance_matrix",
    "estimation_errors",
]

# chunk budget for the O(n^3) pairwise distance passes, in float64 elements
_CHUNK_ELEMS = 1 << 22


def bandwidth(c: float, n: int) -> float:
    """h = C * sqrt(ln n / n); natural log. Must land in (0, 1) for the given n."""
    if c <= 0:
        raise ValueError("C must be positive")
    if n < 2:
        raise ValueError("need n >= 2")
    h = c * math.sqrt(math.log(n) / n)
    if not 0.0 < h < 1.0:
        raise ValueError(f"bandwidth h={h} outside (0, 1) for C={c}, n={n}")
    return h


@dataclass(frozen=True)
class SmoothingConfig:
    """Neighborhood size constant and estimator variant."""

    C: float = 0.1
    variant: str = "modified"

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.variant not in ("modified", "original"):
            raise ValueError(f"unknown variant {self.variant!r}")

    def bandwidth(self, n: int) -> float:
        return bandwidth(self.C, n)


@dataclass(frozen=True)
class EstimationErrors:
    max_norm: float
    mse: float


def quantile_rank(h: float, m: int) -> int:
    """Order statistic index for the h-quantile of m values: max(1, ceil(h*m)).

    Every value tied with the threshold is included by the callers; this is a
    documented convention, chosen so neighborhoods are never empty.
    """
    if not 0.0 < h < 1.0:
        raise ValueError("h must lie in (0, 1)")
    if m < 1:
        raise ValueError("need at least one candidate")
    return max(1, math.ceil(h * m))


def _square_counts(a: np.ndarray) -> np.ndarray:
    # raw common-neighbor counts A @ A; float64 holds them exactly
    return a.astype(np.float64) @ a.astype(np.float64)


def deleted_square_entry(sq: np.ndarray, a: np.ndarray, j: int, i: int, k: int) -> float:
    """Entry (i, k) of (d_j A)^2 / n from precomputed raw counts sq = A @ A.

    Requires i != j and k != j. The correction A[i,j] * A[j,k] removes the
    only term of the common-neighbor sum that passes through j; subtraction
    happens on exact integers, then one division by n.
    """
    n = a.shape[0]
    if i == j or k == j:
        raise ValueError("deleted index j must differ from i and k")
    if not (0 <= i < n and 0 <= k < n and 0 <= j < n):
        raise ValueError("index out of range")
    return (float(sq[i, k]) - float(a[i, j]) * float(a[j, k])) / n


def _deleted_square_over_n(sq: np.ndarray, af: np.ndarray, j: int) -> np.ndarray:
    """(d_j A)^2 / n for all (i, k) with i, k != j; column j is forced to 0.

    Row j is never meaningful and callers must not read it.
    """
    col = af[:, j]
    r = (sq - np.outer(col, col)) / af.shape[0]
    r[:, j] = 0.0
    return r


def _pairwise_chebyshev(x: np.ndarray) -> np.ndarray:
    """out[i, i2] = max over k not in {i, i2} of |x[i, k] - x[i2, k]|.

    The excluded columns are neutralized by zeroing their differences, which
    is safe because every candidate difference is nonnegative. Chunked over
    rows to bound memory.
    """
    n = x.shape[0]
    out = np.empty((n, n))
    idx = np.arange(n)
    rows = max(1, _CHUNK_ELEMS // (n * n))
    buf = np.empty((rows, n, n))
    for lo in range(0, n, rows):
        hi = min(lo + rows, n)
        t = buf[: hi - lo]
        np.subtract(x[lo:hi, None, :], x[None, :, :], out=t)
        np.abs(t, out=t)
        t[idx[lo:hi] - lo, :, idx[lo:hi]] = 0.0  # k == i
        t[:, idx, idx] = 0.0  # k == i2
        t.max(axis=2, out=out[lo:hi])
    return out


def pair_distance_dj(a: np.ndarray, i: int, i2: int, j: int, sq: np.ndarray | None = None) -> float:
    """d_j(i, i2) = max over k not in {i, i2, j} of the (d_j A)^2 / n row difference."""
    n = a.shape[0]
    if n < 4:
        raise ValueError("need n >= 4 so that a candidate k remains")
    if len({i, i2, j}) != 3:
        raise ValueError("i, i2, j must be pairwise distinct")
    if sq is None:
        sq = _square_counts(a)
    af = a.astype(np.float64)
    r = _deleted_square_over_n(sq, af, j)
    diff = np.abs(r[i] - r[i2])
    diff[[i, i2, j]] = 0.0
    return float(diff.max())


def neighborhood_of_pair(a: np.ndarray, i: int, j: int, h: float, sq: np.ndarray | None = None) -> np.ndarray:
    """Candidates i' (never i or j) whose d_j(i, i') is within the h-quantile.

    The threshold is the ceil(h*(n-2))th smallest distance, ties included,
    so the result is never empty.
    """
    n = a.shape[0]
    if n < 4:
        raise ValueError("need n >= 4")
    if i == j:
        raise ValueError("need i != j")
    if not 0.0 < h < 1.0:
        raise ValueError("h must lie in (0, 1)")
    if sq is None:
        sq = _square_counts(a)
    cands = np.array([v for v in range(n) if v not in (i, j)])
    dists = np.array([pair_distance_dj(a, i, int(v), j, sq) for v in cands])
    q = np.sort(dists)[quantile_rank(h, n - 2) - 1]
    return cands[dists <= q]


def estimate_modified(a: np.ndarray, config: SmoothingConfig) -> np.ndarray:
    """Edge probability estimate with one neighborhood per ordered pair.

    P_hat[i][j] averages A[i', j] over i' in the neighborhood of (i, j) and
    A[i, j'] over j' in the neighborhood of (j, i), then halves the sum.
    Symmetric with zero diagonal by construction; deterministic.
    """
    check_adjacency(a)
    if config.variant != "modified":
        raise ValueError(f"config variant is {config.variant!r}, not 'modified'")
    return _estimate_modified_h(a, config.bandwidth(a.shape[0]))


def _estimate_modified_h(a: np.ndarray, h: float) -> np.ndarray:
    n = a.shape[0]
    if n < 4:
        raise ValueError("modified estimator needs n >= 4")
    if not 0.0 < h < 1.0:
        raise ValueError("h must lie in (0, 1)")
    af = a.astype(np.float64)
    sq = af @ af
    r = quantile_rank(h, n - 2)
    f = np.empty((n, n))
    for j in range(n):
        nbrs, counts = _pair_neighborhoods(sq, af, j, r)
        f[:, j] = (nbrs @ af[:, j]) / counts
    phat = 0.5 * (f + f.T)
    np.fill_diagonal(phat, 0.0)
    return phat


def _pair_neighborhoods(sq: np.ndarray, af: np.ndarray, j: int, rank: int):
    """Boolean neighborhood rows for every ordered pair (i, j) at fixed j.

    Row i flags the candidates i' with d_j(i, i') within the rank-th smallest.
    Rows i == j are meaningless; the diagonal and column j are never flagged.
    """
    n = af.shape[0]
    d = _pairwise_chebyshev(_deleted_square_over_n(sq, af, j))
    idx = np.arange(n)
    d[idx, idx] = np.inf
    d[:, j] = np.inf
    q = np.partition(d, rank - 1, axis=1)[:, rank - 1]
    nbrs = d <= q[:, None]
    return nbrs, nbrs.sum(axis=1)


def estimate_original(a: np.ndarray, config: SmoothingConfig) -> np.ndarray:
    """Edge probability estimate with one neighborhood per node.

    Distances compare rows of A^2 / n with the largest absolute difference
    over k not in {i, i'}; the quantile rule matches the modified variant
    (ceil(h*(n-1))th smallest, ties included) and the output is symmetrized
    the same way.
    """
    check_adjacency(a)
    if config.variant != "original":
        raise ValueError(f"config variant is {config.variant!r}, not 'original'")
    return _estimate_original_h(a, config.bandwidth(a.shape[0]))


def _estimate_original_h(a: np.ndarray, h: float) -> np.ndarray:
    n = a.shape[0]
    if n < 3:
        raise ValueError("original estimator needs n >= 3")
    if not 0.0 < h < 1.0:
        raise ValueError("h must lie in (0, 1)")
    af = a.astype(np.float64)
    nbrs, counts = _node_neighborhoods(af, h)
    g = (nbrs @ af) / counts[:, None]
    phat = 0.5 * (g + g.T)
    np.fill_diagonal(phat, 0.0)
    return phat


def _node_neighborhoods(af: np.ndarray, h: float):
    n = af.shape[0]
    d = _pairwise_chebyshev((af @ af) / n)
    idx = np.arange(n)
    d[idx, idx] = np.inf
    rank = quantile_rank(h, n - 1)
    q = np.partition(d, rank - 1, axis=1)[:, rank - 1]
    nbrs = d <= q[:, None]
    return nbrs, nbrs.sum(axis=1)


def estimate_edge_probabilities(a: np.ndarray, config: SmoothingConfig) -> np.ndarray:
    """Dispatch on config.variant."""
    if config.variant == "modified":
        return estimate_modified(a, config)
    return estimate_original(a, config)


def modified_neighborhood_sizes(a: np.ndarray, h: float) -> np.ndarray:
    """|N(i, j)| for every ordered pair, diagonal 0; for diagnostics and logs."""
    check_adjacency(a)
    n = a.shape[0]
    if n < 4:
        raise ValueError("modified estimator needs n >= 4")
    af = a.astype(np.float64)
    sq = af @ af
    r = quantile_rank(h, n - 2)
    sizes = np.zeros((n, n), dtype=int)
    for j in range(n):
        _, counts = _pair_neighborhoods(sq, af, j, r)
        sizes[:, j] = counts
        sizes[j, j] = 0
    return sizes


def original_neighborhood_sizes(a: np.ndarray, h: float) -> np.ndarray:
    """|N_i| per node for the per-node variant."""
    check_adjacency(a)
    if a.shape[0] < 3:
        raise ValueError("original estimator needs n >= 3")
    _, counts = _node_neighborhoods(a.astype(np.float64), h)
    return counts


def column_distance_matrix(a: np.ndarray) -> np.ndarray:
    """Euclidean distances between adjacency columns (the naive dissimilarity)."""
    af = np.asarray(a, dtype=np.float64)
    gram = af.T @ af
    sq = np.diagonal(gram)[:, None] - 2.0 * gram + np.diagonal(gram)[None, :]
    np.maximum(sq, 0.0, out=sq)
    d = np.sqrt(sq)
    np.fill_diagonal(d, 0.0)
    return d


def estimation_errors(phat: np.ndarray, p: np.ndarray) -> EstimationErrors:
    """Off-diagonal max-norm error and (1/n^2)-scaled squared error."""
    phat = np.asarray(phat, dtype=float)
    p = np.asarray(p, dtype=float)
    if phat.shape != p.shape or phat.ndim != 2 or phat.shape[0] != phat.shape[1]:
        raise ValueError(f"dimension mismatch: {phat.shape} vs {p.shape}")
    n = phat.shape[0]
    diff = np.abs(phat - p)
    np.fill_diagonal(diff, 0.0)
    max_norm = float(diff.max()) if n > 1 else 0.0
    mse = float(np.sum(diff * diff)) / (n * n)
    return EstimationErrors(max_norm=max_norm, mse=mse)
