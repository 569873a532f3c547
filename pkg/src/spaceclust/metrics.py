"""Partition agreement and group-level interaction summaries."""

from __future__ import annotations

import numpy as np

from .networks import InteractionNetwork, Partition

__all__ = [
    "adjusted_rand",
    "group_distance_matrix",
    "within_group_mean",
    "between_group_mean",
]


def _labels(p) -> np.ndarray:
    arr = p.labels if isinstance(p, Partition) else np.asarray(p)
    if arr.ndim != 1:
        raise ValueError("a partition must be a 1-d label array")
    return arr


def _comb2(x):
    return x * (x - 1) / 2.0


def adjusted_rand(first, second) -> float:
    """Chance-adjusted Rand agreement of two partitions of the same nodes.

    1 for identical partitions (up to relabeling), about 0 for independent
    ones.  Degenerate cases where the adjustment denominator vanishes (both
    partitions trivial in the same way) return 1.
    """
    a = _labels(first)
    b = _labels(second)
    if a.size != b.size:
        raise ValueError("partitions cover different numbers of nodes")
    if a.size < 2:
        raise ValueError("need at least 2 nodes")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1.0)
    sum_cells = _comb2(table).sum()
    sum_rows = _comb2(table.sum(axis=1)).sum()
    sum_cols = _comb2(table.sum(axis=0)).sum()
    total = _comb2(float(a.size))
    expected = sum_rows * sum_cols / total
    denom = 0.5 * (sum_rows + sum_cols) - expected
    if denom == 0.0:
        return 1.0
    return float((sum_cells - expected) / denom)


def group_distance_matrix(network: InteractionNetwork, partition) -> np.ndarray:
    """Mean interaction value between (and within) groups.

    Entry (q, l) averages ``values[i, j]`` over unordered pairs with one node
    in group q and one in group l.  Every group must be nonempty; a diagonal
    entry for a singleton group (no within pairs) is NaN.
    """
    part = partition if isinstance(partition, Partition) else Partition(np.asarray(partition))
    labels = part.labels
    if labels.size != network.n:
        raise ValueError("partition and network disagree on the number of nodes")
    sizes = part.group_sizes()
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        raise ValueError(f"every group must be nonempty; empty: {empty.tolist()}")
    one_hot = part.one_hot()
    values = network.values
    s1 = one_hot.T @ values @ one_hot
    s0 = np.outer(sizes, sizes) - np.diag(sizes)  # ordered pair counts per cell
    out = np.full(s1.shape, np.nan)
    np.divide(s1, s0, out=out, where=s0 > 0)
    return out


def within_group_mean(network: InteractionNetwork, partition) -> float:
    """Pooled mean interaction value over all within-group unordered pairs."""
    part = partition if isinstance(partition, Partition) else Partition(np.asarray(partition))
    labels = part.labels
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(network.n, k=1)
    mask = same[iu]
    if not mask.any():
        raise ValueError("no within-group pairs")
    return float(network.values[iu][mask].mean())


def between_group_mean(network: InteractionNetwork, partition) -> float:
    """Pooled mean interaction value over all between-group unordered pairs."""
    part = partition if isinstance(partition, Partition) else Partition(np.asarray(partition))
    labels = part.labels
    diff = labels[:, None] != labels[None, :]
    iu = np.triu_indices(network.n, k=1)
    mask = diff[iu]
    if not mask.any():
        raise ValueError("no between-group pairs")
    return float(network.values[iu][mask].mean())
