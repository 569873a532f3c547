"""Independent reimplementations used as test oracles.

Everything here is written from the defining formulas in the plainest
possible style and shares no code with the package: the point is that a bug
would have to be made twice, in two different shapes, to go unnoticed.
"""

from __future__ import annotations

import math

import numpy as np


def mixnet_fixed_point(values, alpha, mean, var, tau0, damping=0.5, tol=1e-13, max_iters=20000):
    """Plain damped Jacobi solve of the unpenalized mean-field update.

    tau[i, q] <- softmax_q( log alpha_q + sum_{j != i} sum_l tau[j, l]
    * log N(values[i, j]; mean[q, l], var) ), mixed with the previous iterate
    at the given damping, until the largest entry change falls below ``tol``.
    """
    values = np.asarray(values, dtype=float)
    tau = np.array(tau0, dtype=float)
    n = tau.shape[0]
    log_alpha = np.log(np.asarray(alpha, dtype=float))
    # logf[i, j, q, l]: log-density of the (i, j) value under cell (q, l)
    diff = values[:, :, None, None] - np.asarray(mean)[None, None, :, :]
    logf = -0.5 * math.log(2.0 * math.pi * var) - diff * diff / (2.0 * var)
    for i in range(n):
        logf[i, i] = 0.0
    for _ in range(max_iters):
        s = np.tensordot(logf, tau, axes=([1, 3], [0, 1]))  # -> [i, q]
        logits = log_alpha[None, :] + s
        logits = logits - logits.max(axis=1, keepdims=True)
        soft = np.exp(logits)
        soft = soft / soft.sum(axis=1, keepdims=True)
        new = (1.0 - damping) * tau + damping * soft
        if np.abs(new - tau).max() < tol:
            return new
        tau = new
    return tau


def ari_pair_counting(a, b) -> float:
    """Adjusted Rand from explicit pair agreements.

    For every unordered node pair, record whether each partition puts the two
    nodes together; the chance-adjusted agreement of those indicator lists is
    the adjusted Rand index.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.size
    iu = np.triu_indices(n, k=1)
    same_a = (a[:, None] == a[None, :])[iu]
    same_b = (b[:, None] == b[None, :])[iu]
    pairs = same_a.size
    together_a = int(same_a.sum())
    together_b = int(same_b.sum())
    together_both = int((same_a & same_b).sum())
    expected = together_a * together_b / pairs
    denom = 0.5 * (together_a + together_b) - expected
    if denom == 0.0:
        return 1.0
    return float((together_both - expected) / denom)


def set_partitions(n: int):
    """All partitions of {0..n-1} as restricted-growth label lists."""
    if n == 1:
        yield [0]
        return
    for head in set_partitions(n - 1):
        top = max(head)
        for q in range(top + 2):
            yield head + [q]


def gabriel_disc_test(points) -> set[tuple[int, int]]:
    """Gabriel edges by the literal definition, one disc test per pair.

    The pair (i, j) is an edge when every other point lies strictly outside
    the closed disc whose diameter is the segment ij.
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    edges = set()
    for i in range(n - 1):
        xi, yi = pts[i]
        for j in range(i + 1, n):
            xj, yj = pts[j]
            cx, cy = (xi + xj) / 2.0, (yi + yj) / 2.0
            r2 = ((xi - xj) ** 2 + (yi - yj) ** 2) / 4.0
            blocked = False
            for k in range(n):
                if k == i or k == j:
                    continue
                xk, yk = pts[k]
                if (xk - cx) ** 2 + (yk - cy) ** 2 <= r2:
                    blocked = True
                    break
            if not blocked:
                edges.add((i, j))
    return edges


def discordant_edge_count(labels, edges) -> int:
    """Number of (i, j, w) edges whose endpoints carry different labels."""
    labels = np.asarray(labels)
    return sum(1 for i, j, _ in edges if labels[i] != labels[j])
