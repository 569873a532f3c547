"""Network containers and the graph Laplacian machinery behind the penalty.

The library works on a pair of networks over one shared node set: a dense
symmetric matrix of observed pairwise interaction values (the data being
clustered) and a sparse weighted proximity graph (the structure the labels
should respect).  The proximity graph enters the model only through its
Laplacian quadratic form; :func:`local_variance` and :func:`penalty` are the
two faces of that form used by the fitting engine.

Conventions fixed here and relied on everywhere else:

* quadratic forms sum every unordered edge (i < j) exactly once, so
  ``local_variance(u, x) == u @ laplacian(x) @ u``;
* the diagonal of the interaction matrix is unused and normalized to zero;
* for hard labels on a unit-weight graph the penalty equals twice the number
  of edges whose endpoints disagree (a disagreeing edge contributes 1 in each
  of the two label columns involved).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InteractionNetwork",
    "StructuralNetwork",
    "Partition",
    "SoftAssignment",
    "laplacian",
    "local_variance",
    "penalty",
]


def _default_ids(n: int) -> tuple[str, ...]:
    width = len(str(max(n - 1, 1)))
    return tuple(f"n{i:0{width}d}" for i in range(n))


@dataclass(frozen=True)
class InteractionNetwork:
    """Dense symmetric matrix of pairwise interaction values.

    The diagonal carries no information and is stored as zero.  Values must
    be finite; the matrix must be exactly symmetric off the diagonal.
    """

    values: np.ndarray
    node_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("interaction values must form a square matrix")
        n = values.shape[0]
        if n < 2:
            raise ValueError("an interaction network needs at least 2 nodes")
        if not np.isfinite(values).all():
            raise ValueError("interaction values must be finite")
        off = ~np.eye(n, dtype=bool)
        if not np.array_equal(values[off], values.T[off]):
            raise ValueError("interaction matrix must be symmetric")
        np.fill_diagonal(values, 0.0)
        values.flags.writeable = False
        ids = _default_ids(n) if self.node_ids is None else tuple(str(i) for i in self.node_ids)
        if len(ids) != n or len(set(ids)) != n:
            raise ValueError("node_ids must be unique and match the matrix size")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "node_ids", ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]


class StructuralNetwork:
    """Sparse symmetric proximity graph with nonnegative edge weights.

    Edges are undirected and stored once with ``src < dst``.  Self loops and
    duplicate edges are rejected.  Instances are immutable after construction.
    """

    def __init__(self, edges, node_ids=None, n=None):
        if node_ids is None:
            if n is None:
                raise ValueError("provide node_ids or n")
            node_ids = _default_ids(int(n))
        node_ids = tuple(str(i) for i in node_ids)
        if len(set(node_ids)) != len(node_ids):
            raise ValueError("node_ids must be unique")
        n_nodes = len(node_ids)
        if n_nodes < 1:
            raise ValueError("a structural network needs at least 1 node")

        canon = []
        for edge in edges:
            i, j, w = edge
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self loop on node index {i}")
            if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                raise ValueError(f"edge ({i}, {j}) is out of range for {n_nodes} nodes")
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"edge ({i}, {j}) has invalid weight {w}")
            if i > j:
                i, j = j, i
            canon.append((i, j, w))
        canon.sort(key=lambda e: (e[0], e[1]))
        for a, b in zip(canon, canon[1:]):
            if a[:2] == b[:2]:
                raise ValueError(f"duplicate edge ({a[0]}, {a[1]})")

        src = np.array([e[0] for e in canon], dtype=np.intp)
        dst = np.array([e[1] for e in canon], dtype=np.intp)
        weight = np.array([e[2] for e in canon], dtype=float)
        for arr in (src, dst, weight):
            arr.flags.writeable = False
        self._src, self._dst, self._weight = src, dst, weight
        self._node_ids = node_ids

    @property
    def node_ids(self) -> tuple[str, ...]:
        return self._node_ids

    @property
    def n(self) -> int:
        return len(self._node_ids)

    @property
    def n_edges(self) -> int:
        return len(self._src)

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def dst(self) -> np.ndarray:
        return self._dst

    @property
    def weight(self) -> np.ndarray:
        return self._weight

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(w)) for i, j, w in zip(self._src, self._dst, self._weight)]

    def degrees(self) -> np.ndarray:
        """Weighted degree of every node (isolated nodes get 0)."""
        deg = np.zeros(self.n)
        np.add.at(deg, self._src, self._weight)
        np.add.at(deg, self._dst, self._weight)
        return deg

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix."""
        a = np.zeros((self.n, self.n))
        a[self._src, self._dst] = self._weight
        a[self._dst, self._src] = self._weight
        return a

    def __repr__(self):
        return f"StructuralNetwork(n={self.n}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class Partition:
    """Hard group assignment: one integer label per node.

    ``n_groups`` may exceed the number of occupied labels (a model can keep
    empty groups); it defaults to ``labels.max() + 1``.
    """

    labels: np.ndarray
    n_groups: int | None = None

    def __post_init__(self):
        labels = np.array(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-d array")
        if not np.issubdtype(labels.dtype, np.integer):
            as_int = labels.astype(int)
            if not np.array_equal(as_int, labels):
                raise ValueError("labels must be integers")
            labels = as_int
        labels = labels.astype(np.intp)
        if labels.min() < 0:
            raise ValueError("labels must be nonnegative")
        n_groups = int(labels.max()) + 1 if self.n_groups is None else int(self.n_groups)
        if labels.max() >= n_groups:
            raise ValueError("a label exceeds n_groups")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_groups", n_groups)

    @property
    def n(self) -> int:
        return self.labels.size

    def one_hot(self) -> np.ndarray:
        out = np.zeros((self.n, self.n_groups))
        out[np.arange(self.n), self.labels] = 1.0
        return out

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_groups)


@dataclass(frozen=True)
class SoftAssignment:
    """Row-stochastic matrix of per-node group membership weights."""

    tau: np.ndarray

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float)
        if tau.ndim != 2 or tau.size == 0:
            raise ValueError("tau must be a 2-d array")
        if tau.min() < -1e-12 or tau.max() > 1 + 1e-12:
            raise ValueError("tau entries must lie in [0, 1]")
        if np.abs(tau.sum(axis=1) - 1.0).max() > 1e-10:
            raise ValueError("tau rows must sum to 1 within 1e-10")
        tau.flags.writeable = False
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    @property
    def n_groups(self) -> int:
        return self.tau.shape[1]


def _columns(assignment, n: int) -> np.ndarray:
    """Per-node column representation of an assignment (soft or hard)."""
    if isinstance(assignment, SoftAssignment):
        cols = assignment.tau
    elif isinstance(assignment, Partition):
        cols = assignment.one_hot()
    else:
        cols = np.asarray(assignment, dtype=float)
        if cols.ndim != 2:
            raise ValueError("assignment must be 2-d (nodes x groups)")
    if cols.shape[0] != n:
        raise ValueError(f"assignment has {cols.shape[0]} rows, network has {n} nodes")
    return cols


def laplacian(structure: StructuralNetwork) -> np.ndarray:
    """Dense graph Laplacian D - A of the proximity graph.

    Rows sum to zero (exactly for integral weights, to rounding otherwise).
    """
    a = structure.adjacency()
    return np.diag(a.sum(axis=1)) - a


def local_variance(u, structure: StructuralNetwork) -> float:
    """Weighted sum of squared differences of ``u`` across edges.

    Equals ``u @ laplacian(structure) @ u`` by the unordered-edge convention;
    constant vectors give exactly 0.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size != structure.n:
        raise ValueError("u must be a vector with one entry per node")
    d = u[structure.src] - u[structure.dst]
    return float(np.sum(structure.weight * d * d))


def penalty(assignment, structure: StructuralNetwork) -> float:
    """Spatial roughness of a label assignment: sum of per-column local variances.

    Accepts a :class:`SoftAssignment`, a :class:`Partition`, or a raw
    ``(n, n_groups)`` array.  For hard labels on a unit-weight graph this is
    twice the number of discordant edges.
    """
    cols = _columns(assignment, structure.n)
    d = cols[structure.src] - cols[structure.dst]
    return float(np.sum(structure.weight * np.sum(d * d, axis=1)))
