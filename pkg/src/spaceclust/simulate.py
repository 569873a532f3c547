"""Synthetic two-component benchmark generator.

The design draws two clouds of uniform points in side-by-side unit squares
(offset 3 apart), builds a Gabriel graph inside each cloud, joins the clouds
by a single bridge between the mutually nearest cross pair, assigns labels
by component, optionally swaps label pairs across components to create
spatial discordance, and samples Gaussian interaction values whose mean
depends only on whether the endpoints share a label.

The separation of the two interaction means in noise units,
``(mean_within - mean_between) / sd``, is the difficulty knob; the number of
swapped pairs controls how far the labels stray from the spatial layout
(at ``n_per_component / 2`` swaps the labels are independent of it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .networks import InteractionNetwork, Partition, StructuralNetwork

__all__ = [
    "SimDesign",
    "SimReplicate",
    "gabriel_graph",
    "make_two_component",
    "assign_and_swap",
    "sample_interactions",
    "spatial_discordance",
    "generate_replicate",
]

_COMPONENT_OFFSET = 3.0  # horizontal gap between the two unit squares


@dataclass(frozen=True)
class SimDesign:
    """Parameters of one benchmark scenario.

    ``mean_within`` / ``mean_between`` are the Gaussian interaction means for
    same-label and different-label pairs; ``sd`` their shared noise level.
    """

    n_per_component: int = 50
    n_groups: int = 2
    proportions: tuple[float, ...] = (0.5, 0.5)
    mean_within: float = 1.0
    mean_between: float = 0.8
    sd: float = 0.2
    n_swap_pairs: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n_per_component < 2:
            raise ValueError("each component needs at least 2 nodes")
        if self.n_groups != 2 or len(self.proportions) != 2:
            raise ValueError("the two-component design uses exactly 2 groups")
        if self.sd <= 0:
            raise ValueError("sd must be positive")
        if not 0 <= self.n_swap_pairs <= self.n_per_component:
            raise ValueError("n_swap_pairs must lie in [0, n_per_component]")

    @property
    def separability(self) -> float:
        """Mean gap in noise units."""
        return (self.mean_within - self.mean_between) / self.sd

    @classmethod
    def from_separability(
        cls,
        delta: float,
        n_swap_pairs: int = 0,
        seed: int = 0,
        sd: float = 0.2,
        mean_between: float = 1.0,
        n_per_component: int = 50,
    ) -> "SimDesign":
        """Design with a given mean gap ``delta`` in noise units."""
        return cls(
            n_per_component=n_per_component,
            mean_within=mean_between + delta * sd,
            mean_between=mean_between,
            sd=sd,
            n_swap_pairs=n_swap_pairs,
            seed=seed,
        )


@dataclass(frozen=True)
class SimReplicate:
    """One generated dataset: geometry, truth labels, interaction values."""

    design: SimDesign
    points: np.ndarray
    structure: StructuralNetwork
    truth: Partition
    interactions: InteractionNetwork
    discordance: float


def _rng(design: SimDesign, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(design.seed).spawn(3)[stream])


def gabriel_graph(points, weight_scheme: str = "unit") -> StructuralNetwork:
    """Gabriel graph of a 2-d point set.

    Points i and j are joined when no third point lies in the closed disc
    whose diameter is the segment ij.  ``weight_scheme`` is ``"unit"`` (all
    weights 1) or ``"max-minus-d"`` (weight = longest kept edge length minus
    edge length).  Duplicate points are rejected.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("points must be an (n, 2) array with n >= 2")
    if weight_scheme not in ("unit", "max-minus-d"):
        raise ValueError(f"unknown weight scheme {weight_scheme!r}")
    n = pts.shape[0]
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    off = ~np.eye(n, dtype=bool)
    if (d2[off] == 0).any():
        raise ValueError("duplicate points are not allowed")

    pairs = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            mid = 0.5 * (pts[i] + pts[j])
            dk2 = np.sum((pts - mid) ** 2, axis=1)
            dk2[i] = dk2[j] = np.inf
            if np.all(dk2 > d2[i, j] / 4.0):
                pairs.append((i, j))

    if weight_scheme == "unit":
        edges = [(i, j, 1.0) for i, j in pairs]
    else:
        lengths = {p: float(np.sqrt(d2[p])) for p in pairs}
        dmax = max(lengths.values()) if lengths else 0.0
        edges = [(i, j, dmax - lengths[(i, j)]) for i, j in pairs]
    return StructuralNetwork(edges, n=n)


def make_two_component(design: SimDesign, weight_scheme: str = "unit"):
    """Two Gabriel components joined by one bridge.

    Returns ``(structure, points)``.  Nodes 0..n_per-1 form the first
    component, the rest the second; the bridge joins the closest cross pair
    and carries weight 1 under the unit scheme.
    """
    m = design.n_per_component
    rng = _rng(design, 0)
    pts_a = rng.uniform(size=(m, 2))
    pts_b = rng.uniform(size=(m, 2))
    pts_b[:, 0] += _COMPONENT_OFFSET
    points = np.vstack([pts_a, pts_b])

    graph_a = gabriel_graph(pts_a, weight_scheme)
    graph_b = gabriel_graph(pts_b, weight_scheme)
    edges = graph_a.edges
    edges += [(i + m, j + m, w) for i, j, w in graph_b.edges]

    cross = pts_a[:, None, :] - pts_b[None, :, :]
    cross_d2 = np.einsum("ijk,ijk->ij", cross, cross)
    ia, ib = np.unravel_index(np.argmin(cross_d2), cross_d2.shape)
    if weight_scheme == "unit":
        bridge_w = 1.0
    else:
        all_w = [w for _, _, w in edges]
        bridge_w = max(all_w) if all_w else 1.0
    edges.append((int(ia), int(ib) + m, bridge_w))

    return StructuralNetwork(edges, n=2 * m), points


def _cross_edges(structure: StructuralNetwork, m: int) -> int:
    return int(np.count_nonzero((structure.src < m) != (structure.dst < m)))


def assign_and_swap(design: SimDesign, structure: StructuralNetwork) -> Partition:
    """Component labels with ``n_swap_pairs`` cross-component label swaps.

    Starts from labels equal to component membership, draws disjoint nodes
    from each component and exchanges the labels of the paired draws, so
    exactly ``2 * n_swap_pairs`` nodes end up off their component label.
    """
    m = design.n_per_component
    if structure.n != 2 * m:
        raise ValueError("structure size does not match the design")
    if _cross_edges(structure, m) != 1:
        raise ValueError("expected a two-component structure joined by a single bridge")
    labels = np.array([0] * m + [1] * m)
    k = design.n_swap_pairs
    if k:
        rng = _rng(design, 1)
        first = rng.choice(m, size=k, replace=False)
        second = rng.choice(m, size=k, replace=False) + m
        labels[first] = 1
        labels[second] = 0
    return Partition(labels, n_groups=2)


def sample_interactions(truth: Partition, design: SimDesign) -> InteractionNetwork:
    """Gaussian interaction values for every unordered pair.

    Same-label pairs draw from N(mean_within, sd^2), different-label pairs
    from N(mean_between, sd^2); the matrix is symmetric with a zero diagonal.
    """
    labels = truth.labels
    n = labels.size
    rng = _rng(design, 2)
    same = labels[:, None] == labels[None, :]
    means = np.where(same, design.mean_within, design.mean_between)
    iu = np.triu_indices(n, k=1)
    vals = means[iu] + design.sd * rng.standard_normal(iu[0].size)
    y = np.zeros((n, n))
    y[iu] = vals
    y = y + y.T
    return InteractionNetwork(y)


def spatial_discordance(truth: Partition, structure: StructuralNetwork) -> float:
    """Share of structural edges whose endpoints carry different labels."""
    if structure.n_edges == 0:
        raise ValueError("discordance is undefined on an edgeless structure")
    labels = truth.labels
    if labels.size != structure.n:
        raise ValueError("labels and structure disagree on the number of nodes")
    return float(np.mean(labels[structure.src] != labels[structure.dst]))


def generate_replicate(design: SimDesign, weight_scheme: str = "unit") -> SimReplicate:
    """Full dataset for one design: geometry, truth, interactions, discordance."""
    structure, points = make_two_component(design, weight_scheme)
    truth = assign_and_swap(design, structure)
    interactions = sample_interactions(truth, design)
    return SimReplicate(
        design=design,
        points=points,
        structure=structure,
        truth=truth,
        interactions=interactions,
        discordance=spatial_discordance(truth, structure),
    )
