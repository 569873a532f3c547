"""Occurrence-table ingestion: composition distances and proximity graphs.

Turns a sites-by-taxa presence table into the two networks the engine
consumes: a Jaccard distance matrix on taxon sets (interaction network) and
a thresholded great-circle proximity graph with anti-monotone weights
(structural network).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .networks import InteractionNetwork, StructuralNetwork

__all__ = [
    "EARTH_RADIUS_KM",
    "OccurrenceTable",
    "jaccard_network",
    "great_circle_km",
    "build_structural",
    "structural_from_distances",
]

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class OccurrenceTable:
    """Presence/absence of taxa at georeferenced sites."""

    site_ids: tuple[str, ...]
    lat: np.ndarray
    lon: np.ndarray
    taxon_ids: tuple[str, ...]
    presence: np.ndarray

    def __post_init__(self):
        site_ids = tuple(str(s) for s in self.site_ids)
        if len(set(site_ids)) != len(site_ids) or not site_ids:
            raise ValueError("site ids must be unique and nonempty")
        lat = np.array(self.lat, dtype=float)
        lon = np.array(self.lon, dtype=float)
        if lat.shape != (len(site_ids),) or lon.shape != (len(site_ids),):
            raise ValueError("lat/lon must hold one value per site")
        if (np.abs(lat) > 90).any():
            raise ValueError("latitudes must lie in [-90, 90]")
        if (np.abs(lon) > 180).any():
            raise ValueError("longitudes must lie in [-180, 180]")
        taxon_ids = tuple(str(t) for t in self.taxon_ids)
        if len(set(taxon_ids)) != len(taxon_ids) or not taxon_ids:
            raise ValueError("taxon ids must be unique and nonempty")
        presence = np.array(self.presence)
        if presence.shape != (len(site_ids), len(taxon_ids)):
            raise ValueError("presence must be sites x taxa")
        if not np.isin(presence, (0, 1)).all():
            raise ValueError("presence entries must be 0 or 1")
        presence = presence.astype(np.uint8)
        n_empty = int(np.count_nonzero(presence.sum(axis=1) == 0))
        if n_empty:
            warnings.warn(f"{n_empty} sites record no taxa at all")
        for arr in (lat, lon, presence):
            arr.flags.writeable = False
        object.__setattr__(self, "site_ids", site_ids)
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)
        object.__setattr__(self, "taxon_ids", taxon_ids)
        object.__setattr__(self, "presence", presence)

    @property
    def n_sites(self) -> int:
        return len(self.site_ids)


def jaccard_network(table: OccurrenceTable) -> InteractionNetwork:
    """Pairwise Jaccard distance between the sites' taxon sets.

    distance = 1 - |intersection| / |union|; disjoint sets sit at exactly 1.
    Pairs of empty sites have no defined overlap and are set to 1 with a
    warning.
    """
    p = table.presence.astype(float)
    inter = p @ p.T
    sizes = p.sum(axis=1)
    union = sizes[:, None] + sizes[None, :] - inter
    dist = np.ones_like(inter)
    np.divide(inter, union, out=dist, where=union > 0)
    dist = 1.0 - dist
    n = table.n_sites
    both_empty = (union == 0) & ~np.eye(n, dtype=bool)
    if both_empty.any():
        warnings.warn(
            f"{int(both_empty.sum() // 2)} site pairs share no recorded taxa on either side; "
            "their distance is set to 1"
        )
        dist[both_empty] = 1.0
    np.fill_diagonal(dist, 0.0)
    return InteractionNetwork(dist, node_ids=table.site_ids)


def great_circle_km(point_a, point_b) -> float:
    """Great-circle distance in km between two (lat, lon) pairs in degrees."""
    lat1, lon1 = (float(v) for v in point_a)
    lat2, lon2 = (float(v) for v in point_b)
    for lat, lon in ((lat1, lon1), (lat2, lon2)):
        if abs(lat) > 90 or abs(lon) > 180:
            raise ValueError(f"invalid coordinates ({lat}, {lon})")
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))


def _pairwise_km(lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    phi = np.radians(lat)
    lmb = np.radians(lon)
    sin_dphi = np.sin((phi[None, :] - phi[:, None]) / 2.0)
    sin_dlmb = np.sin((lmb[None, :] - lmb[:, None]) / 2.0)
    a = sin_dphi**2 + np.cos(phi)[:, None] * np.cos(phi)[None, :] * sin_dlmb**2
    a = np.clip(a, 0.0, 1.0)
    return 2.0 * EARTH_RADIUS_KM * np.arctan2(np.sqrt(a), np.sqrt(1.0 - a))


def structural_from_distances(
    distances: np.ndarray,
    node_ids,
    threshold_km: float,
    use_global_max: bool = False,
) -> StructuralNetwork:
    """Proximity graph from a distance matrix: keep close pairs, weight them
    anti-monotonically.

    Pairs at distance <= threshold become edges with weight
    ``d_ref - distance`` where ``d_ref`` is the longest retained distance
    (or the global maximum with ``use_global_max``, which keeps the farthest
    retained edge above weight 0).  Raises if any node ends up isolated.
    """
    d = np.asarray(distances, dtype=float)
    node_ids = tuple(str(s) for s in node_ids)
    n = len(node_ids)
    if d.shape != (n, n):
        raise ValueError("distance matrix must be square over the node ids")
    if threshold_km <= 0:
        raise ValueError("threshold_km must be positive")
    iu = np.triu_indices(n, k=1)
    kept = d[iu] <= threshold_km
    if not kept.any():
        raise ValueError("no pair lies within the threshold; all nodes are isolated")
    d_ref = float(d[iu].max()) if use_global_max else float(d[iu][kept].max())
    edges = [
        (int(i), int(j), d_ref - float(dist))
        for i, j, dist in zip(iu[0][kept], iu[1][kept], d[iu][kept])
    ]
    graph = StructuralNetwork(edges, node_ids=node_ids)
    isolated = np.flatnonzero(np.bincount(
        np.concatenate([graph.src, graph.dst]), minlength=n
    ) == 0)
    if isolated.size:
        names = [node_ids[i] for i in isolated]
        raise ValueError(f"nodes without any edge under the threshold: {names}")
    return graph


def build_structural(
    table: OccurrenceTable, threshold_km: float, use_global_max: bool = False
) -> StructuralNetwork:
    """Great-circle proximity graph of the table's sites (see
    :func:`structural_from_distances` for the weighting)."""
    d = _pairwise_km(table.lat, table.lon)
    return structural_from_distances(d, table.site_ids, threshold_km, use_global_max)
