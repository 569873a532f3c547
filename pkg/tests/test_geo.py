"""Occurrence-table ingestion: Jaccard distances and proximity graphs."""

import math

import numpy as np
import pytest

from spaceclust import (
    EARTH_RADIUS_KM,
    OccurrenceTable,
    build_structural,
    great_circle_km,
    jaccard_network,
)
from spaceclust.geo import structural_from_distances


def small_table(presence, lat=None, lon=None):
    presence = np.asarray(presence)
    n, t = presence.shape
    return OccurrenceTable(
        site_ids=tuple(f"s{i}" for i in range(n)),
        lat=np.zeros(n) if lat is None else np.asarray(lat, dtype=float),
        lon=np.linspace(0, 1, n) if lon is None else np.asarray(lon, dtype=float),
        taxon_ids=tuple(f"t{k}" for k in range(t)),
        presence=presence,
    )


class TestOccurrenceTable:
    def test_validators(self):
        with pytest.raises(ValueError, match="unique"):
            OccurrenceTable(
                site_ids=("a", "a"),
                lat=np.zeros(2),
                lon=np.zeros(2),
                taxon_ids=("t",),
                presence=np.ones((2, 1)),
            )
        with pytest.raises(ValueError, match="latitud"):
            small_table([[1], [1]], lat=[0.0, 95.0])
        with pytest.raises(ValueError, match="longitud"):
            small_table([[1], [1]], lon=[0.0, 270.0])
        with pytest.raises(ValueError, match="0 or 1"):
            small_table([[1], [2]])
        with pytest.raises(ValueError, match="sites x taxa"):
            OccurrenceTable(
                site_ids=("a", "b"),
                lat=np.zeros(2),
                lon=np.zeros(2),
                taxon_ids=("t",),
                presence=np.ones((3, 1)),
            )

    def test_empty_site_warns(self):
        with pytest.warns(UserWarning, match="no taxa"):
            small_table([[1, 0], [0, 0]])


class TestJaccardNetwork:
    def test_identical_sets_at_zero_distance(self):
        net = jaccard_network(small_table([[1, 1, 0], [1, 1, 0]]))
        assert net.values[0, 1] == 0.0

    def test_disjoint_sets_at_distance_one(self):
        net = jaccard_network(small_table([[1, 0], [0, 1]]))
        assert net.values[0, 1] == 1.0

    def test_partial_overlap(self):
        # {t0, t1} vs {t1, t2}: intersection 1, union 3
        net = jaccard_network(small_table([[1, 1, 0], [0, 1, 1]]))
        assert net.values[0, 1] == pytest.approx(2.0 / 3.0)

    def test_pairs_of_empty_sites_warn_and_sit_at_one(self):
        with pytest.warns(UserWarning):
            table = small_table([[0, 0], [0, 0], [1, 1]])
        with pytest.warns(UserWarning, match="distance is set to 1"):
            net = jaccard_network(table)
        assert net.values[0, 1] == 1.0
        assert net.values[0, 0] == 0.0

    def test_site_ids_carry_over(self):
        net = jaccard_network(small_table([[1], [1]]))
        assert net.node_ids == ("s0", "s1")


class TestGreatCircle:
    def test_zero_distance(self):
        assert great_circle_km((12.0, 34.0), (12.0, 34.0)) == 0.0

    def test_quarter_turn_along_the_equator(self):
        want = math.pi / 2 * EARTH_RADIUS_KM  # 10007.543...
        assert great_circle_km((0.0, 0.0), (0.0, 90.0)) == pytest.approx(want, abs=1e-6)
        assert great_circle_km((0.0, 0.0), (90.0, 0.0)) == pytest.approx(want, abs=1e-6)

    def test_antipodal_points(self):
        want = math.pi * EARTH_RADIUS_KM  # 20015.086...
        assert great_circle_km((0.0, 0.0), (0.0, 180.0)) == pytest.approx(want, abs=1e-6)

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            pts = [(float(rng.uniform(-90, 90)), float(rng.uniform(-180, 180))) for _ in range(3)]
            a, b, c = pts
            assert great_circle_km(a, b) == pytest.approx(great_circle_km(b, a), abs=1e-9)
            assert great_circle_km(a, c) <= great_circle_km(a, b) + great_circle_km(b, c) + 1e-9

    def test_invalid_coordinates(self):
        with pytest.raises(ValueError, match="invalid"):
            great_circle_km((91.0, 0.0), (0.0, 0.0))


class TestStructuralFromDistances:
    def distances(self):
        # three sites at pairwise distances 1000, 2000 (0-2), 5000 (1-2)
        d = np.array(
            [
                [0.0, 1000.0, 2000.0],
                [1000.0, 0.0, 5000.0],
                [2000.0, 5000.0, 0.0],
            ]
        )
        return d

    def test_threshold_keeps_close_pairs_with_anti_monotone_weights(self):
        g = structural_from_distances(self.distances(), ("a", "b", "c"), threshold_km=3600.0)
        weights = {(i, j): w for i, j, w in g.edges}
        # d_ref = 2000 (longest retained): weights 2000-1000 and 2000-2000
        assert set(weights) == {(0, 1), (0, 2)}
        assert weights[(0, 1)] == pytest.approx(1000.0)
        assert weights[(0, 2)] == pytest.approx(0.0)

    def test_global_max_reference_keeps_the_farthest_edge_positive(self):
        g = structural_from_distances(
            self.distances(), ("a", "b", "c"), threshold_km=3600.0, use_global_max=True
        )
        weights = {(i, j): w for i, j, w in g.edges}
        # d_ref = 5000 (global): the 2000 km pair keeps weight 3000
        assert weights[(0, 2)] == pytest.approx(3000.0)

    def test_isolated_node_is_an_error_naming_the_site(self):
        with pytest.raises(ValueError, match="'c'"):
            structural_from_distances(self.distances(), ("a", "b", "c"), threshold_km=1500.0)

    def test_no_pair_within_threshold(self):
        with pytest.raises(ValueError, match="isolated"):
            structural_from_distances(self.distances(), ("a", "b", "c"), threshold_km=500.0)

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            structural_from_distances(self.distances(), ("a", "b", "c"), threshold_km=0.0)


class TestBuildStructural:
    def test_pairwise_distances_match_the_scalar_formula(self):
        lat = [0.0, 0.0, 10.0]
        lon = [0.0, 5.0, 5.0]
        table = small_table([[1], [1], [1]], lat=lat, lon=lon)
        g = build_structural(table, threshold_km=5000.0)
        d01 = great_circle_km((0.0, 0.0), (0.0, 5.0))
        d_ref = max(
            great_circle_km((lat[i], lon[i]), (lat[j], lon[j]))
            for i in range(3)
            for j in range(i + 1, 3)
        )
        weights = {(i, j): w for i, j, w in g.edges}
        assert len(weights) == 3
        assert weights[(0, 1)] == pytest.approx(d_ref - d01, abs=1e-6)
        assert g.node_ids == table.site_ids
