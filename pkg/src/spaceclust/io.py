"""CSV and JSON readers/writers for every artifact the library produces.

All floats are written with ``repr`` so files round-trip losslessly and
reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .emissions import EmissionFamily, ModelParams
from .geo import OccurrenceTable
from .networks import InteractionNetwork, Partition, SoftAssignment, StructuralNetwork
from .simulate import SimDesign
from .vem import FitResult

__all__ = [
    "DataError",
    "write_interaction_csv",
    "read_interaction_csv",
    "write_structural_csv",
    "read_structural_csv",
    "write_labels_csv",
    "read_labels_csv",
    "write_heatmap_csv",
    "read_heatmap_csv",
    "write_fit_json",
    "read_fit_json",
    "write_design_json",
    "read_design_json",
    "read_occurrence_csv",
    "write_occurrence_csv",
]


class DataError(ValueError):
    """Malformed or inconsistent input data."""


def _fmt(x) -> str:
    return repr(float(x))


def _open_w(path):
    return open(path, "w", newline="")


# ---------------------------------------------------------------------------
# interaction matrix CSV: node ids in the first row and column
# ---------------------------------------------------------------------------


def write_interaction_csv(network: InteractionNetwork, path) -> None:
    with _open_w(path) as fh:
        w = csv.writer(fh)
        w.writerow(["id", *network.node_ids])
        for node_id, row in zip(network.node_ids, network.values):
            w.writerow([node_id, *(_fmt(v) for v in row)])


def read_interaction_csv(path) -> InteractionNetwork:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 3:
        raise DataError(f"{path}: expected a header plus at least 2 matrix rows")
    ids = tuple(rows[0][1:])
    n = len(ids)
    body = rows[1:]
    if len(body) != n:
        raise DataError(f"{path}: matrix body does not match the header size")
    values = np.empty((n, n))
    for i, row in enumerate(body):
        if len(row) != n + 1 or row[0] != ids[i]:
            raise DataError(f"{path}: row {i + 1} does not match the header ids")
        try:
            values[i] = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: non-numeric value in row {i + 1}") from exc
    try:
        return InteractionNetwork(values, node_ids=ids)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# structural edge-list CSV: src,dst,weight with string node ids
# ---------------------------------------------------------------------------


def write_structural_csv(structure: StructuralNetwork, path) -> None:
    ids = structure.node_ids
    with _open_w(path) as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        for i, j, weight in structure.edges:
            w.writerow([ids[i], ids[j], _fmt(weight)])


def read_structural_csv(path, node_ids=None) -> StructuralNetwork:
    """Read an edge list; ``node_ids`` fixes the node set (and catches ids
    that do not belong).  Without it the node set is inferred from the edges
    in order of first appearance."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["src", "dst", "weight"]:
        raise DataError(f"{path}: expected header src,dst,weight")
    known = None if node_ids is None else {s: k for k, s in enumerate(node_ids)}
    index: dict[str, int] = {}
    edges = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"{path}: line {r} does not have 3 fields")
        a, b, w = row
        for s in (a, b):
            if known is not None:
                if s not in known:
                    raise DataError(f"{path}: node id {s!r} not present in the paired network")
            elif s not in index:
                index[s] = len(index)
        look = known if known is not None else index
        try:
            edges.append((look[a], look[b], float(w)))
        except ValueError as exc:
            raise DataError(f"{path}: bad weight on line {r}") from exc
    ids = tuple(node_ids) if node_ids is not None else tuple(index)
    if not ids:
        raise DataError(f"{path}: no nodes")
    try:
        return StructuralNetwork(edges, node_ids=ids)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# labels CSV
# ---------------------------------------------------------------------------


def write_labels_csv(labels, node_ids, path) -> None:
    arr = labels.labels if isinstance(labels, Partition) else np.asarray(labels)
    with _open_w(path) as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "label"])
        for node_id, lab in zip(node_ids, arr):
            w.writerow([node_id, int(lab)])


def read_labels_csv(path):
    """Returns (node_ids, labels array)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["node_id", "label"]:
        raise DataError(f"{path}: expected header node_id,label")
    ids, labels = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise DataError(f"{path}: line {r} does not have 2 fields")
        ids.append(row[0])
        try:
            labels.append(int(row[1]))
        except ValueError as exc:
            raise DataError(f"{path}: bad label on line {r}") from exc
    return tuple(ids), np.array(labels, dtype=int)


# ---------------------------------------------------------------------------
# heatmap CSV: square group-by-group matrix; NaN renders as an empty field
# ---------------------------------------------------------------------------


def write_heatmap_csv(matrix, path, group_ids=None) -> None:
    m = np.asarray(matrix, dtype=float)
    ids = [str(g) for g in (group_ids if group_ids is not None else range(m.shape[0]))]
    with _open_w(path) as fh:
        w = csv.writer(fh)
        w.writerow(["group", *ids])
        for gid, row in zip(ids, m):
            w.writerow([gid, *("" if np.isnan(v) else _fmt(v) for v in row)])


def read_heatmap_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "group":
        raise DataError(f"{path}: expected a heatmap header")
    q = len(rows[0]) - 1
    out = np.full((q, q), np.nan)
    for i, row in enumerate(rows[1:]):
        out[i] = [float(v) if v != "" else np.nan for v in row[1:]]
    return out


# ---------------------------------------------------------------------------
# fit result JSON
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def fit_to_dict(fit: FitResult, include_tau: bool = True) -> dict:
    family = fit.params.family
    return {
        "n_groups": fit.n_groups,
        "lambda": fit.lam,
        "converged": fit.converged,
        "icl": fit.icl,
        "node_ids": list(fit.node_ids),
        "proportions": fit.params.proportions.tolist(),
        "emission": {
            "kind": family.kind,
            "mean": family.mean.tolist(),
            "var": family.var,
            "inflation": None if family.inflation is None else family.inflation.tolist(),
        },
        "frozen_cells": [list(c) for c in fit.params.frozen_cells],
        "labels": fit.partition.labels.tolist(),
        "tau": fit.tau.tau.tolist() if (include_tau and fit.tau is not None) else None,
        "objective_trace": list(fit.objective_trace),
        "diagnostics": _jsonable(fit.diagnostics),
    }


def write_fit_json(fit: FitResult, path, include_tau: bool = True) -> None:
    with open(path, "w") as fh:
        json.dump(fit_to_dict(fit, include_tau), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_fit_json(path) -> FitResult:
    """Rebuild a FitResult from disk; ``tau`` is None when it was omitted."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        emission = doc["emission"]
        family = EmissionFamily(
            emission["kind"],
            np.array(emission["mean"]),
            var=emission["var"],
            inflation=None if emission["inflation"] is None else np.array(emission["inflation"]),
        )
        params = ModelParams(
            np.array(doc["proportions"]),
            family,
            frozen_cells=tuple(tuple(c) for c in doc["frozen_cells"]),
        )
        return FitResult(
            tau=None if doc["tau"] is None else SoftAssignment(np.array(doc["tau"])),
            partition=Partition(np.array(doc["labels"]), n_groups=doc["n_groups"]),
            params=params,
            lam=float(doc["lambda"]),
            n_groups=int(doc["n_groups"]),
            objective_trace=list(doc["objective_trace"]),
            converged=bool(doc["converged"]),
            icl=doc["icl"],
            node_ids=tuple(doc["node_ids"]),
            diagnostics=doc["diagnostics"],
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed fit document ({exc})") from exc


# ---------------------------------------------------------------------------
# simulation design JSON
# ---------------------------------------------------------------------------


def write_design_json(design: SimDesign, path) -> None:
    doc = {
        "n_per_component": design.n_per_component,
        "n_groups": design.n_groups,
        "proportions": list(design.proportions),
        "mean_within": design.mean_within,
        "mean_between": design.mean_between,
        "sd": design.sd,
        "n_swap_pairs": design.n_swap_pairs,
        "seed": design.seed,
        "separability": design.separability,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_design_json(path) -> SimDesign:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        return SimDesign(
            n_per_component=doc["n_per_component"],
            n_groups=doc["n_groups"],
            proportions=tuple(doc["proportions"]),
            mean_within=doc["mean_within"],
            mean_between=doc["mean_between"],
            sd=doc["sd"],
            n_swap_pairs=doc["n_swap_pairs"],
            seed=doc["seed"],
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed design document ({exc})") from exc


# ---------------------------------------------------------------------------
# occurrence tables: presence CSV (sites x taxa) + coordinates CSV
# ---------------------------------------------------------------------------


def write_occurrence_csv(table: OccurrenceTable, occurrences_path, coords_path) -> None:
    with _open_w(occurrences_path) as fh:
        w = csv.writer(fh)
        w.writerow(["site_id", *table.taxon_ids])
        for sid, row in zip(table.site_ids, table.presence):
            w.writerow([sid, *(int(v) for v in row)])
    with _open_w(coords_path) as fh:
        w = csv.writer(fh)
        w.writerow(["site_id", "lat", "lon"])
        for sid, lat, lon in zip(table.site_ids, table.lat, table.lon):
            w.writerow([sid, _fmt(lat), _fmt(lon)])


def read_occurrence_csv(occurrences_path, coords_path) -> OccurrenceTable:
    with open(occurrences_path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise DataError(f"{occurrences_path}: expected site_id plus taxon columns")
    taxon_ids = tuple(rows[0][1:])
    site_ids, presence = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(taxon_ids) + 1:
            raise DataError(f"{occurrences_path}: line {r} has the wrong field count")
        site_ids.append(row[0])
        try:
            presence.append([int(v) for v in row[1:]])
        except ValueError as exc:
            raise DataError(f"{occurrences_path}: non-integer presence on line {r}") from exc

    with open(coords_path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["site_id", "lat", "lon"]:
        raise DataError(f"{coords_path}: expected header site_id,lat,lon")
    coords = {}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"{coords_path}: line {r} does not have 3 fields")
        try:
            coords[row[0]] = (float(row[1]), float(row[2]))
        except ValueError as exc:
            raise DataError(f"{coords_path}: bad coordinates on line {r}") from exc
    missing = [s for s in site_ids if s not in coords]
    if missing:
        raise DataError(f"{coords_path}: no coordinates for sites {missing}")
    lat = np.array([coords[s][0] for s in site_ids])
    lon = np.array([coords[s][1] for s in site_ids])
    try:
        return OccurrenceTable(tuple(site_ids), lat, lon, taxon_ids, np.array(presence))
    except ValueError as exc:
        raise DataError(f"{occurrences_path}: {exc}") from exc


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
