"""Command-line entry points for the full workflow.

Subcommands
-----------
simulate : write synthetic benchmark replicates (interaction matrix,
    proximity graph, generating labels, component labels, design record).
ingest : turn an occurrence table plus site coordinates into the two
    network CSVs that ``cluster`` consumes.
cluster : fit the penalized mixture over a group-number range, select by
    ICL, write the fit, labels, group heatmap and search report.
sweep : run the simulation benchmark over a grid of difficulty levels and
    label/geometry mismatch, with and without the penalty.
metrics : compare two label files (and optionally summarize an interaction
    matrix at one of them).

Option values resolve as: command-line flag, then ``--config`` JSON file,
then built-in default.  Output paths (``--out``) come from flags only.  The
effective settings of every run with an output directory are echoed to
``config.json`` inside it.

Exit codes: 0 success; 1 usage (unknown flags, invalid option values,
missing requirements); 2 data problems (unreadable or inconsistent inputs,
malformed config files); 3 the run finished but the reported fit did not
converge (outputs are still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .emissions import FAMILY_KINDS, GAUSSIAN
from .io import (
    DataError,
    ensure_dir,
    read_interaction_csv,
    read_labels_csv,
    read_occurrence_csv,
    read_structural_csv,
    write_design_json,
    write_fit_json,
    write_heatmap_csv,
    write_interaction_csv,
    write_labels_csv,
    write_structural_csv,
)
from .geo import build_structural, jaccard_network
from .metrics import adjusted_rand, between_group_mean, group_distance_matrix, within_group_mean
from .networks import Partition
from .selection import PathConfig, lambda_path, report_rows, search_models
from .simulate import SimDesign, generate_replicate
from .vem import FitConfig, run_vem

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_code_with_message(message))

    def exit_code_with_message(self, message) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _usage_error(command: str, message: str):
    print(f"spaceclust {command}: error: {message}", file=sys.stderr)
    raise SystemExit(1)


def _derive_seed(*key) -> int:
    """Stable independent seed for a nested grid position."""
    return int(np.random.SeedSequence(tuple(int(k) for k in key)).generate_state(1)[0])


def _fmt(x) -> str:
    return repr(float(x))


def _flag(x) -> str:
    return "true" if x else "false"


# ---------------------------------------------------------------------------
# option resolution: flag > config file > default
# ---------------------------------------------------------------------------

_CONFIG_ALIASES = {"lambda": "lam"}  # "lambda" is a keyword, argparse dest is "lam"
_PUBLIC_NAMES = {"lam": "lambda"}


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise DataError(f"{path}: config must be a JSON object")
    return doc


def _resolve(defaults: dict, args) -> dict:
    eff = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path is not None:
        for key, value in _load_config(config_path).items():
            dest = _CONFIG_ALIASES.get(key, key)
            if dest not in defaults:
                raise DataError(f"{config_path}: unknown config key {key!r}")
            eff[dest] = value
    for dest in defaults:
        value = getattr(args, dest, None)
        if value is not None:
            eff[dest] = value
    return eff


def _as_int(eff, key, command, minimum=None) -> int:
    try:
        value = int(eff[key])
    except (TypeError, ValueError):
        _usage_error(command, f"--{key.replace('_', '-')} expects an integer, got {eff[key]!r}")
    if minimum is not None and value < minimum:
        _usage_error(command, f"--{key.replace('_', '-')} must be >= {minimum}")
    eff[key] = value
    return value


def _as_float(eff, key, command, minimum=None, strict=False) -> float:
    try:
        value = float(eff[key])
    except (TypeError, ValueError):
        _usage_error(command, f"--{key.replace('_', '-')} expects a number, got {eff[key]!r}")
    if minimum is not None and (value < minimum or (strict and value == minimum)):
        op = ">" if strict else ">="
        _usage_error(command, f"--{key.replace('_', '-')} must be {op} {minimum}")
    eff[key] = value
    return value


def _as_bool(eff, key) -> bool:
    eff[key] = bool(eff[key])
    return eff[key]


def _require(eff, key, command):
    if eff[key] is None:
        _usage_error(command, f"--{key.replace('_', '-')} is required")
    return eff[key]


def _number_list(raw, caster, key, command):
    """Accept a comma-separated string (flag form) or a JSON list (config form)."""
    if isinstance(raw, str):
        parts = [p for p in raw.split(",") if p.strip() != ""]
    elif isinstance(raw, (list, tuple)):
        parts = list(raw)
    else:
        _usage_error(command, f"--{key.replace('_', '-')} expects a comma-separated list")
    try:
        return [caster(p) for p in parts]
    except (TypeError, ValueError):
        _usage_error(command, f"--{key.replace('_', '-')}: could not parse {raw!r}")


def _parse_lambda(raw, command):
    if isinstance(raw, str) and raw.strip().lower() == "auto":
        return "auto"
    try:
        value = float(raw)
    except (TypeError, ValueError):
        _usage_error(command, f"--lambda expects 'auto' or a nonnegative number, got {raw!r}")
    if value < 0:
        _usage_error(command, "--lambda must be nonnegative")
    return value


def _echo_config(out_dir: Path, command: str, eff: dict) -> None:
    doc = {"command": command}
    for key, value in eff.items():
        doc[_PUBLIC_NAMES.get(key, key)] = value
    with open(out_dir / "config.json", "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIMULATE_DEFAULTS = {
    "delta": 1.0,
    "swap_pairs": 0,
    "reps": 1,
    "n_per": 50,
    "sigma": 0.2,
    "mean_between": 1.0,
    "seed": 0,
    "weights": "unit",
}


def _cmd_simulate(args) -> int:
    eff = _resolve(_SIMULATE_DEFAULTS, args)
    cmd = "simulate"
    _as_float(eff, "delta", cmd, minimum=0.0)
    n_per = _as_int(eff, "n_per", cmd, minimum=2)
    swap = _as_int(eff, "swap_pairs", cmd, minimum=0)
    if swap > n_per:
        _usage_error(cmd, "--swap-pairs cannot exceed --n-per")
    reps = _as_int(eff, "reps", cmd, minimum=1)
    _as_float(eff, "sigma", cmd, minimum=0.0, strict=True)
    _as_float(eff, "mean_between", cmd)
    seed = _as_int(eff, "seed", cmd)
    if eff["weights"] not in ("unit", "max-minus-d"):
        _usage_error(cmd, f"--weights must be 'unit' or 'max-minus-d', got {eff['weights']!r}")

    out = ensure_dir(args.out)
    components = Partition(np.array([0] * n_per + [1] * n_per), n_groups=2)
    for rep in range(reps):
        design = SimDesign.from_separability(
            eff["delta"],
            n_swap_pairs=swap,
            seed=_derive_seed(seed, rep),
            sd=eff["sigma"],
            mean_between=eff["mean_between"],
            n_per_component=n_per,
        )
        replicate = generate_replicate(design, weight_scheme=eff["weights"])
        rep_dir = ensure_dir(out / f"rep_{rep:03d}")
        write_interaction_csv(replicate.interactions, rep_dir / "interactions.csv")
        write_structural_csv(replicate.structure, rep_dir / "structure.csv")
        write_labels_csv(replicate.truth, replicate.interactions.node_ids, rep_dir / "truth.csv")
        write_labels_csv(components, replicate.interactions.node_ids, rep_dir / "components.csv")
        write_design_json(design, rep_dir / "design.json")
    _echo_config(out, cmd, eff)
    return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

_INGEST_DEFAULTS = {
    "occurrences": None,
    "coords": None,
    "threshold_km": 3600.0,
    "global_max": False,
}


def _cmd_ingest(args) -> int:
    eff = _resolve(_INGEST_DEFAULTS, args)
    cmd = "ingest"
    _require(eff, "occurrences", cmd)
    _require(eff, "coords", cmd)
    _as_float(eff, "threshold_km", cmd, minimum=0.0, strict=True)
    _as_bool(eff, "global_max")

    table = read_occurrence_csv(eff["occurrences"], eff["coords"])
    interactions = jaccard_network(table)
    structure = build_structural(table, eff["threshold_km"], use_global_max=eff["global_max"])

    out = ensure_dir(args.out)
    write_interaction_csv(interactions, out / "interactions.csv")
    write_structural_csv(structure, out / "structure.csv")
    _echo_config(out, cmd, eff)
    return 0


# ---------------------------------------------------------------------------
# cluster
# ---------------------------------------------------------------------------

_CLUSTER_DEFAULTS = {
    "y": None,
    "x": None,
    "q_min": 1,
    "q_max": 6,
    "lam": "auto",
    "family": GAUSSIAN,
    "seed": 0,
    "restarts": 3,
    "max_iters": 50,
    "no_tau": False,
}


def _cmd_cluster(args) -> int:
    eff = _resolve(_CLUSTER_DEFAULTS, args)
    cmd = "cluster"
    _require(eff, "y", cmd)
    q_min = _as_int(eff, "q_min", cmd, minimum=1)
    q_max = _as_int(eff, "q_max", cmd, minimum=1)
    if q_max < q_min:
        _usage_error(cmd, "--q-max must be at least --q-min")
    lam = _parse_lambda(eff["lam"], cmd)
    eff["lam"] = lam
    if eff["family"] not in FAMILY_KINDS:
        _usage_error(cmd, f"--family must be one of {', '.join(FAMILY_KINDS)}")
    seed = _as_int(eff, "seed", cmd)
    restarts = _as_int(eff, "restarts", cmd, minimum=1)
    max_iters = _as_int(eff, "max_iters", cmd, minimum=1)
    _as_bool(eff, "no_tau")
    if eff["x"] is None and lam == "auto":
        _usage_error(cmd, "--lambda auto needs a structural network (--x)")
    if eff["x"] is None and isinstance(lam, float) and lam > 0:
        _usage_error(cmd, "--lambda > 0 needs a structural network (--x)")

    network = read_interaction_csv(eff["y"])
    structure = None
    if eff["x"] is not None:
        structure = read_structural_csv(eff["x"], node_ids=network.node_ids)

    cfg = FitConfig(max_em_iters=max_iters, n_restarts=restarts, seed=seed)
    path_cfg = PathConfig(q_range=(q_min, q_max))
    search = search_models(
        network,
        structure,
        eff["family"],
        cfg,
        path_cfg,
        fixed_lam=None if lam == "auto" else lam,
    )
    best = search.best

    out = ensure_dir(args.out)
    write_fit_json(best, out / "fit.json", include_tau=not eff["no_tau"])
    write_labels_csv(best.partition, best.node_ids, out / "labels.csv")

    occupied = np.unique(best.partition.labels)
    compact = Partition(np.searchsorted(occupied, best.partition.labels), n_groups=occupied.size)
    heat = group_distance_matrix(network, compact)
    write_heatmap_csv(heat, out / "heatmap.csv", group_ids=[int(g) for g in occupied])

    with open(out / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        fields = ["n_groups", "lambda", "objective", "icl", "n_groups_nonempty", "penalty_of_hard_labels"]
        writer.writerow(fields)
        for row in report_rows(search, structure):
            writer.writerow(
                [
                    row["n_groups"],
                    _fmt(row["lambda"]),
                    _fmt(row["objective"]),
                    _fmt(row["icl"]),
                    row["n_groups_nonempty"],
                    "" if row["penalty_of_hard_labels"] == "" else _fmt(row["penalty_of_hard_labels"]),
                ]
            )
    _echo_config(out, cmd, eff)

    if not best.converged:
        print("warning: the selected fit hit the iteration cap before converging", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

_SWEEP_DEFAULTS = {
    "deltas": "0.25,0.5,1.0",
    "swap_pairs": "0,12,25",
    "reps": 3,
    "n_per": 50,
    "sigma": 0.2,
    "q_min": 1,
    "q_max": 3,
    "seed": 0,
    "restarts": 3,
    "workers": 1,
}

_SWEEP_FIELDS = [
    "delta",
    "swap_pairs",
    "rep",
    "penalized",
    "ari_x",
    "ari_y",
    "q_selected",
    "lambda",
    "discordance",
    "converged",
    "seed",
]


def _sweep_cell(task) -> list[dict]:
    """All benchmark rows of one replicate (runs in a worker process).

    ``ari_x`` measures agreement with the spatial components, ``ari_y`` with
    the labels that generated the interaction values; both are computed at
    the true number of groups (2).  ``q_selected`` is the ICL choice over
    the requested range (penalty path per candidate for the penalized row,
    fixed lambda 0 for the unpenalized one).
    """
    base, i_d, i_s, rep, delta, n_swap, n_per, sigma, q_min, q_max, restarts = task
    data_seed = _derive_seed(base, i_d, i_s, rep, 0)
    design = SimDesign.from_separability(
        delta, n_swap_pairs=n_swap, seed=data_seed, sd=sigma, n_per_component=n_per
    )
    replicate = generate_replicate(design)
    components = np.array([0] * n_per + [1] * n_per)

    pen_cfg = FitConfig(n_restarts=restarts, seed=_derive_seed(base, i_d, i_s, rep, 1))
    unp_cfg = FitConfig(n_restarts=restarts, seed=_derive_seed(base, i_d, i_s, rep, 2))
    path_cfg = PathConfig(q_range=(q_min, q_max))

    pen_search = search_models(replicate.interactions, replicate.structure, GAUSSIAN, pen_cfg, path_cfg)
    unp_search = search_models(
        replicate.interactions, replicate.structure, GAUSSIAN, unp_cfg, path_cfg, fixed_lam=0.0
    )
    if q_min <= 2 <= q_max:
        pen_fit = pen_search.fits[2]
        unp_fit = unp_search.fits[2]
    else:
        pen_fit = lambda_path(replicate.interactions, replicate.structure, 2, GAUSSIAN, pen_cfg).selected
        unp_fit = run_vem(replicate.interactions, replicate.structure, 2, 0.0, GAUSSIAN, unp_cfg)

    rows = []
    for fit, penalized, search in ((unp_fit, False, unp_search), (pen_fit, True, pen_search)):
        rows.append(
            {
                "delta": delta,
                "swap_pairs": n_swap,
                "rep": rep,
                "penalized": penalized,
                "ari_x": adjusted_rand(fit.partition.labels, components),
                "ari_y": adjusted_rand(fit.partition.labels, replicate.truth.labels),
                "q_selected": search.best.n_groups,
                "lambda": fit.lam,
                "discordance": replicate.discordance,
                "converged": fit.converged,
                "seed": data_seed,
            }
        )
    return rows


def _cmd_sweep(args) -> int:
    eff = _resolve(_SWEEP_DEFAULTS, args)
    cmd = "sweep"
    deltas = _number_list(eff["deltas"], float, "deltas", cmd)
    swaps = _number_list(eff["swap_pairs"], int, "swap_pairs", cmd)
    eff["deltas"], eff["swap_pairs"] = deltas, swaps
    reps = _as_int(eff, "reps", cmd, minimum=0)
    n_per = _as_int(eff, "n_per", cmd, minimum=2)
    _as_float(eff, "sigma", cmd, minimum=0.0, strict=True)
    q_min = _as_int(eff, "q_min", cmd, minimum=1)
    q_max = _as_int(eff, "q_max", cmd, minimum=1)
    if q_max < q_min:
        _usage_error(cmd, "--q-max must be at least --q-min")
    seed = _as_int(eff, "seed", cmd)
    restarts = _as_int(eff, "restarts", cmd, minimum=1)
    workers = _as_int(eff, "workers", cmd, minimum=1)
    if any(d < 0 for d in deltas):
        _usage_error(cmd, "--deltas must be nonnegative")
    if any(not 0 <= s <= n_per for s in swaps):
        _usage_error(cmd, "--swap-pairs values must lie in [0, n-per]")

    tasks = [
        (seed, i_d, i_s, rep, delta, n_swap, n_per, eff["sigma"], q_min, q_max, restarts)
        for i_d, delta in enumerate(deltas)
        for i_s, n_swap in enumerate(swaps)
        for rep in range(reps)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_task = list(pool.map(_sweep_cell, tasks))
    else:
        per_task = [_sweep_cell(t) for t in tasks]

    rows = [row for chunk in per_task for row in chunk]
    rows.sort(key=lambda r: (r["delta"], r["swap_pairs"], r["rep"], r["penalized"]))

    out = ensure_dir(args.out)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SWEEP_FIELDS)
        for row in rows:
            writer.writerow(
                [
                    _fmt(row["delta"]),
                    row["swap_pairs"],
                    row["rep"],
                    _flag(row["penalized"]),
                    _fmt(row["ari_x"]),
                    _fmt(row["ari_y"]),
                    row["q_selected"],
                    _fmt(row["lambda"]),
                    _fmt(row["discordance"]),
                    _flag(row["converged"]),
                    row["seed"],
                ]
            )
    _echo_config(out, cmd, eff)
    return 0


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

_METRICS_DEFAULTS = {
    "labels": None,
    "ref": None,
    "y": None,
}


def _align(ids_to, ids_from, values, what):
    lookup = dict(zip(ids_from, values))
    if set(ids_from) != set(ids_to):
        raise DataError(f"{what}: node ids do not match")
    return np.array([lookup[i] for i in ids_to])


def _cmd_metrics(args) -> int:
    eff = _resolve(_METRICS_DEFAULTS, args)
    cmd = "metrics"
    _require(eff, "labels", cmd)
    _require(eff, "ref", cmd)

    ids, labels = read_labels_csv(eff["labels"])
    ref_ids, ref_labels = read_labels_csv(eff["ref"])
    ref_aligned = _align(ids, ref_ids, ref_labels, "--ref")

    doc = {
        "n_nodes": len(ids),
        "adjusted_rand": adjusted_rand(labels, ref_aligned),
    }
    if eff["y"] is not None:
        network = read_interaction_csv(eff["y"])
        aligned = _align(network.node_ids, ids, labels, "--labels")
        partition = Partition(aligned)
        doc["within_group_mean"] = within_group_mean(network, partition)
        doc["between_group_mean"] = between_group_mean(network, partition)

    text = json.dumps(doc, indent=1, sort_keys=True)
    print(text)
    if args.out is not None:
        out = ensure_dir(args.out)
        with open(out / "metrics.json", "w") as fh:
            fh.write(text + "\n")
        _echo_config(out, cmd, eff)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spaceclust", description="Spatially coherent clustering of pairwise interaction data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="generate synthetic benchmark replicates")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--config", help="JSON file with option defaults")
    sim.add_argument("--delta", type=float, help="mean gap in noise units (default 1.0)")
    sim.add_argument("--swap-pairs", dest="swap_pairs", type=int, help="cross-component label swaps (default 0)")
    sim.add_argument("--reps", type=int, help="number of replicates (default 1)")
    sim.add_argument("--n-per", dest="n_per", type=int, help="points per component (default 50)")
    sim.add_argument("--sigma", type=float, help="interaction noise level (default 0.2)")
    sim.add_argument("--mean-between", dest="mean_between", type=float, help="between-group mean (default 1.0)")
    sim.add_argument("--seed", type=int, help="base seed (default 0)")
    sim.add_argument("--weights", help="edge weight scheme: unit | max-minus-d (default unit)")
    sim.set_defaults(func=_cmd_simulate)

    ing = sub.add_parser("ingest", help="build networks from an occurrence table")
    ing.add_argument("--out", required=True, help="output directory")
    ing.add_argument("--config", help="JSON file with option defaults")
    ing.add_argument("--occurrences", help="CSV of sites x taxa presence (header: site_id, taxa...)")
    ing.add_argument("--coords", help="CSV of site coordinates (header: site_id,lat,lon)")
    ing.add_argument("--threshold-km", dest="threshold_km", type=float, help="proximity cutoff in km (default 3600)")
    ing.add_argument("--global-max", dest="global_max", action="store_true", default=None, help="weight edges against the global farthest pair")
    ing.set_defaults(func=_cmd_ingest)

    clu = sub.add_parser("cluster", help="fit the model and select the number of groups")
    clu.add_argument("--out", required=True, help="output directory")
    clu.add_argument("--config", help="JSON file with option defaults")
    clu.add_argument("--y", help="interaction matrix CSV")
    clu.add_argument("--x", help="structural edge-list CSV (optional when --lambda 0)")
    clu.add_argument("--q-min", dest="q_min", type=int, help="smallest group count (default 1)")
    clu.add_argument("--q-max", dest="q_max", type=int, help="largest group count (default 6)")
    clu.add_argument("--lambda", dest="lam", help="penalty strength: 'auto' traces a path (default), or a number")
    clu.add_argument("--family", help=f"emission family: {' | '.join(FAMILY_KINDS)} (default gaussian)")
    clu.add_argument("--seed", type=int, help="seed for the restarts (default 0)")
    clu.add_argument("--restarts", type=int, help="independent starts per fit (default 3)")
    clu.add_argument("--max-iters", dest="max_iters", type=int, help="EM iteration cap (default 50)")
    clu.add_argument("--no-tau", dest="no_tau", action="store_true", default=None, help="omit soft weights from fit.json")
    clu.set_defaults(func=_cmd_cluster)

    swp = sub.add_parser("sweep", help="benchmark grid over difficulty and label/geometry mismatch")
    swp.add_argument("--out", required=True, help="output directory")
    swp.add_argument("--config", help="JSON file with option defaults")
    swp.add_argument("--deltas", help="comma-separated mean gaps (default 0.25,0.5,1.0)")
    swp.add_argument("--swap-pairs", dest="swap_pairs", help="comma-separated swap counts (default 0,12,25)")
    swp.add_argument("--reps", type=int, help="replicates per grid cell (default 3)")
    swp.add_argument("--n-per", dest="n_per", type=int, help="points per component (default 50)")
    swp.add_argument("--sigma", type=float, help="interaction noise level (default 0.2)")
    swp.add_argument("--q-min", dest="q_min", type=int, help="smallest group count tried (default 1)")
    swp.add_argument("--q-max", dest="q_max", type=int, help="largest group count tried (default 3)")
    swp.add_argument("--seed", type=int, help="base seed (default 0)")
    swp.add_argument("--restarts", type=int, help="independent starts per fit (default 3)")
    swp.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    swp.set_defaults(func=_cmd_sweep)

    met = sub.add_parser("metrics", help="compare two label files")
    met.add_argument("--out", help="optional output directory for metrics.json")
    met.add_argument("--config", help="JSON file with option defaults")
    met.add_argument("--labels", help="labels CSV to evaluate (header: node_id,label)")
    met.add_argument("--ref", help="reference labels CSV")
    met.add_argument("--y", help="optional interaction matrix CSV for group means")
    met.set_defaults(func=_cmd_metrics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    except (ValueError, OSError) as exc:
        # DataError and every malformed-input failure from the library layers
        print(f"spaceclust: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
