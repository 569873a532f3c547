"""Penalty-path tracing and ICL model choice.

The penalty strength is explored on a doubling grid that starts at 0.  At
every positive grid value two classification-EM fits compete: one warm-started
from the previous value's winner and one started from a spectral split of the
structural graph; the better post-classification objective wins the value.
The grid is then refined around values where the winning partition changes, so
that a partition holding only a narrow band of penalties still shows up at two
or more neighbouring values.  The retained penalty is the start of the most
spatially coherent stable stretch: among runs of identical hard partitions
that span at least ``stability_window`` grid values, keep nondegenerate ones
whose penalty term does not exceed the unpenalized partition's, and pick the
run with the smallest penalty term (ties: longest run, then smallest penalty
strength).  The number of groups is then chosen by ICL, evaluated on the hard
labels of the retained fit of each candidate size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import emissions
from .networks import InteractionNetwork, Partition, StructuralNetwork, penalty
from .vem import CEM_EPS, FitConfig, FitResult, _kmeans_labels, _laplacian_operator, _soften, run_vem

__all__ = [
    "PathConfig",
    "LambdaPath",
    "ModelSearch",
    "spectral_partition",
    "lambda_path",
    "icl",
    "parameter_count",
    "select_model",
    "search_models",
    "report_rows",
]

# E-step sweep cap for path fits.  At weak group contrast the soft fixed
# point degenerates toward the symmetric state, and a long sweep dissolves a
# hard start before the classification step can re-anchor it; a few sweeps
# move every label that wants to move while leaving the rest crisp.
PATH_E_STEP_SWEEPS = 8


@dataclass(frozen=True)
class PathConfig:
    """Grid and search ranges for the penalty path.

    ``lam_grid``: explicit grid (must start at 0, strictly increasing); when
    None a doubling grid ``{0} | {lam0 * 2**k, k = 0..n_doublings}`` is built,
    with ``lam0`` defaulting to the median absolute per-pair log-density of
    the unpenalized fit divided by the mean structural degree.

    ``refine_rounds`` rounds of local refinement insert the geometric mean
    between neighbouring grid values whose winning partitions differ (while
    their ratio exceeds ``refine_ratio``; at most ``refine_cap`` insertions
    per round).
    """

    lam_grid: tuple[float, ...] | None = None
    lam0: float | None = None
    n_doublings: int = 12
    q_range: tuple[int, int] = (1, 6)
    stability_window: int = 2
    refine_rounds: int = 2
    refine_ratio: float = 1.2
    refine_cap: int = 12

    def __post_init__(self):
        if self.lam_grid is not None:
            grid = tuple(float(v) for v in self.lam_grid)
            if len(grid) < 2 or grid[0] != 0.0:
                raise ValueError("an explicit grid must start at 0 and hold at least 2 values")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("the grid must be strictly increasing")
            object.__setattr__(self, "lam_grid", grid)
        if self.lam0 is not None and self.lam0 <= 0:
            raise ValueError("lam0 must be positive")
        if self.n_doublings < 0:
            raise ValueError("n_doublings must be nonnegative")
        qmin, qmax = self.q_range
        if not 1 <= qmin <= qmax:
            raise ValueError("q_range must satisfy 1 <= min <= max")
        object.__setattr__(self, "q_range", (int(qmin), int(qmax)))
        if self.stability_window < 2:
            raise ValueError("stability_window must be at least 2")
        if self.refine_rounds < 0 or self.refine_cap < 0:
            raise ValueError("refinement knobs must be nonnegative")
        if self.refine_ratio <= 1.0:
            raise ValueError("refine_ratio must exceed 1")


@dataclass
class LambdaPath:
    """Fits along the (possibly refined) penalty grid plus the retained one.

    ``fits[k]`` is the winning fit at ``grid[k]``; ``grid`` starts at 0 and is
    sorted.  ``lam_max`` is the retained penalty strength and ``selected_index``
    its position.  ``stabilized`` is False when no stable stretch qualified and
    the last grid value still carrying the unpenalized partition was retained
    instead.
    """

    fits: list[FitResult]
    grid: list[float]
    lam_max: float | None
    stabilized: bool
    selected_index: int = 0

    @property
    def selected(self) -> FitResult:
        return self.fits[self.selected_index]


@dataclass
class ModelSearch:
    """All candidate fits of a group-number search plus the ICL winner."""

    best: FitResult
    fits: dict[int, FitResult]
    paths: dict[int, LambdaPath] | None


def _canonical_labels(labels: np.ndarray) -> tuple[int, ...]:
    """Relabel by first appearance so partitions compare as set partitions."""
    mapping: dict[int, int] = {}
    out = []
    for v in labels:
        v = int(v)
        if v not in mapping:
            mapping[v] = len(mapping)
        out.append(mapping[v])
    return tuple(out)


def spectral_partition(structure: StructuralNetwork, n_groups: int, seed=0) -> np.ndarray:
    """Spectral split of the structural graph into ``n_groups`` groups.

    K-means on the eigenvectors of the graph Laplacian next to the constant
    one; the classic relaxation of the minimum-cut grouping.  Used to seed
    path fits with a spatially coherent candidate.
    """
    if not 1 <= n_groups <= structure.n:
        raise ValueError("n_groups must lie in [1, n]")
    if n_groups == 1:
        return np.zeros(structure.n, dtype=int)
    lap = _laplacian_operator(structure).toarray()
    _, vecs = scipy.linalg.eigh(lap)
    embedding = vecs[:, 1:n_groups]
    rng = np.random.default_rng(seed)
    labels, _ = _kmeans_labels(embedding, n_groups, rng)
    return np.asarray(labels)


def default_lam0(fit: FitResult, network: InteractionNetwork, structure: StructuralNetwork) -> float:
    """Likelihood-commensurate base penalty: median |per-pair log-density| of
    the unpenalized fit over the mean structural degree."""
    pair_ll = emissions.log_density_pairs(
        fit.params.family, network.values, fit.partition.labels
    )
    iu = np.triu_indices(network.n, k=1)
    med = float(np.median(np.abs(pair_ll[iu])))
    mean_deg = float(structure.degrees().mean())
    if not math.isfinite(med) or med <= 0 or mean_deg <= 0:
        return 1.0
    return med / mean_deg


def _path_step(network, structure, n_groups, lam, family_kind, step_cfg, warm_labels, spectral_labels):
    """Winning fit at one grid value: warm start vs spectral start."""
    warm = run_vem(
        network, structure, n_groups, lam, family_kind, step_cfg,
        tau_init=_soften(np.asarray(warm_labels), n_groups, CEM_EPS),
    )
    if spectral_labels is None:
        return warm
    cold = run_vem(
        network, structure, n_groups, lam, family_kind, step_cfg,
        tau_init=_soften(np.asarray(spectral_labels), n_groups, CEM_EPS),
    )
    if cold.diagnostics["final_objective"] > warm.diagnostics["final_objective"]:
        return cold
    return warm


def _qualifies(labels: np.ndarray, n_groups: int, structure, pen0: float) -> bool:
    if np.unique(labels).size != n_groups:
        return False
    return penalty(Partition(labels, n_groups), structure) <= pen0


def _partition_runs(canons: list[tuple[int, ...]]) -> list[tuple[int, int]]:
    """(start, length) of each maximal run of identical canonical labels."""
    runs = []
    k = 0
    while k < len(canons):
        j = k
        while j + 1 < len(canons) and canons[j + 1] == canons[k]:
            j += 1
        runs.append((k, j - k + 1))
        k = j + 1
    return runs


def _select(fits: list[FitResult], grid: list[float], structure, n_groups, window: int):
    """Retained index: smallest-penalty stable nondegenerate stretch.

    Runs shorter than ``window``, runs with empty groups and runs whose
    penalty term exceeds the unpenalized partition's are not eligible; among
    the rest the smallest penalty term wins (ties: longer run, then earlier).
    Fallback: the last grid value still showing the unpenalized partition.
    """
    pen0 = penalty(fits[0].partition, structure)
    canons = [_canonical_labels(f.partition.labels) for f in fits]
    candidates = []
    for start, length in _partition_runs(canons):
        if length < window:
            continue
        labels = fits[start].partition.labels
        if np.unique(labels).size != n_groups:
            continue
        pen = penalty(fits[start].partition, structure)
        if pen > pen0:
            continue
        candidates.append((pen, -length, start))
    if candidates:
        candidates.sort()
        _, _, start = candidates[0]
        # report a positive penalty: a run that starts at 0 keeps the
        # unpenalized partition, so its first penalized value stands in
        idx = start + 1 if grid[start] == 0.0 else start
        return idx, True
    j = 0
    while j + 1 < len(canons) and canons[j + 1] == canons[0]:
        j += 1
    return j, False


def lambda_path(
    network: InteractionNetwork,
    structure: StructuralNetwork,
    n_groups: int,
    family_kind: str,
    cfg: FitConfig = FitConfig(),
    path_cfg: PathConfig = PathConfig(),
) -> LambdaPath:
    """Trace fits along the penalty grid and retain one penalty strength.

    The unpenalized fit uses ``cfg.n_restarts`` k-means starts.  Every later
    grid value runs two short-E-step fits — warm start from the previous
    winner and spectral start from the structural graph — and keeps the
    better post-classification objective.  After refining the grid around
    partition changes, the retained value is chosen by :func:`_select`.  All
    path fits hold the mixing proportions uniform (see ``FitConfig``).
    """
    if structure is None:
        raise ValueError("lambda_path needs a structural network")
    base_cfg = replace(cfg, uniform_proportions=True)
    fit0 = run_vem(network, structure, n_groups, 0.0, family_kind, base_cfg)
    if path_cfg.lam_grid is not None:
        grid = list(path_cfg.lam_grid)
    else:
        lam0 = path_cfg.lam0 or default_lam0(fit0, network, structure)
        grid = [0.0] + [lam0 * 2.0**k for k in range(path_cfg.n_doublings + 1)]

    step_cfg = replace(
        cfg,
        n_restarts=1,
        uniform_proportions=True,
        max_fixed_point_iters=min(cfg.max_fixed_point_iters, PATH_E_STEP_SWEEPS),
    )
    spectral = spectral_partition(structure, n_groups, cfg.seed) if n_groups > 1 else None

    fits = [fit0]
    for lam in grid[1:]:
        fits.append(
            _path_step(
                network, structure, n_groups, lam, family_kind, step_cfg,
                fits[-1].partition.labels, spectral,
            )
        )

    pen0 = penalty(fit0.partition, structure)
    for _ in range(path_cfg.refine_rounds):
        inserts = []
        for k in range(1, len(grid) - 1):
            if grid[k + 1] / grid[k] <= path_cfg.refine_ratio:
                continue
            a, b = fits[k].partition.labels, fits[k + 1].partition.labels
            if _canonical_labels(a) == _canonical_labels(b):
                continue
            if _qualifies(a, n_groups, structure, pen0) or _qualifies(b, n_groups, structure, pen0):
                inserts.append(k)
            if len(inserts) >= path_cfg.refine_cap:
                break
        if not inserts:
            break
        for k in reversed(inserts):
            lam = float(math.sqrt(grid[k] * grid[k + 1]))
            fit = _path_step(
                network, structure, n_groups, lam, family_kind, step_cfg,
                fits[k].partition.labels, spectral,
            )
            grid.insert(k + 1, lam)
            fits.insert(k + 1, fit)

    idx, stabilized = _select(fits, grid, structure, n_groups, path_cfg.stability_window)
    return LambdaPath(fits, grid, lam_max=fits[idx].lam, stabilized=stabilized, selected_index=idx)


def parameter_count(family_kind: str, n_groups: int) -> int:
    """Free emission parameters of a model with ``n_groups`` groups."""
    pairs = n_groups * (n_groups + 1) // 2
    if family_kind == emissions.GAUSSIAN:
        return pairs + 1
    if family_kind in (emissions.BERNOULLI, emissions.POISSON):
        return pairs
    if family_kind == emissions.INFLATED_GAUSSIAN:
        return 2 * pairs + 1
    raise ValueError(f"unknown family kind {family_kind!r}")


def icl(fit: FitResult, network: InteractionNetwork) -> float:
    """Integrated classification likelihood of a fit.

    Complete-data log-likelihood at the hard labels, minus half the emission
    parameter count times log of the number of unordered pairs, minus half
    (n_groups - 1) times log n for the proportions.  The one-group model has
    no proportion term.
    """
    n = network.n
    ll = emissions.complete_loglik(fit.params, network, fit.partition.labels)
    n_pairs = n * (n - 1) / 2.0
    p_theta = parameter_count(fit.params.family.kind, fit.n_groups)
    return ll - 0.5 * p_theta * math.log(n_pairs) - 0.5 * (fit.n_groups - 1) * math.log(n)


def search_models(
    network: InteractionNetwork,
    structure: StructuralNetwork | None,
    family_kind: str,
    cfg: FitConfig = FitConfig(),
    path_cfg: PathConfig = PathConfig(),
    fixed_lam: float | None = None,
) -> ModelSearch:
    """Fit every group number in ``path_cfg.q_range`` and rank by ICL.

    With ``fixed_lam=None`` each candidate runs a full penalty path and is
    judged at its retained penalty.  With a numeric ``fixed_lam`` each
    candidate is fitted at that single penalty strength; 0 makes the
    structural network optional.

    Ties in ICL go to the smaller number of groups.
    """
    qmin, qmax = path_cfg.q_range
    if qmax > network.n:
        raise ValueError("q_range exceeds the number of nodes")
    fits: dict[int, FitResult] = {}
    paths: dict[int, LambdaPath] | None = None if fixed_lam is not None else {}
    best = None
    for q in range(qmin, qmax + 1):
        if fixed_lam is None:
            path = lambda_path(network, structure, q, family_kind, cfg, path_cfg)
            paths[q] = path
            fit = path.selected
            for f in path.fits:
                f.icl = icl(f, network)
        else:
            fit = run_vem(network, structure, q, float(fixed_lam), family_kind, cfg)
            fit.icl = icl(fit, network)
        fits[q] = fit
        if best is None or fit.icl > best.icl:
            best = fit
    return ModelSearch(best=best, fits=fits, paths=paths)


def select_model(
    network: InteractionNetwork,
    structure: StructuralNetwork | None,
    family_kind: str,
    cfg: FitConfig = FitConfig(),
    path_cfg: PathConfig = PathConfig(),
    fixed_lam: float | None = None,
) -> FitResult:
    """ICL-best fit over the group-number range (see :func:`search_models`)."""
    return search_models(network, structure, family_kind, cfg, path_cfg, fixed_lam).best


def report_rows(search: ModelSearch, structure: StructuralNetwork | None) -> list[dict]:
    """Flat per-fit summary rows for the search report CSV."""
    rows = []
    for q in sorted(search.fits):
        path = search.paths.get(q) if search.paths is not None else None
        fits = path.fits if path is not None else [search.fits[q]]
        for fit in fits:
            pen = ""
            if structure is not None:
                pen = penalty(fit.partition, structure)
            rows.append(
                {
                    "n_groups": q,
                    "lambda": fit.lam,
                    "objective": fit.diagnostics.get("final_objective"),
                    "icl": fit.icl,
                    "n_groups_nonempty": int(np.unique(fit.partition.labels).size),
                    "penalty_of_hard_labels": pen,
                }
            )
    return rows
