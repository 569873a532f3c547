"""Penalized variational EM engine with a classification step.

One EM iteration runs: a damped Jacobi fixed point for the per-node group
weights (the E-step, penalized through the structural Laplacian), a MAP
classification of the result, a re-hardening of the weights, and a
closed-form M-step on the hardened weights.  The recorded objective is the
entropy-free penalized bound

    sum_iq tau_iq log alpha_q
    + sum_{i<j} sum_ql tau_iq tau_jl log f(y_ij; theta_ql)
    - lam * sum_q ||tau_q||^2_L

evaluated before the classification step of every iteration; that sequence
is non-decreasing up to ``em_tol`` (the loop stops and rolls back one step
if it ever falls further, which hard assignment can cause).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.cluster.vq import kmeans2

from . import emissions
from .emissions import ModelParams, m_step
from .networks import InteractionNetwork, Partition, SoftAssignment, StructuralNetwork

__all__ = [
    "FitConfig",
    "FitResult",
    "init_partition",
    "e_step",
    "m_step",
    "classify",
    "run_vem",
    "penalized_objective",
]

INIT_EPS = 0.1  # softening of the k-means one-hot start
CEM_EPS = 1e-3  # re-hardening after each classification step


@dataclass(frozen=True)
class FitConfig:
    """Knobs of the fitting loop; defaults suit networks of a few hundred nodes.

    ``uniform_proportions`` holds the mixing proportions fixed at 1/Q instead
    of re-estimating them each M-step.  Under hard assignment the estimated
    proportions feed back into the next classification and can snowball a
    small imbalance into an empty group; the penalty path fits with this
    guard on.
    """

    max_em_iters: int = 50
    max_fixed_point_iters: int = 100
    em_tol: float = 1e-6
    fp_tol: float = 1e-6
    damping: float = 0.5
    n_restarts: int = 1
    seed: int = 0
    uniform_proportions: bool = False

    def __post_init__(self):
        if self.max_em_iters < 1 or self.max_fixed_point_iters < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.em_tol <= 0 or self.fp_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be at least 1")


@dataclass
class FitResult:
    """Outcome of one fit: soft weights, hard partition, parameters, trace.

    ``objective_trace`` holds the pre-classification penalized bound per EM
    iteration; ``icl`` is filled by the model-selection layer.
    """

    tau: SoftAssignment | None
    partition: Partition
    params: ModelParams
    lam: float
    n_groups: int
    objective_trace: list[float]
    converged: bool
    icl: float | None = None
    node_ids: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------


def _soften(labels: np.ndarray, n_groups: int, eps: float) -> np.ndarray:
    n = labels.size
    if n_groups == 1:
        return np.ones((n, 1))
    tau = np.full((n, n_groups), eps / (n_groups - 1))
    tau[np.arange(n), labels] = 1.0 - eps
    return tau


def _kmeans_labels(values: np.ndarray, n_groups: int, rng: np.random.Generator):
    """Lloyd k-means (++ seeding, 50 iterations) on the matrix rows."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # scipy warns on empty clusters
            _, labels = kmeans2(values, n_groups, iter=50, minit="++", seed=rng)
    except Exception:
        # fully degenerate input (e.g. identical rows); spread labels evenly
        return np.arange(values.shape[0]) % n_groups, True
    return labels, np.unique(labels).size < n_groups


def init_partition(network: InteractionNetwork, n_groups: int, seed) -> SoftAssignment:
    """K-means start on the interaction matrix rows, softened to 0.9 / 0.1.

    ``seed`` may be an int, a Generator, or a SeedSequence.  Degenerate data
    (fewer distinct rows than groups) still yields a valid assignment but may
    leave groups empty; a warning is issued in that case.
    """
    if not 1 <= n_groups <= network.n:
        raise ValueError("n_groups must lie in [1, n]")
    if n_groups == 1:
        return SoftAssignment(np.ones((network.n, 1)))
    rng = np.random.default_rng(seed)
    # the stored diagonal is 0, an outlier that would dominate row distances
    features = network.values.copy()
    np.fill_diagonal(features, features.sum(axis=1) / max(network.n - 1, 1))
    labels, degenerate = _kmeans_labels(features, n_groups, rng)
    if degenerate:
        warnings.warn("k-means start is degenerate: some groups are empty")
    return SoftAssignment(_soften(np.asarray(labels), n_groups, INIT_EPS))


# ---------------------------------------------------------------------------
# E-step
# ---------------------------------------------------------------------------


def _log_proportions(proportions: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(proportions, emissions.LOG_FLOOR))


def _laplacian_operator(structure: StructuralNetwork) -> sp.csr_array:
    i, j, w = structure.src, structure.dst, structure.weight
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([-w, -w, w, w])
    return sp.csr_array(
        sp.coo_array((vals, (rows, cols)), shape=(structure.n, structure.n))
    )


def _fixed_point(logf, log_prop, lap, lam, tau0, cfg: FitConfig):
    """Damped Jacobi iteration of the penalized posterior update.

    The step size starts at ``cfg.damping`` and is halved whenever the sweep
    fails to contract: for large ``lam * degree`` the undamped map loses
    contractivity and full steps flip-flop between mirrored states instead of
    settling, so the residual stops shrinking.  Softening the step restores
    convergence without changing the fixed point being solved.
    """
    tau = tau0
    damp = cfg.damping
    # non-contracting sweeps get their step halved, down to a fixed fraction
    # of the starting step so that slow annealing still makes progress
    damp_floor = cfg.damping / 16.0
    prev_delta = np.inf
    prev_step = None
    n_alternating = 0
    for sweep in range(cfg.max_fixed_point_iters):
        # s[i, q] = sum_{j != i, l} tau[j, l] * logf[q, l, i, j]
        s = np.einsum("qlij,jl->iq", logf, tau, optimize=True)
        u = log_prop[None, :] + s
        if lam > 0.0 and lap is not None:
            u = u - 2.0 * lam * (lap @ tau)
        u -= u.max(axis=1, keepdims=True)
        t = np.exp(u)
        t /= t.sum(axis=1, keepdims=True)
        new = (1.0 - damp) * tau + damp * t
        step = new - tau
        delta = float(np.abs(step).max())
        tau = new
        if delta < cfg.fp_tol:
            return tau, sweep + 1, True
        if prev_step is not None:
            dot = float((step * prev_step).sum())
            scale = float(np.linalg.norm(step) * np.linalg.norm(prev_step))
            n_alternating = n_alternating + 1 if scale > 0 and dot < -0.5 * scale else 0
        if n_alternating >= 3:
            # period-two cycle: beyond the flip-flop threshold the sweeps undo
            # each other instead of drifting, so consecutive steps are
            # anti-correlated.  Averaging the two iterates cancels the
            # alternating component, and only here may the step drop below the
            # floor, where the cycle is no longer self-sustaining.
            tau = tau - 0.5 * step
            damp *= 0.5
            prev_step = None
            n_alternating = 0
            prev_delta = np.inf
            continue
        if delta > 0.95 * prev_delta:
            damp = max(0.5 * damp, damp_floor)
        prev_delta = delta
        prev_step = step
    return tau, cfg.max_fixed_point_iters, False


def _objective(tau, log_prop, logf, lap, lam) -> float:
    """Entropy-free penalized bound at soft weights tau."""
    val = float((tau @ log_prop).sum())
    s = np.einsum("qlij,jl->iq", logf, tau, optimize=True)
    val += 0.5 * float((tau * s).sum())
    if lam > 0.0 and lap is not None:
        val -= lam * float((tau * (lap @ tau)).sum())
    return val


def e_step(
    network: InteractionNetwork,
    structure: StructuralNetwork | None,
    params: ModelParams,
    tau_init,
    lam: float,
    cfg: FitConfig,
) -> SoftAssignment:
    """Solve the penalized fixed point for the group weights.

    Jacobi sweeps with damping ``cfg.damping`` from ``tau_init`` until the
    largest entry change drops below ``cfg.fp_tol``; rows stay stochastic
    throughout.  ``structure`` may be None when ``lam == 0``.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam > 0 and structure is None:
        raise ValueError("a structural network is required when lam > 0")
    tau0 = tau_init.tau if isinstance(tau_init, SoftAssignment) else np.asarray(tau_init, dtype=float)
    if tau0.shape != (network.n, params.n_groups):
        raise ValueError("tau_init has the wrong shape")
    logf = emissions.log_density_matrix(params.family, network.values)
    lap = _laplacian_operator(structure) if lam > 0 else None
    tau, _, _ = _fixed_point(logf, _log_proportions(params.proportions), lap, lam, tau0, cfg)
    return SoftAssignment(tau)


def classify(tau) -> Partition:
    """MAP labels from soft weights; ties go to the smallest group index."""
    t = tau.tau if isinstance(tau, SoftAssignment) else np.asarray(tau, dtype=float)
    return Partition(np.argmax(t, axis=1), n_groups=t.shape[1])


def penalized_objective(
    tau,
    params: ModelParams,
    network: InteractionNetwork,
    structure: StructuralNetwork | None = None,
    lam: float = 0.0,
) -> float:
    """Public evaluation of the entropy-free penalized bound."""
    t = tau.tau if isinstance(tau, SoftAssignment) else np.asarray(tau, dtype=float)
    logf = emissions.log_density_matrix(params.family, network.values)
    lap = _laplacian_operator(structure) if (lam > 0 and structure is not None) else None
    return _objective(t, _log_proportions(params.proportions), logf, lap, lam)


# ---------------------------------------------------------------------------
# full fit
# ---------------------------------------------------------------------------


def _single_fit(network, structure, n_groups, lam, family_kind, cfg, tau0, lap):
    values = network.values
    uniform = np.full(n_groups, 1.0 / n_groups)
    tau = tau0
    params = m_step(family_kind, tau, network)
    if cfg.uniform_proportions:
        params = replace(params, proportions=uniform)
    logf = emissions.log_density_matrix(params.family, values)
    log_prop = _log_proportions(params.proportions)

    trace: list[float] = []
    post_trace: list[float] = []
    fp_sweeps: list[int] = []
    state = None
    prev = None
    converged = False
    declined = False

    for _ in range(cfg.max_em_iters):
        tau_soft, sweeps, _ = _fixed_point(logf, log_prop, lap, lam, tau, cfg)
        pre = _objective(tau_soft, log_prop, logf, lap, lam)
        if prev is not None and pre < prev - cfg.em_tol:
            # hard assignment degraded the bound; keep the previous iterate
            declined = True
            converged = True
            break
        trace.append(pre)
        fp_sweeps.append(sweeps)

        labels = np.argmax(tau_soft, axis=1)
        tau_hard = _soften(labels, n_groups, CEM_EPS)
        params = m_step(family_kind, tau_hard, network, prev=params)
        if cfg.uniform_proportions:
            params = replace(params, proportions=uniform)
        logf = emissions.log_density_matrix(params.family, values)
        log_prop = _log_proportions(params.proportions)
        post = _objective(tau_hard, log_prop, logf, lap, lam)
        post_trace.append(post)
        state = (tau_soft, labels, params, post)

        if prev is not None and abs(pre - prev) < cfg.em_tol:
            converged = True
            break
        prev = pre
        tau = tau_hard

    tau_soft, labels, params, final_obj = state
    diagnostics = {
        "final_objective": final_obj,
        "post_classification_trace": post_trace[: len(trace)],
        "fp_sweeps": fp_sweeps,
        "n_em_iters": len(trace),
        "stopped_on_decline": declined,
        "frozen_cells": list(params.frozen_cells),
    }
    return {
        "tau": tau_soft,
        "labels": labels,
        "params": params,
        "objective": final_obj,
        "trace": trace,
        "converged": converged,
        "diagnostics": diagnostics,
    }


def run_vem(
    network: InteractionNetwork,
    structure: StructuralNetwork | None,
    n_groups: int,
    lam: float,
    family_kind: str,
    cfg: FitConfig = FitConfig(),
    tau_init=None,
) -> FitResult:
    """Fit the penalized mixture by classification EM.

    Parameters
    ----------
    network : interaction data shared by all groups.
    structure : proximity graph for the penalty; optional when ``lam == 0``.
    n_groups : number of mixture groups (1 gives the null one-group model).
    lam : nonnegative penalty strength.
    family_kind : emission family, one of ``emissions.FAMILY_KINDS``.
    cfg : loop controls; ``cfg.n_restarts`` independent k-means starts are
        fitted and the best final objective wins.
    tau_init : optional warm start; when given, restarts are skipped and a
        single fit runs from it.

    Returns the best fit; ``converged`` is False when the iteration cap was
    hit before the objective settled.  Deterministic for fixed inputs, seed
    and config.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam > 0 and structure is None:
        raise ValueError("a structural network is required when lam > 0")
    if structure is not None and structure.node_ids != network.node_ids:
        raise ValueError("interaction and structural networks must share the node set")
    if not 1 <= n_groups <= network.n:
        raise ValueError("n_groups must lie in [1, n]")

    lap = _laplacian_operator(structure) if lam > 0 else None

    runs = []
    if tau_init is not None:
        t0 = tau_init.tau if isinstance(tau_init, SoftAssignment) else np.asarray(tau_init, dtype=float)
        if t0.shape != (network.n, n_groups):
            raise ValueError("tau_init has the wrong shape")
        run = _single_fit(network, structure, n_groups, lam, family_kind, cfg, t0, lap)
        run["diagnostics"]["warm_start"] = True
        run["diagnostics"]["restart"] = 0
        runs.append(run)
    else:
        children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_restarts)
        for r, child in enumerate(children):
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                tau0 = init_partition(network, n_groups, child)
            degenerate = any("degenerate" in str(w.message) for w in caught)
            run = _single_fit(network, structure, n_groups, lam, family_kind, cfg, tau0.tau, lap)
            run["diagnostics"]["warm_start"] = False
            run["diagnostics"]["restart"] = r
            run["diagnostics"]["degenerate_init"] = degenerate
            runs.append(run)

    best = max(runs, key=lambda r: r["objective"])  # ties keep the earliest
    return FitResult(
        tau=SoftAssignment(best["tau"]),
        partition=Partition(best["labels"], n_groups=n_groups),
        params=best["params"],
        lam=float(lam),
        n_groups=int(n_groups),
        objective_trace=best["trace"],
        converged=best["converged"],
        icl=None,
        node_ids=network.node_ids,
        diagnostics=best["diagnostics"],
    )
