"""Emission families for pairwise interaction values and their closed-form fits.

Four families are supported, all parametrized per group pair (q, l) with a
symmetric parameter matrix:

* ``gaussian``          -- mean per group pair, one shared variance;
* ``bernoulli``         -- success probability per group pair;
* ``poisson``           -- rate per group pair;
* ``inflated-gaussian`` -- point mass at the value 1 plus a Gaussian on the
  logit of the remaining values in (0, 1), with one shared variance.  The
  log-density of a non-one value includes the Jacobian of the logistic
  transform, ``-log(y (1 - y))``.

The M-step is weighted method-of-moments with three guards: a group-pair
cell whose total pair weight falls below 1e-12 keeps its previous value and
is flagged, the shared variance is floored at 1e-8, and probabilities are
clamped away from {0, 1} so log-densities stay finite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .networks import InteractionNetwork, SoftAssignment

__all__ = [
    "GAUSSIAN",
    "BERNOULLI",
    "POISSON",
    "INFLATED_GAUSSIAN",
    "FAMILY_KINDS",
    "EmissionFamily",
    "ModelParams",
    "NumericalError",
    "log_density",
    "log_density_matrix",
    "log_density_pairs",
    "m_step",
    "complete_loglik",
]

GAUSSIAN = "gaussian"
BERNOULLI = "bernoulli"
POISSON = "poisson"
INFLATED_GAUSSIAN = "inflated-gaussian"
FAMILY_KINDS = (GAUSSIAN, BERNOULLI, POISSON, INFLATED_GAUSSIAN)

VAR_FLOOR = 1e-8          # shared-variance floor
CELL_WEIGHT_EPS = 1e-12   # below this a cell keeps its previous parameter
PROB_CLAMP = 1e-12        # keeps Bernoulli/Poisson parameters off the boundary
LOG_FLOOR = 1e-300        # inflation weights may be exactly 0 or 1; log stays finite
ZERO_VALUE_CLAMP = 1e-6   # inflated-gaussian values of exactly 0 move here


class NumericalError(ArithmeticError):
    """A log-density or update came out non-finite."""


@dataclass(frozen=True)
class EmissionFamily:
    """Per-group-pair emission parameters.

    ``mean`` holds the family's location parameter (mean, probability or
    rate), ``var`` the shared variance for the Gaussian kinds, ``inflation``
    the point-mass weight at 1 for the inflated kind.
    """

    kind: str
    mean: np.ndarray
    var: float | None = None
    inflation: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        mean = np.array(self.mean, dtype=float)
        if mean.ndim != 2 or mean.shape[0] != mean.shape[1]:
            raise ValueError("mean must be a square matrix")
        if not np.isfinite(mean).all():
            raise ValueError("mean must be finite")
        if not np.array_equal(mean, mean.T):
            raise ValueError("mean must be exactly symmetric")
        if self.kind == BERNOULLI and ((mean <= 0).any() or (mean >= 1).any()):
            raise ValueError("bernoulli probabilities must lie strictly inside (0, 1)")
        if self.kind == POISSON and (mean <= 0).any():
            raise ValueError("poisson rates must be positive")
        mean.flags.writeable = False
        object.__setattr__(self, "mean", mean)

        if self.kind in (GAUSSIAN, INFLATED_GAUSSIAN):
            if self.var is None or not np.isfinite(self.var) or self.var <= 0:
                raise ValueError(f"{self.kind} needs a positive shared variance")
            object.__setattr__(self, "var", float(self.var))
        elif self.var is not None:
            raise ValueError(f"{self.kind} takes no variance")

        if self.kind == INFLATED_GAUSSIAN:
            if self.inflation is None:
                raise ValueError("inflated-gaussian needs inflation weights")
            infl = np.array(self.inflation, dtype=float)
            if infl.shape != mean.shape:
                raise ValueError("inflation must match the mean's shape")
            if not np.array_equal(infl, infl.T):
                raise ValueError("inflation must be exactly symmetric")
            if (infl < 0).any() or (infl > 1).any() or not np.isfinite(infl).all():
                raise ValueError("inflation weights must lie in [0, 1]")
            infl.flags.writeable = False
            object.__setattr__(self, "inflation", infl)
        elif self.inflation is not None:
            raise ValueError(f"{self.kind} takes no inflation weights")

    @property
    def n_groups(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class ModelParams:
    """Group proportions plus the fitted emission family.

    ``frozen_cells`` lists the (q, l) cells the last M-step could not update
    for lack of pair weight.
    """

    proportions: np.ndarray
    family: EmissionFamily

    frozen_cells: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        p = np.array(self.proportions, dtype=float)
        if p.ndim != 1 or p.size != self.family.n_groups:
            raise ValueError("proportions must have one entry per group")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-8:
            raise ValueError("proportions must be nonnegative and sum to 1")
        p.flags.writeable = False
        object.__setattr__(self, "proportions", p)

    @property
    def n_groups(self) -> int:
        return self.family.n_groups


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _gauss_logpdf(x, mean, var):
    return -0.5 * np.log(2.0 * math.pi * var) - (x - mean) ** 2 / (2.0 * var)


def _logit(y):
    return np.log(y) - np.log1p(-y)


def log_density(family: EmissionFamily, y: float, q: int, l: int) -> float:
    """Log-density of one interaction value under cell (q, l).

    Validates the value against the family's support and always returns a
    finite number.
    """
    q, l = int(q), int(l)
    m = family.mean[q, l]
    if family.kind == GAUSSIAN:
        if not np.isfinite(y):
            raise ValueError("gaussian values must be finite")
        return float(_gauss_logpdf(y, m, family.var))
    if family.kind == BERNOULLI:
        if y not in (0, 1):
            raise ValueError("bernoulli values must be 0 or 1")
        return float(np.log(m) if y == 1 else np.log1p(-m))
    if family.kind == POISSON:
        if y < 0 or y != int(y):
            raise ValueError("poisson values must be nonnegative integers")
        return float(y * np.log(m) - m - gammaln(y + 1.0))
    # inflated-gaussian
    if not 0 < y <= 1:
        raise ValueError("inflated-gaussian values must lie in (0, 1]")
    pi = family.inflation[q, l]
    if y == 1:
        return float(np.log(max(pi, LOG_FLOOR)))
    return float(
        np.log(max(1.0 - pi, LOG_FLOOR))
        + _gauss_logpdf(_logit(y), m, family.var)
        - np.log(y)
        - np.log1p(-y)
    )


def _validate_support(kind: str, values: np.ndarray) -> None:
    n = values.shape[0]
    off = values[~np.eye(n, dtype=bool)]
    if kind == BERNOULLI:
        if not np.isin(off, (0.0, 1.0)).all():
            raise ValueError("bernoulli interaction values must be 0 or 1")
    elif kind == POISSON:
        if (off < 0).any() or not np.array_equal(off, np.floor(off)):
            raise ValueError("poisson interaction values must be nonnegative integers")
    elif kind == INFLATED_GAUSSIAN:
        if (off < 0).any() or (off > 1).any():
            raise ValueError("inflated-gaussian interaction values must lie in [0, 1]")


def _clamped_unit_values(values: np.ndarray) -> np.ndarray:
    """Values for the logistic transform; exact zeros move to 1e-6 with a warning."""
    n = values.shape[0]
    off = ~np.eye(n, dtype=bool)
    n_zero = int(np.count_nonzero((values == 0.0) & off))
    if n_zero:
        warnings.warn(
            f"{n_zero} interaction values of exactly 0 clamped to {ZERO_VALUE_CLAMP} "
            "before the logistic transform"
        )
    return np.clip(values, ZERO_VALUE_CLAMP, None)


def _raise_non_finite(arr: np.ndarray) -> None:
    bad = np.argwhere(~np.isfinite(arr))
    q, l, i, j = (int(v) for v in bad[0])
    raise NumericalError(f"non-finite log-density at pair ({i}, {j}) in cell ({q}, {l})")


def log_density_matrix(family: EmissionFamily, values: np.ndarray) -> np.ndarray:
    """Log-densities of a full interaction matrix under every group pair.

    Returns an array of shape (n_groups, n_groups, n, n) whose diagonal
    (i == j) slabs are zeroed; memory grows as ``n_groups**2 * n**2``.
    """
    _validate_support(family.kind, values)
    mean = family.mean[:, :, None, None]
    errstate = np.errstate(over="ignore", invalid="ignore")  # non-finite cells raise below
    if family.kind == GAUSSIAN:
        with errstate:
            out = _gauss_logpdf(values[None, None, :, :], mean, family.var)
    elif family.kind == BERNOULLI:
        y = values[None, None, :, :]
        out = y * np.log(mean) + (1.0 - y) * np.log1p(-mean)
    elif family.kind == POISSON:
        y = values[None, None, :, :]
        out = y * np.log(mean) - mean - gammaln(y + 1.0)
    else:
        ones = values == 1.0
        yc = _clamped_unit_values(np.where(ones, 0.5, values))  # 0.5: placeholder under the mask
        g = _logit(yc)
        pi = family.inflation[:, :, None, None]
        cont = (
            np.log(np.maximum(1.0 - pi, LOG_FLOOR))
            + _gauss_logpdf(g[None, None, :, :], mean, family.var)
            - (np.log(yc) + np.log1p(-yc))[None, None, :, :]
        )
        out = np.where(ones[None, None, :, :], np.log(np.maximum(pi, LOG_FLOOR)), cont)
    idx = np.arange(values.shape[0])
    out[:, :, idx, idx] = 0.0
    if not np.isfinite(out).all():
        _raise_non_finite(out)
    return out


def log_density_pairs(family: EmissionFamily, values: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Log-density of every pair under the cell picked by its hard labels.

    Returns an (n, n) matrix with a zeroed diagonal; entry (i, j) evaluates
    ``values[i, j]`` in cell ``(labels[i], labels[j])``.
    """
    _validate_support(family.kind, values)
    labels = np.asarray(labels)
    mean = family.mean[labels[:, None], labels[None, :]]
    if family.kind == GAUSSIAN:
        out = _gauss_logpdf(values, mean, family.var)
    elif family.kind == BERNOULLI:
        out = values * np.log(mean) + (1.0 - values) * np.log1p(-mean)
    elif family.kind == POISSON:
        out = values * np.log(mean) - mean - gammaln(values + 1.0)
    else:
        ones = values == 1.0
        yc = _clamped_unit_values(np.where(ones, 0.5, values))
        g = _logit(yc)
        pi = family.inflation[labels[:, None], labels[None, :]]
        cont = (
            np.log(np.maximum(1.0 - pi, LOG_FLOOR))
            + _gauss_logpdf(g, mean, family.var)
            - np.log(yc)
            - np.log1p(-yc)
        )
        out = np.where(ones, np.log(np.maximum(pi, LOG_FLOOR)), cont)
    np.fill_diagonal(out, 0.0)
    if not np.isfinite(out).all():
        bad = np.argwhere(~np.isfinite(out))
        i, j = (int(v) for v in bad[0])
        raise NumericalError(f"non-finite log-density at pair ({i}, {j})")
    return out


# ---------------------------------------------------------------------------
# M-step
# ---------------------------------------------------------------------------


def _as_tau(tau) -> np.ndarray:
    t = tau.tau if isinstance(tau, SoftAssignment) else np.asarray(tau, dtype=float)
    if t.ndim != 2:
        raise ValueError("tau must be 2-d (nodes x groups)")
    if np.abs(t.sum(axis=1) - 1.0).max() > 1e-8:
        raise ValueError("tau rows must sum to 1")
    return t


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _pair_moments(tau: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Symmetrized tau' M tau, i.e. pairwise sums weighted by group membership."""
    return _sym(tau.T @ mat @ tau)


def _weighted_cell_means(num, den, prev, fallback, frozen):
    """num/den per cell; cells below the weight floor keep prev (or fallback)."""
    out = np.empty_like(num)
    low = den < CELL_WEIGHT_EPS
    np.divide(num, den, out=out, where=~low)
    if low.any():
        base = prev if prev is not None else np.full_like(num, fallback)
        out[low] = base[low]
        for q, l in np.argwhere(low):
            if q <= l:
                frozen.append((int(q), int(l)))
    return _sym(out)


def _pooled_variance(s2, s1, s0, mean, valid) -> float:
    resid = s2 - 2.0 * mean * s1 + mean**2 * s0
    resid = np.clip(resid, 0.0, None)
    total = s0[valid].sum()
    if total < CELL_WEIGHT_EPS:
        return VAR_FLOOR
    return max(float(resid[valid].sum() / total), VAR_FLOOR)


def m_step(family_kind: str, tau, network: InteractionNetwork, prev: ModelParams | None = None) -> ModelParams:
    """Closed-form parameter update given soft assignments.

    Parameters
    ----------
    family_kind : one of FAMILY_KINDS.
    tau : row-stochastic (n, n_groups) weights (or a SoftAssignment).
    network : the interaction data.
    prev : previous parameters; cells with negligible pair weight keep their
        previous value and are reported in ``frozen_cells``.
    """
    if family_kind not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {family_kind!r}")
    t = _as_tau(tau)
    values = network.values
    if t.shape[0] != values.shape[0]:
        raise ValueError("tau and network disagree on the number of nodes")
    _validate_support(family_kind, values)

    proportions = t.mean(axis=0)
    colsum = t.sum(axis=0)
    s0 = _sym(np.outer(colsum, colsum) - t.T @ t)  # pair weight per cell, both orders
    frozen: list[tuple[int, int]] = []
    prev_mean = prev.family.mean if prev is not None else None

    if family_kind == GAUSSIAN:
        s1 = _pair_moments(t, values)
        s2 = _pair_moments(t, values * values)
        off = values[~np.eye(values.shape[0], dtype=bool)]
        mean = _weighted_cell_means(s1, s0, prev_mean, float(off.mean()), frozen)
        var = _pooled_variance(s2, s1, s0, mean, s0 >= CELL_WEIGHT_EPS)
        family = EmissionFamily(GAUSSIAN, mean, var=var)
    elif family_kind == BERNOULLI:
        s1 = _pair_moments(t, values)
        mean = _weighted_cell_means(s1, s0, prev_mean, 0.5, frozen)
        mean = np.clip(mean, PROB_CLAMP, 1.0 - PROB_CLAMP)
        family = EmissionFamily(BERNOULLI, mean)
    elif family_kind == POISSON:
        s1 = _pair_moments(t, values)
        off = values[~np.eye(values.shape[0], dtype=bool)]
        mean = _weighted_cell_means(s1, s0, prev_mean, float(off.mean()), frozen)
        mean = np.clip(mean, PROB_CLAMP, None)
        family = EmissionFamily(POISSON, mean)
    else:
        ones = (values == 1.0).astype(float)
        np.fill_diagonal(ones, 0.0)
        c1 = _pair_moments(t, ones)
        prev_infl = prev.family.inflation if prev is not None else None
        frozen_infl: list[tuple[int, int]] = []
        inflation = _weighted_cell_means(c1, s0, prev_infl, 0.0, frozen_infl)
        inflation = np.clip(inflation, 0.0, 1.0)

        w0 = 1.0 - ones
        np.fill_diagonal(w0, 0.0)
        g = np.where(ones > 0, 0.0, _logit(_clamped_unit_values(np.where(ones > 0, 0.5, values))))
        s0g = _pair_moments(t, w0)
        s1g = _pair_moments(t, g * w0)
        s2g = _pair_moments(t, g * g * w0)
        off_mask = w0 > 0
        fallback = float(g[off_mask].mean()) if off_mask.any() else 0.0
        mean = _weighted_cell_means(s1g, s0g, prev_mean, fallback, frozen)
        var = _pooled_variance(s2g, s1g, s0g, mean, s0g >= CELL_WEIGHT_EPS)
        family = EmissionFamily(INFLATED_GAUSSIAN, mean, var=var, inflation=inflation)
        frozen = sorted(set(frozen) | set(frozen_infl))

    return ModelParams(proportions, family, frozen_cells=tuple(frozen))


def complete_loglik(params: ModelParams, network: InteractionNetwork, labels) -> float:
    """Complete-data log-likelihood at hard labels: label term + unordered pair term."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size != network.n:
        raise ValueError("labels must assign one group per node")
    label_term = float(np.log(np.maximum(params.proportions[labels], LOG_FLOOR)).sum())
    pair_ll = log_density_pairs(params.family, network.values, labels)
    iu = np.triu_indices(network.n, k=1)
    return label_term + float(pair_ll[iu].sum())
