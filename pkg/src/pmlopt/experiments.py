"""Utility sweeps and synthetic-data simulations against randomized response.

Both harnesses pair the PML-optimal mechanism at leakage ``eps`` with
randomized response calibrated to leak the same ``eps`` (worst case over
outputs) and report utilities side by side.

Randomness
----------
Trial ``t`` draws from ``numpy.random.Generator(PCG64(seed + t))``.  Within a
trial the secrets and the privatization uniforms are drawn once and reused
for every ``eps`` and both methods (common random numbers), so curve
differences reflect the mechanisms rather than sampling noise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import Mechanism, Prior
from .design import design
from .errors import DegenerateVariance, EpsilonOutOfRange, PMLError
from .leakage import region_table
from .rr import calibrate, randomized_response
from .utility import ColumnUtility, UtilityKind, empirical_mi_arrays, mechanism_utility, pearson_arrays

ESTIMATORS = ("empirical_mi", "pearson")
METHODS = ("pml_optimal", "randomized_response")
DEFAULT_TAIL = 1e-9


def resolve_eps(prior: Prior, value: str | float) -> float:
    """Parse an ``eps`` bound: a float in nats, ``"eps_max"`` or ``"eps_k"``."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    if text == "eps_max":
        return prior.eps_max
    if text.startswith("eps_") and text[4:].isdigit():
        k = int(text[4:])
        table = region_table(prior)
        if not 0 <= k <= len(table.boundaries):
            raise EpsilonOutOfRange(f"{text} is not defined for N = {prior.n}")
        return table.lower(k + 1)
    return float(text)


def exp_grid(prior: Prior, points: int, tail: float = DEFAULT_TAIL) -> np.ndarray:
    """``eps`` grid with ``e^eps`` evenly spaced on ``[1, e^eps_max)``.

    ``points - 1`` evenly spaced values start at ``eps = 0``; the last point is
    ``eps_max - tail`` so the curves are sampled next to their common limit.
    """
    if points < 2:
        raise EpsilonOutOfRange("a grid needs at least two points")
    if not 0 < tail < prior.eps_max:
        raise EpsilonOutOfRange(f"tail must lie in (0, eps_max), got {tail}")
    top = math.exp(prior.eps_max)
    body = np.log(np.linspace(1.0, top, points)[:-1])
    last = prior.eps_max - tail
    body = body[body < last]
    return np.append(body, last)


def step_grid(prior: Prior, start: float, stop: float, step: float) -> np.ndarray:
    """``start, start + step, ...`` up to ``stop`` inclusive, restricted to ``[0, eps_max)``.

    Raises
    ------
    EpsilonOutOfRange
        If ``step <= 0`` or the range leaves ``[0, eps_max]``.
    """
    if not step > 0:
        raise EpsilonOutOfRange(f"step must be positive, got {step}")
    if start < 0 or stop < start or stop > prior.eps_max + 1e-12:
        raise EpsilonOutOfRange(f"grid [{start}, {stop}] must lie within [0, eps_max = {prior.eps_max:.12g}]")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = start + step * np.arange(count)
    grid = grid[grid < prior.eps_max]
    if grid.size == 0:
        raise EpsilonOutOfRange("grid is empty below eps_max")
    return grid


def check_grid(prior: Prior, grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.size == 0 or g.min() < 0 or g.max() >= prior.eps_max:
        raise EpsilonOutOfRange(f"grid must be non-empty and lie in [0, eps_max = {prior.eps_max:.12g})")
    return g


def rr_calibrated(prior: Prior, eps: float) -> Mechanism:
    """Randomized response whose worst-case PML equals ``eps``."""
    return randomized_response(prior.n, calibrate(prior, eps))


@dataclass(frozen=True)
class CompareRow:
    eps: float
    utility_pml_optimal: float
    utility_rr_calibrated: float


def compare(prior: Prior, grid: Sequence[float],
            utility: str | UtilityKind = UtilityKind.MUTUAL_INFORMATION) -> list[CompareRow]:
    """Optimal and calibrated-RR utility at every ``eps`` of ``grid``."""
    kind = UtilityKind.parse(utility) if isinstance(utility, str) else utility
    u = ColumnUtility(kind, prior)
    rows = []
    for eps in check_grid(prior, grid):
        best = design(prior, float(eps), "auto", kind).utility
        rr = mechanism_utility(u, rr_calibrated(prior, float(eps)))
        rows.append(CompareRow(float(eps), best, rr))
    return rows


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of a synthetic-data experiment.

    ``grid`` is in nats and must lie in ``[0, eps_max)``.
    """

    prior: Prior
    grid: tuple[float, ...]
    n: int = 1000
    trials: int = 10
    seed: int = 0
    estimators: tuple[str, ...] = ESTIMATORS
    methods: tuple[str, ...] = METHODS

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PMLError(f"n must be at least 1, got {self.n}")
        if self.trials < 1:
            raise PMLError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise PMLError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        check_grid(self.prior, self.grid)
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise PMLError(f"unknown estimator {e!r}; choose from {', '.join(ESTIMATORS)}")
        for m in self.methods:
            if m not in METHODS:
                raise PMLError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if not self.estimators or not self.methods:
            raise PMLError("at least one estimator and one method are required")


@dataclass(frozen=True, order=True)
class SimulationRow:
    eps: float
    trial: int
    method: str
    estimator: str
    value: float | None = field(compare=False)


def posterior_labels(mech: Mechanism, prior: Prior) -> np.ndarray:
    """Numeric labels ``1..M`` for the outputs, ranked by ``E[X | Y = y]``.

    Secrets take the values ``1..N``.  Relabelling outputs is a bijective
    post-processing, so leakage and mutual information are unchanged; it fixes
    the sign convention that a correlation coefficient needs.  Ties keep the
    column order.
    """
    joint = prior.probs[:, None] * mech.matrix
    mass = joint.sum(axis=0)
    values = np.arange(1, prior.n + 1, dtype=float)
    mean = np.where(mass > 0, values @ joint / np.where(mass > 0, mass, 1.0), np.inf)
    labels = np.empty(mech.n_outputs, dtype=float)
    labels[np.argsort(mean, kind="stable")] = np.arange(1, mech.n_outputs + 1)
    return labels


def sample_secrets(prior: Prior, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of symbol indices from uniforms ``u``."""
    cdf = np.cumsum(prior.probs)
    return np.minimum(np.searchsorted(cdf, u, side="right"), prior.n - 1)


def privatize(mech: Mechanism, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of outputs from the rows ``mech[x]``."""
    cdf = np.cumsum(mech.matrix, axis=1)
    y = np.sum(cdf[x] <= u[:, None], axis=1)
    return np.minimum(y, mech.n_outputs - 1)


def _estimate(name: str, x: np.ndarray, y: np.ndarray, mech: Mechanism, prior: Prior) -> float | None:
    if name == "empirical_mi":
        return empirical_mi_arrays(x, y, (prior.n, mech.n_outputs))
    labels = posterior_labels(mech, prior)
    try:
        return pearson_arrays(x + 1.0, labels[y])
    except DegenerateVariance:
        return None


def simulate(config: SimulationConfig) -> list[SimulationRow]:
    """Run every ``(eps, trial, method)`` combination; rows sorted by those keys."""
    prior = config.prior
    draws = []
    for t in range(config.trials):
        rng = np.random.Generator(np.random.PCG64(config.seed + t))
        x = sample_secrets(prior, rng.random(config.n))
        draws.append((x, rng.random(config.n)))
    rows: list[SimulationRow] = []
    for eps in config.grid:
        mechs = {}
        if "pml_optimal" in config.methods:
            mechs["pml_optimal"] = design(prior, float(eps)).mechanism
        if "randomized_response" in config.methods:
            mechs["randomized_response"] = rr_calibrated(prior, float(eps))
        for t, (x, u) in enumerate(draws):
            for method, mech in mechs.items():
                y = privatize(mech, x, u)
                for est in config.estimators:
                    rows.append(SimulationRow(float(eps), t, method, est, _estimate(est, x, y, mech, prior)))
    rows.sort()
    return rows


@dataclass(frozen=True)
class CurveSummary:
    mean: float
    std: float
    count: int


def summarize(rows: Iterable[SimulationRow]) -> dict[tuple[float, str, str], CurveSummary]:
    """Mean and sample standard deviation over trials, skipping undefined values."""
    groups: dict[tuple[float, str, str], list[float]] = {}
    for r in rows:
        if r.value is not None:
            groups.setdefault((r.eps, r.method, r.estimator), []).append(r.value)
    out = {}
    for key, vals in groups.items():
        arr = np.asarray(vals)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        out[key] = CurveSummary(float(arr.mean()), std, int(arr.size))
    return out


def pooled_se(a: CurveSummary, b: CurveSummary) -> float:
    """Standard error of the difference of two trial means."""
    return math.sqrt(a.std**2 / a.count + b.std**2 / b.count)


def format_float(value: float | None) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "NA"
    return f"{value:.12g}"


def compare_csv(rows: Sequence[CompareRow], scale: float = 1.0) -> str:
    """CSV text; ``scale`` converts ``eps`` and utilities (e.g. ``1/log 2`` for bits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "utility_pml_optimal", "utility_rr_calibrated"])
    for r in rows:
        w.writerow([format_float(r.eps * scale), format_float(r.utility_pml_optimal * scale),
                    format_float(r.utility_rr_calibrated * scale)])
    return buf.getvalue()


def simulation_csv(rows: Sequence[SimulationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "trial", "method", "estimator", "value"])
    for r in rows:
        w.writerow([format_float(r.eps), r.trial, r.method, r.estimator, format_float(r.value)])
    return buf.getvalue()
