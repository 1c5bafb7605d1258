"""Pointwise maximal leakage (PML) and privacy regions.

All leakages are in nats.  The PML of an outcome ``y`` is
``log max_x P(y | x) / P(y)``; a mechanism satisfies ``eps``-PML when every
outcome released with positive probability leaks at most ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Mechanism, Prior, output_distribution
from .errors import DimensionMismatch, NegativeEpsilon, ZeroProbabilityOutcome

SNAP_TOL = 1e-12
SATISFY_TOL = 1e-9


def pml_of_outcome(mech: Mechanism, prior: Prior, outcome_index: int) -> float:
    """Leakage of outcome ``outcome_index`` in nats.

    Raises
    ------
    ZeroProbabilityOutcome
        If the outcome has zero probability under ``prior``.
    """
    rho = output_distribution(mech, prior).probs
    if not 0 <= outcome_index < mech.n_outputs:
        raise DimensionMismatch(f"outcome index {outcome_index} out of range for {mech.n_outputs} outputs")
    mass = rho[outcome_index]
    if mass <= 0.0:
        raise ZeroProbabilityOutcome(f"outcome {outcome_index} is never released")
    return max(0.0, math.log(mech.matrix[:, outcome_index].max() / mass))


def pml_per_outcome(mech: Mechanism, prior: Prior) -> np.ndarray:
    """Per-outcome leakage; NaN for outcomes with zero probability."""
    rho = output_distribution(mech, prior).probs
    out = np.full(mech.n_outputs, np.nan)
    pos = rho > 0.0
    out[pos] = np.maximum(0.0, np.log(mech.matrix[:, pos].max(axis=0) / rho[pos]))
    return out


def epsilon_m(mech: Mechanism, prior: Prior) -> float:
    """Smallest ``eps`` for which ``mech`` satisfies ``eps``-PML.

    All-zero columns carry no outcome and are skipped.
    """
    values = pml_per_outcome(mech, prior)
    return float(np.nanmax(values))


def satisfies(mech: Mechanism, prior: Prior, eps: float) -> bool:
    if eps < 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    return epsilon_m(mech, prior) <= eps + SATISFY_TOL


@dataclass(frozen=True)
class RegionTable:
    """Privacy-region boundaries of a prior.

    ``boundaries[k - 1]`` is ``eps_k = -log`` of the total mass of the
    ``N - k`` most likely symbols, for ``k = 1 .. N-1``.  Region ``k`` is the
    half-open interval ``[eps_{k-1}, eps_k)`` with ``eps_0 = 0``.  Privacy
    levels at or above ``eps_{N-1}`` form region ``N``, where a column may
    release a single symbol deterministically.  For a uniform prior
    ``eps_{N-1} == eps_max`` so region ``N`` contains only ``eps >= eps_max``.
    """

    boundaries: tuple[float, ...]
    eps_max: float

    @property
    def n(self) -> int:
        return len(self.boundaries) + 1

    def lower(self, k: int) -> float:
        """``eps_{k-1}``, the left end of region ``k``."""
        return 0.0 if k == 1 else self.boundaries[k - 2]

    def upper(self, k: int) -> float:
        """Right end of region ``k`` (``eps_max`` for the last region)."""
        return self.boundaries[k - 1] if k <= len(self.boundaries) else self.eps_max

    def region_of(self, eps: float) -> int:
        if eps < 0:
            raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
        k = 1
        for b in self.boundaries:
            if eps >= b or abs(eps - b) <= SNAP_TOL:
                k += 1
            else:
                break
        return k


def region_table(prior: Prior) -> RegionTable:
    p = prior.sorted_probs
    n = prior.n
    # head[m] = mass of the m most likely symbols
    head = np.concatenate(([0.0], np.cumsum(p)))
    bounds = tuple(float(-math.log(head[n - k])) for k in range(1, n))
    return RegionTable(boundaries=bounds, eps_max=prior.eps_max)


def region_of(prior: Prior, eps: float) -> int:
    return region_table(prior).region_of(eps)


def max_zeros_per_column(prior: Prior, eps: float) -> int:
    """Most zero entries a positive-mass column of an ``eps``-PML mechanism can hold."""
    return region_of(prior, eps) - 1


def zeros_per_column(mech: Mechanism, tol: float = 1e-12) -> np.ndarray:
    return np.sum(mech.matrix <= tol, axis=0)
