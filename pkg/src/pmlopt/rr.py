"""Randomized response analysed under PML.

Randomized response with LDP parameter ``eps_r`` reports the true symbol with
probability ``e^eps_r / (N - 1 + e^eps_r)`` and any other fixed symbol with
probability ``1 / (N - 1 + e^eps_r)``.  Because the matrix is doubly
stochastic its output distribution equals the prior, and the leakage of output
``y_j`` is ``eps_r - log((e^eps_r - 1) pi_j + 1)``: largest for the least
likely symbol and never above ``eps_r``.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Mechanism, Prior
from .errors import BadAlphabet, EpsilonOutOfRange, NegativeEpsilon


def randomized_response(n: int, eps_r: float) -> Mechanism:
    if n < 2:
        raise BadAlphabet(f"randomized response needs N >= 2, got N = {n}")
    if not eps_r >= 0:
        raise NegativeEpsilon(f"eps_r must be non-negative, got {eps_r}")
    # divide through by e^eps_r so large eps_r does not overflow
    t = math.exp(-eps_r)
    denom = 1.0 + (n - 1) * t
    m = np.full((n, n), t / denom)
    np.fill_diagonal(m, 1.0 / denom)
    return Mechanism(m)


def rr_pml_per_outcome(prior: Prior, eps_r: float) -> np.ndarray:
    """Leakage of each output of ``randomized_response(prior.n, eps_r)``."""
    if not eps_r >= 0:
        raise NegativeEpsilon(f"eps_r must be non-negative, got {eps_r}")
    return eps_r - np.log1p(math.expm1(eps_r) * prior.probs)


def rr_worst_case(prior: Prior, eps_r: float) -> float:
    """Worst-case PML of randomized response, driven by the rarest symbol."""
    if not eps_r >= 0:
        raise NegativeEpsilon(f"eps_r must be non-negative, got {eps_r}")
    return eps_r - math.log1p(math.expm1(eps_r) * prior.p_min)


def calibrate(prior: Prior, eps_pml: float) -> float:
    """LDP parameter at which randomized response leaks exactly ``eps_pml``.

    Inverse of :func:`rr_worst_case`:
    ``eps_r = eps + log((1 - p_min) / (1 - p_min e^eps))``.

    Raises
    ------
    EpsilonOutOfRange
        If ``eps_pml`` is negative or at least ``eps_max``; no finite
        ``eps_r`` reaches ``eps_max``.
    """
    if not eps_pml >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps_pml}")
    p = prior.p_min
    denom = 1.0 - p * math.exp(eps_pml)
    if eps_pml >= prior.eps_max or denom <= 0.0:
        raise EpsilonOutOfRange(f"eps = {eps_pml} must be below eps_max = {prior.eps_max}")
    # 1 - p e^eps = (1 - p) - p expm1(eps), kept in this form for small eps
    return eps_pml + math.log1p(-p) - math.log1p(-p - p * math.expm1(eps_pml))
