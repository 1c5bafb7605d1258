"""Closed-form PML-optimal mechanisms.

All constructions are carried out on the prior sorted by non-increasing
probability and mapped back to the caller's symbol order with
:func:`pmlopt.core.permute_symbols`.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Mechanism, Prior, identity_mechanism, make_mechanism, make_prior, permute_symbols
from .errors import BadAlphabet, NegativeEpsilon, NotHighPrivacy
from .leakage import SNAP_TOL, region_table

NEG_SNAP = 1e-12


def _snap(m: np.ndarray) -> np.ndarray:
    m = np.where((m < 0) & (m > -NEG_SNAP), 0.0, m)
    return m


def _check_eps(eps: float) -> None:
    if not eps >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")


def binary_optimal(prior: Prior, eps: float) -> Mechanism:
    """Optimal mechanism for a binary secret.

    With ``pi_1 >= pi_2`` the sorted prior and ``c = e^eps``::

        pi_1 < 1/c :  [[c pi_2,            1 - c pi_2        ],
                       [1 - c pi_1,        c pi_1            ]]
        otherwise  :  [[(c - 1)/(c pi_1),  (1 - c pi_2)/(c pi_1)],
                       [0,                 1                 ]]

    The second branch randomizes only the likely symbol.  ``eps >= eps_max``
    returns the identity.
    """
    if prior.n != 2:
        raise BadAlphabet(f"binary_optimal needs N = 2, got N = {prior.n}")
    _check_eps(eps)
    if eps >= prior.eps_max:
        return identity_mechanism(2)
    pi1, pi2 = prior.sorted_probs
    c = math.exp(eps)
    if pi1 < 1.0 / c:
        m = np.array([[c * pi2, 1.0 - c * pi2], [1.0 - c * pi1, c * pi1]])
    else:
        m = np.array([[(c - 1.0) / (c * pi1), (1.0 - c * pi2) / (c * pi1)], [0.0, 1.0]])
    return make_mechanism(permute_symbols(_snap(m), prior))


def binary_branches(prior: Prior, eps: float) -> tuple[Mechanism, Mechanism]:
    """Both branches of :func:`binary_optimal`, evaluated without the branch test.

    Only meaningful where both are valid mechanisms, i.e. near
    ``pi_1 = e^{-eps}``; used to check that the branches meet continuously.
    Entries are clamped into ``[0, 1]`` since one branch is slightly outside
    its domain on either side of the switch.
    """
    pi1, pi2 = prior.sorted_probs
    c = math.exp(eps)
    first = np.array([[c * pi2, 1.0 - c * pi2], [1.0 - c * pi1, c * pi1]])
    second = np.array([[(c - 1.0) / (c * pi1), (1.0 - c * pi2) / (c * pi1)], [0.0, 1.0]])
    out = []
    for m in (first, second):
        m = np.clip(m, 0.0, 1.0)
        m = m / m.sum(axis=1, keepdims=True)
        out.append(Mechanism(permute_symbols(m, prior)))
    return out[0], out[1]


def high_privacy_optimal(prior: Prior, eps: float) -> Mechanism:
    """Optimal mechanism in the first privacy region, ``0 <= eps < eps_1``.

    Output ``j`` is emitted with probability ``e^eps pi_j`` by every symbol
    other than ``x_j`` and with ``1 - e^eps (1 - pi_j)`` by ``x_j`` itself, so
    observing ``y_j`` mildly suggests that the secret is *not* ``x_j``.  The
    output distribution equals the prior and every column leaks exactly
    ``eps``.

    Raises
    ------
    NotHighPrivacy
        If ``eps`` is outside the first privacy region.
    """
    _check_eps(eps)
    table = region_table(prior)
    eps_1 = table.upper(1)
    if eps >= eps_1 or abs(eps - eps_1) <= SNAP_TOL:
        raise NotHighPrivacy(f"eps = {eps} is not below eps_1 = {eps_1}")
    p = prior.sorted_probs
    c = math.exp(eps)
    m = np.tile(c * p, (prior.n, 1))
    np.fill_diagonal(m, 1.0 - c * (1.0 - p))
    return make_mechanism(permute_symbols(_snap(m), prior))


def _uniform_region(n: int, eps: float) -> int:
    return region_table(make_prior(np.full(n, 1.0 / n))).region_of(eps)


def uniform_optimal(n: int, eps: float) -> Mechanism:
    """Optimal mechanism for a uniform prior on ``n`` symbols, any region.

    In region ``k`` column ``j`` carries ``e^eps / n`` on the ``n - k`` rows
    that follow ``j`` cyclically, ``1 - (n - k) e^eps / n`` on row ``j`` and
    zeros elsewhere.  The matrix is doubly stochastic.  ``eps >= log n``
    returns the identity.
    """
    if n < 2:
        raise BadAlphabet(f"uniform_optimal needs N >= 2, got N = {n}")
    _check_eps(eps)
    if eps >= math.log(n):
        return identity_mechanism(n)
    k = _uniform_region(n, eps)
    c = math.exp(eps)
    m = np.zeros((n, n))
    for j in range(n):
        m[j, j] = 1.0 - c * (n - k) / n
        for t in range(1, n - k + 1):
            m[(j + t) % n, j] = c / n
    return make_mechanism(_snap(m))


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def uniform_optimal_mi(n: int, eps: float) -> float:
    """Mutual information (nats) achieved by :func:`uniform_optimal`.

    ``log n - H(e^eps/n, ..., e^eps/n, 1 - (n - k) e^eps/n)`` with ``n - k``
    repeated terms.
    """
    if n < 2:
        raise BadAlphabet(f"uniform_optimal_mi needs N >= 2, got N = {n}")
    _check_eps(eps)
    if eps >= math.log(n):
        return math.log(n)
    k = _uniform_region(n, eps)
    c = math.exp(eps)
    col = np.concatenate((np.full(n - k, c / n), [max(0.0, 1.0 - (n - k) * c / n)]))
    return math.log(n) - _entropy(col)


def high_privacy_limit(prior: Prior) -> float:
    """``eps_1``: supremum of the high-privacy regime."""
    return region_table(prior).upper(1)

