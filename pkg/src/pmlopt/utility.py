"""Sub-convex utilities and empirical estimators.

A sub-convex utility scores a mechanism column by column,
``U(P) = sum_j mu(P_j)``, with ``mu`` positively homogeneous and subadditive.
Two instances are built in, both weighted by the prior ``pi``:

* mutual information, ``mu(v) = sum_i pi_i v_i log(v_i / (pi . v))``, so that
  ``U(P) = I(X; Y)``;
* total-variation information, ``mu(v) = sum_i pi_i |v_i - pi . v|``.

Writing a column as ``v = rho * lam`` with ``rho = pi . v`` the output mass and
``lam`` the lift vector gives ``mu(v) = rho * mu(lam)``; the lift forms are
``sum_i pi_i lam_i log lam_i`` and ``sum_i pi_i |lam_i - 1|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Mechanism, Prior
from .errors import DegenerateVariance, DimensionMismatch, EmptySample, LiftNotNormalized

LIFT_NORM_TOL = 1e-9


class UtilityKind(str, enum.Enum):
    MUTUAL_INFORMATION = "mutual_information"
    TV_INFORMATION = "tv_information"

    @classmethod
    def parse(cls, name: str) -> UtilityKind:
        aliases = {"mi": cls.MUTUAL_INFORMATION, "tv": cls.TV_INFORMATION}
        return aliases.get(name, None) or cls(name)


@dataclass(frozen=True)
class ColumnUtility:
    kind: UtilityKind
    prior: Prior

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", UtilityKind.parse(self.kind) if isinstance(self.kind, str) else self.kind)


def mi_utility(prior: Prior) -> ColumnUtility:
    return ColumnUtility(UtilityKind.MUTUAL_INFORMATION, prior)


def tv_utility(prior: Prior) -> ColumnUtility:
    return ColumnUtility(UtilityKind.TV_INFORMATION, prior)


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # 0 log 0 := 0
    out = np.zeros(np.broadcast(x, y).shape)
    pos = x > 0
    np.multiply(x, np.log(np.where(pos, y, 1.0)), out=out, where=pos)
    return out


def column_utility(u: ColumnUtility, column: Sequence[float]) -> float:
    v = np.asarray(column, dtype=float)
    pi = u.prior.probs
    if v.shape != pi.shape:
        raise DimensionMismatch(f"column has {v.size} entries, prior has {pi.size}")
    rho = float(pi @ v)
    if rho <= 0.0:
        return 0.0
    if u.kind is UtilityKind.MUTUAL_INFORMATION:
        return max(0.0, float(np.sum(pi * _xlogy(v, v / rho))))
    return float(np.sum(pi * np.abs(v - rho)))


def mechanism_utility(u: ColumnUtility, mech: Mechanism) -> float:
    if mech.n_inputs != u.prior.n:
        raise DimensionMismatch(f"mechanism has {mech.n_inputs} rows, prior has {u.prior.n} symbols")
    return float(sum(column_utility(u, mech.matrix[:, j]) for j in range(mech.n_outputs)))


def lift_utility(u: ColumnUtility, lift: Sequence[float]) -> float:
    lam = np.asarray(lift, dtype=float)
    pi = u.prior.probs
    if lam.shape != pi.shape:
        raise DimensionMismatch(f"lift has {lam.size} entries, prior has {pi.size}")
    norm = float(pi @ lam)
    if abs(norm - 1.0) > LIFT_NORM_TOL:
        raise LiftNotNormalized(f"sum_i pi_i lam_i = {norm!r}, expected 1")
    if u.kind is UtilityKind.MUTUAL_INFORMATION:
        return max(0.0, float(np.sum(pi * _xlogy(lam, lam))))
    return float(np.sum(pi * np.abs(lam - 1.0)))


def lift_utilities(u: ColumnUtility, lifts: np.ndarray) -> np.ndarray:
    """Vectorised :func:`lift_utility` over the rows of ``lifts``."""
    return np.array([lift_utility(u, row) for row in np.atleast_2d(lifts)])


def mutual_information(prior: Prior, mech: Mechanism) -> float:
    """I(X; Y) in nats computed from the joint distribution."""
    return mechanism_utility(mi_utility(prior), mech)


def empirical_mi(samples: Iterable[tuple[int, int]], alphabet_sizes: tuple[int, int]) -> float:
    """Plug-in mutual information estimate (nats) from ``(x, y)`` index pairs.

    ``sum_ij (c_ij / n) log(n c_ij / (c_i c_j))`` over observed cells, where
    ``n`` is the number of samples.
    """
    pairs = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=int)
    if pairs.size == 0:
        raise EmptySample("empirical_mi needs at least one sample")
    pairs = pairs.reshape(-1, 2)
    return empirical_mi_arrays(pairs[:, 0], pairs[:, 1], alphabet_sizes)


def empirical_mi_arrays(x: np.ndarray, y: np.ndarray, alphabet_sizes: tuple[int, int]) -> float:
    n_x, n_y = alphabet_sizes
    x = np.asarray(x, dtype=int)
    y = np.asarray(y, dtype=int)
    n = x.size
    if n == 0:
        raise EmptySample("empirical_mi needs at least one sample")
    if x.min() < 0 or x.max() >= n_x or y.min() < 0 or y.max() >= n_y:
        raise DimensionMismatch("sample index outside the declared alphabet")
    counts = np.bincount(x * n_y + y, minlength=n_x * n_y).reshape(n_x, n_y).astype(float)
    cx = counts.sum(axis=1, keepdims=True)
    cy = counts.sum(axis=0, keepdims=True)
    pos = counts > 0
    terms = np.zeros_like(counts)
    terms[pos] = counts[pos] / n * np.log(n * counts[pos] / (cx @ cy)[pos])
    return max(0.0, float(terms.sum()))


def pearson(samples: Iterable[tuple[float, float]]) -> float:
    """Sample Pearson correlation of ``(x, y)`` pairs."""
    pairs = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    pairs = pairs.reshape(-1, 2)
    return pearson_arrays(pairs[:, 0], pairs[:, 1])


def pearson_arrays(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise DegenerateVariance("pearson needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateVariance("a coordinate is constant")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))
