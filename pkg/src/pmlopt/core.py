"""Priors, mechanisms and design reports.

A mechanism is an ``N x M`` row-stochastic matrix whose entry ``(i, j)`` is the
probability of releasing output ``j`` when the secret is symbol ``i``.  Rows
are always indexed in the caller's symbol order; routines that need the prior
sorted by non-increasing probability (the closed forms, the privacy regions)
work on ``prior.sorted_probs`` and map results back through ``prior.order``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidMechanism, NotNormalized, PMLError, ZeroMassSymbol

PRIOR_SUM_TOL = 1e-9
ROW_SUM_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Prior:
    """Full-support distribution of the secret.

    Attributes
    ----------
    probs : ndarray, shape (N,)
        Probabilities in the caller's symbol order, summing to one.
    order : ndarray of int, shape (N,)
        Stable descending argsort of ``probs``: ``probs[order]`` is
        non-increasing and ties keep the caller's order.
    """

    probs: np.ndarray
    order: np.ndarray

    @property
    def n(self) -> int:
        return int(self.probs.shape[0])

    @property
    def sorted_probs(self) -> np.ndarray:
        return self.probs[self.order]

    @property
    def rank(self) -> np.ndarray:
        """Inverse of ``order``: position of each user symbol in sorted order."""
        rank = np.empty(self.n, dtype=int)
        rank[self.order] = np.arange(self.n)
        return rank

    @property
    def p_min(self) -> float:
        return float(self.probs.min())

    @property
    def eps_max(self) -> float:
        """Largest leakage any mechanism can incur, ``-log min_i P_X(x_i)``."""
        return -math.log(self.p_min)

    @property
    def entropy(self) -> float:
        return float(-np.sum(self.probs * np.log(self.probs)))

    def is_uniform(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.probs - 1.0 / self.n) <= tol))

    def to_dict(self) -> dict[str, Any]:
        return {"probs": self.probs.tolist(), "order": self.order.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Prior:
        return make_prior(data["probs"])

    def __repr__(self) -> str:
        return f"Prior(probs={self.probs.tolist()})"


def make_prior(probs: Sequence[float]) -> Prior:
    """Validate ``probs`` and build a :class:`Prior`.

    Sums within ``1e-9`` of one are renormalized so decimal input such as
    ``0.33, 0.33, 0.34`` is accepted as typed.

    Raises
    ------
    ZeroMassSymbol
        If any entry is not strictly positive.
    NotNormalized
        If the entries do not sum to one within ``1e-9``.
    """
    arr = np.asarray(probs, dtype=float).reshape(-1)
    if arr.size == 0:
        raise NotNormalized("prior is empty")
    if not np.all(np.isfinite(arr)):
        raise NotNormalized("prior has non-finite entries")
    if np.any(arr <= 0.0):
        raise ZeroMassSymbol(f"prior must have full support, got {arr.tolist()}")
    total = float(arr.sum())
    if abs(total - 1.0) > PRIOR_SUM_TOL:
        raise NotNormalized(f"prior sums to {total!r}, not 1")
    arr = arr / total
    order = np.argsort(-arr, kind="stable")
    return Prior(_frozen(arr), _frozen_int(order))


def _frozen_int(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=int)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mechanism:
    """Row-stochastic privacy mechanism ``P[i, j] = P(Y = y_j | X = x_i)``."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
            raise InvalidMechanism(f"mechanism must be a non-empty 2-D matrix, got shape {m.shape}")
        _check_stochastic(m, ROW_SUM_TOL)
        m = np.clip(m, 0.0, 1.0)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_inputs(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_outputs(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, j] for j in range(self.n_outputs)]

    def to_dict(self) -> dict[str, Any]:
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any], tol: float = ROW_SUM_TOL) -> Mechanism:
        return make_mechanism(data["matrix"], tol=tol)

    def __repr__(self) -> str:
        return f"Mechanism({np.array2string(self.matrix, precision=6)})"


def _check_stochastic(m: np.ndarray, tol: float) -> None:
    if not np.all(np.isfinite(m)):
        raise InvalidMechanism("mechanism has non-finite entries")
    if m.min() < -tol or m.max() > 1.0 + tol:
        raise InvalidMechanism(f"mechanism entries must lie in [0, 1], got range [{m.min()}, {m.max()}]")
    dev = np.abs(m.sum(axis=1) - 1.0)
    if dev.max() > tol:
        bad = int(dev.argmax())
        raise InvalidMechanism(f"row {bad} sums to {m[bad].sum()!r}, not 1 (tolerance {tol:g})")


def make_mechanism(matrix: Any, tol: float = ROW_SUM_TOL) -> Mechanism:
    """Validate at tolerance ``tol``, clamp to ``[0, 1]`` and renormalize rows."""
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidMechanism(f"mechanism must be a non-empty 2-D matrix, got shape {m.shape}")
    _check_stochastic(m, tol)
    m = np.clip(m, 0.0, 1.0)
    m = m / m.sum(axis=1, keepdims=True)
    return Mechanism(m)


def identity_mechanism(n: int) -> Mechanism:
    return Mechanism(np.eye(n))


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    """Marginal of the released symbol, ``probs[j] = sum_i prior_i P[i, j]``."""

    probs: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0.0


def output_distribution(mech: Mechanism, prior: Prior) -> OutputDistribution:
    if mech.n_inputs != prior.n:
        raise DimensionMismatch(f"mechanism has {mech.n_inputs} rows but prior has {prior.n} symbols")
    return OutputDistribution(_frozen(prior.probs @ mech.matrix))


def canonicalize(mech: Mechanism) -> Mechanism:
    """Representative of the column-permutation class of ``mech``.

    Columns are sorted lexicographically in descending order (first row is the
    primary key).  Sort keys are rounded to 10 decimals so float noise cannot
    reorder columns that agree to that precision.
    """
    m = mech.matrix
    keys = np.round(m, 10)
    # np.lexsort treats the last key as primary.
    idx = np.lexsort(tuple(-keys[i] for i in range(m.shape[0] - 1, -1, -1)))
    return Mechanism(m[:, idx])


def equivalent(a: Mechanism, b: Mechanism, atol: float = 1e-12) -> bool:
    """True when ``a`` and ``b`` differ only by a permutation of columns."""
    if a.matrix.shape != b.matrix.shape:
        return False
    return bool(np.allclose(canonicalize(a).matrix, canonicalize(b).matrix, rtol=0.0, atol=atol))


def permute_symbols(sorted_matrix: np.ndarray, prior: Prior) -> np.ndarray:
    """Map a square matrix built for ``prior.sorted_probs`` back to user order.

    Rows and columns are relabelled together, so an output that is tied to a
    particular input symbol (e.g. the diagonal of a closed form) stays attached
    to that symbol in the user's labelling.
    """
    rank = prior.rank
    out = sorted_matrix[rank]
    if sorted_matrix.shape[1] == prior.n:
        out = out[:, rank]
    return out


class Method(str, enum.Enum):
    BINARY = "binary"
    HIGH_PRIVACY = "high_privacy"
    UNIFORM = "uniform"
    LP = "lp"
    ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class DesignReport:
    """Outcome of a mechanism design call.

    ``epsilon_*`` are in nats. ``diagnostics`` carries method-specific details
    (privacy region, LP size, vertex counts, ...).
    """

    mechanism: Mechanism
    epsilon_requested: float
    epsilon_achieved: float
    utility: float
    method: Method
    prior: Prior
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        if self.epsilon_achieved > self.epsilon_requested + 1e-9:
            raise PMLError(
                f"designed mechanism leaks {self.epsilon_achieved!r} nats, "
                f"more than the requested {self.epsilon_requested!r}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "mechanism": self.mechanism.to_dict(),
            "epsilon_requested": self.epsilon_requested,
            "epsilon_achieved": self.epsilon_achieved,
            "utility": self.utility,
            "method": self.method.value,
            "prior": self.prior.to_dict(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DesignReport:
        return cls(
            mechanism=Mechanism.from_dict(data["mechanism"], tol=1e-9),
            epsilon_requested=float(data["epsilon_requested"]),
            epsilon_achieved=float(data["epsilon_achieved"]),
            utility=float(data["utility"]),
            method=Method(data["method"]),
            prior=Prior.from_dict(data["prior"]),
            diagnostics=dict(data.get("diagnostics", {})),
        )
