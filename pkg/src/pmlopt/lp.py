"""PML-optimal mechanisms for arbitrary priors via lift vectors.

A column ``P_j`` of a mechanism factors as ``rho_j * lam_j`` where
``rho_j = P(Y = y_j)`` and ``lam_j[i] = P(X = x_i | Y = y_j) / pi_i`` is the
lift vector.  ``eps``-PML restricts every lift to the polytope

    V = { lam in [0, e^eps]^N : sum_i pi_i lam_i = 1 },

and, because a sub-convex utility is ``sum_j rho_j mu(lam_j)`` with ``mu``
convex, an optimal mechanism only needs the vertices of ``V``.  Choosing the
output weights ``rho`` over those vertices is then a linear program.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DesignReport, Mechanism, Method, Prior, identity_mechanism, make_mechanism
from .errors import EpsilonOutOfRange, InconsistentWeights, LiftNotNormalized, NegativeEpsilon
from .leakage import epsilon_m, region_table
from .simplex import solve_lp
from .utility import ColumnUtility, lift_utilities, mechanism_utility

LIFT_DEDUP_TOL = 1e-12
SUPPORT_TOL = 1e-12
WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LiftSet:
    """Candidate lift vectors, one per row of ``vertices``."""

    vertices: np.ndarray
    region: int
    epsilon: float

    def __len__(self) -> int:
        return int(self.vertices.shape[0])


def lift_count_bound(n: int, k: int) -> int:
    """Upper bound on the number of lift vertices in privacy region ``k``."""
    return sum((n - l + 1) * math.comb(n, l - 1) for l in range(1, k + 1))


def check_lift(lift: np.ndarray, prior: Prior, eps: float, tol: float = 1e-9) -> None:
    """Raise if ``lift`` violates the box, normalization or support-mass conditions."""
    lam = np.asarray(lift, dtype=float)
    c = math.exp(eps)
    if lam.min() < -tol or lam.max() > c * (1 + tol) + tol:
        raise LiftNotNormalized(f"lift leaves the box [0, e^eps]: {lam.tolist()}")
    norm = float(prior.probs @ lam)
    if abs(norm - 1.0) > tol:
        raise LiftNotNormalized(f"sum_i pi_i lam_i = {norm!r}, expected 1")
    if prior.probs[lam > 0].sum() < math.exp(-eps) - tol:
        raise LiftNotNormalized("support of lift carries less than e^-eps prior mass")


def enumerate_lift_vertices(prior: Prior, eps: float) -> LiftSet:
    """Vertices of the feasible lift polytope.

    For each support size ``N - l + 1`` (``l = 1 .. k``, ``k`` the privacy
    region) and each support set ``J`` holding at least ``e^-eps`` prior
    mass, every ``j in J`` in turn absorbs the slack: all other members of
    ``J`` are set to ``e^eps`` and ``lam_j`` solves the normalization,
    provided it is non-negative.  Entries outside ``J`` are zero.
    Duplicates (which arise when ``lam_j`` lands exactly on zero) are removed
    keeping first occurrence.

    Raises
    ------
    EpsilonOutOfRange
        If ``eps`` is negative or at least ``eps_max``.
    """
    if not eps >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    if eps >= prior.eps_max:
        raise EpsilonOutOfRange(f"eps = {eps} must be below eps_max = {prior.eps_max}")
    n = prior.n
    pi = prior.probs
    k = region_table(prior).region_of(eps)
    c = math.exp(eps)
    floor = math.exp(-eps)
    found: list[np.ndarray] = []
    for l in range(1, k + 1):
        for support in itertools.combinations(range(n), n - l + 1):
            mass = float(pi[list(support)].sum())
            if mass < floor - SUPPORT_TOL:
                continue
            for j in support:
                rest = c * (mass - pi[j])
                if rest > 1.0 + SUPPORT_TOL:
                    continue
                lam = np.zeros(n)
                lam[list(support)] = c
                lam[j] = max(0.0, (1.0 - rest) / pi[j])
                if not any(np.max(np.abs(lam - v)) <= LIFT_DEDUP_TOL for v in found):
                    found.append(lam)
    vertices = np.array(found) if found else np.zeros((0, n))
    for v in vertices:
        check_lift(v, prior, eps)
    return LiftSet(vertices=vertices, region=k, epsilon=eps)


def solve_weights(lifts: LiftSet, prior: Prior, u: ColumnUtility) -> tuple[np.ndarray, float]:
    """Output weights over ``lifts`` that maximize ``sum_j w_j mu(lam_j)``.

    Constraints: ``sum_j w_j = 1``, ``sum_j w_j lam_j[i] = 1`` for every
    symbol ``i``, ``w >= 0``.  Returns the weight vector (aligned with
    ``lifts.vertices``, at most ``N`` non-zeros) and the objective.
    """
    lam = lifts.vertices
    if lam.shape[0] == 0:
        raise EpsilonOutOfRange("empty lift set")
    scores = lift_utilities(u, lam)
    a_eq = np.vstack((np.ones(lam.shape[0]), lam.T))
    b_eq = np.ones(prior.n + 1)
    res = solve_lp(scores, a_eq, b_eq)
    return res.x, res.objective


def reconstruct(lifts: np.ndarray, weights: Sequence[float], prior: Prior) -> Mechanism:
    """Mechanism with columns ``w_j * lam_j`` for every positive weight."""
    lam = np.atleast_2d(np.asarray(lifts, dtype=float))
    w = np.asarray(weights, dtype=float)
    if np.any(w < -WEIGHT_TOL):
        raise InconsistentWeights("negative output weight")
    keep = w > WEIGHT_TOL
    cols = (lam[keep] * w[keep, None]).T
    rows = cols.sum(axis=1)
    if cols.size == 0 or np.max(np.abs(rows - 1.0)) > 1e-8:
        raise InconsistentWeights(f"rebuilt rows sum to {rows.tolist()}")
    return make_mechanism(cols, tol=1e-8)


def lp_optimal(prior: Prior, eps: float, u: ColumnUtility) -> DesignReport:
    """End-to-end LP design; ``eps >= eps_max`` returns the identity."""
    if not eps >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    if eps >= prior.eps_max:
        mech = identity_mechanism(prior.n)
        return DesignReport(mech, eps, epsilon_m(mech, prior), mechanism_utility(u, mech), Method.LP, prior,
                            {"region": region_table(prior).region_of(eps), "n_lifts": 0})
    lifts = enumerate_lift_vertices(prior, eps)
    weights, objective = solve_weights(lifts, prior, u)
    keep = weights > WEIGHT_TOL
    mech = reconstruct(lifts.vertices[keep], weights[keep], prior)
    return DesignReport(
        mechanism=mech,
        epsilon_requested=eps,
        epsilon_achieved=epsilon_m(mech, prior),
        utility=mechanism_utility(u, mech),
        method=Method.LP,
        prior=prior,
        diagnostics={"region": lifts.region, "n_lifts": len(lifts), "lp_objective": objective,
                     "lift_bound": lift_count_bound(prior.n, lifts.region)},
    )
