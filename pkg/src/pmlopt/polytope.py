"""Brute-force optimum over the polytope of ``eps``-PML mechanisms.

For a fixed prior the ``N x N`` mechanisms satisfying ``eps``-PML are the
polytope cut out by

* PML rows    ``p_ij - e^eps sum_k pi_k p_kj <= 0``   (``N^2`` rows),
* row sums    ``sum_j p_ij = 1``                    (``N`` rows),
* non-negativity ``p_ij >= 0``                      (``N^2`` bounds).

A convex utility is maximized at a vertex, so enumerating every basic
feasible solution and scoring it gives an exact (if exponential) oracle.
Only meant for ``N <= 4``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import DesignReport, Mechanism, Method, Prior, canonicalize
from .errors import NegativeEpsilon, TooLarge
from .leakage import epsilon_m, region_table
from .utility import ColumnUtility, mechanism_utility

MAX_N = 4
FEAS_TOL = 1e-9
DEDUP_TOL = 1e-9
_SINGULAR_TOL = 1e-10
_BATCH = 8192


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Linear description of the ``eps``-PML polytope over row-major ``p_ij``.

    ``pml_rows @ vec(P) <= 0``, ``stochastic_rows @ vec(P) = 1`` and
    ``vec(P) >= 0`` (``n_nonneg`` bounds).
    """

    pml_rows: np.ndarray
    stochastic_rows: np.ndarray
    n_nonneg: int
    prior: Prior
    eps: float

    @property
    def n(self) -> int:
        return self.prior.n

    def pml_violation(self, mech: Mechanism) -> np.ndarray:
        """PML row values for ``mech``; feasible iff all ``<= 0``."""
        return self.pml_rows @ mech.matrix.reshape(-1)

    def contains(self, mech: Mechanism, tol: float = FEAS_TOL) -> bool:
        m = mech.matrix
        if m.shape != (self.n, self.n):
            return False
        return bool(
            np.all(self.pml_violation(mech) <= tol)
            and np.all(np.abs(self.stochastic_rows @ m.reshape(-1) - 1.0) <= tol)
            and np.all(m >= -tol)
        )


def build_constraints(prior: Prior, eps: float) -> ConstraintSystem:
    if not eps >= 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    n = prior.n
    c = math.exp(eps)
    pml = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            row = i * n + j
            for k in range(n):
                pml[row, k * n + j] = -c * prior.probs[k]
            pml[row, i * n + j] += 1.0
    stoch = np.zeros((n, n * n))
    for i in range(n):
        stoch[i, i * n:(i + 1) * n] = 1.0
    return ConstraintSystem(pml_rows=pml, stochastic_rows=stoch, n_nonneg=n * n, prior=prior, eps=eps)


def _column_constraints(cs: ConstraintSystem) -> np.ndarray:
    """The ``2N`` constraints acting on one column, as rows over its entries.

    Rows ``0..N-1`` are non-negativity (``v_i >= 0``), rows ``N..2N-1`` the
    PML rows (``v_i - e^eps pi . v <= 0``).  They are the same for every
    column, which is what makes the column-wise enumeration below work.
    """
    n = cs.n
    return np.vstack((np.eye(n), cs.pml_rows[np.arange(n) * n, :].reshape(n, n, n)[:, :, 0]))


def _nullspaces(g: np.ndarray) -> dict[int, list[np.ndarray]]:
    """Distinct null spaces of linearly independent subsets of rows of ``g``.

    A column's active constraints are independent and homogeneous, so the
    column is confined to the corresponding null space.  Subsets whose null
    spaces coincide yield identical vertices and are merged.
    """
    n = g.shape[1]
    out: dict[int, list[np.ndarray]] = {d: [] for d in range(n + 1)}
    seen: set[bytes] = set()
    for size in range(n + 1):
        for subset in itertools.combinations(range(g.shape[0]), size):
            rows = g[list(subset)]
            if size:
                _, s, vt = np.linalg.svd(rows)
                if s.min() < _SINGULAR_TOL * max(1.0, s.max()):
                    continue
                basis = vt[size:].T
            else:
                basis = np.eye(n)
            proj = basis @ basis.T
            key = np.round(proj, 9).tobytes()
            if key in seen:
                continue
            seen.add(key)
            out[n - size].append(basis)
    return out


def _dimension_patterns(n: int) -> list[tuple[int, ...]]:
    """Non-increasing ``n``-tuples of column dimensions summing to ``n``."""
    return [p for p in itertools.combinations_with_replacement(range(n, -1, -1), n) if sum(p) == n]


def _choice_arrays(spaces: dict[int, list[np.ndarray]], pattern: tuple[int, ...]) -> np.ndarray | None:
    """Index array ``(batch, N)``: one row per multiset of column spaces for ``pattern``.

    Column ``t`` of a row indexes into ``spaces[pattern[t]]``.  Equal
    dimensions are combined with replacement, since column order is
    irrelevant up to permutation.
    """
    groups = [(d, pattern.count(d)) for d in sorted(set(pattern), reverse=True)]
    parts = []
    for d, cnt in groups:
        if not spaces[d]:
            return None
        combos = np.array(list(itertools.combinations_with_replacement(range(len(spaces[d])), cnt)), dtype=np.int64)
        parts.append(combos.reshape(-1, cnt))
    out = parts[0]
    for part in parts[1:]:
        left = np.repeat(out, part.shape[0], axis=0)
        right = np.tile(part, (out.shape[0], 1))
        out = np.hstack((left, right))
    return out


def _unique(mats: list[np.ndarray], tol: float) -> list[np.ndarray]:
    """First occurrence of every matrix, merging those within ``tol`` (max-abs).

    Candidates are bucketed on a coarse rounding so only near neighbours are
    compared.
    """
    buckets: dict[bytes, list[np.ndarray]] = {}
    kept: list[np.ndarray] = []
    for m in mats:
        bucket = buckets.setdefault(np.round(m, 7).tobytes(), [])
        if not any(np.max(np.abs(m - k)) <= tol for k in bucket):
            bucket.append(m)
            kept.append(m)
    return kept


def _canonical_array(m: np.ndarray) -> np.ndarray:
    return canonicalize(Mechanism(m)).matrix


def _sort_key(m: np.ndarray) -> tuple[float, ...]:
    return tuple(-np.round(m.reshape(-1), 9))


def _solve_batch(stacked: dict[int, np.ndarray], pattern: tuple[int, ...], choice: np.ndarray,
                 g_pml: np.ndarray, pi: np.ndarray, c: float) -> list[np.ndarray]:
    """Solve the row-sum systems for a batch of column-space choices; keep feasible ones."""
    n = len(pattern)
    blocks = [stacked[d][choice[:, t]] for t, d in enumerate(pattern)]
    systems = np.concatenate(blocks, axis=2)
    ok = np.abs(np.linalg.det(systems)) > _SINGULAR_TOL
    if not ok.any():
        return []
    blocks = [b[ok] for b in blocks]
    coeffs = np.linalg.solve(systems[ok], np.ones((int(ok.sum()), n, 1)))[..., 0]
    cols = []
    start = 0
    for b, d in zip(blocks, pattern):
        cols.append(np.einsum("bnd,bd->bn", b, coeffs[:, start:start + d]))
        start += d
    p = np.stack(cols, axis=2)
    # PML slack is measured relative to the column's output mass so that a
    # column of negligible mass cannot pass with an arbitrarily large ratio
    mass = np.einsum("n,bnj->bj", pi, p)
    slack = np.einsum("kn,bnj->bkj", g_pml, p) - FEAS_TOL * c * mass[:, None, :]
    feasible = (
        (p.min(axis=(1, 2)) >= -FEAS_TOL)
        & (slack.max(axis=(1, 2)) <= 0.0)
        & (np.abs(p.sum(axis=2) - 1.0).max(axis=1) <= FEAS_TOL)
    )
    p = np.clip(p[feasible], 0.0, 1.0)
    p = p / p.sum(axis=2, keepdims=True)
    return list(p)


def enumerate_vertices(cs: ConstraintSystem) -> list[Mechanism]:
    """All vertices (basic feasible solutions) of the ``eps``-PML polytope.

    Every vertex is fixed by ``N^2 - N`` active inequalities together with the
    ``N`` row sums.  The active inequalities inside a column are homogeneous in
    that column, so each column lies in a null space of its active set and the
    row sums leave an ``N x N`` linear system for the remaining coordinates.
    Active sets are combined up to column permutation and the resulting
    vertices are expanded back over all column permutations.

    Candidates are kept when entries are ``>= -1e-9``, row sums are within
    ``1e-9`` and every column leaks at most ``eps`` up to a relative ``1e-9``
    (the tolerance of :func:`pmlopt.leakage.satisfies`).

    Returns
    -------
    list of Mechanism
        Each vertex once (within ``1e-9``), ordered by descending row-major
        entries.

    Raises
    ------
    TooLarge
        If ``N > 4``.
    """
    n = cs.n
    if n > MAX_N:
        raise TooLarge(f"vertex enumeration is limited to N <= {MAX_N}, got N = {n}")
    g = _column_constraints(cs)
    g_pml = g[n:]
    spaces = _nullspaces(g)
    stacked = {d: np.array(v).reshape(len(v), n, d) for d, v in spaces.items()}

    found: list[np.ndarray] = []
    for pattern in _dimension_patterns(n):
        choice = _choice_arrays(spaces, pattern)
        if choice is None:
            continue
        for lo in range(0, choice.shape[0], _BATCH):
            found.extend(_solve_batch(stacked, pattern, choice[lo:lo + _BATCH], g_pml, cs.prior.probs,
                                      math.exp(cs.eps)))

    canon = [_canonical_array(p) for p in _unique(found, DEDUP_TOL)]
    classes = _unique(canon, DEDUP_TOL)
    everything = []
    for m in classes:
        everything.extend(m[:, list(perm)] for perm in itertools.permutations(range(n)))
    vertices = _unique(everything, DEDUP_TOL)
    vertices.sort(key=_sort_key)
    return [Mechanism(v) for v in vertices]


def oracle_optimum(prior: Prior, eps: float, u: ColumnUtility) -> DesignReport:
    """Best vertex of the ``eps``-PML polytope under utility ``u``.

    Ties are resolved in favour of the first vertex in canonical order.
    """
    if prior.n > MAX_N:
        raise TooLarge(f"oracle is limited to N <= {MAX_N}, got N = {prior.n}")
    cs = build_constraints(prior, eps)
    vertices = enumerate_vertices(cs)
    scores = np.array([mechanism_utility(u, v) for v in vertices])
    best = int(np.flatnonzero(scores >= scores.max() - 1e-12)[0])
    mech = vertices[best]
    return DesignReport(
        mechanism=mech,
        epsilon_requested=eps,
        epsilon_achieved=epsilon_m(mech, prior),
        utility=float(scores[best]),
        method=Method.ORACLE,
        prior=prior,
        diagnostics={"region": region_table(prior).region_of(eps), "n_vertices": len(vertices)},
    )
