"""Dense two-phase primal simplex for small standard-form LPs.

Solves ``max c @ x  s.t.  A @ x = b, x >= 0`` on a full tableau.  Pivoting
follows Bland's rule (smallest eligible entering index, smallest basic index
among ratio ties), which rules out cycling at the cost of speed; the programs
solved here have at most a few hundred columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, Unbounded

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    basis: tuple[int, ...]
    iterations: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * t[row]


def _run(t: np.ndarray, basis: list[int], n_cols: int, tol: float, max_iter: int) -> int:
    """Pivot until no reduced cost in the first ``n_cols`` columns is negative."""
    m = t.shape[0] - 1
    it = 0
    while True:
        obj = t[m, :n_cols]
        entering = np.flatnonzero(obj < -tol)
        if entering.size == 0:
            return it
        col = int(entering[0])
        column = t[:m, col]
        eligible = np.flatnonzero(column > tol)
        if eligible.size == 0:
            raise Unbounded(f"objective unbounded along column {col}")
        ratios = t[eligible, -1] / column[eligible]
        best = ratios.min()
        ties = eligible[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit reached")


def solve_lp(c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray, tol: float = PIVOT_TOL,
             max_iter: int = 10_000) -> LPResult:
    """Maximize ``c @ x`` subject to ``a_eq @ x = b_eq`` and ``x >= 0``.

    Returns a basic optimal solution.  Redundant equality rows are detected
    after phase 1 and dropped.

    Raises
    ------
    Infeasible
        If phase 1 cannot drive the artificial variables to zero.
    Unbounded
        If the objective has no finite maximum.
    """
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1 tableau: [A | I | b] with objective  max -sum(artificials)
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, :n] = -a.sum(axis=0)
    t[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _run(t, basis, n + m, tol, max_iter)

    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -t[m, -1] > 1e-9 * scale:
        raise Infeasible(f"equality constraints infeasible (phase-1 residual {-t[m, -1]:.3g})")

    # drive zero-valued artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            candidates = np.flatnonzero(np.abs(t[r, :n]) > tol)
            if candidates.size == 0:
                continue
            col = int(candidates[0])
            _pivot(t, r, col)
            basis[r] = col
        keep.append(r)
    t = np.vstack((t[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))))
    basis = [basis[r] for r in keep]
    m = len(keep)

    # phase 2 objective row: reduced costs of  max c @ x
    t[m, :n] = -c
    for r, j in enumerate(basis):
        if c[j] != 0.0:
            t[m] += c[j] * t[r]
    iters += _run(t, basis, n, tol, max_iter)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = max(0.0, t[r, -1])
    return LPResult(x=x, objective=float(c @ x), basis=tuple(basis), iterations=iters)
