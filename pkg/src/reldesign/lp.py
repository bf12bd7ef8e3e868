"""Dense two-phase simplex for ``min c'z  s.t.  A z <= b``.

Bland's smallest-index rule picks both the entering and the leaving variable,
so the method cannot cycle. Meant for the small, dense programs produced by
the design step, not for general-purpose use.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

PIVOT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPNumericalError(RuntimeError):
    """The simplex iteration cap was hit; distinct from infeasibility."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``min objective @ z`` subject to ``constraint_matrix @ z <= constraint_rhs``.

    With ``nonnegative`` set every variable also satisfies ``z >= 0``; those
    bounds are counted in :attr:`num_constraints`.
    """

    objective: np.ndarray
    constraint_matrix: np.ndarray
    constraint_rhs: np.ndarray
    nonnegative: bool = True

    def __post_init__(self):
        c = np.array(self.objective, dtype=float).reshape(-1)
        A = np.array(self.constraint_matrix, dtype=float)
        b = np.array(self.constraint_rhs, dtype=float).reshape(-1)
        if A.size == 0:
            A = A.reshape(len(b), len(c))
        if A.ndim != 2 or A.shape != (len(b), len(c)):
            raise ValueError(
                f"constraint matrix shape {A.shape} inconsistent with "
                f"{len(b)} rows and {len(c)} variables")
        for name, arr in (("objective", c), ("constraint_matrix", A), ("constraint_rhs", b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "constraint_rhs", b)

    @property
    def num_variables(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.constraint_rhs)

    @property
    def num_constraints(self) -> int:
        return self.num_rows + (self.num_variables if self.nonnegative else 0)

    def to_text(self) -> str:
        """Plain-text tableau dump for debugging."""
        lines = [f"variables {self.num_variables}  rows {self.num_rows}  "
                 f"nonnegative {self.nonnegative}",
                 "min  " + " ".join(f"{v: .6g}" for v in self.objective)]
        for row, rhs in zip(self.constraint_matrix, self.constraint_rhs):
            lines.append("     " + " ".join(f"{v: .6g}" for v in row) + f"  <= {rhs:.6g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LPResult:
    status: str
    z: Optional[np.ndarray] = None
    objective: Optional[float] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _simplex(T, basis, ncols, tol, max_iter, it):
    """Minimize the reduced-cost row ``T[-1]`` in place. Returns (status, iterations)."""
    while True:
        cands = np.flatnonzero(T[-1, :ncols] < -tol)
        if cands.size == 0:
            return OPTIMAL, it
        j = cands[0]
        col = T[:-1, j]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return UNBOUNDED, it
        ratios = T[pos, -1] / col[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
        r = min(ties, key=lambda k: basis[k])
        _pivot(T, r, j)
        basis[r] = j
        it += 1
        if it >= max_iter:
            raise LPNumericalError(f"simplex exceeded {max_iter} pivots")


def solve_lp(lp: LinearProgram, tol: float = PIVOT_TOL,
             max_iter: Optional[int] = None) -> LPResult:
    """Solve ``lp`` and report optimal / infeasible / unbounded.

    Free variables (``nonnegative=False``) are split internally into a
    difference of nonnegative parts.
    """
    c, A, b = lp.objective, lp.constraint_matrix, lp.constraint_rhs
    n_orig = len(c)
    if not lp.nonnegative:
        A = np.hstack([A, -A])
        c = np.concatenate([c, -c])
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000

    neg = np.flatnonzero(b < 0)
    k = len(neg)
    # columns: structural | slack | artificial | rhs
    T = np.zeros((m + 1, n + m + k + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[neg, :-1] *= -1.0
    T[neg, -1] *= -1.0
    basis = np.arange(n, n + m)
    for a, r in enumerate(neg):
        T[r, n + m + a] = 1.0
        basis[r] = n + m + a

    it = 0
    if k:
        T[-1, :] = -T[neg].sum(axis=0)
        T[-1, n + m:n + m + k] = 0.0
        _, it = _simplex(T, basis, n + m + k, tol, max_iter, it)
        infeas = -T[-1, -1]
        if infeas > tol * (1.0 + np.abs(b).max()):
            return LPResult(INFEASIBLE, iterations=it)
        # drive zero-level artificials out of the basis
        for r in range(m):
            if basis[r] >= n + m:
                row = T[r, :n + m]
                nz = np.flatnonzero(np.abs(row) > tol)
                if nz.size:
                    _pivot(T, r, nz[0])
                    basis[r] = nz[0]
        keep = basis < n + m
        T = np.vstack([T[:-1][keep], T[-1:]])
        basis = basis[keep]
        T = np.hstack([T[:, :n + m], T[:, -1:]])

    T[-1, :] = 0.0
    T[-1, :n] = c
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status, it = _simplex(T, basis, n + m, tol, max_iter, it)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=it)

    z = np.zeros(n + m)
    z[basis] = T[:-1, -1]
    z = z[:n]
    z[np.abs(z) < 1e-13] = 0.0
    if not lp.nonnegative:
        z = z[:n_orig] - z[n_orig:]
    return LPResult(OPTIMAL, z, float(lp.objective @ z), it)
