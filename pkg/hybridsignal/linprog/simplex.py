# Copyright (c) 2021-2022, InterDigital Communications, Inc
# All rights reserved.

# Redistribution and use in source and binary forms, with or without
# modification, are permitted (subject to the limitations in the disclaimer
# below) provided that the following conditions are met:

# * Redistributions of source code must retain the above copyright notice,
#   this list of conditions and the following disclaimer.
# * Redistributions in binary form must reproduce the above copyright notice,
#   this list of conditions and the following disclaimer in the documentation
#   and/or other materials provided with the distribution.
# * Neither the name of InterDigital Communications, Inc nor the names of its
#   contributors may be used to endorse or promote products derived from this
#   software without specific prior written permission.

# NO EXPRESS OR IMPLIED LICENSES TO ANY PARTY'S PATENT RIGHTS ARE GRANTED BY
# THIS LICENSE. THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND
# CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT
# NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
# CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
# EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
# PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
# OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
# WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
# OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF
# ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

"""
Dense-tableau primal simplex for bounded variables.

Solves ``max c^T z  s.t.  G z <= h,  A z = b,  lo <= z <= hi`` with finite
lower bounds and possibly infinite upper bounds. Upper bounds are handled
implicitly (nonbasic variables sit at either bound), rows needing it get an
artificial variable for phase 1. Pricing is by largest reduced cost, with
Bland's rule over entering variables, leaving variables and bound flips
during degenerate stretches. The tableau is periodically recomputed from the
original rows to keep the incremental updates from drifting.
"""

import math

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from hybridsignal.exceptions import NumericalError

__all__ = ["LpProblem", "LpSolution", "solve"]

PIVOT_TOL = 1e-9
FEASIBILITY_TOL = 1e-7
MAX_ITERATIONS = 200_000
DEGENERATE_TOL = 1e-12
BLAND_AFTER = 50
REFACTOR_INTERVAL = 100

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _matrix(a, n: int) -> np.ndarray:
    if a is None:
        return np.zeros((0, n))
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, n) if a.size else np.zeros((0, n))


def _vector(a, size: int, fill: float = 0.0) -> np.ndarray:
    if a is None:
        return np.full(size, fill)
    return np.asarray(a, dtype=float).ravel()


@dataclass
class LpProblem:
    """``max c^T z`` subject to ``G z <= h``, ``A z = b`` and ``lo <= z <= hi``.

    Omitted blocks default to empty constraint sets, ``lo = 0`` and
    ``hi = inf``.
    """

    c: np.ndarray
    G: Optional[np.ndarray] = None
    h: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.G = _matrix(self.G, n)
        self.h = _vector(self.h, self.G.shape[0])
        self.A = _matrix(self.A, n)
        self.b = _vector(self.b, self.A.shape[0])
        self.lo = _vector(self.lo, n)
        self.hi = _vector(self.hi, n, math.inf)

        if self.h.size != self.G.shape[0] or self.b.size != self.A.shape[0]:
            raise ValueError("Inconsistent constraint dimensions")
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("Inconsistent bound dimensions")
        finite = (self.c, self.G, self.h, self.A, self.b, self.lo)
        if not all(np.all(np.isfinite(a)) for a in finite):
            raise ValueError("Problem data must be finite (except upper bounds)")
        if np.any(np.isnan(self.hi)) or np.any(self.lo > self.hi):
            raise ValueError("Invalid variable bounds")

    @property
    def num_variables(self) -> int:
        return self.c.size

    def violation(self, z: np.ndarray) -> float:
        """Largest constraint violation of ``z``."""
        parts = [
            np.max(self.G @ z - self.h, initial=0.0),
            np.max(np.abs(self.A @ z - self.b), initial=0.0),
            np.max(self.lo - z, initial=0.0),
            np.max(z - self.hi, initial=0.0),
        ]
        return float(max(parts))


@dataclass
class LpSolution:
    status: str
    value: float = math.nan
    x: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Single-use simplex state over shifted variables ``x = z - lo``."""

    def __init__(self, problem: LpProblem, pivot_tol: float):
        self.pivot_tol = pivot_tol
        n = problem.num_variables
        m_ineq = problem.G.shape[0]
        m_eq = problem.A.shape[0]
        rhs_ineq = problem.h - problem.G @ problem.lo
        rhs_eq = problem.b - problem.A @ problem.lo

        rows = m_ineq + m_eq
        needs_artificial = np.concatenate([rhs_ineq < 0, np.ones(m_eq, dtype=bool)])
        num_artificial = int(needs_artificial.sum())
        self.num_structural = n
        self.num_slack = m_ineq
        self.num_columns = n + m_ineq + num_artificial

        T = np.zeros((rows, self.num_columns))
        T[:m_ineq, :n] = problem.G
        T[:m_ineq, n : n + m_ineq] = np.eye(m_ineq)
        T[m_ineq:, :n] = problem.A
        rhs = np.concatenate([rhs_ineq, rhs_eq])

        sign = np.where(rhs < 0, -1.0, 1.0)
        T *= sign[:, None]
        rhs = rhs * sign

        basis = np.empty(rows, dtype=int)
        column = n + m_ineq
        for r in range(rows):
            if needs_artificial[r]:
                T[r, column] = 1.0
                basis[r] = column
                column += 1
            else:
                basis[r] = n + r

        self.M = T.copy()
        self.rhs = rhs.copy()
        self.T = T
        self.beta = rhs
        self.basis = basis
        self.upper = np.concatenate(
            [problem.hi - problem.lo, np.full(m_ineq + num_artificial, math.inf)]
        )
        self.at_upper = np.zeros(self.num_columns, dtype=bool)
        self.is_basic = np.zeros(self.num_columns, dtype=bool)
        self.is_basic[basis] = True
        self.first_artificial = n + m_ineq
        self.iterations = 0
        self.stale = 0

    def _pivot(self, r: int, q: int):
        T = self.T
        T[r] /= T[r, q]
        column = T[:, q].copy()
        column[r] = 0.0
        rows = np.flatnonzero(column)
        T[rows] -= np.outer(column[rows], T[r])
        self.d -= self.d[q] * T[r]
        self.d[q] = 0.0
        self.stale += 1

    def _reduced_costs(self, cost: np.ndarray):
        self.d = cost - cost[self.basis] @ self.T
        self.d[self.basis] = 0.0

    def _refactor(self, cost: np.ndarray):
        """Recomputes ``T``, ``beta`` and the reduced costs from the original
        rows and the current basis."""
        basis = self.basis
        if basis.size:
            fixed = self.at_upper & ~self.is_basic
            rhs = self.rhs - self.M[:, fixed] @ self.upper[fixed]
            B = self.M[:, basis]
            try:
                self.T = np.linalg.solve(B, self.M)
                self.beta = np.linalg.solve(B, rhs)
            except np.linalg.LinAlgError as err:
                raise NumericalError("Singular basis in refactorization") from err
            self.T[:, basis] = np.eye(basis.size)
        self._reduced_costs(cost)
        self.stale = 0

    def _entering(self, smallest_index: bool) -> int:
        movable = ~self.is_basic & (self.upper > 0)
        gain = np.where(self.at_upper, -self.d, self.d)
        candidates = np.flatnonzero(movable & (gain > self.pivot_tol))
        if candidates.size == 0:
            return -1
        if smallest_index:
            return int(candidates[0])
        return int(candidates[np.argmax(gain[candidates])])

    def optimize(self, cost: np.ndarray, max_iterations: int) -> bool:
        """Runs simplex iterations; returns ``False`` when unbounded.

        Pricing picks the largest reduced cost and falls back to Bland's
        smallest-index rule after ``BLAND_AFTER`` consecutive degenerate
        steps, until a step makes progress again.
        """
        if self.stale:
            self._refactor(cost)
        else:
            self._reduced_costs(cost)
        interval = max(REFACTOR_INTERVAL, self.T.shape[0])
        degenerate_run = 0
        while True:
            if self.iterations >= max_iterations:
                raise NumericalError(
                    f"Simplex did not converge in {max_iterations} iterations"
                )
            q = self._entering(degenerate_run >= BLAND_AFTER)
            if q < 0:
                if not self.stale:
                    return True
                # confirm optimality on freshly computed values
                self._refactor(cost)
                continue
            self.iterations += 1

            sigma = -1.0 if self.at_upper[q] else 1.0
            alpha = sigma * self.T[:, q]

            # basic variables decrease towards 0 or increase towards their bound
            ratios = np.full(alpha.size, math.inf)
            down = alpha > self.pivot_tol
            ratios[down] = np.maximum(self.beta[down], 0.0) / alpha[down]
            caps = self.upper[self.basis]
            up = (alpha < -self.pivot_tol) & np.isfinite(caps)
            ratios[up] = np.maximum(caps[up] - self.beta[up], 0.0) / -alpha[up]

            step = float(ratios.min()) if ratios.size else math.inf
            bound = float(self.upper[q])
            if math.isinf(min(step, bound)):
                return False

            # smallest index wins among the blocking variables, q included
            ties = np.flatnonzero(ratios == step)
            if bound < step or (bound == step and q < self.basis[ties].min()):
                self.beta -= bound * alpha
                self.at_upper[q] = not self.at_upper[q]
                self.stale += 1
                degenerate_run = 0
            else:
                r = int(ties[np.argmin(self.basis[ties])])
                leaving = int(self.basis[r])
                leaves_at_upper = bool(up[r])

                entering_value = step if sigma > 0 else bound - step
                self.beta -= step * alpha
                self.beta[r] = entering_value
                self._pivot(r, q)

                self.is_basic[leaving] = False
                self.at_upper[leaving] = leaves_at_upper
                self.basis[r] = q
                self.is_basic[q] = True
                self.at_upper[q] = False
                degenerate_run = degenerate_run + 1 if step <= DEGENERATE_TOL else 0

            if self.stale >= interval:
                self._refactor(cost)

    def drop_artificials(self):
        """Pivots remaining artificial variables out of the basis and removes
        their columns; rows left without a pivot are redundant and dropped."""
        keep_rows: List[int] = []
        dropped: List[int] = []
        for r in range(self.T.shape[0]):
            if self.basis[r] < self.first_artificial:
                keep_rows.append(r)
                continue
            row = np.abs(self.T[r, : self.first_artificial])
            row[self.is_basic[: self.first_artificial]] = 0.0
            candidates = np.flatnonzero(row > self.pivot_tol)
            if candidates.size == 0:
                # the artificial's own row is the redundant original row
                dropped.append(int(np.argmax(self.M[:, self.basis[r]])))
                continue
            q = int(candidates[0])
            self.d = np.zeros(self.num_columns)
            self.beta[r] = self.upper[q] if self.at_upper[q] else 0.0
            self._pivot(r, q)
            self.is_basic[self.basis[r]] = False
            self.basis[r] = q
            self.is_basic[q] = True
            self.at_upper[q] = False
            keep_rows.append(r)

        original = np.setdiff1d(np.arange(self.M.shape[0]), dropped)
        self.M = self.M[original, : self.first_artificial]
        self.rhs = self.rhs[original]
        self.T = self.T[keep_rows, : self.first_artificial]
        self.beta = self.beta[keep_rows]
        self.basis = self.basis[keep_rows]
        self.upper = self.upper[: self.first_artificial]
        self.at_upper = self.at_upper[: self.first_artificial]
        self.is_basic = self.is_basic[: self.first_artificial]
        self.num_columns = self.first_artificial

    def point(self) -> np.ndarray:
        x = np.where(self.at_upper, self.upper, 0.0)
        x[self.basis] = self.beta
        return x[: self.num_structural]


def solve(
    problem: LpProblem,
    pivot_tol: float = PIVOT_TOL,
    feasibility_tol: float = FEASIBILITY_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> LpSolution:
    """Solves ``problem``; infeasibility and unboundedness are reported in
    :attr:`LpSolution.status`.

    Deterministic: identical input gives bit-identical output.
    """
    tableau = _Tableau(problem, pivot_tol)

    if tableau.num_columns > tableau.first_artificial:
        phase1 = np.zeros(tableau.num_columns)
        phase1[tableau.first_artificial :] = -1.0
        tableau.optimize(phase1, max_iterations)
        residual = -float(phase1[tableau.basis] @ tableau.beta)
        if residual > feasibility_tol:
            return LpSolution(INFEASIBLE, iterations=tableau.iterations)
        tableau.drop_artificials()

    cost = np.zeros(tableau.num_columns)
    cost[: tableau.num_structural] = problem.c
    if not tableau.optimize(cost, max_iterations):
        return LpSolution(UNBOUNDED, iterations=tableau.iterations)

    z = problem.lo + tableau.point()
    z = np.clip(z, problem.lo, problem.hi)
    return LpSolution(
        OPTIMAL, float(problem.c @ z), z, iterations=tableau.iterations
    )
