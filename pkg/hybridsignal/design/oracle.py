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
Discretized direct-mechanism LP.

The prior is replaced by equiprobable quantile cells represented by their
conditional means, a mean-preserving contraction of the prior, so the LP
value is a lower bound on the optimal compliance probability that tightens
as the grid is refined.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from hybridsignal.distributions import Prior
from hybridsignal.exceptions import DomainError, NumericalError
from hybridsignal.linprog import PIVOT_TOL, LpProblem, solve
from hybridsignal.mechanisms import DiscreteTable
from hybridsignal.typing import TIntervals

__all__ = [
    "ORACLE_GRID",
    "DiscretizedInstance",
    "OracleResult",
    "discretize",
    "oracle_value",
]

ORACLE_GRID = 2000

_CLEAN_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class DiscretizedInstance:
    """Cells ``theta_g`` with probabilities ``p_g`` and the target belief
    intervals; ``edges`` are the cells' quantile levels (``None`` when the
    cells are the atoms of a discrete prior)."""

    points: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)
    beliefs: TIntervals
    high: float
    edges: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if abs(self.probs.sum() - 1) > 1e-10:
            raise ValueError(f"Cell probabilities sum to {self.probs.sum()}")

    @property
    def grid_size(self) -> int:
        return self.points.size

    @property
    def num_signals(self) -> int:
        return len(self.beliefs) + 1


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    table: np.ndarray = field(repr=False)
    mechanism: DiscreteTable = field(repr=False)
    grid: int

    def to_config(self):
        return {
            "value": self.value,
            "grid": self.grid,
            "table": self.table.tolist(),
        }


def discretize(
    prior: Prior,
    grid_size: int = ORACLE_GRID,
    beliefs: Sequence[Sequence[float]] = (),
) -> DiscretizedInstance:
    """Equiprobable quantile cells with conditional-mean representatives.

    A discrete prior is its own exact discretization: its atoms are kept as
    they are, whatever the grid size.
    """
    if grid_size < 2:
        raise DomainError(f"Grid size must be at least 2, got {grid_size}")
    beliefs = [(float(lo), float(hi)) for lo, hi in beliefs]
    if prior.is_discrete:
        return DiscretizedInstance(
            np.asarray(prior.support), np.asarray(prior.probs), beliefs, prior.high
        )
    edges = np.linspace(0.0, 1.0, grid_size + 1)
    points = prior.conditional_mean(edges[:-1], edges[1:])
    probs = np.diff(edges)
    return DiscretizedInstance(points, probs, beliefs, prior.high, edges)


def oracle_value(
    instance: DiscretizedInstance, pivot_tol: float = PIVOT_TOL
) -> OracleResult:
    """Maximizes the mass of signals whose posterior mean lands in a target
    interval.

    Signal ``i < K`` is constrained to ``lower_i <= mean <= upper_i``; the
    last signal is free and absorbs ``p_g - sum_i z_{g,i}``, which turns the
    per-cell equalities into bounds (one interval) or ``<=`` rows.
    """
    points, probs = instance.points, instance.probs
    num_cells = points.size
    num_targets = len(instance.beliefs)
    table = np.zeros((num_cells, num_targets + 1))

    if num_targets == 0:
        table[:, -1] = probs
        return _result(instance, table)

    n = num_cells * num_targets
    rows = []
    for i, (lower, upper) in enumerate(instance.beliefs):
        block = slice(i * num_cells, (i + 1) * num_cells)
        row = np.zeros(n)
        row[block] = lower - points
        rows.append(row)
        row = np.zeros(n)
        row[block] = points - upper
        rows.append(row)
    G = np.array(rows)
    h = np.zeros(len(rows))
    if num_targets > 1:
        share = np.tile(np.eye(num_cells), (1, num_targets))
        G = np.vstack([G, share])
        h = np.concatenate([h, probs])

    problem = LpProblem(
        c=np.ones(n), G=G, h=h, lo=np.zeros(n), hi=np.tile(probs, num_targets)
    )
    solution = solve(problem, pivot_tol=pivot_tol)
    if not solution.is_optimal:
        raise NumericalError(f"Oracle LP reported {solution.status}")

    z = solution.x.reshape(num_targets, num_cells).T.copy()
    z[z < _CLEAN_TOL] = 0.0
    total = z.sum(axis=1)
    over = total > probs
    z[over] *= (probs[over] / total[over])[:, None]
    table[:, :num_targets] = z
    table[:, -1] = np.maximum(probs - z.sum(axis=1), 0.0)
    return _result(instance, table)


def _result(instance: DiscretizedInstance, table: np.ndarray) -> OracleResult:
    probs = instance.probs
    rows = table / probs[:, None]
    rows /= rows.sum(axis=1, keepdims=True)
    mechanism = DiscreteTable(instance.points, probs, rows, instance.edges)
    value = float(table[:, :-1].sum())
    value = min(max(value, 0.0), 1.0)
    return OracleResult(value, table, mechanism, instance.grid_size)
