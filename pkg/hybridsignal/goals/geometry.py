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

import math

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from hybridsignal.equilibrium import (
    CostModel,
    Population,
    belief_ceiling,
    mass_threshold,
    remote_vector,
)
from hybridsignal.ops import CONDENSE_TOL, condense_intervals
from hybridsignal.registry import GOALS, from_config, register_goal
from hybridsignal.typing import TIntervals

__all__ = [
    "Goal",
    "Capacity",
    "Polytope",
    "capacity_band",
    "manifold_point",
    "intersect",
    "belief_preimage",
    "goal_beliefs",
    "beliefs_from_config",
    "goal_from_config",
]

_SLOPE_TOL = 1e-15


class Goal(ABC):
    """Closed convex set of desirable remote-mass vectors."""

    @abstractmethod
    def intersect(self, population: Population) -> TIntervals:
        """In-person mass intervals where the equilibrium manifold meets the set."""

    @abstractmethod
    def to_config(self) -> Dict[str, Any]:
        pass


@register_goal("capacity")
@dataclass(frozen=True)
class Capacity(Goal):
    """Remote mass at least ``b``: ``{y : ||y|| >= b}``."""

    b: float

    def __post_init__(self):
        if not 0 <= self.b <= 1:
            raise ValueError(f'Invalid capacity floor "{self.b}"')

    def intersect(self, population: Population) -> TIntervals:
        return [(0.0, 1.0 - self.b)]

    def to_polytope(self, num_groups: int) -> "Polytope":
        return Polytope(-np.ones((1, num_groups)), np.array([-self.b]))

    def to_config(self):
        return {"type": "capacity", "b": self.b}

    @classmethod
    def from_config(cls, config):
        return cls(float(config["b"]))


@register_goal("polytope")
@dataclass(frozen=True, eq=False)
class Polytope(Goal):
    """``{y : A y <= d}``; each row of ``A`` is a linear functional on ``y``."""

    A: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        d = np.asarray(self.d, dtype=float).ravel()
        finite = np.all(np.isfinite(A)) and np.all(np.isfinite(d))
        if A.shape[0] != d.size or not finite:
            raise ValueError(f'Invalid polytope "A={A.tolist()}, d={d.tolist()}"')
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "d", d)

    def intersect(self, population: Population) -> TIntervals:
        if self.A.shape[1] != population.num_groups:
            raise ValueError(
                f"Polytope has {self.A.shape[1]} columns for "
                f"{population.num_groups} groups"
            )
        intervals = []
        for j in range(population.num_groups):
            lo, hi = population.segment(j)
            # z(u) = base + u * direction on this segment
            after = np.arange(population.num_groups) > j
            base = np.where(after, population.masses, 0.0)
            base[j] = hi
            direction = np.zeros(population.num_groups)
            direction[j] = -1.0
            offset = self.A @ base
            slope = self.A @ direction
            feasible = True
            for a, s, d in zip(offset, slope, self.d):
                if s > _SLOPE_TOL:
                    hi = min(hi, (d - a) / s)
                elif s < -_SLOPE_TOL:
                    lo = max(lo, (d - a) / s)
                elif a > d + CONDENSE_TOL:
                    feasible = False
            if feasible and lo <= hi + CONDENSE_TOL:
                intervals.append((lo, max(lo, hi)))
        return condense_intervals(intervals)

    def to_config(self):
        return {"type": "polytope", "A": self.A.tolist(), "d": self.d.tolist()}

    @classmethod
    def from_config(cls, config):
        return cls(np.asarray(config["A"]), np.asarray(config["d"]))


def capacity_band(b_low: float, b_high: float, num_groups: int) -> Polytope:
    """Remote mass between ``b_low`` and ``b_high``."""
    if not 0 <= b_low <= b_high <= 1:
        raise ValueError(f'Invalid capacity band "[{b_low}, {b_high}]"')
    ones = np.ones((1, num_groups))
    return Polytope(np.vstack([-ones, ones]), np.array([-b_low, b_high]))


def manifold_point(population: Population, u: float) -> np.ndarray:
    """Point ``z(x, u)`` of the equilibrium manifold with in-person mass ``u``."""
    return remote_vector(population, u)


def intersect(population: Population, goal: Goal) -> TIntervals:
    return goal.intersect(population)


def belief_preimage(
    population: Population,
    cost: CostModel,
    intervals: Sequence[Sequence[float]],
    M: float,
) -> TIntervals:
    """Posterior means whose equilibrium in-person mass lands in each interval.

    ``m`` is non-increasing, so the preimage of ``[w1, w2]`` is
    ``[inf{m <= w2}, sup{m >= w1}]`` clamped to ``[0, M]``; empty preimages
    are dropped and the result is sorted by lower end.
    """
    beliefs = []
    for w1, w2 in intervals:
        lower = mass_threshold(population, cost, float(w2))
        upper = min(belief_ceiling(population, cost, float(w1)), M)
        if lower <= upper and lower <= M and not math.isinf(lower):
            beliefs.append((max(lower, 0.0), upper))
    return sorted(beliefs)


def goal_beliefs(
    population: Population, cost: CostModel, goal: Goal, M: float
) -> TIntervals:
    """Belief intervals for ``goal``: manifold intersection then preimage."""
    return belief_preimage(population, cost, intersect(population, goal), M)


def goal_from_config(config: Dict[str, Any]) -> Goal:
    """Builds a goal from ``{"type": "capacity", "b": 0.5}`` or
    ``{"type": "polytope", "A": [[...]], "d": [...]}``."""
    return from_config(GOALS, "type", config)


def beliefs_from_config(config: List[Sequence[float]]) -> TIntervals:
    beliefs = sorted((float(lo), float(hi)) for lo, hi in config)
    for lo, hi in beliefs:
        if not 0 <= lo <= hi:
            raise ValueError(f'Invalid belief interval "[{lo}, {hi}]"')
    return beliefs
