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
Stateful design: the capacity floor depends on the risk state.

Each state ``nu_j`` carries a floor ``b_j`` and the smallest posterior mean
``gamma_j`` at which the equilibrium meets it. Signal ``i`` is confined to
the bucket ``[gamma_i, gamma_{i+1}]`` (with ``gamma_0 = 0`` and
``gamma_{N+1} = inf``), so state ``j`` complies exactly on the signals
``i > j``, and the joint table ``z[j, i] = p_j g_{nu_j}(i)`` solves a linear
program.
"""

import math

from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from hybridsignal.distributions import Discrete
from hybridsignal.equilibrium import CostModel, Population, gamma_threshold
from hybridsignal.exceptions import DomainError, NumericalError
from hybridsignal.linprog import PIVOT_TOL, LpProblem, solve
from hybridsignal.mechanisms import DiscreteTable
from hybridsignal.ops import MEMBERSHIP_TOL

__all__ = [
    "StatefulScenario",
    "StatefulDesign",
    "StatefulBenchmarks",
    "build_lp",
    "design_stateful",
    "design_weighted",
    "benchmarks_stateful",
    "is_threshold_table",
    "stateful_table",
]

PROBABILITY_TOL = 1e-12

_CLEAN_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class StatefulScenario:
    """Discrete risk states with their compliance thresholds.

    Args:
        states: risk values ``nu_j``, strictly increasing.
        probs: state probabilities ``p_j``.
        gammas: thresholds ``gamma_j``; strictly increasing unless
            ``strict=False``, which admits equal thresholds (a stateless goal
            written as a stateful one).
        floors: capacity floors ``b_j`` the thresholds were derived from, if
            any.
    """

    states: np.ndarray
    probs: np.ndarray
    gammas: np.ndarray
    floors: Optional[np.ndarray] = None
    strict: bool = True

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float).ravel()
        probs = np.asarray(self.probs, dtype=float).ravel()
        gammas = np.asarray(self.gammas, dtype=float).ravel()
        if not states.size or not states.shape == probs.shape == gammas.shape:
            raise ValueError("States, probabilities and thresholds must align")
        if np.any(states < 0) or np.any(np.diff(states) <= 0):
            raise ValueError(f'Invalid states "{states.tolist()}"')
        if np.any(probs < 0) or abs(probs.sum() - 1) > PROBABILITY_TOL:
            raise ValueError(f'Invalid state probabilities "{probs.tolist()}"')
        if np.any(np.isnan(gammas)) or np.any(gammas < 0):
            raise ValueError(f'Invalid thresholds "{gammas.tolist()}"')
        steps = np.diff(gammas)
        if np.any(steps < 0) or (self.strict and np.any(steps <= 0)):
            raise ValueError(
                f'Thresholds must be {"strictly " if self.strict else ""}'
                f'increasing, got "{gammas.tolist()}"'
            )
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "gammas", gammas)
        if self.floors is not None:
            floors = np.asarray(self.floors, dtype=float).ravel()
            if floors.shape != states.shape:
                raise ValueError("One capacity floor per state is required")
            object.__setattr__(self, "floors", floors)

    @classmethod
    def from_floors(
        cls,
        states: Sequence[float],
        probs: Sequence[float],
        floors: Sequence[float],
        population: Population,
        cost: CostModel,
        strict: bool = True,
    ) -> "StatefulScenario":
        """Derives ``gamma_j`` from capacity floors ``b_j`` on ``population``."""
        floors = np.asarray(floors, dtype=float).ravel()
        if np.any(floors < 0) or np.any(floors > 1):
            raise ValueError(f'Invalid capacity floors "{floors.tolist()}"')
        steps = np.diff(floors)
        if np.any(steps < 0) or (strict and np.any(steps <= 0)):
            raise ValueError(f'Capacity floors must increase, got "{floors.tolist()}"')
        gammas = [gamma_threshold(population, cost, b) for b in floors]
        return cls(states, probs, gammas, floors, strict)

    @property
    def num_states(self) -> int:
        return self.states.size

    @property
    def mean(self) -> float:
        return float(self.probs @ self.states)

    @property
    def extended_gammas(self) -> np.ndarray:
        """``(0, gamma_1, ..., gamma_N, inf)``: signal ``i`` lives in
        ``[ext[i], ext[i + 1]]``."""
        return np.concatenate([[0.0], self.gammas, [math.inf]])

    def prior(self) -> Discrete:
        return Discrete(self.states, self.probs)

    def to_config(self) -> Dict[str, Any]:
        states: List[Dict[str, float]] = []
        for j in range(self.num_states):
            state = {"nu": float(self.states[j]), "p": float(self.probs[j])}
            if self.floors is not None:
                state["b"] = float(self.floors[j])
            states.append(state)
        return {"states": states, "gammas": self.gammas.tolist()}

    @classmethod
    def from_config(
        cls,
        config: Dict[str, Any],
        population: Optional[Population] = None,
        cost: Optional[CostModel] = None,
    ) -> "StatefulScenario":
        """Reads ``{"states": [{"nu", "p", "b"?}, ...], "gammas"?: [...]}``.

        Without ``"gammas"`` the thresholds are derived from the floors,
        which then requires a population.
        """
        states = config["states"]
        if not isinstance(states, list):
            raise ValueError('"states" must be a list')
        nus = [float(s["nu"]) for s in states]
        probs = [float(s["p"]) for s in states]
        strict = bool(config.get("strict", True))
        floors = None
        if all("b" in s for s in states):
            floors = [float(s["b"]) for s in states]
        if "gammas" in config:
            return cls(nus, probs, config["gammas"], floors, strict)
        if floors is None:
            raise KeyError('"gammas" or a capacity floor "b" per state')
        if population is None:
            raise KeyError('"population" (needed to derive thresholds from floors)')
        return cls.from_floors(
            nus, probs, floors, population, cost or CostModel(), strict
        )


@dataclass(frozen=True, eq=False)
class StatefulDesign:
    table: np.ndarray = field(repr=False)
    value: float
    conditionals: np.ndarray
    rows: np.ndarray = field(repr=False)

    @property
    def num_signals(self) -> int:
        return self.table.shape[1]

    def mechanism(self, scenario: StatefulScenario) -> DiscreteTable:
        return DiscreteTable(scenario.states, scenario.probs, self.rows)

    def to_config(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "conditionals": self.conditionals.tolist(),
            "z": self.table.tolist(),
            "rows": self.rows.tolist(),
        }


class StatefulBenchmarks(NamedTuple):
    noinfo: float
    fullinfo: float
    noinfo_conditionals: np.ndarray
    fullinfo_conditionals: np.ndarray


def _index(num_signals: int, j: int, i: int) -> int:
    return j * num_signals + i


def build_lp(
    scenario: StatefulScenario, objective: Optional[np.ndarray] = None
) -> LpProblem:
    """Joint-table LP over ``z[j, i]`` flattened row-major.

    ``objective[j]`` weighs the compliant cells of state ``j`` (1 by
    default). Mean rows with an infinite or zero threshold are vacuous and
    omitted.
    """
    N = scenario.num_states
    S = N + 1
    n = N * S
    if objective is None:
        objective = np.ones(N)
    gam = scenario.extended_gammas
    states, probs = scenario.states, scenario.probs

    c = np.zeros(n)
    A = np.zeros((N, n))
    hi = np.zeros(n)
    for j in range(N):
        for i in range(S):
            k = _index(S, j, i)
            A[j, k] = 1.0
            hi[k] = probs[j] if math.isfinite(gam[i]) else 0.0
            if i >= j + 1:
                c[k] = objective[j]

    rows = []
    for i in range(S):
        if 0 < gam[i] < math.inf:
            row = np.zeros(n)
            for j in range(N):
                row[_index(S, j, i)] = gam[i] - states[j]
            rows.append(row)
        if math.isfinite(gam[i + 1]):
            row = np.zeros(n)
            for j in range(N):
                row[_index(S, j, i)] = states[j] - gam[i + 1]
            rows.append(row)
    G = np.array(rows).reshape(-1, n)

    return LpProblem(c=c, G=G, h=np.zeros(G.shape[0]), A=A, b=probs, hi=hi)


def _solve(
    scenario: StatefulScenario, objective: np.ndarray, pivot_tol: float
) -> StatefulDesign:
    N = scenario.num_states
    problem = build_lp(scenario, objective)
    solution = solve(problem, pivot_tol=pivot_tol)
    if not solution.is_optimal:
        raise NumericalError(f"Stateful LP reported {solution.status}")

    probs = scenario.probs
    z = solution.x.reshape(N, N + 1).copy()
    z[z < _CLEAN_TOL] = 0.0
    rows = np.zeros_like(z)
    positive = probs > 0
    rows[positive] = z[positive] / z[positive].sum(axis=1, keepdims=True)
    rows[~positive, 0] = 1.0

    compliant = np.triu(np.ones((N, N + 1)), k=1)
    conditionals = (rows * compliant).sum(axis=1)
    return StatefulDesign(z, solution.value, conditionals, rows)


def design_stateful(
    scenario: StatefulScenario, pivot_tol: float = PIVOT_TOL
) -> StatefulDesign:
    """Maximizes the overall compliance probability ``sum_j p_j V_j``."""
    return _solve(scenario, np.ones(scenario.num_states), pivot_tol)


def design_weighted(
    scenario: StatefulScenario,
    weights: Sequence[float],
    pivot_tol: float = PIVOT_TOL,
) -> StatefulDesign:
    """Maximizes ``sum_j weights_j V_j``; ``weights = probs`` recovers
    :func:`design_stateful`."""
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.size != scenario.num_states:
        raise DomainError(
            f"Expected {scenario.num_states} weights, got {weights.size}"
        )
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise DomainError(f"Weights must be finite and non-negative: {weights}")
    probs = scenario.probs
    if np.any((probs == 0) & (weights > 0)):
        raise DomainError("Positive weight on a state with zero probability")
    objective = np.divide(weights, probs, out=np.zeros_like(weights), where=probs > 0)
    return _solve(scenario, objective, pivot_tol)


def benchmarks_stateful(
    scenario: StatefulScenario, tol: float = MEMBERSHIP_TOL
) -> StatefulBenchmarks:
    """Uninformative and fully revealing values with their per-state
    conditionals; threshold comparisons are inclusive."""
    gammas = scenario.gammas
    noinfo = (scenario.mean >= gammas - tol).astype(float)
    fullinfo = (scenario.states >= gammas - tol).astype(float)
    return StatefulBenchmarks(
        float(scenario.probs @ noinfo),
        float(scenario.probs @ fullinfo),
        noinfo,
        fullinfo,
    )


def is_threshold_table(
    design: StatefulDesign, scenario: StatefulScenario, tol: float = 1e-8
) -> bool:
    """Whether the low signal collects a bottom slice of the states: states
    below some index send it surely, states above never, at most one is
    split."""
    probs = scenario.probs
    low = design.rows[:, 0]
    low = low[probs > 0]
    if np.any(np.diff(low) > tol):
        return False
    fractional = (low > tol) & (low < 1 - tol)
    return int(fractional.sum()) <= 1


def stateful_table(
    scenario: StatefulScenario, design: Optional[StatefulDesign] = None
) -> List[Dict[str, Any]]:
    """Value and per-state conditionals of the two benchmarks and of the
    optimal design, one row each."""
    if design is None:
        design = design_stateful(scenario)
    bench = benchmarks_stateful(scenario)
    return [
        {
            "mechanism": "No Information",
            "value": bench.noinfo,
            "conditionals": bench.noinfo_conditionals.tolist(),
        },
        {
            "mechanism": "Full Information",
            "value": bench.fullinfo,
            "conditionals": bench.fullinfo_conditionals.tolist(),
        },
        {
            "mechanism": "Stateful Design",
            "value": design.value,
            "conditionals": design.conditionals.tolist(),
        },
    ]
