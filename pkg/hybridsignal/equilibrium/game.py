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

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence

import numpy as np

from scipy.optimize import brentq

from hybridsignal.exceptions import DomainError
from hybridsignal.ops import BISECTION_TOL

__all__ = [
    "CostModel",
    "Population",
    "EquilibriumOutcome",
    "step_benefit",
    "in_person_mass",
    "remote_vector",
    "critical_group",
    "equilibrium",
    "mass_threshold",
    "belief_ceiling",
    "gamma_threshold",
]

MASS_TOL = 1e-9


@dataclass(frozen=True)
class CostModel:
    """Power-family infectious cost ``beta(theta, y) = c1(r) theta + c2(r)``
    with ``c1(r) = kappa1 (1 - r)^p1``, ``c2(r) = kappa2 (1 - r)^p2`` and
    ``r = ||y||`` the remote mass."""

    kappa1: float = 1.0
    p1: float = 1.0
    kappa2: float = 0.0
    p2: float = 1.0

    def __post_init__(self):
        values = (self.kappa1, self.p1, self.kappa2, self.p2)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f'Invalid cost model "{self}"')
        if self.kappa1 <= 0 or self.p1 < 1 or self.kappa2 < 0 or self.p2 < 1:
            raise ValueError(f'Invalid cost model "{self}"')

    def c1(self, remote):
        return self.kappa1 * (1 - np.asarray(remote, dtype=float)) ** self.p1

    def c2(self, remote):
        return self.kappa2 * (1 - np.asarray(remote, dtype=float)) ** self.p2

    def infectious_cost(self, theta, remote):
        return self.c1(remote) * theta + self.c2(remote)

    def in_person_cost(self, u, theta):
        """Cost faced by in-person agents when a mass ``u`` works on-site."""
        return self.infectious_cost(theta, 1 - np.asarray(u, dtype=float))

    def to_config(self) -> Dict[str, float]:
        return {
            "kappa1": self.kappa1,
            "p1": self.p1,
            "kappa2": self.kappa2,
            "p2": self.p2,
        }

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "CostModel":
        keys = ("kappa1", "p1", "kappa2", "p2")
        return cls(**{k: float(config[k]) for k in keys if k in config})


class Population:
    """Agent groups sorted by decreasing in-person benefit.

    Args:
        masses: group masses ``x`` (positive, summing to one).
        benefits: in-person benefits ``v`` (positive, strictly decreasing).
    """

    def __init__(self, masses: Sequence[float], benefits: Sequence[float]):
        masses = np.asarray(masses, dtype=float).ravel()
        benefits = np.asarray(benefits, dtype=float).ravel()
        if masses.size == 0 or masses.shape != benefits.shape:
            raise ValueError(
                f'Invalid population "masses={masses.tolist()}, '
                f'benefits={benefits.tolist()}"'
            )
        if not np.all(np.isfinite(masses)) or np.any(masses <= 0):
            raise ValueError(f'Invalid masses "{masses.tolist()}"')
        if abs(masses.sum() - 1) > MASS_TOL:
            raise ValueError(f"Masses sum to {masses.sum()}, expected 1")
        if (
            not np.all(np.isfinite(benefits))
            or np.any(benefits <= 0)
            or np.any(np.diff(benefits) >= 0)
        ):
            raise ValueError(f'Invalid benefits "{benefits.tolist()}"')

        self.masses = masses / masses.sum()
        self.benefits = benefits
        prefix = np.cumsum(self.masses)
        prefix[-1] = 1.0
        self.prefix = prefix
        for a in (self.masses, self.benefits, self.prefix):
            a.setflags(write=False)

    @property
    def num_groups(self) -> int:
        return self.masses.size

    def segment(self, j: int):
        """In-person mass range ``[s_{j-1}, s_j]`` of group ``j``."""
        return (float(self.prefix[j - 1]) if j > 0 else 0.0, float(self.prefix[j]))

    def to_config(self) -> Dict[str, Any]:
        return {"masses": self.masses.tolist(), "benefits": self.benefits.tolist()}

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "Population":
        return cls(config["masses"], config["benefits"])

    def __repr__(self) -> str:
        return (
            f"Population(masses={self.masses.tolist()}, "
            f"benefits={self.benefits.tolist()})"
        )


@dataclass(frozen=True)
class EquilibriumOutcome:
    in_person_mass: float
    remote: np.ndarray = field(repr=False)
    critical_group: int

    @property
    def remote_mass(self) -> float:
        return float(self.remote.sum())


def _check_fraction(u: float, name: str = "u") -> float:
    u = float(u)
    if not 0 <= u <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {u}")
    return u


def _check_belief(theta_hat: float) -> float:
    theta_hat = float(theta_hat)
    if not theta_hat >= 0:
        raise DomainError(f"Posterior mean must be non-negative, got {theta_hat}")
    return theta_hat


def step_benefit(population: Population, u: float) -> float:
    """``v(u)``: benefit of the marginal in-person agent, constant on the
    half-open segments ``[s_{j-1}, s_j)``."""
    u = _check_fraction(u)
    j = int(np.searchsorted(population.prefix, u, "right"))
    return float(population.benefits[min(j, population.num_groups - 1)])


def _step_benefit_left(population: Population, u: float) -> float:
    # left limit v(u-), constant on (s_{j-1}, s_j]
    j = int(np.searchsorted(population.prefix, u, "left"))
    return float(population.benefits[min(j, population.num_groups - 1)])


def in_person_mass(
    population: Population,
    cost: CostModel,
    theta_hat: float,
    tol: float = BISECTION_TOL,
) -> float:
    """Equilibrium in-person mass ``m = sup{u : v(u) >= c1(1-u) theta + c2(1-u)}``.

    Groups are scanned in order of decreasing benefit; the first group that
    cannot cover the cost over its whole segment holds the critical agent.
    """
    theta_hat = _check_belief(theta_hat)
    for j in range(population.num_groups):
        lo, hi = population.segment(j)
        benefit = float(population.benefits[j])
        excess_lo = float(cost.in_person_cost(lo, theta_hat)) - benefit
        if excess_lo > 0:
            return lo
        if float(cost.in_person_cost(hi, theta_hat)) <= benefit:
            continue
        if excess_lo == 0:
            return lo
        return float(
            brentq(
                lambda u: float(cost.in_person_cost(u, theta_hat)) - benefit,
                lo,
                hi,
                xtol=tol,
            )
        )
    return 1.0


def critical_group(population: Population, u: float) -> int:
    """First group with ``s_k > u`` (the last group when ``u = 1``)."""
    k = int(np.searchsorted(population.prefix, _check_fraction(u), "right"))
    return min(k, population.num_groups - 1)


def remote_vector(population: Population, u: float) -> np.ndarray:
    """Threshold-shaped remote vector with in-person mass ``u``: groups before
    the critical one fully on-site, groups after it fully remote."""
    u = _check_fraction(u)
    prefix = population.prefix
    starts = prefix - population.masses
    y = np.where(prefix <= u, 0.0, np.where(starts >= u, population.masses, prefix - u))
    return y


def equilibrium(
    population: Population, cost: CostModel, theta_hat: float
) -> EquilibriumOutcome:
    """Nash equilibrium for a common posterior mean ``theta_hat``."""
    m = in_person_mass(population, cost, theta_hat)
    return EquilibriumOutcome(
        in_person_mass=m,
        remote=remote_vector(population, m),
        critical_group=critical_group(population, m),
    )


def mass_threshold(population: Population, cost: CostModel, u: float) -> float:
    """``inf{theta >= 0 : m(theta) <= u}`` (``inf`` when unreachable).

    The infectious cost is linear in ``theta``, so ``m(theta) <= u`` reduces
    to ``v(u) <= c1(1-u) theta + c2(1-u)``.
    """
    u = _check_fraction(u)
    if u >= 1:
        return 0.0
    slope = float(cost.c1(1 - u))
    if slope <= 0:
        return math.inf
    theta = (step_benefit(population, u) - float(cost.c2(1 - u))) / slope
    return max(0.0, theta)


def belief_ceiling(population: Population, cost: CostModel, u: float) -> float:
    """``sup{theta >= 0 : m(theta) >= u}``; ``inf`` for ``u = 0`` and ``-inf``
    when no belief keeps a mass ``u`` on-site."""
    u = _check_fraction(u)
    if u <= 0:
        return math.inf
    theta = (_step_benefit_left(population, u) - float(cost.c2(1 - u))) / float(
        cost.c1(1 - u)
    )
    return theta if theta >= 0 else -math.inf


def gamma_threshold(population: Population, cost: CostModel, b: float) -> float:
    """Smallest posterior mean at which the equilibrium remote mass reaches
    the capacity floor ``b``: ``inf{theta : m(theta) <= 1 - b}``."""
    b = _check_fraction(b, "b")
    if b <= 0:
        return 0.0
    return mass_threshold(population, cost, 1 - b)
