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

import json

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from hybridsignal.design import StatefulScenario
from hybridsignal.distributions import Prior, prior_from_config
from hybridsignal.equilibrium import CostModel, Population
from hybridsignal.goals import (
    Goal,
    beliefs_from_config,
    goal_beliefs,
    goal_from_config,
)
from hybridsignal.typing import TIntervals

__all__ = [
    "SCHEMA",
    "StatelessScenario",
    "is_stateful",
    "load_json",
    "stateful_from_config",
    "write_json",
]

SCHEMA = "1"


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    """Reads a scenario, mechanism or experiment document.

    A missing ``"schema"`` is accepted, any version other than ``SCHEMA`` is
    rejected.
    """
    with Path(path).open("r") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise ValueError(f'Invalid document "{path}": expected a JSON object')
    schema = str(config.get("schema", SCHEMA))
    if schema != SCHEMA:
        raise ValueError(f'Unsupported schema "{schema}", expected "{SCHEMA}"')
    return config


def write_json(output: Dict[str, Any], path: Union[str, Path]):
    with Path(path).open("w") as f:
        f.write(json.dumps(output, indent=2))
        f.write("\n")


def is_stateful(config: Dict[str, Any]) -> bool:
    return "states" in config


@dataclass(frozen=True, eq=False)
class StatelessScenario:
    """Prior with the belief intervals of a fixed goal.

    The intervals are either given directly (``"beliefs"``) or derived from
    ``"population"``, ``"cost"`` and ``"goal"``.
    """

    prior: Prior
    beliefs: TIntervals
    population: Optional[Population] = None
    cost: CostModel = CostModel()
    goal: Optional[Goal] = None

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "StatelessScenario":
        prior = prior_from_config(config["prior"])
        cost = CostModel.from_config(config.get("cost", {}))
        population = None
        if "population" in config:
            population = Population.from_config(config["population"])
        if "beliefs" in config:
            beliefs = beliefs_from_config(config["beliefs"])
            return cls(prior, beliefs, population, cost)
        if population is None:
            raise KeyError('"population" (or explicit "beliefs")')
        goal = goal_from_config(config["goal"])
        beliefs = goal_beliefs(population, cost, goal, prior.high)
        return cls(prior, beliefs, population, cost, goal)

    def to_config(self) -> Dict[str, Any]:
        config: Dict[str, Any] = {
            "schema": SCHEMA,
            "prior": self.prior.to_config(),
            "cost": self.cost.to_config(),
        }
        if self.population is not None:
            config["population"] = self.population.to_config()
        if self.goal is not None:
            config["goal"] = self.goal.to_config()
        config["beliefs"] = [list(b) for b in self.beliefs]
        return config


def stateful_from_config(config: Dict[str, Any]) -> StatefulScenario:
    population = None
    if "population" in config:
        population = Population.from_config(config["population"])
    cost = CostModel.from_config(config.get("cost", {}))
    return StatefulScenario.from_config(config, population, cost)
