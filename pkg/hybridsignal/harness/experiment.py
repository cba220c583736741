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
Seeded capacity-floor sweep.

For every capacity floor ``b`` on the grid and every trial, a population and
a risk value are sampled, the optimal mechanism is designed and the three
mechanisms (uninformative, fully revealing, optimal) are scored both
analytically and by simulating one signal draw.
"""

import csv
import multiprocessing as mp

from dataclasses import dataclass, field
from itertools import starmap
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Sequence, TextIO, Union

import numpy as np

from tqdm import tqdm

from hybridsignal.design import design
from hybridsignal.distributions import Prior, Uniform, prior_from_config
from hybridsignal.equilibrium import CostModel, Population
from hybridsignal.goals import Capacity, goal_beliefs

from .evaluation import (
    benchmark_fullinfo,
    benchmark_noinfo,
    complies,
    evaluate_stateless,
)

__all__ = [
    "CSV_COLUMNS",
    "ExperimentConfig",
    "TrialResult",
    "trial_rng",
    "sample_population",
    "run_trial",
    "sweep_trials",
    "run_capacity_sweep",
    "write_csv",
    "write_rows",
]

CSV_COLUMNS = (
    "b",
    "v_noinfo_analytic",
    "v_fullinfo_analytic",
    "v_opt_analytic",
    "v_noinfo_mc",
    "v_fullinfo_mc",
    "v_opt_mc",
    "trials",
    "seed",
)

TIE_GAP = 1e-9


def _default_b_grid() -> List[float]:
    return [round(b, 10) for b in np.linspace(0.0, 1.0, 21)]


@dataclass(frozen=True)
class ExperimentConfig:
    groups: int = 10
    trials: int = 10_000
    seed: int = 0
    b_grid: Sequence[float] = field(default_factory=_default_b_grid)
    benefit_low: float = 0.0
    benefit_high: float = 10.0
    prior: Prior = field(default_factory=lambda: Uniform(5.0, 20.0))
    cost: CostModel = field(default_factory=CostModel)

    def __post_init__(self):
        if self.groups < 1:
            raise ValueError(f'Invalid number of groups "{self.groups}"')
        if self.trials < 1:
            raise ValueError(f'Invalid number of trials "{self.trials}"')
        if self.seed < 0:
            raise ValueError(f'Invalid seed "{self.seed}"')
        b_grid = tuple(float(b) for b in self.b_grid)
        if not b_grid or any(not 0 <= b <= 1 for b in b_grid):
            raise ValueError(f'Invalid capacity grid "{list(b_grid)}"')
        if not 0 <= self.benefit_low < self.benefit_high:
            raise ValueError(
                f'Invalid benefit range "[{self.benefit_low}, {self.benefit_high}]"'
            )
        object.__setattr__(self, "b_grid", b_grid)

    def to_config(self) -> Dict[str, Any]:
        return {
            "K": self.groups,
            "trials": self.trials,
            "seed": self.seed,
            "b_grid": list(self.b_grid),
            "benefits": [self.benefit_low, self.benefit_high],
            "prior": self.prior.to_config(),
            "cost": self.cost.to_config(),
        }

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "ExperimentConfig":
        """Reads the keys of :meth:`to_config`; missing keys keep their
        defaults."""
        kwargs: Dict[str, Any] = {}
        if "K" in config:
            kwargs["groups"] = int(config["K"])
        if "trials" in config:
            kwargs["trials"] = int(config["trials"])
        if "seed" in config:
            kwargs["seed"] = int(config["seed"])
        if "b_grid" in config:
            kwargs["b_grid"] = [float(b) for b in config["b_grid"]]
        if "benefits" in config:
            low, high = config["benefits"]
            kwargs["benefit_low"], kwargs["benefit_high"] = float(low), float(high)
        if "prior" in config:
            kwargs["prior"] = prior_from_config(config["prior"])
        if "cost" in config:
            kwargs["cost"] = CostModel.from_config(config["cost"])
        return cls(**kwargs)


class TrialResult(NamedTuple):
    v_noinfo_analytic: float
    v_fullinfo_analytic: float
    v_opt_analytic: float
    v_noinfo_mc: float
    v_fullinfo_mc: float
    v_opt_mc: float


def trial_rng(seed: int, b_index: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial, independent of evaluation order."""
    sequence = np.random.SeedSequence([seed, b_index, trial])
    return np.random.Generator(np.random.Philox(sequence))


def sample_population(
    rng: np.random.Generator, groups: int, low: float, high: float
) -> Population:
    """Uniform masses on the simplex (normalized exponential spacings) and
    i.i.d. uniform benefits sorted decreasingly; ties are pulled apart by
    ``TIE_GAP``."""
    masses = rng.exponential(size=groups)
    masses /= masses.sum()
    benefits = np.sort(rng.uniform(low, high, size=groups))[::-1].copy()
    for k in range(1, groups):
        if benefits[k] >= benefits[k - 1]:
            benefits[k] = benefits[k - 1] - TIE_GAP
    return Population(masses, benefits)


def run_trial(
    config: ExperimentConfig, b: float, rng: np.random.Generator
) -> TrialResult:
    population = sample_population(
        rng, config.groups, config.benefit_low, config.benefit_high
    )
    prior = config.prior
    theta = float(prior.sample(rng))
    beliefs = goal_beliefs(population, config.cost, Capacity(b), prior.high)
    optimal = design(prior, beliefs).mechanism

    analytic = []
    empirical = []
    for mechanism in (benchmark_noinfo(prior), benchmark_fullinfo(), optimal):
        analytic.append(evaluate_stateless(mechanism, prior, beliefs).value)
        hit = complies(mechanism, prior, beliefs, theta, rng)
        empirical.append(float(hit))
    return TrialResult(*analytic, *empirical)


def sweep_trials(config: ExperimentConfig, b_index: int) -> List[TrialResult]:
    """All trials of one capacity floor, in trial order."""
    b = config.b_grid[b_index]
    return [
        run_trial(config, b, trial_rng(config.seed, b_index, trial))
        for trial in range(config.trials)
    ]


def _row(config: ExperimentConfig, b_index: int) -> Dict[str, Any]:
    results = np.array(sweep_trials(config, b_index))
    row: Dict[str, Any] = {"b": config.b_grid[b_index]}
    row.update(zip(TrialResult._fields, results.mean(axis=0).tolist()))
    row["trials"] = config.trials
    row["seed"] = config.seed
    return row


def run_capacity_sweep(
    config: ExperimentConfig, num_jobs: int = 1, verbose: bool = False
) -> List[Dict[str, Any]]:
    """One averaged row per capacity floor; the output does not depend on
    ``num_jobs``."""
    args = [(config, i) for i in range(len(config.b_grid))]
    pool = mp.Pool(num_jobs) if num_jobs > 1 else None
    try:
        if pool:
            rows = pool.imap(_row_star, args)
        else:
            rows = starmap(_row, args)
        rows = tqdm(rows, total=len(args), disable=not verbose, desc="sweep")
        return list(rows)
    finally:
        if pool:
            pool.close()
            pool.join()


def _row_star(args):
    return _row(*args)


def write_rows(rows: List[Dict[str, Any]], f: TextIO):
    """Writes sweep rows with six-decimal floats."""
    writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {k: f"{v:.6f}" if isinstance(v, float) else v for k, v in row.items()}
        )


def write_csv(rows: List[Dict[str, Any]], path: Union[str, Path]):
    with Path(path).open("w", newline="") as f:
        write_rows(rows, f)
