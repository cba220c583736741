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

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from hybridsignal.design.stateful import (
    StatefulDesign,
    StatefulScenario,
    benchmarks_stateful,
)
from hybridsignal.distributions import Prior
from hybridsignal.mechanisms import (
    DiscreteTable,
    FullInformation,
    MonotonePartition,
    SignallingMechanism,
    uninformative,
)
from hybridsignal.mechanisms.base import ZERO_MASS
from hybridsignal.ops import MEMBERSHIP_TOL, interval_index

__all__ = [
    "EvaluationReport",
    "benchmark_noinfo",
    "benchmark_fullinfo",
    "evaluate_stateless",
    "evaluate_stateful_mech",
    "signal_beliefs",
    "complies",
]


@dataclass(frozen=True)
class EvaluationReport:
    """Compliance probability ``value`` with its breakdown: the mass landing
    in each belief interval (stateless) or the per-state conditionals
    ``V_j`` (stateful)."""

    value: float
    breakdown: List[float]
    regime: Optional[str] = None
    mechanism: Dict[str, Any] = field(default_factory=dict)

    def to_config(self) -> Dict[str, Any]:
        config: Dict[str, Any] = {"value": self.value, "breakdown": self.breakdown}
        if self.regime is not None:
            config["regime"] = self.regime
        config["mechanism"] = self.mechanism
        return config


def benchmark_noinfo(prior: Prior) -> MonotonePartition:
    """Uninformative benchmark: one signal, posterior mean ``mu``."""
    return uninformative(prior)


def benchmark_fullinfo() -> FullInformation:
    """Fully revealing benchmark, evaluated analytically."""
    return FullInformation()


def _clip(value: float) -> float:
    return min(max(float(value), 0.0), 1.0)


def evaluate_stateless(
    mechanism: SignallingMechanism,
    prior: Prior,
    beliefs: Sequence[Sequence[float]],
    regime: Optional[str] = None,
    tol: float = MEMBERSHIP_TOL,
) -> EvaluationReport:
    """``V = sum_i q_i 1{theta_i in some belief interval}``.

    Full information reveals ``theta`` itself, so its value is the prior
    mass of the belief intervals.
    """
    beliefs = [(float(lo), float(hi)) for lo, hi in beliefs]
    breakdown = np.zeros(len(beliefs))

    if isinstance(mechanism, FullInformation):
        for k, (lo, hi) in enumerate(beliefs):
            breakdown[k] = float(prior.cdf(hi)) - float(prior.cdf_left(lo))
        summary = mechanism.to_config()
    else:
        direct = mechanism.to_direct(prior)
        for q, theta in zip(direct.probs, direct.means):
            k = int(interval_index(theta, beliefs, tol))
            if k >= 0:
                breakdown[k] += q
        summary = mechanism.to_config(prior)

    return EvaluationReport(
        _clip(breakdown.sum()), breakdown.tolist(), regime, summary
    )


def evaluate_stateful_mech(
    mechanism: Union[StatefulDesign, DiscreteTable, FullInformation, np.ndarray],
    scenario: StatefulScenario,
    tol: float = MEMBERSHIP_TOL,
) -> EvaluationReport:
    """Re-derives every signal's posterior mean from the table rows and
    credits state ``j`` on the signals whose mean reaches ``gamma_j``.

    Signals that are never sent are skipped.
    """
    if isinstance(mechanism, FullInformation):
        bench = benchmarks_stateful(scenario, tol)
        return EvaluationReport(
            bench.fullinfo,
            bench.fullinfo_conditionals.tolist(),
            mechanism=mechanism.to_config(),
        )

    if isinstance(mechanism, (StatefulDesign, DiscreteTable)):
        rows = mechanism.rows
    elif isinstance(mechanism, SignallingMechanism):
        raise ValueError(
            f"Stateful evaluation needs a discrete table, got {mechanism.kind}"
        )
    else:
        rows = np.asarray(mechanism, dtype=float)
    if rows.shape[0] != scenario.num_states:
        raise ValueError(
            f"Table has {rows.shape[0]} rows for {scenario.num_states} states"
        )

    probs, states = scenario.probs, scenario.states
    mass = probs @ rows
    sent = mass > ZERO_MASS
    means = np.full(mass.size, np.nan)
    means[sent] = ((probs * states) @ rows)[sent] / mass[sent]

    reaches = sent[None, :] & (means[None, :] >= scenario.gammas[:, None] - tol)
    conditionals = (rows * reaches).sum(axis=1)
    table = DiscreteTable(states, probs, rows)
    return EvaluationReport(
        _clip(probs @ conditionals), conditionals.tolist(), mechanism=table.to_config()
    )


def signal_beliefs(mechanism: SignallingMechanism, prior: Prior) -> np.ndarray:
    """Posterior mean of every signal of ``mechanism`` (``nan`` when never
    sent)."""
    return mechanism.signal_moments(prior)[1]


def complies(
    mechanism: SignallingMechanism,
    prior: Prior,
    beliefs: Sequence[Sequence[float]],
    theta: float,
    rng: np.random.Generator,
    means: Optional[np.ndarray] = None,
    tol: float = MEMBERSHIP_TOL,
) -> bool:
    """Draws a public signal for the true risk ``theta`` and reports whether
    the induced posterior mean lands in a belief interval."""
    if isinstance(mechanism, FullInformation):
        belief = float(theta)
    else:
        if means is None:
            means = signal_beliefs(mechanism, prior)
        belief = float(means[mechanism.draw_signal(prior, theta, rng)])
    return bool(interval_index(belief, beliefs, tol) >= 0)
