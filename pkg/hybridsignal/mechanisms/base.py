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

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from hybridsignal.distributions import Prior
from hybridsignal.exceptions import DomainError
from hybridsignal.registry import MECHANISMS, from_config, register_mechanism

__all__ = [
    "DirectMechanism",
    "SignallingMechanism",
    "MonotonePartition",
    "PiecewiseMixture",
    "DiscreteTable",
    "FullInformation",
    "uninformative",
    "mpc_gap",
    "posterior_cdf",
    "mechanism_from_config",
]

ROW_TOL = 1e-9
ZERO_MASS = 1e-15


@dataclass(frozen=True, eq=False)
class DirectMechanism:
    """Signal probabilities ``q_i`` with the posterior means ``theta_i`` they
    induce."""

    probs: np.ndarray
    means: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        means = np.asarray(self.means, dtype=float).ravel()
        if probs.shape != means.shape or np.any(probs < 0):
            raise ValueError(f'Invalid direct mechanism "{probs}, {means}"')
        if abs(probs.sum() - 1) > ROW_TOL:
            raise ValueError(f"Signal probabilities sum to {probs.sum()}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "means", means)

    @property
    def num_signals(self) -> int:
        return self.probs.size

    @property
    def mean(self) -> float:
        return float(self.probs @ self.means)

    def sorted(self) -> "DirectMechanism":
        order = np.argsort(self.means, kind="stable")
        return DirectMechanism(self.probs[order], self.means[order])

    def to_config(self):
        pairs = zip(self.probs.tolist(), self.means.tolist())
        return [{"q": q, "theta": t} for q, t in pairs]

    @classmethod
    def from_signals(cls, probs: np.ndarray, means: np.ndarray) -> "DirectMechanism":
        keep = probs > ZERO_MASS
        return cls(probs[keep], means[keep])


class SignallingMechanism(ABC):
    """Commitment ``theta -> g_theta`` to a distribution over public signals."""

    kind: str = ""

    @property
    @abstractmethod
    def num_signals(self) -> int:
        pass

    @abstractmethod
    def kernel(self, prior: Prior, theta: float) -> np.ndarray:
        """Signal distribution ``g_theta``."""

    @abstractmethod
    def signal_moments(self, prior: Prior) -> Tuple[np.ndarray, np.ndarray]:
        """Probability and posterior mean of every signal (``nan`` mean for
        signals never sent)."""

    @abstractmethod
    def mass_below(self, prior: Prior, t: float) -> np.ndarray:
        """Joint probability ``P{signal i, theta <= t}`` per signal."""

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        pass

    def to_direct(self, prior: Prior) -> DirectMechanism:
        """Direct mechanism; zero-probability signals are dropped."""
        probs, means = self.signal_moments(prior)
        return DirectMechanism.from_signals(probs, means)

    def draw_signal(
        self, prior: Prior, theta: float, rng: np.random.Generator
    ) -> int:
        row = self.kernel(prior, theta)
        index = int(np.searchsorted(np.cumsum(row), rng.random(), "right"))
        return min(index, row.size - 1)

    def to_config(self, prior: Optional[Prior] = None) -> Dict[str, Any]:
        config = {"type": self.kind, **self.params()}
        if prior is not None:
            config["direct"] = self.to_direct(prior).to_config()
        return config


def _moments(mass: np.ndarray, first: np.ndarray):
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = first / np.where(mass > 0, mass, 1)
        means = np.where(mass > ZERO_MASS, ratio, np.nan)
    return mass, means


@register_mechanism("monotone_partition")
class MonotonePartition(SignallingMechanism):
    """Deterministic signal ``i`` on ``[t_{i-1}, t_i]``.

    A risk value on an inner threshold goes to the lower interval, which
    matches ``q_i = F(t_i) - F(t_{i-1})`` for right-continuous ``F``.
    """

    kind = "monotone_partition"

    def __init__(self, thresholds: Sequence[float]):
        thresholds = np.asarray(thresholds, dtype=float).ravel()
        if thresholds.size < 2 or np.any(np.diff(thresholds) <= 0):
            raise ValueError(f'Invalid thresholds "{thresholds.tolist()}"')
        self.thresholds = thresholds
        self.thresholds.setflags(write=False)

    @property
    def num_signals(self) -> int:
        return self.thresholds.size - 1

    def _index(self, theta):
        inner = self.thresholds[1:-1]
        return np.searchsorted(inner, theta, "left")

    def kernel(self, prior, theta):
        row = np.zeros(self.num_signals)
        row[int(self._index(theta))] = 1.0
        return row

    def signal_moments(self, prior):
        levels = np.asarray(prior.cdf(self.thresholds), dtype=float)
        levels[0] = 0.0
        levels[-1] = 1.0
        mass = np.diff(levels)
        first = np.diff(prior.integrated_quantile(levels))
        return _moments(mass, first)

    def mass_below(self, prior, t):
        levels = np.asarray(prior.cdf(self.thresholds), dtype=float)
        levels[0] = 0.0
        levels[-1] = 1.0
        f = prior.cdf(t)
        return np.clip(f - levels[:-1], 0.0, np.diff(levels))

    def params(self):
        return {"thresholds": self.thresholds.tolist()}

    @classmethod
    def from_config(cls, config):
        return cls(config["thresholds"])

    def __repr__(self):
        return f"MonotonePartition(thresholds={self.thresholds.tolist()})"


@register_mechanism("piecewise_mixture")
class PiecewiseMixture(SignallingMechanism):
    """Two signals; below the breakpoint ``t`` signal 1 is sent with
    probability ``lam``, above it with probability ``alpha``."""

    kind = "piecewise_mixture"

    def __init__(self, t: float, lam: float, alpha: float):
        if not (0 <= lam <= 1 and 0 <= alpha <= 1):
            raise ValueError(f'Invalid mixture probabilities "{lam}, {alpha}"')
        self.t = float(t)
        self.lam = float(lam)
        self.alpha = float(alpha)

    @property
    def num_signals(self) -> int:
        return 2

    @property
    def rows(self) -> np.ndarray:
        return np.array([[self.lam, 1 - self.lam], [self.alpha, 1 - self.alpha]])

    def kernel(self, prior, theta):
        return self.rows[0 if theta <= self.t else 1]

    def signal_moments(self, prior):
        f = float(prior.cdf(self.t))
        mass = self.rows.T @ np.array([f, 1 - f])
        means = np.full(2, np.nan)
        for i, (lam, alpha) in enumerate(self.rows.T):
            if mass[i] > ZERO_MASS:
                means[i] = prior.delta(alpha, lam, self.t)
        return mass, means

    def mass_below(self, prior, t):
        f_break = float(prior.cdf(self.t))
        f = float(prior.cdf(t))
        weights = np.array([min(f, f_break), max(f - f_break, 0.0)])
        return self.rows.T @ weights

    def params(self):
        return {"t": self.t, "lambda": self.lam, "alpha": self.alpha}

    @classmethod
    def from_config(cls, config):
        return cls(config["t"], config["lambda"], config["alpha"])

    def __repr__(self):
        return f"PiecewiseMixture(t={self.t}, lam={self.lam}, alpha={self.alpha})"


@register_mechanism("discrete_table")
class DiscreteTable(SignallingMechanism):
    """Signal table over finitely many states.

    Args:
        states: state values (atoms of a discrete prior, or representatives of
            quantile cells).
        probs: state probabilities.
        rows: row-stochastic matrix, ``rows[j, i] = g_{state j}(i)``.
        edges: optional quantile-level edges of the cells; when given, state
            ``j`` stands for the prior mass between ``edges[j]`` and
            ``edges[j + 1]`` and the table applies to any prior.
    """

    kind = "discrete_table"

    def __init__(
        self,
        states: Sequence[float],
        probs: Sequence[float],
        rows: np.ndarray,
        edges: Optional[Sequence[float]] = None,
    ):
        states = np.asarray(states, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if states.shape != probs.shape or rows.shape[0] != states.size:
            raise ValueError("Inconsistent table dimensions")
        if np.any(rows < -ROW_TOL) or np.any(rows > 1 + ROW_TOL):
            raise ValueError("Table entries must lie in [0, 1]")
        if np.any(np.abs(rows.sum(axis=1) - 1) > ROW_TOL):
            raise ValueError("Table rows must sum to 1")
        if edges is not None:
            edges = np.asarray(edges, dtype=float).ravel()
            if edges.size != states.size + 1 or np.any(np.diff(edges) < 0):
                raise ValueError(f'Invalid cell edges "{edges.tolist()}"')
        self.states = states
        self.probs = probs
        self.rows = np.clip(rows, 0.0, 1.0)
        self.edges = edges

    @property
    def num_signals(self) -> int:
        return self.rows.shape[1]

    def _state(self, prior: Prior, theta: float) -> int:
        if self.edges is not None:
            level = float(prior.cdf(theta))
            j = int(np.searchsorted(self.edges, level, "left")) - 1
            return min(max(j, 0), self.states.size - 1)
        matches = np.flatnonzero(np.isclose(self.states, theta, rtol=0, atol=1e-12))
        if matches.size == 0:
            raise DomainError(f"Risk value {theta} is not a state of the table")
        return int(matches[0])

    def kernel(self, prior, theta):
        return self.rows[self._state(prior, theta)]

    def signal_moments(self, prior=None):
        mass = self.probs @ self.rows
        first = (self.probs * self.states) @ self.rows
        return _moments(mass, first)

    def mass_below(self, prior, t):
        if self.edges is not None:
            f = float(prior.cdf(t))
            share = np.clip(f - self.edges[:-1], 0.0, np.diff(self.edges))
            return share @ self.rows
        return (self.probs * (self.states <= t)) @ self.rows

    def params(self):
        config = {
            "states": self.states.tolist(),
            "probs": self.probs.tolist(),
            "rows": self.rows.tolist(),
        }
        if self.edges is not None:
            config["edges"] = self.edges.tolist()
        return config

    @classmethod
    def from_config(cls, config):
        return cls(
            config["states"], config["probs"], config["rows"], config.get("edges")
        )

    def __repr__(self):
        return f"DiscreteTable(states={self.states.size}, signals={self.num_signals})"


@register_mechanism("full_information")
class FullInformation(SignallingMechanism):
    """Reveals the risk parameter; evaluated analytically, it has no finite
    direct mechanism for continuous priors."""

    kind = "full_information"

    @property
    def num_signals(self) -> int:
        raise DomainError("Full information sends one signal per risk value")

    def kernel(self, prior, theta):
        raise DomainError("Full information sends one signal per risk value")

    def signal_moments(self, prior):
        if not prior.is_discrete:
            raise DomainError("Full information on a continuous prior")
        return prior.probs.copy(), prior.support.copy()

    def mass_below(self, prior, t):
        return self.signal_moments(prior)[0] * (prior.support <= t)

    def draw_signal(self, prior, theta, rng):
        raise DomainError("Full information reveals theta itself")

    def params(self):
        return {}

    @classmethod
    def from_config(cls, config):
        return cls()

    def __repr__(self):
        return "FullInformation()"


def uninformative(prior: Prior) -> MonotonePartition:
    """Single signal for every risk value: thresholds ``(0, M)``."""
    return MonotonePartition([0.0, prior.high])


def mpc_gap(direct: DirectMechanism, prior: Prior) -> float:
    """Largest violation of the mean-preserving-contraction inequalities
    ``sum_{j<=m} q_j theta_j >= int_0^{sum_{j<=m} q_j} F^-1`` over signals
    sorted by posterior mean. Non-positive for implementable mechanisms."""
    ordered = direct.sorted()
    levels = np.minimum(np.cumsum(ordered.probs), 1.0)
    partial = np.cumsum(ordered.probs * ordered.means)
    return float(np.max(prior.integrated_quantile(levels) - partial))


def posterior_cdf(
    mechanism: SignallingMechanism, prior: Prior, signal: int, t: float
) -> float:
    """Posterior CDF ``F_i(t) = P{theta <= t | signal i}``."""
    probs, _ = mechanism.signal_moments(prior)
    if probs[signal] <= ZERO_MASS:
        raise DomainError(f"Signal {signal} is never sent")
    return float(mechanism.mass_below(prior, t)[signal] / probs[signal])


def mechanism_from_config(config: Dict[str, Any]) -> SignallingMechanism:
    """Builds a mechanism from its JSON encoding; any embedded ``"direct"``
    block is informational and ignored."""
    return from_config(MECHANISMS, "type", config)
