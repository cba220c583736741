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

import warnings

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from hybridsignal.distributions import Prior
from hybridsignal.exceptions import DomainError
from hybridsignal.mechanisms import (
    DirectMechanism,
    DiscreteTable,
    MonotonePartition,
    PiecewiseMixture,
    SignallingMechanism,
    uninformative,
)
from hybridsignal.ops import BISECTION_TOL, bisect_inf
from hybridsignal.typing import TIntervals

from .oracle import ORACLE_GRID, discretize, oracle_value

__all__ = [
    "R1",
    "R2A",
    "R2_GENERAL",
    "R3",
    "R4",
    "EMPTY",
    "MixtureSplit",
    "RegimeLabel",
    "StatelessDesign",
    "classify",
    "search_r2a",
    "solve_split",
    "pooling_low_mass",
    "pooling_high_mass",
    "partition_mechanism",
    "design",
]

R1 = "R1"
R2A = "R2a"
R2_GENERAL = "R2_general"
R3 = "R3"
R4 = "R4"
EMPTY = "empty"

R2A_TARGETS = 33
R2A_BREAKPOINTS = 512
R4_SCAN_POINTS = 1024
SPLIT_TOL = 1e-7

_LEVEL_TOL = 1e-12


@dataclass(frozen=True)
class MixtureSplit:
    """Two-signal mixture hitting ``target_low`` in interval ``lower`` and
    ``target_high`` in interval ``upper``."""

    lower: int
    upper: int
    t: float
    alpha: float
    lam: float
    target_low: float
    target_high: float

    def to_config(self) -> Dict[str, Any]:
        return {
            "k": self.lower,
            "l": self.upper,
            "t": self.t,
            "alpha": self.alpha,
            "lambda": self.lam,
            "A": self.target_low,
            "B": self.target_high,
        }


@dataclass(frozen=True)
class RegimeLabel:
    name: str
    interval: Optional[int] = None
    split: Optional[MixtureSplit] = None

    def to_config(self) -> Dict[str, Any]:
        config: Dict[str, Any] = {"name": self.name}
        if self.interval is not None:
            config["k"] = self.interval
        if self.split is not None:
            config.update(self.split.to_config())
        return config

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class StatelessDesign:
    mechanism: SignallingMechanism
    value: float
    regime: RegimeLabel
    direct: DirectMechanism = field(repr=False)
    approximate: bool = False

    def to_config(self, prior: Prior) -> Dict[str, Any]:
        return {
            "regime": self.regime.to_config(),
            "value": self.value,
            "approximate": self.approximate,
            "mechanism": self.mechanism.to_config(prior),
        }


def _check_beliefs(beliefs: Sequence[Sequence[float]]) -> TIntervals:
    beliefs = [(float(lo), float(hi)) for lo, hi in beliefs]
    for (lo, hi), nxt in zip(beliefs, beliefs[1:] + [(np.inf, np.inf)]):
        if not lo <= hi < nxt[0]:
            raise DomainError(
                f"Belief intervals must be sorted and disjoint: {beliefs}"
            )
    return beliefs


def solve_split(
    prior: Prior, target_low: float, target_high: float, t: float
) -> Optional[Tuple[float, float]]:
    """Mixture probabilities ``(lam, alpha)`` at breakpoint ``t`` whose two
    signals have posterior means ``target_low`` and ``target_high``, or
    ``None`` when they fall outside ``[0, 1]``."""
    mu = prior.mean
    f = float(prior.cdf(t))
    if not (_LEVEL_TOL < f < 1 - _LEVEL_TOL) or not target_low < mu < target_high:
        return None
    s_low = prior.mean_below(t)
    s_high = prior.mean_strictly_above(t)
    spread = s_high - s_low
    if spread <= 0:
        return None
    weight = (target_high - mu) / (target_high - target_low)
    lam = weight * (s_high - target_low) / spread / f
    alpha = weight * (target_low - s_low) / spread / (1 - f)
    levels = np.array([lam, alpha])
    if np.any(levels < -_LEVEL_TOL) or np.any(levels > 1 + _LEVEL_TOL):
        return None
    return min(max(lam, 0.0), 1.0), min(max(alpha, 0.0), 1.0)


def search_r2a(
    prior: Prior,
    beliefs: Sequence[Sequence[float]],
    targets: int = R2A_TARGETS,
    breakpoints: int = R2A_BREAKPOINTS,
    tol: float = SPLIT_TOL,
) -> Optional[MixtureSplit]:
    """Grid search for a two-signal mixture splitting the prior mean across
    the gap it falls in.

    Intervals, targets and breakpoints are scanned in lexicographic order and
    the first verified hit is returned. Targets run from the interval
    midpoint outwards; breakpoints sit at the quantile levels
    ``k / breakpoints``, ``0 < k < breakpoints``.
    """
    beliefs = _check_beliefs(beliefs)
    mu = prior.mean
    below = [k for k, (_, hi) in enumerate(beliefs) if hi < mu]
    above = [k for k, (lo, _) in enumerate(beliefs) if lo > mu]

    levels = np.arange(1, breakpoints) / breakpoints
    ts = np.asarray(prior.quantile(levels), dtype=float)
    f = np.asarray(prior.cdf(ts), dtype=float)
    valid = (f > _LEVEL_TOL) & (f < 1 - _LEVEL_TOL)
    ts, f = ts[valid], f[valid]
    iq = np.asarray(prior.integrated_quantile(f), dtype=float)
    s_low = iq / f
    s_high = (mu - iq) / (1 - f)
    spread = s_high - s_low
    usable = spread > 0
    ts, f, s_low, s_high, spread = (
        a[usable] for a in (ts, f, s_low, s_high, spread)
    )
    if ts.size == 0:
        return None

    for k in below:
        grid_low = _targets(beliefs[k], targets)
        for ell in above:
            grid_high = _targets(beliefs[ell], targets)
            for a in grid_low:
                for b in grid_high:
                    weight = (b - mu) / (b - a)
                    lam = weight * (s_high - a) / spread / f
                    alpha = weight * (a - s_low) / spread / (1 - f)
                    ok = (
                        (lam >= -_LEVEL_TOL)
                        & (lam <= 1 + _LEVEL_TOL)
                        & (alpha >= -_LEVEL_TOL)
                        & (alpha <= 1 + _LEVEL_TOL)
                    )
                    for i in np.flatnonzero(ok):
                        split = _verify(
                            prior, k, ell, float(ts[i]), lam[i], alpha[i], a, b, tol
                        )
                        if split is not None:
                            return split
    return None


def _targets(interval, count: int) -> np.ndarray:
    grid = np.unique(np.linspace(*interval, count))
    middle = 0.5 * (interval[0] + interval[1])
    return grid[np.argsort(np.abs(grid - middle), kind="stable")]


def _verify(prior, k, ell, t, lam, alpha, a, b, tol) -> Optional[MixtureSplit]:
    lam = min(max(float(lam), 0.0), 1.0)
    alpha = min(max(float(alpha), 0.0), 1.0)
    if lam == alpha:
        return None
    try:
        low = prior.delta(alpha, lam, t)
        high = prior.delta(1 - alpha, 1 - lam, t)
    except DomainError:
        return None
    if abs(low - a) > tol or abs(high - b) > tol:
        return None
    return MixtureSplit(k, ell, t, alpha, lam, float(a), float(b))


def classify(
    prior: Prior,
    beliefs: Sequence[Sequence[float]],
    targets: int = R2A_TARGETS,
    breakpoints: int = R2A_BREAKPOINTS,
) -> RegimeLabel:
    """Regime of the prior mean relative to the belief intervals."""
    beliefs = _check_beliefs(beliefs)
    if not beliefs:
        raise DomainError("No belief interval: the optimal value is 0")
    mu = prior.mean
    for k, (lo, hi) in enumerate(beliefs):
        if lo <= mu <= hi:
            return RegimeLabel(R1, interval=k)
    if mu > beliefs[-1][1]:
        return RegimeLabel(R3)
    if mu < beliefs[0][0]:
        return RegimeLabel(R4)
    split = search_r2a(prior, beliefs, targets, breakpoints)
    if split is not None:
        return RegimeLabel(R2A, split=split)
    return RegimeLabel(R2_GENERAL)


def pooling_low_mass(prior: Prior, upper: float) -> float:
    """Largest mass that can be pooled into a signal with posterior mean at
    most ``upper`` while the rest is revealed as one high signal."""
    mu, M = prior.mean, prior.high
    return min(float(prior.h(upper)), (M - mu) / (M - upper))


def pooling_high_mass(
    prior: Prior,
    lower: float,
    scan_points: int = R4_SCAN_POINTS,
    tol: float = BISECTION_TOL,
) -> Optional[float]:
    """Smallest low-signal mass ``q`` such that the complementary high signal
    has posterior mean ``lower``.

    ``q`` is feasible when the bottom-``q`` quantile can carry the low mean
    ``lower - (lower - mu) / q``, i.e. ``q <= h(lower - (lower - mu) / q)``,
    equivalently ``int_0^q F^-1 <= q lower - (lower - mu)``. The feasible set
    is bracketed on a grid and refined by bisection; ``None`` is returned
    when the bracketed set is not contiguous.
    """
    mu = prior.mean
    if lower <= mu:
        raise DomainError(f"Pooling above {lower} needs a prior mean below it")
    q_min = (lower - mu) / lower

    def feasible(q):
        q = np.asarray(q, dtype=float)
        slack = q * lower - (lower - mu) - prior.integrated_quantile(q)
        return slack >= -_LEVEL_TOL

    qs = np.linspace(q_min, 1.0, scan_points)
    ok = feasible(qs)
    ok[-1] = True
    first = int(np.argmax(ok))
    if not np.all(ok[first:]):
        return None
    if first == 0:
        return float(q_min)
    return float(bisect_inf(feasible, qs[first - 1], qs[first], tol=tol))


def partition_mechanism(prior: Prior, q: float) -> SignallingMechanism:
    """Two-signal partition sending the bottom-``q`` quantile to signal 0.

    For a discrete prior whose atom straddles level ``q`` the atom is split
    between the two signals, which a threshold cannot express. The same table
    is used when the low signal ends on an atom at 0, as no threshold in
    ``(0, M)`` separates it.
    """
    if q <= _LEVEL_TOL or q >= 1 - _LEVEL_TOL:
        return uninformative(prior)
    if prior.is_discrete:
        cum = np.cumsum(prior.probs)
        j = int(np.searchsorted(cum, q - _LEVEL_TOL, "left"))
        on_level = abs(cum[j] - q) <= _LEVEL_TOL
        if not on_level or prior.support[j] <= 0:
            below = cum[j - 1] if j > 0 else 0.0
            share = 1.0 if on_level else (q - below) / prior.probs[j]
            low = np.where(np.arange(cum.size) < j, 1.0, 0.0)
            low[j] = share
            rows = np.stack([low, 1 - low], axis=1)
            return DiscreteTable(prior.support, prior.probs, rows)
        t = float(prior.support[j])
    else:
        t = float(prior.quantile(q))
    if not 0 < t < prior.high:
        return uninformative(prior)
    return MonotonePartition([0.0, t, prior.high])


def _finish(prior, mechanism, value, regime, approximate=False) -> StatelessDesign:
    return StatelessDesign(
        mechanism, float(value), regime, mechanism.to_direct(prior), approximate
    )


def _oracle_design(prior, beliefs, regime, grid) -> StatelessDesign:
    result = oracle_value(discretize(prior, grid, beliefs))
    return _finish(prior, result.mechanism, result.value, regime, approximate=True)


def design(
    prior: Prior,
    beliefs: Sequence[Sequence[float]],
    grid: int = ORACLE_GRID,
    targets: int = R2A_TARGETS,
    breakpoints: int = R2A_BREAKPOINTS,
    scan_points: int = R4_SCAN_POINTS,
) -> StatelessDesign:
    """Optimal public signalling mechanism for belief intervals ``beliefs``.

    Closed forms cover every regime but the general gap case, which falls
    back to the discretized oracle (flagged ``approximate``).
    """
    beliefs = _check_beliefs(beliefs)
    if not beliefs:
        return _finish(prior, uninformative(prior), 0.0, RegimeLabel(EMPTY))

    regime = classify(prior, beliefs, targets, breakpoints)
    if regime.name == R1:
        return _finish(prior, uninformative(prior), 1.0, regime)

    if regime.name == R2A:
        split = regime.split
        mixture = PiecewiseMixture(split.t, split.lam, split.alpha)
        return _finish(prior, mixture, 1.0, regime)

    if regime.name == R3:
        q = pooling_low_mass(prior, beliefs[-1][1])
        return _finish(prior, partition_mechanism(prior, q), q, regime)

    if regime.name == R4:
        q = pooling_high_mass(prior, beliefs[0][0], scan_points)
        if q is not None:
            return _finish(prior, partition_mechanism(prior, q), 1 - q, regime)
        warnings.warn(
            "Feasible pooling masses are not contiguous, using the oracle",
            stacklevel=2,
        )
        return _oracle_design(prior, beliefs, regime, grid)

    warnings.warn(
        "Prior mean in a gap without a two-signal split, using the oracle",
        stacklevel=2,
    )
    return _oracle_design(prior, beliefs, regime, grid)
