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
import warnings

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from hybridsignal.exceptions import DomainError
from hybridsignal.ops import BISECTION_TOL, bisect_sup
from hybridsignal.registry import PRIORS, from_config, register_prior
from hybridsignal.typing import TArrayLike

__all__ = [
    "Prior",
    "Uniform",
    "Discrete",
    "PiecewiseLinearCdf",
    "prior_from_config",
]

PROBABILITY_TOL = 1e-12
RENORMALIZE_TOL = 1e-6


def _unwrap(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


def _check_levels(p: TArrayLike, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise DomainError(f"{name} must lie in [0, 1], got {p}")
    return p


class Prior(ABC):
    """Bounded distribution of the risk parameter over ``[low, high]``.

    Subclasses provide the CDF, its left limit, the generalized inverse and
    the integrated quantile ``s -> int_0^s F^-1(t) dt`` in closed form;
    everything else (conditional means, ``delta``, ``h``, sampling) is
    derived from those four primitives.

    All methods accept scalars or numpy arrays and return the same kind.
    """

    family: str = ""
    low: float
    high: float

    @abstractmethod
    def cdf(self, t: TArrayLike):
        """``F(t)``, right-continuous, clamped to ``[0, 1]``."""

    @abstractmethod
    def cdf_left(self, t: TArrayLike):
        """Left limit ``F(t-)``."""

    @abstractmethod
    def quantile(self, p: TArrayLike):
        """Generalized inverse ``inf{t : F(t) >= p}``."""

    @abstractmethod
    def integrated_quantile(self, s: TArrayLike):
        """``int_0^s F^-1(t) dt``."""

    @abstractmethod
    def to_config(self) -> Dict[str, Any]:
        pass

    @classmethod
    @abstractmethod
    def from_config(cls, config: Dict[str, Any]) -> "Prior":
        pass

    @property
    def mean(self) -> float:
        return float(self.integrated_quantile(1.0))

    @property
    def is_discrete(self) -> bool:
        return False

    def conditional_mean(self, p_lo: TArrayLike, p_hi: TArrayLike):
        """Mean of the risk parameter over the quantile band ``[p_lo, p_hi]``."""
        p_lo = _check_levels(p_lo, "p_lo")
        p_hi = _check_levels(p_hi, "p_hi")
        width = p_hi - p_lo
        if np.any(width <= 0):
            raise DomainError("Conditioning on an empty quantile band")
        iq = self.integrated_quantile
        return _unwrap((iq(p_hi) - iq(p_lo)) / width)

    def mean_below(self, t: TArrayLike):
        """``E[theta | theta <= t]``."""
        f = np.asarray(self.cdf(t), dtype=float)
        if np.any(f <= 0):
            raise DomainError(f"Conditioning on theta <= {t}, a null event")
        return _unwrap(self.integrated_quantile(f) / f)

    def mean_above(self, t: TArrayLike):
        """``E[theta | theta >= t]``."""
        f = np.asarray(self.cdf_left(t), dtype=float)
        if np.any(f >= 1):
            raise DomainError(f"Conditioning on theta >= {t}, a null event")
        return _unwrap((self.mean - self.integrated_quantile(f)) / (1 - f))

    def mean_strictly_above(self, t: TArrayLike):
        """``E[theta | theta > t]``; equal to :meth:`mean_above` without atoms."""
        f = np.asarray(self.cdf(t), dtype=float)
        if np.any(f >= 1):
            raise DomainError(f"Conditioning on theta > {t}, a null event")
        return _unwrap((self.mean - self.integrated_quantile(f)) / (1 - f))

    def delta(self, alpha: float, lam: float, t: float) -> float:
        """Posterior mean of a signal sent with probability ``lam`` below the
        breakpoint ``t`` and ``alpha`` above it."""
        f = float(self.cdf(t))
        w_low = lam * f
        w_high = alpha * (1 - f)
        denominator = w_low + w_high
        if denominator <= 0:
            raise DomainError(
                f"Signal never generated (alpha={alpha}, lambda={lam}, t={t})"
            )
        numerator = 0.0
        if w_low > 0:
            numerator += w_low * self.mean_below(t)
        if w_high > 0:
            numerator += w_high * self.mean_strictly_above(t)
        return numerator / denominator

    def h(self, theta: TArrayLike, tol: float = BISECTION_TOL):
        """``sup{s in [0, 1] : int_0^s F^-1 <= s theta}``.

        The bottom-``s`` average ``int_0^s F^-1 / s`` is non-decreasing, so
        the feasible set is an interval ``[0, h]`` and bisection applies.
        Returns 0 when ``theta < low`` (only ``s = 0`` is feasible).
        """
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0):
            raise DomainError(f"h is defined for theta >= 0, got {theta}")

        def feasible(s):
            return self.integrated_quantile(s) <= s * theta

        zeros = np.zeros_like(theta)
        return bisect_sup(feasible, zeros, zeros + 1.0, tol=tol)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        """Inverse-CDF sampling."""
        return self.quantile(rng.random(size))

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.to_config() == other.to_config()

    def __hash__(self) -> int:
        return hash(repr(self.to_config()))

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.to_config().items())
        return f"{self.__class__.__name__}({args})"


@register_prior("uniform")
class Uniform(Prior):
    """Uniform distribution on ``[low, high]``."""

    family = "uniform"

    def __init__(self, low: float, high: float):
        low, high = float(low), float(high)
        if not (math.isfinite(low) and math.isfinite(high)) or not 0 <= low < high:
            raise ValueError(f'Invalid uniform support "[{low}, {high}]"')
        self.low = low
        self.high = high

    @property
    def width(self) -> float:
        return self.high - self.low

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _unwrap(np.clip((t - self.low) / self.width, 0.0, 1.0))

    cdf_left = cdf

    def quantile(self, p):
        p = _check_levels(p)
        return _unwrap(self.low + self.width * p)

    def integrated_quantile(self, s):
        s = _check_levels(s, "s")
        return _unwrap(self.low * s + 0.5 * self.width * s**2)

    def to_config(self):
        return {"family": self.family, "low": self.low, "high": self.high}

    @classmethod
    def from_config(cls, config):
        return cls(config["low"], config["high"])


@register_prior("discrete")
class Discrete(Prior):
    """Finitely supported prior.

    Zero-probability atoms are dropped and duplicated atoms merged.
    Probabilities must sum to one; a deviation up to ``RENORMALIZE_TOL`` is
    renormalized (with a warning beyond ``PROBABILITY_TOL``).
    """

    family = "discrete"

    def __init__(self, support: Sequence[float], probs: Sequence[float]):
        support = np.asarray(support, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        if support.shape != probs.shape or support.size == 0:
            raise ValueError(
                f'Invalid discrete prior "support={support.tolist()}, '
                f'probs={probs.tolist()}"'
            )
        if not np.all(np.isfinite(support)) or np.any(support < 0):
            raise ValueError(f'Invalid support "{support.tolist()}"')
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError(f'Invalid probabilities "{probs.tolist()}"')

        total = probs.sum()
        if abs(total - 1) > RENORMALIZE_TOL:
            raise ValueError(f"Probabilities sum to {total}, expected 1")
        if abs(total - 1) > PROBABILITY_TOL:
            warnings.warn(
                f"Renormalizing probabilities summing to {total}", stacklevel=2
            )

        atoms, inverse = np.unique(support, return_inverse=True)
        weights = np.bincount(inverse, weights=probs, minlength=atoms.size)
        keep = weights > 0
        atoms, weights = atoms[keep], weights[keep] / total
        if atoms.size < 2:
            raise ValueError("A discrete prior needs at least two atoms")

        self.support = atoms
        self.probs = weights
        self.support.setflags(write=False)
        self.probs.setflags(write=False)
        cum = np.cumsum(weights)
        cum[-1] = 1.0
        self._cum = np.concatenate([[0.0], cum])
        self.low = float(atoms[0])
        self.high = float(atoms[-1])

    @property
    def is_discrete(self) -> bool:
        return True

    def cdf(self, t):
        index = np.searchsorted(self.support, np.asarray(t, dtype=float), "right")
        return _unwrap(self._cum[index])

    def cdf_left(self, t):
        index = np.searchsorted(self.support, np.asarray(t, dtype=float), "left")
        return _unwrap(self._cum[index])

    def quantile(self, p):
        p = _check_levels(p)
        index = np.searchsorted(self._cum[1:], p, "left")
        return _unwrap(self.support[np.minimum(index, self.support.size - 1)])

    def integrated_quantile(self, s):
        s = _check_levels(s, "s")
        used = np.clip(s[..., None] - self._cum[:-1], 0.0, self.probs)
        return _unwrap(used @ self.support)

    def to_config(self):
        return {
            "family": self.family,
            "support": self.support.tolist(),
            "probs": self.probs.tolist(),
        }

    @classmethod
    def from_config(cls, config):
        return cls(config["support"], config["probs"])


@register_prior("pwl_cdf")
class PiecewiseLinearCdf(Prior):
    """Continuous prior whose CDF interpolates linearly between knots.

    Knots are ``(t, F(t))`` pairs with increasing ``t`` and non-decreasing
    ``F`` from 0 to 1; flat stretches (gaps in the support) are allowed.
    """

    family = "pwl_cdf"

    def __init__(self, knots: Sequence[Tuple[float, float]]):
        knots = np.asarray(knots, dtype=float)
        if knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 2:
            raise ValueError(f'Invalid knots "{knots.tolist()}"')
        ts, fs = knots[:, 0], knots[:, 1]
        if (
            not np.all(np.isfinite(knots))
            or ts[0] < 0
            or np.any(np.diff(ts) <= 0)
            or np.any(np.diff(fs) < 0)
            or fs[0] != 0
            or fs[-1] != 1
        ):
            raise ValueError(f'Invalid knots "{knots.tolist()}"')

        # trim the flat head and tail so that [low, high] is the support
        first = int(np.flatnonzero(fs == 0)[-1])
        last = int(np.flatnonzero(fs == 1)[0])
        self.knots = knots[first : last + 1].copy()
        self.knots.setflags(write=False)
        self._t = self.knots[:, 0]
        self._f = self.knots[:, 1]
        segment = np.diff(self._f) * (self._t[:-1] + self._t[1:]) / 2
        self._integral = np.concatenate([[0.0], np.cumsum(segment)])
        self.low = float(self._t[0])
        self.high = float(self._t[-1])

    def cdf(self, t):
        return _unwrap(np.interp(np.asarray(t, dtype=float), self._t, self._f))

    cdf_left = cdf

    def _locate(self, p: np.ndarray):
        # first knot with F >= p; the segment ending there has positive slope
        j = np.clip(np.searchsorted(self._f, p, "left"), 1, self._f.size - 1)
        f0, f1 = self._f[j - 1], self._f[j]
        t0, t1 = self._t[j - 1], self._t[j]
        t = t0 + (p - f0) / (f1 - f0) * (t1 - t0)
        return j, np.where(p <= 0, self.low, t)

    def quantile(self, p):
        p = _check_levels(p)
        return _unwrap(self._locate(p)[1])

    def integrated_quantile(self, s):
        s = _check_levels(s, "s")
        j, t = self._locate(s)
        value = self._integral[j - 1] + (s - self._f[j - 1]) * (self._t[j - 1] + t) / 2
        return _unwrap(np.where(s <= 0, 0.0, value))

    def to_config(self):
        return {"family": self.family, "knots": self.knots.tolist()}

    @classmethod
    def from_config(cls, config):
        return cls(config["knots"])


def prior_from_config(config: Dict[str, Any]) -> Prior:
    """Builds a prior from its JSON encoding, e.g.
    ``{"family": "uniform", "low": 5, "high": 20}``."""
    return from_config(PRIORS, "family", config)
