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

from typing import Callable, Iterable, List

import numpy as np

from hybridsignal.typing import TArrayLike, TInterval, TIntervals

BISECTION_TOL = 1e-10
CONDENSE_TOL = 1e-12
MEMBERSHIP_TOL = 1e-7

_MAX_BISECTIONS = 200


def _bracket(lo: TArrayLike, hi: TArrayLike):
    lo, hi = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    )
    return lo.copy(), hi.copy()


def _unwrap(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def bisect_sup(
    predicate: Callable[[np.ndarray], np.ndarray],
    lo: TArrayLike,
    hi: TArrayLike,
    tol: float = BISECTION_TOL,
):
    """Returns ``sup{x in [lo, hi] : predicate(x)}`` for a predicate that
    holds on a prefix of the bracket.

    ``predicate(lo)`` is assumed to hold. Works elementwise on arrays of
    brackets; the returned point always satisfies the predicate.

    Args:
        predicate: vectorized boolean predicate.
        lo: lower end(s) of the bracket.
        hi: upper end(s) of the bracket.
        tol: bracket width at which to stop.
    """
    lo, hi = _bracket(lo, hi)
    at_hi = np.asarray(predicate(hi), dtype=bool)
    top = hi.copy()
    for _ in range(_MAX_BISECTIONS):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        ok = np.asarray(predicate(mid), dtype=bool)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return _unwrap(np.where(at_hi, top, lo))


def bisect_inf(
    predicate: Callable[[np.ndarray], np.ndarray],
    lo: TArrayLike,
    hi: TArrayLike,
    tol: float = BISECTION_TOL,
):
    """Returns ``inf{x in [lo, hi] : predicate(x)}`` for a predicate that
    holds on a suffix of the bracket.

    ``predicate(hi)`` is assumed to hold; the returned point satisfies the
    predicate.
    """
    lo, hi = _bracket(lo, hi)
    at_lo = np.asarray(predicate(lo), dtype=bool)
    bottom = lo.copy()
    for _ in range(_MAX_BISECTIONS):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        ok = np.asarray(predicate(mid), dtype=bool)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return _unwrap(np.where(at_lo, bottom, hi))


def condense_intervals(
    intervals: Iterable[TInterval], tol: float = CONDENSE_TOL
) -> TIntervals:
    """Sorts closed intervals and merges the ones that overlap or touch
    (within ``tol``)."""
    merged: List[List[float]] = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def interval_index(
    x: TArrayLike, intervals: TIntervals, tol: float = MEMBERSHIP_TOL
) -> np.ndarray:
    """Index of the closed interval containing each ``x``, -1 when none does."""
    x = np.asarray(x, dtype=float)
    index = np.full(x.shape, -1, dtype=int)
    for k, (lo, hi) in reversed(list(enumerate(intervals))):
        inside = (x >= lo - tol) & (x <= hi + tol)
        index = np.where(inside, k, index)
    return index
