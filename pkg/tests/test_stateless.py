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

import numpy as np
import pytest

from hybridsignal.design import (
    EMPTY,
    R1,
    R2_GENERAL,
    R2A,
    R3,
    R4,
    classify,
    design,
    partition_mechanism,
    pooling_high_mass,
    pooling_low_mass,
    search_r2a,
    solve_split,
)
from hybridsignal.distributions import Discrete, PiecewiseLinearCdf, Uniform
from hybridsignal.exceptions import DomainError
from hybridsignal.harness import (
    benchmark_fullinfo,
    benchmark_noinfo,
    evaluate_stateless,
)
from hybridsignal.mechanisms import (
    DiscreteTable,
    MonotonePartition,
    PiecewiseMixture,
    mpc_gap,
)


def random_prior(rng):
    u = rng.random()
    if u < 0.4:
        low = rng.uniform(0, 5)
        return Uniform(low, low + rng.uniform(1, 10))
    if u < 0.7:
        ts = np.cumsum(rng.uniform(0.5, 3, size=4))
        fs = np.concatenate([[0], np.sort(rng.uniform(0, 1, size=2)), [1]])
        return PiecewiseLinearCdf(np.stack([ts, fs], axis=1))
    # small integer lattice, often with an atom at 0
    size = int(rng.integers(2, 6))
    support = np.sort(rng.choice(8, size=size, replace=False)).astype(float)
    weights = rng.integers(1, 5, size=size).astype(float)
    return Discrete(support, weights / weights.sum())


def random_beliefs(rng, prior):
    k = int(rng.integers(1, 4))
    points = rng.uniform(prior.low, prior.high, size=2 * k)
    if prior.is_discrete:
        # endpoints on atoms put pooled masses on cumulative levels
        snap = rng.random(2 * k) < 0.5
        points[snap] = rng.choice(prior.support, size=int(snap.sum()))
    points = np.unique(points)
    points = points[: 2 * (points.size // 2)]
    return [(float(lo), float(hi)) for lo, hi in points.reshape(-1, 2)]


def check_instances(seed, count=10):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        prior = random_prior(rng)
        beliefs = random_beliefs(rng, prior)
        result = design(prior, beliefs, grid=200)
        direct = result.direct

        assert direct.probs.sum() == pytest.approx(1, abs=1e-9)
        assert direct.mean == pytest.approx(prior.mean, abs=1e-8)
        assert mpc_gap(direct, prior) <= 1e-8
        assert direct.num_signals <= len(beliefs) + 1

        report = evaluate_stateless(result.mechanism, prior, beliefs)
        if result.approximate:
            assert report.value >= result.value - 1e-6
            continue
        assert report.value == pytest.approx(result.value, abs=1e-7)
        for benchmark in (benchmark_noinfo(prior), benchmark_fullinfo()):
            other = evaluate_stateless(benchmark, prior, beliefs).value
            assert result.value >= other - 1e-9


class TestClassify:
    def test_examples(self):
        prior = Uniform(0, 10)
        assert classify(prior, [(4, 6)]).name == R1
        assert classify(prior, [(8, 10)]).name == R4
        assert classify(prior, [(1, 2)]).name == R3
        assert classify(prior, [(1, 2), (5, 5), (8, 9)]).interval == 1

    def test_r2a(self):
        regime = classify(Uniform(0, 10), [(2, 3), (7, 8)])
        assert regime.name == R2A
        split = regime.split
        assert (split.lower, split.upper) == (0, 1)
        assert split.t == pytest.approx(5)
        assert (split.lam, split.alpha) == (1, 0)
        assert split.target_low == pytest.approx(2.5)
        assert split.target_high == pytest.approx(7.5)
        config = regime.to_config()
        assert sorted(config) == ["A", "B", "alpha", "k", "l", "lambda", "name", "t"]
        assert str(regime) == R2A

    def test_invalid_beliefs(self):
        with pytest.raises(DomainError):
            classify(Uniform(0, 10), [])
        with pytest.raises(DomainError):
            classify(Uniform(0, 10), [(7, 8), (2, 3)])
        with pytest.raises(DomainError):
            classify(Uniform(0, 10), [(2, 5), (4, 8)])


class TestSplit:
    def test_conditional_means(self):
        assert solve_split(Uniform(0, 10), 2.5, 7.5, 5) == (1.0, 0.0)

    def test_out_of_range(self):
        prior = Uniform(0, 10)
        assert solve_split(prior, 5.5, 7.5, 5) is None
        assert solve_split(prior, 0.5, 9.5, 5) is None
        assert solve_split(prior, 2.5, 7.5, 10) is None

    def test_search_hits_targets(self):
        prior = Uniform(0, 10)
        split = search_r2a(prior, [(2, 3), (7, 8)])
        assert prior.delta(split.alpha, split.lam, split.t) == pytest.approx(
            split.target_low, abs=1e-7
        )
        assert prior.delta(
            1 - split.alpha, 1 - split.lam, split.t
        ) == pytest.approx(split.target_high, abs=1e-7)
        assert split.lam != split.alpha

    def test_search_unreachable(self):
        prior = Discrete([4.99, 5.01], [0.5, 0.5])
        assert search_r2a(prior, [(4.9, 4.95), (5.05, 5.1)]) is None

    def test_search_tight_gap(self):
        # the gap (4, 6) is wider than the prior's spread of conditional means
        prior = PiecewiseLinearCdf([[4.5, 0], [5.5, 1]])
        assert search_r2a(prior, [(3, 4), (6, 7)]) is None


class TestPooling:
    def test_low(self):
        assert pooling_low_mass(Uniform(0, 1), 0.25) == pytest.approx(0.5, abs=1e-9)

    def test_high(self):
        q = pooling_high_mass(Uniform(0, 10), 8)
        assert q == pytest.approx(0.6, abs=1e-9)

        with pytest.raises(DomainError):
            pooling_high_mass(Uniform(0, 10), 5)

    def test_partition(self):
        mechanism = partition_mechanism(Uniform(0, 10), 0.6)
        assert isinstance(mechanism, MonotonePartition)
        assert np.allclose(mechanism.thresholds, [0, 6, 10])

        assert partition_mechanism(Uniform(0, 10), 0).num_signals == 1
        assert partition_mechanism(Uniform(0, 10), 1).num_signals == 1

    def test_partition_atom_at_zero(self):
        prior = Discrete([0, 1], [0.5, 0.5])
        mechanism = partition_mechanism(prior, 0.5)
        assert isinstance(mechanism, DiscreteTable)
        assert np.allclose(mechanism.rows, [[1, 0], [0, 1]])
        assert np.allclose(mechanism.to_direct(prior).means, [0, 1])

    def test_partition_splits_atom(self):
        prior = Discrete([0.4, 0.6, 1.0], [0.3, 0.3, 0.4])
        mechanism = partition_mechanism(prior, 0.25)
        assert isinstance(mechanism, DiscreteTable)
        assert np.allclose(mechanism.rows[:, 0], [0.25 / 0.3, 0, 0])

        mechanism = partition_mechanism(prior, 0.6)
        assert isinstance(mechanism, MonotonePartition)
        assert np.allclose(mechanism.thresholds, [0, 0.6, 1.0])


class TestDesign:
    def test_r3(self):
        prior = Uniform(0, 1)
        result = design(prior, [(0, 0.25)])
        assert result.regime.name == R3
        assert result.value == pytest.approx(0.5, abs=1e-7)
        assert np.allclose(result.mechanism.thresholds, [0, 0.5, 1], atol=1e-7)
        assert result.direct.means[0] == pytest.approx(0.25, abs=1e-7)
        assert not result.approximate

    def test_r4(self):
        prior = Uniform(0, 10)
        result = design(prior, [(8, 10)])
        assert result.regime.name == R4
        assert result.value == pytest.approx(0.4, abs=1e-7)
        assert np.allclose(result.mechanism.thresholds, [0, 6, 10], atol=1e-6)
        assert result.direct.means[-1] == pytest.approx(8, abs=1e-7)

    def test_r4_discrete(self):
        prior = Discrete([0.4, 0.6, 1.0], [0.3, 0.3, 0.4])
        result = design(prior, [(0.8, 1.0)])
        assert result.regime.name == R4
        assert result.value == pytest.approx(0.75, abs=1e-8)
        assert result.direct.means[-1] == pytest.approx(0.8, abs=1e-7)
        report = evaluate_stateless(result.mechanism, prior, [(0.8, 1.0)])
        assert report.value == pytest.approx(0.75, abs=1e-8)

    @pytest.mark.parametrize(
        "support, beliefs, regime",
        (
            ([0, 1], [(0, 0)], R3),
            ([0, 2], [(2, 3)], R4),
            ([1, 3], [(3, 4)], R4),
        ),
    )
    def test_discrete_pooled_level(self, support, beliefs, regime):
        prior = Discrete(support, [0.5, 0.5])
        result = design(prior, beliefs)
        assert result.regime.name == regime
        assert result.value == pytest.approx(0.5, abs=1e-9)
        report = evaluate_stateless(result.mechanism, prior, beliefs)
        assert report.value == pytest.approx(result.value, abs=1e-9)

    def test_r1(self):
        prior = Uniform(0, 10)
        result = design(prior, [(4, 6)])
        assert result.regime.name == R1
        assert result.value == 1
        assert result.mechanism.thresholds.tolist() == [0, 10]

    def test_r2a(self):
        prior = Uniform(0, 10)
        beliefs = [(2, 3), (7, 8)]
        result = design(prior, beliefs)
        assert result.regime.name == R2A
        assert result.value == 1
        assert isinstance(result.mechanism, PiecewiseMixture)
        assert result.mechanism.t == pytest.approx(5)
        assert np.allclose(result.direct.means, [2.5, 7.5])
        report = evaluate_stateless(result.mechanism, prior, beliefs)
        assert report.value == pytest.approx(1)

    def test_empty(self):
        result = design(Uniform(0, 10), [])
        assert result.regime.name == EMPTY
        assert result.value == 0
        assert result.mechanism.num_signals == 1

    def test_oracle_fallback(self):
        prior = Discrete([4.99, 5.01], [0.5, 0.5])
        with pytest.warns(UserWarning):
            result = design(prior, [(4.9, 4.95), (5.05, 5.1)], grid=50)
        assert result.regime.name == R2_GENERAL
        assert result.approximate
        assert result.value == pytest.approx(0, abs=1e-9)

    def test_config(self):
        prior = Uniform(0, 10)
        config = design(prior, [(8, 10)]).to_config(prior)
        assert config["regime"] == {"name": R4}
        assert config["approximate"] is False
        assert config["mechanism"]["type"] == "monotone_partition"
        assert len(config["mechanism"]["direct"]) == 2


@pytest.mark.parametrize("seed", range(10))
def test_random_instances(seed):
    check_instances(seed)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10, 60))
def test_random_instances_slow(seed):
    check_instances(seed)
