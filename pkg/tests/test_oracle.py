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
    R1,
    R3,
    R4,
    StatefulScenario,
    design,
    design_stateful,
    discretize,
    oracle_value,
)
from hybridsignal.distributions import Discrete, PiecewiseLinearCdf, Uniform
from hybridsignal.exceptions import DomainError


def random_prior(rng):
    if rng.random() < 0.5:
        low = rng.uniform(0, 5)
        return Uniform(low, low + rng.uniform(1, 10))
    ts = np.cumsum(rng.uniform(0.5, 3, size=4))
    fs = np.concatenate([[0], np.sort(rng.uniform(0.1, 0.9, size=2)), [1]])
    return PiecewiseLinearCdf(np.stack([ts, fs], axis=1))


def random_interval(rng, prior, regime):
    mu, low, high = prior.mean, prior.low, prior.high
    if regime == R1:
        return (rng.uniform(low, mu), rng.uniform(mu, high))
    if regime == R3:
        upper = rng.uniform(low + 0.1 * (mu - low), mu - 0.01 * (mu - low))
        return (rng.uniform(low, upper), upper)
    lower = rng.uniform(mu + 0.01 * (high - mu), high - 0.1 * (high - mu))
    return (lower, rng.uniform(lower, high))


def check_agreement(seed, regime, grid=2000):
    rng = np.random.default_rng(seed)
    prior = random_prior(rng)
    beliefs = [random_interval(rng, prior, regime)]
    closed = design(prior, beliefs)
    assert closed.regime.name == regime
    oracle = oracle_value(discretize(prior, grid, beliefs))
    assert oracle.value <= closed.value + 1e-6
    assert closed.value <= oracle.value + 5e-3


class TestDiscretize:
    def test_uniform(self):
        instance = discretize(Uniform(0, 1), 2)
        assert np.allclose(instance.points, [0.25, 0.75])
        assert np.allclose(instance.probs, [0.5, 0.5])
        assert instance.grid_size == 2

    def test_discrete(self):
        prior = Discrete([0.4, 0.6, 1.0], [0.3, 0.3, 0.4])
        instance = discretize(prior, 10, [(0.8, 1.0)])
        assert instance.points.tolist() == [0.4, 0.6, 1.0]
        assert np.allclose(instance.probs, [0.3, 0.3, 0.4])
        assert instance.edges is None
        assert instance.num_signals == 2

    def test_mean_preserved(self):
        prior = PiecewiseLinearCdf([[0, 0], [2, 0.5], [3, 0.5], [10, 1]])
        instance = discretize(prior, 100)
        assert instance.probs.sum() == pytest.approx(1, abs=1e-10)
        assert instance.probs @ instance.points == pytest.approx(prior.mean)
        assert instance.points.min() >= prior.low
        assert instance.points.max() <= prior.high

    def test_grid_too_small(self):
        with pytest.raises(DomainError):
            discretize(Uniform(0, 1), 1)


class TestOracleValue:
    def test_r3(self):
        result = oracle_value(discretize(Uniform(0, 1), 2000, [(0, 0.25)]))
        assert result.value == pytest.approx(0.5, abs=5e-3)
        assert result.value <= 0.5 + 1e-6

    def test_r4(self):
        result = oracle_value(discretize(Uniform(0, 10), 2000, [(8, 10)]))
        assert result.value == pytest.approx(0.4, abs=5e-3)

    def test_mean_inside(self):
        result = oracle_value(discretize(Uniform(0, 10), 200, [(4, 6)]))
        assert result.value == pytest.approx(1)

    def test_empty(self):
        result = oracle_value(discretize(Uniform(0, 10), 20))
        assert result.value == 0
        assert np.allclose(result.table[:, -1], 0.05)

    def test_sound(self):
        prior = Uniform(0, 10)
        beliefs = [(1, 2), (6, 6.5), (8, 9)]
        result = oracle_value(discretize(prior, 300, beliefs))
        table = result.mechanism
        assert np.allclose(table.rows.sum(axis=1), 1, atol=1e-9)
        assert np.all(result.table >= 0)

        probs, means = table.signal_moments(prior)
        for (lo, hi), q, theta in zip(beliefs, probs, means):
            if q > 1e-9:
                assert lo - 1e-7 <= theta <= hi + 1e-7
        assert probs[:-1].sum() == pytest.approx(result.value, abs=1e-9)
        assert probs @ np.nan_to_num(means) == pytest.approx(prior.mean)

    def test_refinement(self):
        prior = Uniform(0, 10)
        beliefs = [(1, 2), (7, 8)]
        coarse = oracle_value(discretize(prior, 100, beliefs)).value
        fine = oracle_value(discretize(prior, 400, beliefs)).value
        assert coarse <= fine + 1e-6

    def test_matches_stateful(self):
        prior = Discrete([0.4, 0.6, 1.0], [0.3, 0.3, 0.4])
        scenario = StatefulScenario(
            prior.support, prior.probs, [0.8, 0.8, 0.8], strict=False
        )
        result = oracle_value(discretize(prior, 10, [(0.8, prior.high)]))
        assert result.value == pytest.approx(design_stateful(scenario).value, abs=1e-8)
        assert result.value == pytest.approx(0.75, abs=1e-8)

    def test_config(self):
        result = oracle_value(discretize(Uniform(0, 1), 4, [(0, 0.25)]))
        config = result.to_config()
        assert sorted(config) == ["grid", "table", "value"]
        assert config["grid"] == 4
        assert len(config["table"]) == 4


@pytest.mark.parametrize("regime", (R1, R3, R4))
@pytest.mark.parametrize("seed", range(3))
def test_closed_form_agreement(seed, regime):
    check_agreement(seed, regime)


@pytest.mark.slow
@pytest.mark.parametrize("regime", (R1, R3, R4))
@pytest.mark.parametrize("seed", range(3, 50))
def test_closed_form_agreement_slow(seed, regime):
    check_agreement(seed, regime)
