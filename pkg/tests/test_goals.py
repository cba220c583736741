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

from hybridsignal.equilibrium import (
    CostModel,
    Population,
    equilibrium,
    in_person_mass,
)
from hybridsignal.goals import (
    Capacity,
    Polytope,
    belief_preimage,
    beliefs_from_config,
    capacity_band,
    goal_beliefs,
    goal_from_config,
    intersect,
    manifold_point,
)


def two_groups():
    return Population([0.5, 0.5], [2, 1])


class TestManifold:
    def test_examples(self):
        population = two_groups()
        assert np.allclose(manifold_point(population, 0), [0.5, 0.5])
        assert np.allclose(manifold_point(population, 0.25), [0.25, 0.5])
        assert np.allclose(manifold_point(population, 1), [0, 0])

    def test_matches_equilibrium(self):
        population = two_groups()
        outcome = equilibrium(population, CostModel(), 8)
        assert np.allclose(
            manifold_point(population, outcome.in_person_mass), outcome.remote
        )

    def test_threshold_shape(self):
        population = Population([0.1, 0.2, 0.3, 0.4], [4, 3, 2, 1])
        for u in np.linspace(0, 1, 37):
            y = manifold_point(population, u)
            x = population.masses
            partial = np.flatnonzero((y > 1e-12) & (y < x - 1e-12))
            assert partial.size <= 1
            assert y.sum() == pytest.approx(1 - u)
            full = np.flatnonzero(y >= x - 1e-12)
            zero = np.flatnonzero(y <= 1e-12)
            if full.size and zero.size:
                assert zero.max() < full.min()


class TestIntersect:
    @pytest.mark.parametrize("b", (0, 0.25, 0.75, 1))
    def test_capacity(self, b):
        assert intersect(two_groups(), Capacity(b)) == [(0.0, 1.0 - b)]

    @pytest.mark.parametrize("b", (0, 0.1, 0.35, 0.5, 0.75, 0.9))
    def test_capacity_as_polytope(self, b):
        population = Population([0.2, 0.3, 0.5], [3, 2, 1])
        goal = Capacity(b).to_polytope(population.num_groups)
        (lo, hi), = intersect(population, goal)
        assert lo == pytest.approx(0, abs=1e-9)
        assert hi == pytest.approx(1 - b, abs=1e-9)

    def test_polytope_example(self):
        goal = Polytope(np.array([[-1.0, -1.0]]), np.array([-0.75]))
        assert intersect(two_groups(), goal) == [(0.0, 0.25)]

    def test_band(self):
        population = Population([0.2, 0.3, 0.5], [3, 2, 1])
        (lo, hi), = intersect(population, capacity_band(0.3, 0.6, 3))
        assert lo == pytest.approx(0.4)
        assert hi == pytest.approx(0.7)

    def test_segments(self):
        # y_2 = 0.5 on the first segment, 1 - u on the second
        population = two_groups()
        goal = Polytope(np.array([[0.0, -1.0]]), np.array([-0.5]))
        assert intersect(population, goal) == [(0.0, 0.5)]

        # y_2 - y_1 <= 0.2 cuts the corner (0, 0.5) of the manifold
        goal = Polytope(np.array([[-1.0, 1.0]]), np.array([0.2]))
        first, second = intersect(population, goal)
        assert first == pytest.approx((0, 0.2))
        assert second == pytest.approx((0.8, 1))

        # no more than 0.2 of the first group remote
        goal = Polytope(np.array([[1.0, 0.0]]), np.array([0.2]))
        (lo, hi), = intersect(population, goal)
        assert lo == pytest.approx(0.3)
        assert hi == pytest.approx(1)

    def test_empty(self):
        goal = Polytope(np.array([[1.0, 1.0]]), np.array([-0.1]))
        assert intersect(two_groups(), goal) == []

    def test_dimension_mismatch(self):
        goal = Polytope(np.array([[1.0, 1.0, 1.0]]), np.array([1.0]))
        with pytest.raises(ValueError):
            intersect(two_groups(), goal)

    def test_config(self):
        goal = goal_from_config({"type": "capacity", "b": 0.5})
        assert goal == Capacity(0.5)
        goal = goal_from_config({"type": "polytope", "A": [[-1, -1]], "d": [-0.75]})
        assert goal.to_config() == {"type": "polytope", "A": [[-1, -1]], "d": [-0.75]}

        with pytest.raises(ValueError):
            goal_from_config({"type": "ellipsoid"})

        with pytest.raises(ValueError):
            Capacity(1.5)


class TestPreimage:
    def test_examples(self):
        population = two_groups()
        cost = CostModel()
        assert belief_preimage(population, cost, [(0, 0.25)], 10) == [
            pytest.approx((8, 10))
        ]
        assert belief_preimage(population, cost, [(0, 1)], 10) == [(0, 10)]
        # m = 0.5 from theta = 2 (group 2 priced out) up to theta = 4
        assert belief_preimage(population, cost, [(0.5, 0.5)], 10) == [
            pytest.approx((2, 4))
        ]

    def test_clamped_and_dropped(self):
        population = two_groups()
        cost = CostModel()
        assert belief_preimage(population, cost, [(0, 0.25)], 9) == [
            pytest.approx((8, 9))
        ]
        assert belief_preimage(population, cost, [(0, 0.25)], 5) == []
        assert belief_preimage(population, cost, [(0, 0)], 50) == []

    def test_sorted_by_belief(self):
        population = Population([0.2, 0.3, 0.5], [3, 2, 1])
        cost = CostModel()
        beliefs = belief_preimage(population, cost, [(0.1, 0.15), (0.6, 0.9)], 40)
        assert len(beliefs) == 2
        assert beliefs[0][1] < beliefs[1][0]

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        masses = rng.exponential(size=4)
        population = Population(
            masses / masses.sum(), np.sort(rng.uniform(1, 10, 4))[::-1]
        )
        cost = CostModel(kappa2=rng.uniform(0, 1))
        omega = sorted(rng.uniform(0, 1, 2))
        for lo, hi in belief_preimage(population, cost, [omega], 50):
            assert 0 <= lo <= hi <= 50
            for theta in np.linspace(lo, hi, 21):
                m = in_person_mass(population, cost, theta)
                assert omega[0] - 1e-7 <= m <= omega[1] + 1e-7

    def test_goal_beliefs(self):
        beliefs = goal_beliefs(two_groups(), CostModel(), Capacity(0.75), 10)
        assert beliefs == [pytest.approx((8, 10))]
        assert goal_beliefs(two_groups(), CostModel(), Capacity(1), 10) == []

    def test_from_config(self):
        assert beliefs_from_config([[7, 8], [2, 3]]) == [(2, 3), (7, 8)]
        with pytest.raises(ValueError):
            beliefs_from_config([[3, 2]])
