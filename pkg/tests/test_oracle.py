import math

import numpy as np
import pytest

from priorsearch import (
    InspectionWeights,
    abcd_policy,
    ef_schedule,
    ikl_mean_exact,
    uniform_weights,
    validate_population,
)
from priorsearch.oracle import (
    ef_best_schedule_bruteforce,
    geometric_mean_bruteforce,
    ikl_mean_bruteforce,
    truncated_schedule_score,
)

from conftest import random_population, random_simplex


class TestIklBruteforce:
    def test_two_item_hand_value(self):
        pop = validate_population([0.7, 0.3])
        q = InspectionWeights(q=np.array([0.6, 0.4]))
        assert ikl_mean_bruteforce(pop, q) == pytest.approx(1.46, abs=1e-12)

    def test_uniform_weights(self, rng):
        pop = random_population(rng, 5, perfect=True)
        assert ikl_mean_bruteforce(pop, uniform_weights(5)) == pytest.approx(3.0, abs=1e-12)

    def test_single_item(self):
        assert ikl_mean_bruteforce(validate_population([1.0]), uniform_weights(1)) == 1.0

    def test_size_guard(self):
        pop = validate_population(np.full(9, 1.0 / 9))
        with pytest.raises(ValueError, match="limited to 8"):
            ikl_mean_bruteforce(pop, uniform_weights(9))

    def test_agrees_with_exact_dp(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 8))
            pop = random_population(rng, n, perfect=True)
            q = InspectionWeights(q=random_simplex(rng, n))
            assert abs(ikl_mean_bruteforce(pop, q) - ikl_mean_exact(pop, q)) <= 1e-10


class TestEfBruteforce:
    def test_greedy_sequence_attains_minimum(self):
        pop = validate_population([0.6, 0.4], [0.5, 1.0])
        best_score, best_sched = ef_best_schedule_bruteforce(pop, horizon=6)
        assert [st.item for st in best_sched.steps] == [2, 1, 1, 1, 1, 1]
        greedy = ef_schedule(pop, eps=1e-15, max_steps=10**4)
        assert truncated_schedule_score(pop, greedy, 6) <= best_score + 1e-12

    def test_perfect_recognition_best_prefix_is_descending(self):
        pop = validate_population([0.5, 0.3, 0.2])
        _, sched = ef_best_schedule_bruteforce(pop, horizon=3)
        order, _ = abcd_policy(pop)
        assert tuple(st.item for st in sched.steps) == order.order

    def test_single_item(self):
        pop = validate_population([1.0], [0.7])
        score, sched = ef_best_schedule_bruteforce(pop, horizon=4)
        assert all(st.item == 1 for st in sched.steps)
        assert score == pytest.approx(truncated_schedule_score(pop, sched, 4), abs=1e-15)

    def test_guards(self):
        pop4 = validate_population([0.4, 0.3, 0.2, 0.1])
        with pytest.raises(ValueError, match="limited to 3"):
            ef_best_schedule_bruteforce(pop4, horizon=3)
        pop = validate_population([0.6, 0.4])
        with pytest.raises(ValueError, match="horizon"):
            ef_best_schedule_bruteforce(pop, horizon=9)

    def test_greedy_never_beaten_on_random_populations(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            pop = random_population(rng, n, s_lo=0.2)
            best_score, _ = ef_best_schedule_bruteforce(pop, horizon=6)
            greedy = ef_schedule(pop, eps=1e-15, max_steps=10**4)
            if len(greedy.steps) < 6:
                continue  # exhausted all mass before the horizon (all s = 1)
            assert truncated_schedule_score(pop, greedy, 6) <= best_score + 1e-12


class TestGeometricBruteforce:
    def test_half(self):
        assert geometric_mean_bruteforce(0.5, 60) == pytest.approx(2.0, abs=1e-10)

    def test_certain(self):
        assert geometric_mean_bruteforce(1.0, 10) == 1.0

    def test_fifth(self):
        horizon = math.ceil(math.log(1e-14) / math.log(0.8))
        assert geometric_mean_bruteforce(0.2, horizon) == pytest.approx(5.0, abs=1e-10)

    def test_inverse_rate_for_many_rates(self, rng):
        for _ in range(20):
            rate = float(rng.uniform(0.05, 1.0))
            horizon = max(1, math.ceil(math.log(1e-14) / math.log1p(-rate))) if rate < 1 else 1
            assert geometric_mean_bruteforce(rate, horizon) == pytest.approx(1.0 / rate, abs=1e-10)

    def test_guards(self):
        with pytest.raises(ValueError):
            geometric_mean_bruteforce(0.0, 10)
        with pytest.raises(ValueError):
            geometric_mean_bruteforce(0.5, 0)
