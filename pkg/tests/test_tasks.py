import math
from fractions import Fraction

import numpy as np
import pytest

from degreelab.boolfn import TruthTable, degree, wht
from degreelab.genmodel import builtin_model
from degreelab.minsolve import Representation, conditional_degree
from degreelab.tasks import (
    DegreeMixture,
    ParityFamily,
    RandomPolynomialFamily,
    enumerate_family,
    family_size,
    sample_mixture_task,
    sample_task,
)

TABLE1 = builtin_model("table1")
CHAIN3 = builtin_model("chain3")


def latent_degree(task) -> int:
    """Degree of the unique latent-space solution (full support models)."""
    z_indices, _ = task.model.enumerate_support()
    g = np.empty(1 << task.model.d)
    g[z_indices] = task.labels
    return degree(wht(TruthTable(task.model.d, g)))


class TestParityFamily:
    def test_k1_support_of_draws(self):
        family = ParityFamily(CHAIN3, 1)
        rng = np.random.default_rng(0)
        seen = set()
        for _ in range(300):
            task = sample_task(family, rng)
            key = tuple(task.labels.tolist())
            seen.add(key)
            assert latent_degree(task) <= 1
        assert len(seen) == 8  # +-chi for masks {}, {1}, {2}, {3}

    def test_reproducible_with_seed(self):
        family = ParityFamily(TABLE1, 3)
        a = sample_task(family, np.random.default_rng(42))
        b = sample_task(family, np.random.default_rng(42))
        np.testing.assert_array_equal(a.labels, b.labels)
        assert latent_degree(a) <= 3

    def test_enumeration_counts(self):
        assert len(enumerate_family(ParityFamily(CHAIN3, 1))) == 8
        assert len(enumerate_family(ParityFamily(CHAIN3, 3))) == 16
        assert len(enumerate_family(ParityFamily(TABLE1, 2))) == 112
        assert family_size(ParityFamily(TABLE1, 2)) == 112

    def test_canonical_order(self):
        tasks = enumerate_family(ParityFamily(CHAIN3, 1))
        # first two entries are the +1 and -1 constant tasks
        np.testing.assert_array_equal(tasks[0].labels, np.ones(8))
        np.testing.assert_array_equal(tasks[1].labels, -np.ones(8))

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            ParityFamily(CHAIN3, 4)


class TestRandomPolynomialFamily:
    def test_degree_budget_always_respected(self):
        family = RandomPolynomialFamily(CHAIN3, 2)
        rng = np.random.default_rng(1)
        for _ in range(50):
            assert latent_degree(sample_task(family, rng)) <= 2

    def test_not_enumerable(self):
        with pytest.raises(ValueError):
            enumerate_family(RandomPolynomialFamily(CHAIN3, 1))


class TestDegreeMixture:
    def test_exact_fractions(self):
        mix = DegreeMixture([0.2, 0.3, 0.5])
        assert mix.probs == (Fraction(1, 5), Fraction(3, 10), Fraction(1, 2))

    def test_parse(self):
        mix = DegreeMixture.parse("1/3,1/3,1/3")
        assert sum(mix.probs) == 1

    def test_zero_entry_allowed(self):
        mix = DegreeMixture([0, 0.5, 0.5])
        assert mix[1] == 0

    def test_simplex_enforced(self):
        with pytest.raises(ValueError):
            DegreeMixture([0.5, 0.6])
        with pytest.raises(ValueError):
            DegreeMixture([1.5, -0.5])

    def test_uniform(self):
        assert DegreeMixture.uniform(4).probs == (Fraction(1, 4),) * 4


class TestMixtureSampling:
    def test_degenerate_mixture(self):
        families = [ParityFamily(CHAIN3, k) for k in (1, 2, 3)]
        mix = DegreeMixture([1, 0, 0])
        rng = np.random.default_rng(2)
        for _ in range(20):
            k, task = sample_mixture_task(mix, families, rng)
            assert k == 1
            assert latent_degree(task) <= 1

    def test_empirical_frequencies_within_3_sigma(self):
        families = [ParityFamily(CHAIN3, k) for k in (1, 2, 3)]
        mix = DegreeMixture.uniform(3)
        rng = np.random.default_rng(3)
        n = 100_000
        counts = np.zeros(3)
        for _ in range(n):
            k, _ = sample_mixture_task(mix, families, rng)
            counts[k - 1] += 1
        p = 1.0 / 3.0
        sigma = math.sqrt(n * p * (1 - p))
        assert np.all(np.abs(counts - n * p) <= 3 * sigma)

    def test_missing_family_rejected(self):
        with pytest.raises(ValueError):
            sample_mixture_task(
                DegreeMixture.uniform(3),
                [ParityFamily(CHAIN3, 1)],
                np.random.default_rng(0),
            )

    def test_draws_conditionally_solvable(self):
        families = [ParityFamily(TABLE1, k) for k in range(1, 11)]
        mix = DegreeMixture.uniform(10)
        rng = np.random.default_rng(4)
        phi = Representation.inverse_of(TABLE1)
        for _ in range(5):
            k, task = sample_mixture_task(mix, families, rng)
            assert latent_degree(task) <= k
            conditional_degree(task, phi)  # solvable through the latent route


def test_schedule_independent_streams():
    # per-trial derived seeds give identical tasks regardless of draw order
    family = ParityFamily(CHAIN3, 2)
    seed = 7
    forward = [
        sample_task(family, np.random.default_rng((seed, trial))) for trial in range(6)
    ]
    backward = [
        sample_task(family, np.random.default_rng((seed, trial)))
        for trial in reversed(range(6))
    ]
    for a, b in zip(forward, reversed(backward)):
        np.testing.assert_array_equal(a.labels, b.labels)
