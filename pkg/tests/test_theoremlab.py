import json
from fractions import Fraction

import numpy as np
import pytest

from degreelab.tasks import DegreeMixture
from degreelab.theoremlab import (
    ObjectiveEvaluation,
    VerificationReport,
    objective,
    run_claim,
    search_ood_configurations,
    verify_basis_impact,
    verify_degree_composition,
    verify_example_counterexample,
    verify_multi_task_bound,
    verify_no_free_lunch,
    verify_ood_benefit,
    verify_single_task,
    verify_world_model,
)
from degreelab.theoremlab import _example_transform_perm
from degreelab.transforms import CubeBijection, SignedPermutation


class TestObjective:
    def test_identity_per_degree_averages(self):
        ev = objective(CubeBijection.identity(3), DegreeMixture.uniform(3))
        assert ev.per_degree == {
            1: Fraction(3, 4),
            2: Fraction(9, 7),
            3: Fraction(3, 2),
        }
        assert ev.value == Fraction(33, 28)

    def test_signed_permutation_matches_identity(self):
        sp = SignedPermutation((1, 2, 0), (1, -1, 1)).to_bijection()
        mix = DegreeMixture([0.5, 0.3, 0.2])
        assert objective(sp, mix).value == objective(CubeBijection.identity(3), mix).value

    def test_example_transform_strictly_worse_with_p1(self):
        tex = CubeBijection(3, _example_transform_perm())
        mix = DegreeMixture([0.5, 0.25, 0.25])
        assert objective(tex, mix).value > objective(CubeBijection.identity(3), mix).value

    def test_sampled_mode_near_exact(self):
        tex = CubeBijection(3, _example_transform_perm())
        mix = DegreeMixture([0.5, 0.25, 0.25])
        exact = float(objective(tex, mix).value)
        sampled = objective(tex, mix, mode="sampled", seed=0, samples=20000)
        assert abs(sampled.value - exact) < 0.05

    def test_uniform_full_weights(self):
        ev = objective(CubeBijection.identity(3), "uniform-full")
        assert ev.value == Fraction(3, 2)


class TestSingleTask:
    def test_exhaustive_d2(self):
        report = verify_single_task(2)
        assert report.passed
        assert report.measured["tasks"] == 16
        assert report.measured["transforms"] == 24
        assert report.measured["violations"] == 0

    def test_sampled_tasks_d3(self):
        report = verify_single_task(3, trials=50, seed=1)
        assert report.passed and report.measured["violations"] == 0


class TestMultiTask:
    @pytest.mark.parametrize("phi", ["inverse", "signed", "random"])
    def test_bound_holds(self, phi):
        report = verify_multi_task_bound(n_tasks=32, batches=2, k=2, phi=phi, seed=3)
        assert report.passed
        for batch in report.measured["batches"]:
            assert batch["lhs"] >= batch["rhs"]

    def test_inverse_phi_slack_is_d2_minus_cost(self):
        report = verify_multi_task_bound(n_tasks=8, batches=1, phi="inverse", seed=0)
        batch = report.measured["batches"][0]
        assert batch["slack"] == 100 - batch["phi_cost"]
        assert batch["phi_cost"] == 28  # table1 inverse component degrees

    def test_many_low_degree_tasks_prefer_hierarchy(self):
        report = verify_multi_task_bound(n_tasks=1000, batches=1, k=2, phi="inverse", seed=4)
        batch = report.measured["batches"][0]
        assert batch["conditional_degree_sum"] > 100
        assert batch["hierarchy_preferred"]


class TestNoFreeLunch:
    def test_d2_constant(self):
        report = verify_no_free_lunch(2)
        assert report.passed
        assert report.measured["objective_constant"] == Fraction(3, 2)

    def test_d3_constant_with_parity_diagnostic(self):
        report = verify_no_free_lunch(3)
        assert report.passed
        assert report.measured["all_equal"]
        assert report.measured["objective_constant"] == report.measured["identity_objective"]
        # the signed-parity family is not closed under composition: its
        # full-family sum is provably non-constant at d=3
        assert not report.measured["parity_family_surrogate_constant"]


class TestWorldModel:
    def test_d2_argmin_is_signed_permutations(self):
        report = verify_world_model(2, [0.6, 0.4])
        assert report.passed
        assert report.measured["argmin_count"] == 8
        assert report.measured["transforms"] == 24

    def test_d3_argmin_is_signed_permutations(self):
        report = verify_world_model(3, [0.2, 0.3, 0.5])
        assert report.passed
        assert report.measured["argmin_count"] == 48

    def test_p1_zero_expected_failure(self):
        report = verify_world_model(3, [0, 0.5, 0.5])
        assert not report.passed
        assert report.measured["example_transform_in_argmin"]
        assert report.measured["signed_permutations_all_minimal"]

    def test_sampled_d4(self):
        report = verify_world_model(4, [0.4, 0.3, 0.2, 0.1], mode="sampled", sample=500, seed=2)
        assert report.passed
        assert report.measured["non_degree_one_minimizers"] == 0


class TestExampleCounterexample:
    def test_full_report(self):
        report = verify_example_counterexample()
        assert report.passed
        assert report.measured["candidates"] == 65536
        assert report.measured["satisfying_extensions"] == 0
        assert report.measured["part_a_k1_fails"]


class TestOodBenefit:
    def test_default_instance_phenomenon(self):
        report = verify_ood_benefit()
        assert report.passed
        assert report.measured["flat_full_cube_mse"] > 0.5
        assert report.measured["world_model_full_cube_mse"] <= 1e-9
        assert not report.measured["theorem_preconditions"]["all_hold"]

    def test_full_support_degenerate_control(self):
        report = verify_ood_benefit(r=10)
        assert report.passed
        assert report.measured["flat_full_cube_mse"] <= 1e-9

    def test_search_finds_precondition_instances(self):
        report = search_ood_configurations(seed=0, limit=1)
        assert report.passed
        inst = report.measured["instances"][0]
        assert inst["preconditions"]["all_hold"]
        assert inst["flat_full_cube_mse"] > 1.0
        assert inst["world_model_full_cube_mse"] <= 1e-9


class TestBasisImpact:
    def test_swap_forces_high_inverse_components(self):
        report = verify_basis_impact(3, k_swap=2)
        assert report.passed
        assert report.measured["compatible_argmin_count"] == 48
        assert report.measured["incompatible_argmin_all_have_high_inverse_component"]
        assert report.measured["incompatible_argmin_excludes_signed_permutations"]

    def test_compatible_non_identity_basis(self):
        from degreelab.transforms import BasisTransform

        sigma = np.arange(8)
        sigma[[1, 2, 4]] = [2, 4, 1]
        sigma[[3, 5, 6]] = [5, 6, 3]
        report = verify_basis_impact(3, k_swap=2, compatible=BasisTransform(3, sigma=sigma))
        assert report.passed
        assert report.measured["compatible_argmin_is_signed_permutations"]


class TestDegreeComposition:
    def test_exhaustive_d3(self):
        report = verify_degree_composition(3)
        assert report.passed
        assert report.measured["violations"] == 0
        assert report.measured["equality_set_size_k1"] == 48

    def test_exhaustive_d2(self):
        report = verify_degree_composition(2)
        assert report.passed
        assert report.measured["equality_set_size_k1"] == 8

    def test_sampled_d4(self):
        report = verify_degree_composition(4, mode="sampled", sample=300, seed=5)
        assert report.passed


class TestReports:
    def test_canonical_json_excludes_runtime(self):
        report = verify_world_model(2, [0.6, 0.4])
        data = json.loads(report.to_json())
        assert "runtime_seconds" not in data
        assert report.runtime_seconds >= 0
        with_runtime = json.loads(report.to_json(include_runtime=True))
        assert "runtime_seconds" in with_runtime

    def test_byte_identical_reruns(self):
        a = verify_world_model(3, [0.2, 0.3, 0.5]).to_json()
        b = verify_world_model(3, [0.2, 0.3, 0.5]).to_json()
        assert a == b

    def test_fractions_serialize_as_strings(self):
        report = verify_no_free_lunch(2)
        data = json.loads(report.to_json())
        assert data["measured"]["objective_constant"] == "3/2"

    def test_run_claim_registry(self):
        report = run_claim("degree-composition", d=2)
        assert isinstance(report, VerificationReport)
        with pytest.raises(KeyError):
            run_claim("no-such-claim")
