import numpy as np
import pytest

from degreelab.boolfn import (
    CapacityError,
    TruthTable,
    chi_values,
    table_degree,
    wht,
)
from degreelab.genmodel import GenerationModel, ParityComponent, SupportSpec, builtin_model
from degreelab.minsolve import (
    Realization,
    Representation,
    SupportedTask,
    conditional_degree,
    corollary_membership_check,
    hamming_extension,
    masks_up_to_degree,
    min_degree_fit,
    min_degree_solve,
    realization_degree,
)

TABLE1 = builtin_model("table1")
TRIPLE2 = builtin_model("triple2")


def oracle_min_degree(x_indices, labels, m, rtol=1e-8):
    """Independent route: pseudo-inverse fit per degree, first consistent k wins."""
    labels = np.asarray(labels, dtype=float)
    threshold = rtol * (1.0 + np.linalg.norm(labels))
    for k in range(m + 1):
        masks = [s for s in range(1 << m) if bin(s).count("1") <= k]
        A = np.array(
            [[(-1) ** bin(x & s).count("1") for s in masks] for x in x_indices],
            dtype=float,
        )
        coeffs = np.linalg.pinv(A) @ labels
        if np.linalg.norm(A @ coeffs - labels) <= threshold:
            return k, masks, coeffs
    raise AssertionError("inconsistent at k=m")


class TestMinDegreeSolve:
    def test_triple_parity_product_task(self):
        task = SupportedTask.from_terms(TRIPLE2, [([1, 2], 1.0)], space="x")
        sol = min_degree_solve(task)
        assert sol.degree == 1
        # the fit is exactly the third data coordinate
        expected = np.zeros(8)
        expected[0b100] = 1.0
        np.testing.assert_allclose(sol.spectrum.coeffs, expected, atol=1e-9)
        assert sol.certificate_residual > 1e-6

    def test_hamming_chi12_affine_fit(self):
        model = GenerationModel(
            3,
            3,
            [ParityComponent(1), ParityComponent(2), ParityComponent(4)],
            SupportSpec("hamming", 1),
        )
        task = SupportedTask.from_terms(model, [([1, 2], 1.0)], space="z")
        sol = min_degree_solve(task)
        assert sol.degree == 1
        expected = np.zeros(8)
        expected[0b000] = -1.0
        expected[0b001] = 1.0
        expected[0b010] = 1.0
        np.testing.assert_allclose(sol.spectrum.coeffs, expected, atol=1e-9)

    def test_table1_degree_bounded_by_latent_dim(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            task = SupportedTask(TABLE1, rng.normal(size=1024))
            assert min_degree_solve(task).degree <= 10

    def test_solution_reproduces_labels(self):
        rng = np.random.default_rng(5)
        task = SupportedTask(TRIPLE2, rng.normal(size=4))
        sol = min_degree_solve(task)
        _, x_indices = TRIPLE2.enumerate_support()
        np.testing.assert_allclose(sol.evaluate_indices(x_indices), task.labels, atol=1e-8)

    def test_matches_oracle_on_restricted_support(self):
        rng = np.random.default_rng(21)
        model = GenerationModel(
            4, 4, [ParityComponent(1 << j) for j in range(4)], SupportSpec("hamming", 2)
        )
        _, x_indices = model.enumerate_support()
        for _ in range(5):
            labels = rng.normal(size=len(x_indices))
            sol = min_degree_fit(x_indices, labels, 4)
            k, masks, coeffs = oracle_min_degree(x_indices.tolist(), labels, 4)
            assert sol.degree == k
            oracle_full = np.zeros(16)
            oracle_full[masks] = coeffs
            np.testing.assert_allclose(sol.spectrum.coeffs, oracle_full, atol=1e-7)

    def test_full_cube_path_matches_oracle(self):
        rng = np.random.default_rng(13)
        model = GenerationModel(3, 3, [ParityComponent(1), ParityComponent(3), ParityComponent(5)])
        _, x_indices = model.enumerate_support()
        labels = rng.choice([-1.0, 1.0], size=8)
        sol = min_degree_fit(x_indices, labels, 3)
        k, masks, coeffs = oracle_min_degree(x_indices.tolist(), labels, 3)
        assert sol.degree == k
        oracle_full = np.zeros(8)
        oracle_full[masks] = coeffs
        np.testing.assert_allclose(sol.spectrum.coeffs, oracle_full, atol=1e-8)

    def test_conflicting_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            min_degree_fit([3, 3], [1.0, -1.0], 2)
        sol = min_degree_fit([3, 3, 1], [1.0, 1.0, 1.0], 2)
        assert sol.degree == 0

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            min_degree_fit([0], [1.0], 17)


class TestHammingExtension:
    def test_chi12_on_radius_one_ball(self):
        points = [0b000, 0b001, 0b010, 0b100]
        labels = [chi_values(0b011, 3)[p] for p in points]
        spec = hamming_extension(3, 1, labels)
        expected = np.zeros(8)
        expected[0] = -1.0
        expected[1] = 1.0
        expected[2] = 1.0
        np.testing.assert_allclose(spec.coeffs, expected, atol=1e-9)

    def test_square_system_dimensions(self):
        labels = np.ones(16)
        spec = hamming_extension(5, 2, labels)
        assert spec.coeffs[0] == pytest.approx(1.0)

    def test_low_degree_functions_recovered_exactly(self):
        rng = np.random.default_rng(9)
        d, r = 6, 2
        masks = masks_up_to_degree(d, r)
        coeffs = np.zeros(1 << d)
        coeffs[masks] = rng.normal(size=len(masks))
        table = np.zeros(1 << d)
        for mask in masks:
            table += coeffs[mask] * chi_values(int(mask), d)
        ball = [i for i in range(1 << d) if bin(i).count("1") <= r]
        spec = hamming_extension(d, r, table[ball])
        np.testing.assert_allclose(spec.coeffs, coeffs, atol=1e-9)

    def test_invertible_for_small_dims(self):
        for d in range(2, 9):
            for r in range(0, min(d, 4)):
                if r >= d:
                    continue
                size = sum(
                    1 for i in range(1 << d) if bin(i).count("1") <= r
                )
                hamming_extension(d, r, np.zeros(size))

    def test_agrees_with_solver_when_min_degree_is_low(self):
        model = GenerationModel(
            5, 5, [ParityComponent(1 << j) for j in range(5)], SupportSpec("hamming", 2)
        )
        task = SupportedTask.from_terms(model, [([1, 5], 1.0)], space="z")
        sol = min_degree_solve(task)
        ext = hamming_extension(5, 2, task.labels)
        assert sol.degree == 2
        np.testing.assert_allclose(sol.spectrum.coeffs, ext.coeffs, atol=1e-8)


class TestRealization:
    def test_flat_realization_degree(self):
        task = SupportedTask.from_terms(TRIPLE2, [([1, 2], 1.0)], space="x")
        sol = min_degree_solve(task)
        flat = Realization([[TruthTable(3, sol.evaluate_indices(np.arange(8)))]])
        assert realization_degree(flat) == sol.degree

    def test_two_layer_sum(self):
        # a layer with multi-degree 40 below a degree-2 readout
        psi_layer = [TABLE1.component_table(i) for i in range(10)]
        g = TruthTable.parity(10, 0b11)
        assert realization_degree(Realization([psi_layer, [g]])) == 42

    def test_identity_stack(self):
        layer = [TruthTable.parity(3, 1 << j) for j in range(3)]
        assert realization_degree(Realization([layer, layer])) == 6

    def test_dimension_mismatch(self):
        layer = [TruthTable.parity(3, 1)]
        with pytest.raises(ValueError, match="inputs"):
            Realization([layer, [TruthTable.parity(3, 1)]])

    def test_reproduces_task(self):
        # h(x) = x1*x2 realized as [(x1, x2) recovery layer, z1*z2 readout]
        phi_layer = [TruthTable(3, chi_values(0b001, 3)), TruthTable(3, chi_values(0b010, 3))]
        g = TruthTable.parity(2, 0b11)
        task = SupportedTask.from_terms(TRIPLE2, [([1, 2], 1.0)], space="x")
        assert Realization([phi_layer, [g]]).reproduces(task)


class TestRepresentation:
    def test_inverse_components_table1(self):
        phi = Representation.inverse_of(TABLE1)
        # hand-derived x-expressions of the latent coordinates (chain telescoping)
        assert phi.component_min_degrees() == (1, 2, 2, 2, 2, 3, 4, 4, 4, 4)

    def test_bijectivity_detection(self):
        phi = Representation.inverse_of(TRIPLE2)
        assert phi.is_bijective_on_latents()
        collapsed = Representation(TRIPLE2, [0, 0, 1, 2])
        assert not collapsed.is_bijective_on_latents()


class TestConditionalDegree:
    def test_table1_x4x5(self):
        task = SupportedTask.from_terms(TABLE1, [([4, 5], 1.0)], space="x")
        assert conditional_degree(task, Representation.inverse_of(TABLE1)) == 1

    def test_triple_parity_negative_value(self):
        task = SupportedTask.from_terms(TRIPLE2, [([1, 2], 1.0)], space="x")
        assert conditional_degree(task, Representation.inverse_of(TRIPLE2)) == -1

    def test_dictator_task_zero(self):
        task = SupportedTask.from_terms(TABLE1, [([1], 1.0)], space="x")
        assert conditional_degree(task, Representation.inverse_of(TABLE1)) == 0

    def test_refuses_restricted_support(self):
        model = GenerationModel(
            3,
            3,
            [ParityComponent(1), ParityComponent(2), ParityComponent(4)],
            SupportSpec("hamming", 1),
        )
        task = SupportedTask.from_terms(model, [([1], 1.0)], space="z")
        with pytest.raises(ValueError, match="full latent support"):
            conditional_degree(task, Representation.inverse_of(model))

    def test_refuses_non_bijective_phi(self):
        task = SupportedTask.from_terms(TRIPLE2, [([1], 1.0)], space="x")
        collapsed = Representation(TRIPLE2, [0, 0, 1, 2])
        with pytest.raises(ValueError, match="bijective"):
            conditional_degree(task, collapsed)


class TestCorollary:
    def test_table1_x4x5_true(self):
        task = SupportedTask.from_terms(TABLE1, [([4, 5], 1.0)], space="x")
        assert corollary_membership_check(task)

    def test_full_latent_degree_contrapositive(self):
        task = SupportedTask.from_terms(
            TABLE1, [(list(range(1, 11)), 1.0)], space="z"
        )
        assert corollary_membership_check(task)

    def test_random_parities(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            mask = int(rng.integers(0, 1 << 10))
            subset = [j + 1 for j in range(10) if (mask >> j) & 1]
            sign = float(rng.choice([-1.0, 1.0]))
            task = SupportedTask.from_terms(TABLE1, [(subset, sign)], space="z")
            assert corollary_membership_check(task)


class TestTaskIO:
    def test_json_label_round_trip(self):
        task = SupportedTask.from_terms(TRIPLE2, [([1, 2], 1.0)], space="x")
        back = SupportedTask.from_json_dict(task.to_json_dict())
        np.testing.assert_array_equal(back.labels, task.labels)

    def test_expr_form(self):
        data = {
            "model": TRIPLE2.to_json_dict(),
            "expr": [{"subset": [1, 2], "coeff": 1.0}],
            "space": "x",
        }
        task = SupportedTask.from_json_dict(data)
        np.testing.assert_array_equal(task.labels, TRIPLE2.chi_on_support(0b11, latent=False))

    def test_label_count_enforced(self):
        with pytest.raises(ValueError):
            SupportedTask(TRIPLE2, [1.0, 2.0])
