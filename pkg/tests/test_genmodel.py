import math

import numpy as np
import pytest

from degreelab.boolfn import TruthTable
from degreelab.genmodel import (
    GenerationModel,
    NonInjectiveError,
    ParityComponent,
    SupportSpec,
    builtin_model,
)


TABLE1 = builtin_model("table1")
TRIPLE2 = builtin_model("triple2")


class TestApply:
    def test_table1_all_plus_one(self):
        np.testing.assert_array_equal(TABLE1.apply([1] * 10), [1] * 10)

    def test_table1_first_latent_flipped(self):
        # z1 appears in x1..x5 only
        z = [-1] + [1] * 9
        np.testing.assert_array_equal(TABLE1.apply(z), [-1] * 5 + [1] * 5)

    def test_triple_parity(self):
        np.testing.assert_array_equal(TRIPLE2.apply([-1, -1]), [-1, -1, 1])

    def test_negative_sign_component(self):
        model = GenerationModel(1, 1, [ParityComponent(0b1, -1)])
        np.testing.assert_array_equal(model.apply([1]), [-1])


class TestInvert:
    def test_exhaustive_round_trip_table1(self):
        z_indices, x_indices = TABLE1.enumerate_support()
        assert len(z_indices) == 1024
        for zi, xi in zip(z_indices.tolist(), x_indices.tolist()):
            assert TABLE1.invert_index(xi) == zi

    def test_membership_lookup(self):
        # all -1 data vector: in the image iff some latent produces index 2^10 - 1
        result = TABLE1.invert([-1] * 10)
        if result is not None:
            np.testing.assert_array_equal(TABLE1.apply(result), [-1] * 10)
        _, x_indices = TABLE1.enumerate_support()
        assert (result is not None) == ((1 << 10) - 1 in set(x_indices.tolist()))

    def test_triple_parity_point(self):
        np.testing.assert_array_equal(TRIPLE2.invert([1, -1, -1]), [1, -1])

    def test_not_in_image_is_none(self):
        # (1, 1, -1) is impossible for (z1, z2, z1*z2)
        assert TRIPLE2.invert([1, 1, -1]) is None


class TestSupport:
    def test_hamming_ball_size(self):
        spec = SupportSpec("hamming", 2)
        assert spec.size(5) == 1 + 5 + 10

    def test_full_cube(self):
        model = builtin_model("chain3")
        z, x = model.enumerate_support()
        assert len(z) == 8 and len(set(x.tolist())) == 8

    def test_hamming_enumeration_order_and_count(self):
        model = GenerationModel(
            5, 5, [ParityComponent(1 << j) for j in range(5)], SupportSpec("hamming", 2)
        )
        z, _ = model.enumerate_support()
        assert len(z) == 16
        assert list(z) == sorted(z)
        assert all(bin(i).count("1") <= 2 for i in z.tolist())

    def test_hamming_radius_bound(self):
        with pytest.raises(ValueError):
            GenerationModel(
                3, 3, [ParityComponent(1 << j) for j in range(3)], SupportSpec("hamming", 3)
            )

    def test_ball_sizes_match_binomials(self):
        for d in range(2, 9):
            for r in range(d):
                expected = sum(math.comb(d, i) for i in range(r + 1))
                assert SupportSpec("hamming", r).size(d) == expected


class TestValidate:
    def test_table1_injective(self):
        report = TABLE1.validate()
        assert report.injective and report.image_size == 1024
        assert report.component_degrees == (1, 2, 3, 4, 5, 5, 5, 5, 5, 5)

    def test_duplicate_components_collide(self):
        with pytest.raises(NonInjectiveError):
            GenerationModel(2, 2, [ParityComponent(0b01), ParityComponent(0b01)])
        model = GenerationModel(
            2, 2, [ParityComponent(0b01), ParityComponent(0b01)], check=False
        )
        report = model.validate()
        assert not report.injective and report.collision is not None
        z_a, z_b, x = report.collision
        assert model.apply_index(z_a) == x

    def test_triple_parity_degrees(self):
        assert TRIPLE2.validate().component_degrees == (1, 1, 2)

    def test_table_component_model(self):
        xor = TruthTable.parity(2, 0b11)
        model = GenerationModel(
            2, 3, [ParityComponent(0b01), ParityComponent(0b10), xor]
        )
        np.testing.assert_array_equal(model.apply([-1, -1]), [-1, -1, 1])


class TestHelpers:
    def test_latent_values(self):
        vals = TRIPLE2.latent_values(2)
        np.testing.assert_array_equal(vals, [1, 1, -1, -1])

    def test_chi_on_support(self):
        # chi_{1,2}(z) equals x3 on the triple-parity support
        np.testing.assert_array_equal(
            TRIPLE2.chi_on_support(0b11, latent=True),
            TRIPLE2.chi_on_support(0b100, latent=False),
        )

    def test_m_at_least_d_enforced(self):
        with pytest.raises(ValueError):
            GenerationModel(3, 2, [ParityComponent(1), ParityComponent(2)])


class TestJson:
    def test_round_trip(self):
        text = TABLE1.to_json()
        back = GenerationModel.from_json(text)
        assert back.to_json_dict() == TABLE1.to_json_dict()
        z0, x0 = TABLE1.enumerate_support()
        z1, x1 = back.enumerate_support()
        np.testing.assert_array_equal(x0, x1)

    def test_schema_fields(self):
        data = TRIPLE2.to_json_dict()
        assert data["components"][2] == {"subset": [1, 2], "sign": 1}
        assert data["support"] == {"kind": "full"}
