import io
import itertools
import json
import math

import numpy as np
import pytest

from isovec import systems
from isovec.systems import WeightedVectorSystem, check, generate, to_measure


def cross_2d(weights):
    vecs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    return WeightedVectorSystem(2, vecs, np.asarray(weights, dtype=float))


def cauchy_binet_sum(system):
    """Independent oracle: sum over d-subsets of (prod c_i) det^2."""
    total = 0.0
    for subset in itertools.combinations(range(system.size), system.dim):
        sub = system.vectors[list(subset)]
        total += float(np.prod(system.weights[list(subset)])) * np.linalg.det(sub) ** 2
    return total


class TestConstruction:
    def test_renormalizes_slightly_off_rows(self):
        vecs = np.array([[1.0 + 5e-7, 0.0], [0.0, 1.0]])
        s = WeightedVectorSystem(2, vecs, [1.0, 1.0])
        assert np.linalg.norm(s.vectors[0]) == pytest.approx(1.0, abs=1e-15)

    def test_rejects_far_from_unit(self):
        with pytest.raises(ValueError):
            WeightedVectorSystem(2, [[1.1, 0.0], [0.0, 1.0]], [1.0, 1.0])

    def test_rejects_zero_weight(self):
        with pytest.raises(ValueError):
            WeightedVectorSystem(1, [[1.0], [-1.0]], [1.0, 0.0])

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            WeightedVectorSystem(1, [[1.0], [-1.0]], [1.0, -0.5])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            WeightedVectorSystem(2, np.empty((0, 2)), [])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            WeightedVectorSystem(2, [[np.nan, 0.0]], [1.0])

    def test_immutable(self):
        s = generate("cross", 2)
        with pytest.raises(ValueError):
            s.vectors[0, 0] = 5.0


class TestCheck:
    def test_cross_polytope_half_weights(self):
        r = check(cross_2d([0.5, 0.5, 0.5, 0.5]), 1e-12)
        assert r.tensor_residual == 0.0
        assert r.center_residual == 0.0
        assert r.weight_sum == 2.0
        assert r.is_isotropic and r.is_centered

    def test_simplex_direct_sum(self):
        # three unit vectors at 120 degrees, weights 2/3
        ang = 2.0 * math.pi / 3.0
        vecs = np.array(
            [[math.cos(k * ang), math.sin(k * ang)] for k in range(3)]
        )
        r = check(WeightedVectorSystem(2, vecs, [2 / 3] * 3), 1e-12)
        assert r.tensor_residual <= 1e-12
        assert r.center_residual <= 1e-12

    def test_unit_weights_residual(self):
        # weights 1: second moment is diag(2,2); Frobenius residual sqrt(2)
        r = check(cross_2d([1.0, 1.0, 1.0, 1.0]), 1e-8)
        assert r.tensor_residual == pytest.approx(math.sqrt(2.0), abs=1e-15)
        assert r.weight_sum == 4.0
        assert not r.is_isotropic

    def test_trace_identity(self):
        # |sum c_i - d| <= sqrt(d) * tensor_residual (Cauchy-Schwarz on traces)
        for s in [
            generate("simplex", 3),
            generate("cross", 4),
            generate("random-frame", 3, 17, seed=5),
            cross_2d([0.6, 0.4, 0.5, 0.55]),
        ]:
            r = check(s, 1e-8)
            slack = math.sqrt(s.dim) * r.tensor_residual + 1e-12
            assert abs(r.weight_sum - s.dim) <= slack


class TestToMeasure:
    def test_cross_scaling(self):
        m = to_measure(generate("cross", 2))
        np.testing.assert_allclose(
            m.atoms,
            math.sqrt(2.0) * np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float),
            atol=1e-15,
        )
        np.testing.assert_allclose(m.masses, 0.25)

    def test_one_dimensional(self):
        s = WeightedVectorSystem(1, [[1.0], [-1.0]], [0.5, 0.5])
        m = to_measure(s)
        np.testing.assert_allclose(m.atoms, [[1.0], [-1.0]])
        np.testing.assert_allclose(m.masses, 0.5)

    def test_simplex_masses(self):
        m = to_measure(generate("simplex", 2))
        np.testing.assert_allclose(m.masses, 1.0 / 3.0, atol=1e-15)

    def test_second_moment_of_measure(self):
        s = generate("random-frame", 3, 9, seed=11)
        m = to_measure(s)
        mom = (m.atoms * m.masses[:, None]).T @ m.atoms
        assert np.linalg.norm(mom - np.eye(3), "fro") <= 3 * 1e-8

    def test_rejects_non_isotropic(self):
        with pytest.raises(ValueError):
            to_measure(cross_2d([1.0, 1.0, 1.0, 1.0]))


class TestGenerate:
    def test_cross_2d(self):
        s = generate("cross", 2)
        np.testing.assert_array_equal(
            s.vectors, [[1, 0], [-1, 0], [0, 1], [0, -1]]
        )
        np.testing.assert_array_equal(s.weights, 0.5)

    def test_simplex_2d_angles(self):
        s = generate("simplex", 2)
        assert s.size == 3
        np.testing.assert_allclose(s.weights, 2.0 / 3.0)
        for i, j in itertools.combinations(range(3), 2):
            assert np.dot(s.vectors[i], s.vectors[j]) == pytest.approx(-0.5, abs=1e-12)
        r = check(s, 1e-10)
        assert r.is_isotropic and r.center_residual <= 1e-12

    def test_simplex_higher_dims(self):
        for d in range(1, 8):
            r = check(generate("simplex", d), 1e-10)
            assert r.is_isotropic and r.is_centered

    def test_random_frame(self):
        s = generate("random-frame", 3, 20, seed=7)
        r = check(s, 1e-10)
        assert r.is_isotropic
        assert r.weight_sum == pytest.approx(3.0, abs=1e-10)

    def test_random_frame_deterministic(self):
        a = generate("random-frame", 4, 12, seed=99)
        b = generate("random-frame", 4, 12, seed=99)
        np.testing.assert_array_equal(a.vectors, b.vectors)
        np.testing.assert_array_equal(a.weights, b.weights)
        c = generate("random-frame", 4, 12, seed=100)
        assert not np.array_equal(a.vectors, c.vectors)

    def test_random_frame_requires_m_and_seed(self):
        with pytest.raises(ValueError):
            generate("random-frame", 3, 2, seed=1)
        with pytest.raises(ValueError):
            generate("random-frame", 3, 10)

    def test_forced_m(self):
        with pytest.raises(ValueError):
            generate("simplex", 3, m=7)
        with pytest.raises(ValueError):
            generate("cross", 3, m=5)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            generate("octahedron", 3)


class TestCauchyBinet:
    def test_enumerable_isotropic_systems(self):
        cases = [generate("simplex", d) for d in (2, 3, 4)]
        cases += [generate("cross", d) for d in (2, 3, 4)]
        cases += [
            generate("random-frame", d, m, seed=d * 31 + m)
            for d in (2, 3, 4)
            for m in (d, d + 3, 12)
        ]
        for s in cases:
            assert cauchy_binet_sum(s) == pytest.approx(1.0, abs=1e-9)


class TestJsonRoundTrip:
    def test_exact_round_trip(self):
        s = generate("random-frame", 3, 14, seed=3)
        buf = io.StringIO()
        systems.save(s, buf)
        loaded = systems.load(io.StringIO(buf.getvalue()))
        np.testing.assert_array_equal(loaded.vectors, s.vectors)
        np.testing.assert_array_equal(loaded.weights, s.weights)
        assert loaded.dim == s.dim

    def test_file_round_trip(self, tmp_path):
        s = generate("simplex", 4)
        path = tmp_path / "s.json"
        systems.save(s, path)
        loaded = systems.load(path)
        np.testing.assert_array_equal(loaded.vectors, s.vectors)

    def test_document_fields(self):
        doc = systems.to_dict(generate("cross", 2))
        assert doc["format_version"] == 1
        assert doc["dim"] == 2
        assert len(doc["vectors"]) == len(doc["weights"]) == 4

    def test_load_rejects_bad_json(self):
        with pytest.raises(systems.FormatError):
            systems.load(io.StringIO("not json"))

    def test_load_rejects_missing_field(self):
        with pytest.raises(systems.FormatError):
            systems.load(io.StringIO(json.dumps({"dim": 2, "vectors": [[1.0, 0.0]]})))

    def test_load_rejects_bad_values(self):
        doc = {"dim": 2, "vectors": [[0.5, 0.0]], "weights": [1.0]}
        with pytest.raises(systems.FormatError):
            systems.load(io.StringIO(json.dumps(doc)))

    def test_load_ignores_extra_keys(self):
        doc = systems.to_dict(generate("cross", 2))
        doc["mvee"] = {"iterations": 3}
        loaded = systems.from_dict(doc)
        assert loaded.size == 4
