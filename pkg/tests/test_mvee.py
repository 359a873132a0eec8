import numpy as np
import pytest

from isovec import mvee
from isovec.mvee import ConvergenceError, DegenerateInputError, john_from_points, solve_central_mvee
from isovec.systems import check, generate


def signed_basis(d, scale=1.0):
    return scale * np.vstack([np.eye(d), -np.eye(d)])


class TestSolveCentralMvee:
    def test_signed_basis_touches_unit_ball(self):
        # under the p^T M p <= d constraint the unit ball is M = d Id, with
        # every signed basis vector touching
        for d in (2, 3, 5):
            res = solve_central_mvee(signed_basis(d), epsilon=1e-8)
            np.testing.assert_allclose(res.shape, d * np.eye(d), atol=1e-9)
            assert len(res.support_indices) == 2 * d
            np.testing.assert_allclose(res.dual_weights, 1.0 / (2 * d), atol=1e-12)
            assert res.max_violation <= d * 1e-8

    def test_scaling_by_two(self):
        res = solve_central_mvee(signed_basis(3, scale=2.0), epsilon=1e-8)
        np.testing.assert_allclose(res.shape, 3.0 * np.eye(3) / 4.0, atol=1e-9)

    def test_gaussian_cloud_against_convex_solver(self):
        import cvxpy as cp

        rng = np.random.default_rng(123)
        pts = rng.standard_normal((100, 3))
        res = solve_central_mvee(pts, epsilon=1e-6)
        assert res.max_violation <= 3e-6

        m_var = cp.Variable((3, 3), PSD=True)
        problem = cp.Problem(
            cp.Maximize(cp.log_det(m_var)),
            [cp.quad_form(p, m_var) <= 3 for p in pts],
        )
        problem.solve(solver="CLARABEL")
        ours = np.linalg.slogdet(res.shape)[1]
        assert ours == pytest.approx(problem.value, abs=1e-4)

    def test_dual_weights_certify(self):
        rng = np.random.default_rng(7)
        pts = rng.standard_normal((60, 4))
        eps = 1e-7
        res = solve_central_mvee(pts, epsilon=eps)
        assert res.dual_weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(res.dual_weights > 0.0)
        # support only on near-touching points
        forms = np.einsum("ij,jk,ik->i", pts[res.support_indices], res.shape,
                          pts[res.support_indices])
        assert np.all(forms >= 4 * (1.0 - 10 * eps))
        # optimality: M^{-1} equals the weighted scatter of the support
        scatter = (pts[res.support_indices] * res.dual_weights[:, None]).T @ pts[
            res.support_indices
        ]
        np.testing.assert_allclose(scatter @ res.shape, np.eye(4), atol=1e-5)

    def test_rejects_non_spanning(self):
        pts = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0]])
        with pytest.raises(DegenerateInputError):
            solve_central_mvee(pts)

    def test_rejects_too_few_points(self):
        with pytest.raises(DegenerateInputError):
            solve_central_mvee(np.array([[1.0, 0.0]]))

    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValueError):
            solve_central_mvee(signed_basis(2), epsilon=0.0)

    def test_non_convergence_carries_iterate(self):
        rng = np.random.default_rng(99)
        pts = rng.standard_normal((80, 3))
        with pytest.raises(ConvergenceError) as err:
            solve_central_mvee(pts, epsilon=1e-9, max_iterations=3)
        best = err.value.result
        assert best.iterations == 3
        assert best.shape.shape == (3, 3)


class TestJohnFromPoints:
    def test_signed_basis_recovers_cross(self):
        system = john_from_points(signed_basis(3))
        # every touching direction is a signed standard basis vector
        assert system.size == 6
        for row in system.vectors:
            assert np.sort(np.abs(row)) == pytest.approx([0.0, 0.0, 1.0], abs=1e-10)
        np.testing.assert_allclose(system.weights, 0.5, atol=1e-10)
        assert check(system, 1e-10).is_isotropic

    def test_simplex_vertices_centered(self):
        for d in (2, 3, 4):
            verts = generate("simplex", d).vectors
            system = john_from_points(verts, centered=True, epsilon=1e-8)
            np.testing.assert_allclose(system.weights, d / (d + 1), atol=1e-6)
            report = check(system, 1e-6)
            assert report.is_isotropic and report.is_centered

    def test_gaussian_cloud_centered_residuals(self):
        rng = np.random.default_rng(2024)
        pts = rng.standard_normal((50, 3))
        system = john_from_points(pts, centered=True, epsilon=1e-7)
        report = check(system, 1e-5)
        assert report.tensor_residual <= 1e-5
        assert report.center_residual <= 1e-5

    def test_residual_scales_with_epsilon(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 4):
            pts = rng.standard_normal((40, d))
            eps = 1e-6
            for centered in (False, True):
                system = john_from_points(pts, centered=centered, epsilon=eps)
                report = check(system, 10 * np.sqrt(d) * eps)
                assert report.is_isotropic
                if centered:
                    assert report.is_centered

    def test_scale_equivariance(self):
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((30, 3))
        base = john_from_points(pts, epsilon=1e-7)
        base_res = solve_central_mvee(pts, epsilon=1e-7)
        for t in (0.5, 3.0):
            scaled_res = solve_central_mvee(t * pts, epsilon=1e-7)
            np.testing.assert_allclose(
                scaled_res.shape, base_res.shape / t**2, rtol=1e-8, atol=1e-10
            )
            scaled = john_from_points(t * pts, epsilon=1e-7)
            np.testing.assert_allclose(scaled.vectors, base.vectors, atol=1e-8)
            np.testing.assert_allclose(scaled.weights, base.weights, atol=1e-8)
