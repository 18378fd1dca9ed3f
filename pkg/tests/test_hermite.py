import math

import numpy as np
import pytest

from gaussderiv import hermite as hm
from gaussderiv.indexing import tuple_index, tuple_to_multiindex, unique_count, unique_ordering
from gaussderiv.kron import apply_kron_power
from gaussderiv.symvec import symv_recursive

from .oracles import finite_difference_coordinate, univariate_density_derivative


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


class TestParams:
    def test_gaussian_params_requires_spd(self):
        with pytest.raises(ValueError):
            hm.GaussianParams.from_moments(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_gaussian_params_requires_symmetry(self):
        with pytest.raises(ValueError):
            hm.GaussianParams.from_moments(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_density_matches_closed_form(self):
        sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
        p = hm.GaussianParams.from_moments(np.zeros(2), sigma)
        x = np.array([0.3, -1.2])
        det = np.linalg.det(sigma)
        want = math.exp(-0.5 * x @ np.linalg.solve(sigma, x)) / (2 * math.pi * math.sqrt(det))
        assert abs(float(p.density(x)) - want) < 1e-15

    def test_scale_matrix_rejects_singular(self):
        with pytest.raises(ValueError):
            hm.ScaleMatrix.from_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_scale_matrix_allows_indefinite(self):
        s = hm.ScaleMatrix.from_matrix(np.array([[-2.0, 0.0], [0.0, 3.0]]))
        assert np.allclose(s.inv, np.diag([-0.5, 1 / 3]))


class TestHermiteDirect:
    def test_order_zero(self):
        assert hm.hermite_direct(np.array([1.0, 2.0]), np.eye(2), 0).tolist() == [1.0]

    def test_order_one_is_the_point(self):
        x = np.array([0.4, -1.1, 2.0])
        got = hm.hermite_direct(x, random_spd(np.random.default_rng(0), 3), 1)
        assert np.allclose(got, x, atol=1e-14)

    def test_univariate_cubic(self):
        got = hm.hermite_direct(np.array([2.0]), np.array([[1.0]]), 3)
        assert abs(got[0] - 2.0) < 1e-12  # x^3 - 3x at x = 2


class TestScaledRecursive:
    def test_order_one(self):
        rng = np.random.default_rng(1)
        sigma = random_spd(rng, 3)
        x = rng.standard_normal(3)
        got = hm.scaled_hermite_recursive(x, sigma, 1)
        assert np.allclose(got, np.linalg.solve(sigma, x), atol=1e-12)

    def test_identity_scale_order_two(self):
        x = np.array([1.0, 2.0])
        got = hm.scaled_hermite_recursive(x, np.eye(2), 2)
        want = (np.outer(x, x) - np.eye(2)).T.reshape(-1)
        assert np.allclose(got, want, atol=1e-13)

    @pytest.mark.parametrize("r", range(6))
    def test_equals_inverse_power_of_direct(self, r):
        rng = np.random.default_rng(2 + r)
        d = 3
        sigma = random_spd(rng, d)
        x = rng.standard_normal(d)
        scale = hm.ScaleMatrix.from_matrix(sigma)
        want = apply_kron_power(scale.inv, hm.hermite_direct(x, scale, r), r)
        got = hm.scaled_hermite_recursive(x, scale, r)
        assert np.abs(got - want).max() < 1e-10 * max(1, np.abs(want).max())


class TestUniqueRecursion:
    def test_start_values(self):
        rng = np.random.default_rng(3)
        sigma = random_spd(rng, 3)
        x = rng.standard_normal(3)
        assert hm.hermite_unique(x, sigma, 0).values.tolist() == [1.0]
        assert np.allclose(hm.hermite_unique(x, sigma, 1).values, np.linalg.solve(sigma, x))

    def test_univariate_sequence_at_one(self):
        # 1, x, x^2 - 1, x^3 - 3x at x = 1
        for r, want in [(0, 1.0), (1, 1.0), (2, 0.0), (3, -2.0)]:
            got = hm.hermite_unique(np.array([1.0]), np.array([[1.0]]), r).values
            assert abs(got[-1] - want) < 1e-14

    def test_identity_scale_bivariate(self):
        got = hm.hermite_unique(np.array([1.0, 2.0]), np.eye(2), 2).values
        assert np.allclose(got, [0.0, 2.0, 3.0], atol=1e-14)  # x1^2-1, x1 x2, x2^2-1

    def test_step_rejects_order_mismatch(self):
        a = hm.UniqueHermite(order=2, values=np.zeros(3))
        b = hm.UniqueHermite(order=0, values=np.ones(1))
        with pytest.raises(ValueError):
            hm.hermite_unique_step(a, b, np.zeros(2), np.eye(2))

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_block_schedule_fills_every_slot(self, d):
        # the staged fill is N(d,r) + N(d-1,r) + ... + 1 = N(d,r+1) slots
        for r in range(1, 5):
            total = sum(unique_count(d - j + 1, r) for j in range(1, d)) + 1
            assert total == unique_count(d, r + 1)

    @pytest.mark.parametrize("d,r", [(2, 4), (3, 3), (4, 3)])
    def test_unique_values_match_full_vector(self, d, r):
        rng = np.random.default_rng(40 + d)
        sigma = random_spd(rng, d)
        x = rng.standard_normal(d)
        scale = hm.ScaleMatrix.from_matrix(sigma)
        full = apply_kron_power(scale.inv, hm.hermite_direct(x, scale, r), r)
        uh = hm.hermite_unique(x, scale, r)
        ordering = unique_ordering(d, r)
        for i in range(d**r):
            m = tuple_to_multiindex(tuple_index(i + 1, d, r), d)
            assert abs(full[i] - uh.values[ordering.position(m)]) < 1e-10 * max(
                1, np.abs(full).max()
            )


class TestExpandUnique:
    def test_d2_r2_pattern(self):
        u = hm.UniqueHermite(order=2, values=np.array([10.0, 20.0, 30.0]))
        got = hm.expand_unique(u, unique_ordering(2, 2))
        assert got.tolist() == [10.0, 20.0, 20.0, 30.0]

    def test_order_zero_scalar(self):
        u = hm.UniqueHermite(order=0, values=np.array([7.0]))
        assert hm.expand_unique(u, unique_ordering(3, 0)).tolist() == [7.0]

    def test_order_one_copy(self):
        u = hm.UniqueHermite(order=1, values=np.array([1.0, 2.0, 3.0]))
        assert hm.expand_unique(u, unique_ordering(3, 1)).tolist() == [1.0, 2.0, 3.0]

    def test_length_mismatch(self):
        u = hm.UniqueHermite(order=2, values=np.zeros(4))
        with pytest.raises(ValueError):
            hm.expand_unique(u, unique_ordering(2, 2))


class TestGaussianDerivative:
    def test_order_zero_is_density(self):
        sigma = np.array([[1.5, 0.2], [0.2, 0.9]])
        p = hm.GaussianParams.from_moments(np.zeros(2), sigma)
        x = np.array([0.5, 0.5])
        got = hm.gaussian_derivative(x, sigma, 0, "direct")
        assert abs(got[0] - float(p.density(x))) < 1e-16

    def test_order_one_is_gradient(self):
        sigma = np.array([[1.5, 0.2], [0.2, 0.9]])
        p = hm.GaussianParams.from_moments(np.zeros(2), sigma)
        x = np.array([0.5, -0.3])
        got = hm.gaussian_derivative(x, sigma, 1, "full_recursive")
        assert np.allclose(got, -p.inv @ x * float(p.density(x)), atol=1e-15)

    def test_bivariate_third_order_pure_coordinate(self):
        # with identity covariance the density factorizes, so the (3,0)
        # coordinate is the univariate third derivative factor
        x = np.array([1.0, 1.0])
        got = hm.gaussian_derivative(x, np.eye(2), 3, "unique")
        phi = math.exp(-1.0) / (2 * math.pi)
        assert abs(got[0] - 2.0 * phi) < 1e-15  # -(x1^3 - 3 x1) phi = 2 phi

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("r", range(7))
    def test_three_way_agreement(self, d, r):
        rng = np.random.default_rng(100 * d + r)
        for _ in range(20):
            sigma = random_spd(rng, d)
            x = rng.standard_normal(d)
            vals = [hm.gaussian_derivative(x, sigma, r, m) for m in hm.DERIVATIVE_METHODS]
            scale = max(1e-300, np.abs(vals[0]).max())
            for other in vals[1:]:
                assert np.abs(other - vals[0]).max() / scale < 1e-10

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_finite_difference_consistency(self, d, r):
        rng = np.random.default_rng(200 * d + r)
        sigma = random_spd(rng, d)
        x = rng.standard_normal(d)
        full = hm.gaussian_derivative(x, sigma, r, "unique")

        def lower(pt):
            return hm.gaussian_derivative(pt, sigma, r - 1, "unique")

        # differentiate the order r-1 vector along the first tuple slot:
        # coordinate (i_1, ..., i_r) differentiates slot-1 coordinate i_1
        n_prev = d ** (r - 1)
        for i in range(d**r):
            tup = tuple_index(i + 1, d, r)
            fd = finite_difference_coordinate(lower, x, tup[0] - 1)
            prev_pos = (i // d) if r >= 1 else 0
            approx = fd[prev_pos % n_prev] if r > 1 else fd[0]
            denom = max(np.abs(full).max(), 1e-12)
            assert abs(full[i] - approx) / denom < 1e-4

    @pytest.mark.parametrize("d,r", [(2, 4), (3, 3)])
    def test_schwarz_symmetry(self, d, r):
        rng = np.random.default_rng(11)
        sigma = random_spd(rng, d)
        x = rng.standard_normal(d)
        v = hm.gaussian_derivative(x, sigma, r, "full_recursive")
        assert np.abs(symv_recursive(v, d, r) - v).max() < 1e-12 * max(1, np.abs(v).max())

    @pytest.mark.parametrize("r", range(7))
    def test_univariate_closed_form(self, r):
        variance = 1.7
        x = np.array([0.8])
        got = hm.gaussian_derivative(x, np.array([[variance]]), r, "unique")
        want = univariate_density_derivative(0.8, variance, r)
        assert abs(got[0] - want) < 1e-12 * max(1, abs(want))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            hm.gaussian_derivative(np.zeros(2), np.eye(2), 2, "magic")


class TestBatch:
    def test_matches_scalar_calls(self):
        rng = np.random.default_rng(12)
        sigma = random_spd(rng, 2)
        pts = rng.standard_normal((9, 2))
        batch = hm.gaussian_derivative_batch(pts, sigma, 3)
        for t in range(9):
            ref = hm.gaussian_derivative(pts[t], sigma, 3, "direct")
            assert np.abs(batch[t] - ref).max() < 1e-13 * max(1, np.abs(ref).max())

    def test_order_zero(self):
        sigma = np.eye(2)
        pts = np.zeros((3, 2))
        got = hm.gaussian_derivative_batch(pts, sigma, 0)
        assert np.allclose(got, 1 / (2 * math.pi))
