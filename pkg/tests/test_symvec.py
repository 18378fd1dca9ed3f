import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussderiv import symvec
from gaussderiv.caps import CapExceededError
from gaussderiv.kron import kron_seq
from gaussderiv.symmetrizer import symmetrizer_direct

from .oracles import brute_symmetrizer


class TestDirect:
    def test_d2_r2_worked_example(self):
        got = symvec.symv_direct(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2)
        assert got.tolist() == [1.0, 2.5, 2.5, 4.0]

    def test_power_product_fixed_point(self):
        rng = np.random.default_rng(0)
        for d, r in [(2, 4), (3, 3)]:
            x = rng.standard_normal(d)
            v = kron_seq([x] * r)
            got = symvec.symv_direct(v, d, r)
            assert np.abs(got - v).max() < 1e-12 * max(1, np.abs(v).max())

    def test_order_one_identity(self):
        v = np.array([5.0, 7.0])
        assert symvec.symv_direct(v, 2, 1).tolist() == [5.0, 7.0]

    def test_order_budget(self):
        with pytest.raises(CapExceededError):
            symvec.symv_direct(np.zeros(2**11), 2, 11)

    @pytest.mark.parametrize("d,r", [(2, 3), (3, 2), (2, 4)])
    def test_matches_brute_matrix(self, d, r):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(d**r)
        want = brute_symmetrizer(d, r) @ v
        assert np.abs(symvec.symv_direct(v, d, r) - want).max() < 1e-13


class TestTranspositionReorder:
    def test_identity_when_equal_slots(self):
        v = np.arange(8.0)
        assert np.array_equal(symvec.transposition_reorder(v, 2, 3, 2, 2), v)

    def test_d2_r2_swap_matches_commutation(self):
        got = symvec.transposition_reorder(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2, 1, 2)
        assert got.tolist() == [1.0, 3.0, 2.0, 4.0]

    @given(st.data())
    @settings(max_examples=30, deadline=None)
    def test_involution(self, data):
        d = data.draw(st.integers(2, 4))
        r = data.draw(st.integers(2, 5))
        j = data.draw(st.integers(1, r))
        k = data.draw(st.integers(j, r))
        v = np.arange(float(d**r))
        once = symvec.transposition_reorder(v, d, r, j, k)
        assert np.array_equal(symvec.transposition_reorder(once, d, r, j, k), v)

    def test_invalid_positions(self):
        with pytest.raises(ValueError):
            symvec.transposition_reorder(np.zeros(4), 2, 2, 2, 1)
        with pytest.raises(ValueError):
            symvec.transposition_reorder(np.zeros(4), 2, 2, 1, 3)


class TestRecursive:
    def test_d2_r2_worked_example(self):
        got = symvec.symv_recursive(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2)
        assert got.tolist() == [1.0, 2.5, 2.5, 4.0]

    def test_order_one_identity(self):
        v = np.array([3.0, -1.0, 2.0])
        assert np.array_equal(symvec.symv_recursive(v, 3, 1), v)

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
    def test_matches_direct(self, d, r):
        rng = np.random.default_rng(d * 100 + r)
        for _ in range(10):
            v = rng.standard_normal(d**r)
            a = symvec.symv_direct(v, d, r)
            b = symvec.symv_recursive(v, d, r)
            assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())

    @pytest.mark.parametrize("d,r", [(2, 3), (3, 3), (2, 5)])
    def test_matches_explicit_matrix(self, d, r):
        rng = np.random.default_rng(7)
        s = symmetrizer_direct(d, r)
        v = rng.standard_normal(d**r)
        assert np.abs(symvec.symv_recursive(v, d, r) - s.matvec(v)).max() < 1e-12

    @pytest.mark.parametrize("d,r", [(2, 4), (3, 3)])
    def test_idempotent(self, d, r):
        rng = np.random.default_rng(8)
        v = rng.standard_normal(d**r)
        once = symvec.symv_recursive(v, d, r)
        assert np.abs(symvec.symv_recursive(once, d, r) - once).max() < 1e-12

    @pytest.mark.parametrize("d,r", [(2, 4), (3, 3)])
    def test_linear(self, d, r):
        rng = np.random.default_rng(9)
        u, v = rng.standard_normal((2, d**r))
        alpha, beta = 0.7, -2.3
        lhs = symvec.symv_recursive(alpha * u + beta * v, d, r)
        rhs = alpha * symvec.symv_recursive(u, d, r) + beta * symvec.symv_recursive(v, d, r)
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(lhs).max())

    def test_large_product_feasible_where_matrix_is_not(self):
        # d=4, r=8: the matrix is over the byte cap, yet the product runs
        d, r = 4, 8
        v = np.arange(1.0, d**r + 1.0)
        w = symvec.symv_recursive(v, d, r)
        assert w.shape == (d**r,)
        again = symvec.symv_recursive(w, d, r)
        assert np.abs(again - w).max() < 1e-9

    def test_batch_axis(self):
        rng = np.random.default_rng(10)
        vb = rng.standard_normal((5, 3**3))
        got = symvec.symv_recursive(vb, 3, 3)
        for t in range(5):
            assert np.abs(got[t] - symvec.symv_recursive(vb[t], 3, 3)).max() == 0.0

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            symvec.symv_recursive(np.zeros(5), 2, 2)
