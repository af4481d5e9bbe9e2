import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpsm_secrecy.channel import (ConditionError, RankDeficiencyError,
                                  SystemDims, apply_kronecker, draw_realization,
                                  exp_correlation, left_pseudo_inverse,
                                  matrix_sqrt_psd, rayleigh, split_csit)
from gpsm_secrecy.numerics import Rng


class TestSystemDims:
    def test_valid(self):
        assert SystemDims(16, 8, 2, 16).eve_can_postprocess

    @pytest.mark.parametrize('args', [(4, 8, 2, 4), (8, 4, 4, 4), (8, 4, 0, 4),
                                      (8, 4, 2, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            SystemDims(*args)

    def test_small_eve_allowed(self):
        assert not SystemDims(8, 4, 1, 2).eve_can_postprocess


class TestRayleigh:
    def test_shape_and_power(self):
        h = np.stack([rayleigh(Rng(5, i), 4, 8) for i in range(3125)])
        assert h.shape[1:] == (4, 8)
        assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 1e-2

    def test_deterministic(self):
        assert np.array_equal(rayleigh(Rng(1, 2), 4, 8), rayleigh(Rng(1, 2), 4, 8))

    def test_exponential_tail(self):
        h = rayleigh(Rng(9), 100_000, 1)
        assert abs(np.mean(np.abs(h) ** 2 > 1) - np.exp(-1)) < 1e-2


class TestCorrelation:
    def test_identity(self):
        assert np.array_equal(exp_correlation(3, 0.0), np.eye(3))

    def test_two_by_two(self):
        assert np.allclose(exp_correlation(2, 0.5), [[1, 0.5], [0.5, 1]])

    def test_positive_definite(self):
        assert np.linalg.eigvalsh(exp_correlation(4, 0.3)).min() > 0

    def test_sqrt_identity(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3))

    def test_sqrt_diagonal(self):
        assert np.allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_sqrt_reconstructs(self):
        r = exp_correlation(4, 0.5)
        s = matrix_sqrt_psd(r)
        assert np.max(np.abs(s @ s.T - r)) < 1e-10

    def test_sqrt_rejects_indefinite(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.diag([1.0, -1.0]))

    def test_sqrt_tolerates_singular(self):
        s = matrix_sqrt_psd(np.ones((2, 2)))
        assert np.allclose(s @ s.T, np.ones((2, 2)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 12), st.floats(0.0, 0.95))
    def test_sqrt_reconstructs_property(self, n, rho):
        r = exp_correlation(n, rho)
        s = matrix_sqrt_psd(r)
        assert np.allclose(s @ s.T, r, atol=1e-10)


class TestKronecker:
    def test_identity_is_noop(self):
        h0 = rayleigh(Rng(0), 3, 5)
        assert np.allclose(apply_kronecker(h0, np.eye(3), np.eye(5)), h0)

    def test_by_hand(self):
        r = np.array([[1.0, 0.5], [0.5, 1.0]])
        # symmetric sqrt of [[1, a], [a, 1]] is [[c, d], [d, c]] with
        # c = (sqrt(1+a) + sqrt(1-a)) / 2, d = (sqrt(1+a) - sqrt(1-a)) / 2
        c = (np.sqrt(1.5) + np.sqrt(0.5)) / 2
        d = (np.sqrt(1.5) - np.sqrt(0.5)) / 2
        s = np.array([[c, d], [d, c]])
        h0 = np.ones((2, 2), dtype=complex)
        assert np.allclose(apply_kronecker(h0, r, r), s @ h0 @ s.T)

    def test_receive_covariance(self):
        r_rx = exp_correlation(3, 0.6)
        gen = Rng(11).generator()
        h = np.stack([apply_kronecker(rayleigh(gen, 3, 1), r_rx, np.eye(1))[:, 0]
                      for _ in range(100_000)])
        cov = (h.T @ h.conj()) / len(h)
        assert np.max(np.abs(cov - r_rx)) < 2e-2

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            apply_kronecker(np.ones((2, 3)), np.eye(3), np.eye(3))

    def test_zero_rho_bit_identical(self):
        dims = SystemDims(8, 4, 2, 6)
        a = draw_realization(Rng(3), dims, rho=0.0)
        b = draw_realization(Rng(3), dims)
        assert np.array_equal(a.h_bob, b.h_bob) and np.array_equal(a.h_eve, b.h_eve)


class TestCsit:
    def test_perfect(self):
        h_true, h_alice = split_csit(Rng(0), 4, 8, 0.0)
        assert np.array_equal(h_true, h_alice)

    def test_error_variance(self):
        h_true, h_alice = split_csit(Rng(1), 250, 400, 0.5)
        assert abs(np.mean(np.abs(h_true - h_alice) ** 2) - 0.25) < 1e-2

    @pytest.mark.parametrize('sigma', [0.0, 0.3, 0.7, 1.0])
    def test_true_channel_unit_variance(self, sigma):
        h_true, _ = split_csit(Rng(2), 250, 400, sigma)
        assert abs(np.mean(np.abs(h_true) ** 2) - 1.0) < 2e-2

    def test_all_error(self):
        _, h_alice = split_csit(Rng(3), 4, 8, 1.0)
        assert np.array_equal(h_alice, np.zeros((4, 8)))

    def test_stream_consumption_independent_of_sigma(self):
        dims = SystemDims(8, 4, 2, 8)
        a = draw_realization(Rng(4), dims, 0.0)
        b = draw_realization(Rng(4), dims, 0.4)
        assert np.array_equal(a.h_eve, b.h_eve)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            split_csit(Rng(0), 2, 2, 1.5)


class TestPseudoInverse:
    def test_unitary(self):
        q, _ = np.linalg.qr(rayleigh(Rng(0), 4, 4))
        assert np.allclose(left_pseudo_inverse(q), q.conj().T)

    def test_tall_identity(self):
        h = rayleigh(Rng(1), 8, 4)
        assert np.max(np.abs(left_pseudo_inverse(h) @ h - np.eye(4))) < 1e-8

    def test_matches_numpy(self):
        h = rayleigh(Rng(2), 6, 3)
        assert np.allclose(left_pseudo_inverse(h), np.linalg.pinv(h))

    def test_wide_rejected(self):
        with pytest.raises(RankDeficiencyError):
            left_pseudo_inverse(rayleigh(Rng(0), 2, 4))

    def test_rank_deficient(self):
        h = np.ones((4, 2), dtype=complex)
        with pytest.raises(ConditionError):
            left_pseudo_inverse(h)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 6), st.integers(0, 6))
    def test_identity_property(self, seed, n, extra):
        h = rayleigh(Rng(seed), n + extra, n)
        assert np.allclose(left_pseudo_inverse(h) @ h, np.eye(n), atol=1e-8)
