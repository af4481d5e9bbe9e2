import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gpsm_secrecy.channel import ConditionError, rayleigh
from gpsm_secrecy.gpsm import (Mode, PatternSet, Payload, build_pattern_set, ci_precoder,
                               decoupled_detect, equivalent_channel, k_eff,
                               make_payload, ml_detect, psk_constellation,
                               super_alphabet, super_symbol, transmit)
from gpsm_secrecy.numerics import Rng, sample_complex_gaussian


class TestPatterns:
    def test_single_active(self):
        ps = build_pattern_set(4, 1)
        assert ps.patterns == ((0,), (1,), (2,), (3,)) and ps.k_ant == 2

    def test_eight_choose_four(self):
        ps = build_pattern_set(8, 4)
        assert ps.k_ant == 6 and len(ps) == 64

    def test_eight_choose_two(self):
        ps = build_pattern_set(8, 2)
        assert ps.k_ant == 4 and len(ps) == 16

    def test_lexicographic_prefix(self):
        ps = build_pattern_set(8, 4)
        combos = list(itertools.combinations(range(8), 4))[:64]
        assert list(ps.patterns) == combos

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_pattern_set(4, 4)

    @given(st.integers(2, 12), st.data())
    def test_structure(self, n, data):
        k = data.draw(st.integers(1, n - 1))
        ps = build_pattern_set(n, k)
        assert len(ps) == 2 ** ps.k_ant
        assert 2 ** ps.k_ant <= math.comb(n, k) < 2 ** (ps.k_ant + 1)
        assert len(set(ps.patterns)) == len(ps)
        assert all(len(p) == k and max(p) < n and list(p) == sorted(p)
                   for p in ps.patterns)
        assert len(build_pattern_set(n, n - k)) == len(ps)

    def test_indicator(self):
        mask = build_pattern_set(4, 2).indicator()
        assert mask.sum(axis=1).tolist() == [2, 2, 2, 2]
        assert mask[3].tolist() == [False, True, True, False]


class TestKeff:
    def test_modulated(self):
        assert k_eff(build_pattern_set(4, 1), Mode.MODULATED, 4) == 4

    def test_cas(self):
        assert k_eff(build_pattern_set(8, 4), 'cas') == 6

    def test_mirror(self):
        assert k_eff(build_pattern_set(8, 6), 'cas') == 4 == \
            k_eff(build_pattern_set(8, 2), 'cas')


class TestConstellation:
    def test_qpsk_label_zero(self):
        assert psk_constellation(4)[0] == pytest.approx((1 + 1j) / math.sqrt(2))

    @pytest.mark.parametrize('m', [2, 4, 8, 16])
    def test_unit_energy_and_gray(self, m):
        pts = psk_constellation(m)
        assert np.allclose(np.abs(pts), 1.0)
        # nearest neighbours differ in exactly one bit
        order = np.argsort(np.angle(pts) % (2 * np.pi))
        for a, b in zip(order, np.roll(order, -1)):
            assert bin(int(a) ^ int(b)).count('1') == 1

    def test_invalid(self):
        with pytest.raises(ValueError):
            psk_constellation(6)


class TestPrecoder:
    def test_identity(self):
        pre = ci_precoder(np.eye(4))
        assert np.allclose(pre.p, np.eye(4)) and pre.beta == pytest.approx(1.0)

    def test_scaled_identity(self):
        # H H^H = 4 I, so Tr[(H H^H)^-1] = 1 and beta = n_rx / 1
        pre = ci_precoder(2 * np.eye(4))
        assert np.allclose(pre.p, 0.5 * np.eye(4)) and pre.beta == pytest.approx(4.0)

    def test_random_inverse(self):
        h = rayleigh(Rng(0), 4, 8)
        pre = ci_precoder(h)
        assert np.linalg.norm(h @ pre.p - np.eye(4)) < 1e-10
        ref = 4 / np.trace(np.linalg.inv(h @ h.conj().T)).real
        assert pre.beta == pytest.approx(ref, rel=1e-12)

    def test_equivalent_channel_structure(self):
        h = rayleigh(Rng(1), 8, 16)
        pre = ci_precoder(h)
        g = equivalent_channel(h, pre, 2)
        assert np.max(np.abs(g - np.sqrt(pre.beta / 2) * np.eye(8))) < 1e-10

    def test_singular(self):
        h = np.ones((2, 4), dtype=complex)
        with pytest.raises(ConditionError):
            ci_precoder(h)

    def test_wide_required(self):
        with pytest.raises(ValueError):
            ci_precoder(rayleigh(Rng(0), 4, 2))


class TestSuperSymbols:
    def test_modulated_payload(self):
        p = make_payload(None, Mode.MODULATED, 1, 4, [0])
        assert p.values[0] == pytest.approx((1 + 1j) / math.sqrt(2))

    def test_cas_payload(self):
        p = make_payload(Rng(0), Mode.CAS, 2)
        assert np.allclose(np.abs(p.values), 1.0)

    def test_gas_payload_power(self):
        gen = Rng(1).generator()
        vals = np.concatenate([make_payload(gen, Mode.GAS, 2).values
                               for _ in range(50_000)])
        assert abs(np.mean(np.abs(vals) ** 2) - 1.0) < 1e-2

    def test_scatter_single(self):
        ss = super_symbol(build_pattern_set(4, 1), 0, Payload(Mode.MODULATED, np.array([1.0])))
        assert np.array_equal(ss.s, [1, 0, 0, 0])

    def test_scatter_pair(self):
        ps = PatternSet(n_rx=4, n_active=2, patterns=((0, 1), (1, 3)), k_ant=1)
        ss = super_symbol(ps, 1, Payload(Mode.CAS, np.array([2j, 3.0])))
        assert np.array_equal(ss.s, [0, 2j, 0, 3])

    @given(st.integers(0, 1000))
    def test_norm_preserved(self, seed):
        ps = build_pattern_set(6, 3)
        pay = make_payload(Rng(seed), Mode.GAS, 3)
        ss = super_symbol(ps, seed % len(ps), pay)
        assert np.isclose(np.linalg.norm(ss.s), np.linalg.norm(pay.values))

    def test_bad_index(self):
        with pytest.raises(ValueError):
            super_symbol(build_pattern_set(4, 1), 4, Payload(Mode.CAS, np.ones(1)))


class TestTransmit:
    def test_zero(self):
        assert np.array_equal(transmit(ci_precoder(np.eye(4)), np.zeros(4)), np.zeros(4))

    def test_identity(self):
        x = transmit(ci_precoder(np.eye(4)), np.array([1, 0, 0, 0], dtype=complex))
        assert np.allclose(x, [1, 0, 0, 0])

    def test_average_power(self):
        gen = Rng(2).generator()
        ps = build_pattern_set(4, 2)
        symbols, _ = super_alphabet(ps, 4)
        power = []
        for _ in range(10_000):
            pre = ci_precoder(rayleigh(gen, 4, 8))
            b = gen.integers(symbols.shape[1])
            power.append(np.linalg.norm(transmit(pre, symbols[:, b])) ** 2)
        assert abs(np.mean(power) - 1.0) < 2e-2


def brute_force_ml(y, g, ps, m_ary):
    pts = psk_constellation(m_ary)
    best, arg = np.inf, None
    for k, pat in enumerate(ps.patterns):
        for combo in itertools.product(range(m_ary), repeat=ps.n_active):
            s = np.zeros(ps.n_rx, dtype=complex)
            for a, m in zip(pat, combo):
                s[a] = pts[m]
            d = np.sum(np.abs(y - g @ s) ** 2)
            if d < best:
                best, arg = d, (k, combo)
    return arg


class TestDetectors:
    def test_noiseless_round_trip(self):
        gen = Rng(3).generator()
        ps = build_pattern_set(4, 2)
        symbols, labels = super_alphabet(ps, 4)
        for trial in range(100):
            h = rayleigh(gen, 4, 8)
            g = equivalent_channel(h, ci_precoder(h), 2)
            b = trial % len(labels)
            y = g @ symbols[:, b]
            assert ml_detect(y, g, ps, 4) == labels[b]
            assert decoupled_detect(y, g, ps, 4) == labels[b]

    def test_ml_matches_scan(self):
        gen = Rng(4).generator()
        ps = build_pattern_set(4, 2)
        symbols, _ = super_alphabet(ps, 4)
        for trial in range(100):
            g = rayleigh(gen, 4, 4)
            y = g @ symbols[:, trial % symbols.shape[1]] \
                + sample_complex_gaussian(gen, 4, 0.5)
            assert ml_detect(y, g, ps, 4) == brute_force_ml(y, g, ps, 4)

    def test_ml_tie_lowest(self):
        ps = build_pattern_set(4, 1)
        assert ml_detect(np.zeros(4), np.eye(4), ps, 4) == (0, (0,))

    def test_decoupled_tie_lowest(self):
        ps = build_pattern_set(4, 1)
        assert decoupled_detect(np.ones(4), np.eye(4), ps, 4)[0] == 0

    def test_single_pattern(self):
        ps1 = PatternSet(n_rx=2, n_active=1, patterns=((0,),), k_ant=0)
        gen = Rng(5).generator()
        for _ in range(10):
            y = sample_complex_gaussian(gen, 2)
            assert decoupled_detect(y, np.eye(2), ps1, 4)[0] == 0
