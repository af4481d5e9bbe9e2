"""
Secrecy capacity of one GPSM scenario, Bob and Eve on the same draws.

Kernel pairs per mode:

=========  ================================  =======================================
mode       Bob                               Eve
=========  ================================  =======================================
gpsm       coherent, ``G_B``                 coherent, ``G_E``
cas, Na=1  noncentral chi2, general ``G_B``  noncentral chi2, general ``G_E``
cas, Na>1  noncentral chi2, identity ``G_B`` post-processed, identity ``G_B``
gas        Gaussian, ``G_B``                 post-processed, Gaussian ``G_B``
=========  ================================  =======================================

When Eve must post-process but has fewer antennas than Alice she learns
nothing from the activation pattern; her capacity is reported as zero and
the result is flagged ``eve_blind``.
"""

import concurrent.futures
from dataclasses import dataclass, field
from functools import lru_cache, partial

import numpy as np

from ..channel import SystemDims, draw_realization
from ..gpsm import (Mode, build_pattern_set, ci_precoder, equivalent_channel,
                    super_alphabet)
from ..numerics import (LN2, Rng, log_sum_exp, sample_complex_gaussian,
                        sample_unit_circle)
from .capacity import CapacityEstimate, McBudget, summarize
from .kernels import (UnsupportedModeError, cas_general_table,
                      cas_identity_table, coherent_table, gas_table,
                      gas_variances, postprocess_matrix)

__all__ = ['NoiseSpec', 'Scenario', 'SecrecyResult', 'SweepResult',
           'snr_to_sigma2', 'estimate_secrecy', 'secrecy_sweep',
           'channel_trial']

EVE_RECEIVERS = ('auto', 'direct')


def snr_to_sigma2(snr_db):
    """Noise variance per receive antenna for unit transmit power."""
    return 10.0 ** (-np.asarray(snr_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class NoiseSpec:
    sigma2_bob: float
    sigma2_eve: float
    snr_db: float = None

    def __post_init__(self):
        if not (self.sigma2_bob > 0 and self.sigma2_eve > 0):
            raise ValueError("noise variances must be positive")

    @classmethod
    def from_snr_db(cls, snr_db):
        s2 = float(snr_to_sigma2(snr_db))
        return cls(s2, s2, float(snr_db))

    @property
    def sigma2_bob_0(self):
        return self.sigma2_bob / 2.0

    @property
    def sigma2_eve_0(self):
        return self.sigma2_eve / 2.0


@dataclass(frozen=True)
class Scenario:
    """
    Everything that fixes the statistics of a secrecy experiment except SNR.

    ``eve_receiver='direct'`` makes Eve apply the GAS kernel straight to
    her own equivalent channel instead of post-processing. With
    ``gas_normalize=False`` the GAS kernels omit the ``ln V`` terms.
    """
    mode: Mode
    dims: SystemDims
    m_ary: int = 4
    csit_sigma_i: float = 0.0
    rho: float = 0.0
    eve_receiver: str = 'auto'
    gas_normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'mode', Mode(self.mode))
        if self.eve_receiver not in EVE_RECEIVERS:
            raise ValueError(f"eve_receiver must be one of {EVE_RECEIVERS}")
        if not 0.0 <= self.csit_sigma_i <= 1.0:
            raise ValueError("csit_sigma_i must lie in [0, 1]")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.mode is Mode.CAS and self.csit_sigma_i > 0:
            raise UnsupportedModeError(
                "CAS kernels rely on a perfect channel inversion; CSIT error "
                "is only supported in GAS mode")
        if self.eve_receiver == 'direct' and self.mode is not Mode.GAS:
            raise UnsupportedModeError("direct Eve receiver is GAS-only")

    @property
    def pattern_set(self):
        return _pattern_set(self.dims.n_rx, self.dims.n_active)

    @property
    def alphabet_size(self):
        size = len(self.pattern_set)
        if self.mode is Mode.MODULATED:
            size *= self.m_ary ** self.dims.n_active
        return size

    @property
    def eve_blind(self):
        """True when Eve cannot extract anything from the pattern at all."""
        if self.eve_receiver == 'direct' or self.mode is Mode.MODULATED:
            return False
        if self.mode is Mode.CAS and self.dims.n_active == 1:
            return False
        return not self.dims.eve_can_postprocess


@dataclass(frozen=True)
class SecrecyResult:
    c_bob: CapacityEstimate
    c_eve: CapacityEstimate
    c_sec: float
    eve_blind: bool = False


@dataclass
class SweepResult:
    """
    Sweep output. ``bob_per_channel`` / ``eve_per_channel`` hold the raw
    ``(n_channels, n_snr)`` estimates before any clamping.
    """
    snr_db: np.ndarray
    results: list
    alphabet_size: int
    bob_per_channel: np.ndarray = field(repr=False)
    eve_per_channel: np.ndarray = field(repr=False)

    @property
    def secrecy_per_channel(self):
        """Per-realization ``C_B - C_E``, each capacity clamped to its range."""
        top = np.log2(self.alphabet_size)
        return (np.clip(self.bob_per_channel, 0.0, top)
                - np.clip(self.eve_per_channel, 0.0, top))


@lru_cache(maxsize=None)
def _pattern_set(n_rx, n_active):
    return build_pattern_set(n_rx, n_active)


def _finish(penalty, alphabet_size):
    """Unclamped per-channel capacity from summed per-symbol mean log2-sums."""
    return np.log2(alphabet_size) - penalty / alphabet_size


def _lse_mean(log_theta):
    # mean over draws of log2 sum_eps Theta; trailing axes (draws, eps)
    return np.mean(log_sum_exp(log_theta, axis=-1), axis=-1) / LN2


def channel_trial(scenario, sigma2_bob, sigma2_eve, n_noise, seed, index):
    """
    Per-channel Bob and Eve capacities for one realization.

    Parameters
    ----------
    sigma2_bob, sigma2_eve : array_like, shape (n_snr,)
        Noise variances; every entry reuses the same unit-variance draws.
    index : int
        Realization index; selects the random substream.

    Returns
    -------
    (c_bob, c_eve) : pair of ndarray, shape (n_snr,)
        Unclamped estimates; a mismatched metric can push them below zero.
    """
    sc = scenario
    dims = sc.dims
    ps = sc.pattern_set
    na = dims.n_active
    s2b = np.atleast_1d(np.asarray(sigma2_bob, dtype=float))
    s2e = np.atleast_1d(np.asarray(sigma2_eve, dtype=float))
    sb = np.sqrt(s2b)[:, None, None]
    se = np.sqrt(s2e)[:, None, None]

    gen = Rng(seed, index).generator()
    real = draw_realization(gen, dims, sc.csit_sigma_i, sc.rho)
    prec = ci_precoder(real.h_bob_alice_view)
    g_bob = equivalent_channel(real.h_bob, prec, na)
    g_eve = equivalent_channel(real.h_eve, prec, na)

    size = sc.alphabet_size
    pen_b = np.zeros(s2b.size)
    pen_e = np.zeros(s2e.size)
    blind = sc.eve_blind

    if sc.mode is Mode.MODULATED:
        symbols, _ = super_alphabet(ps, sc.m_ary)
        w_b = sample_complex_gaussian(gen, (size, n_noise, dims.n_rx))
        w_e = sample_complex_gaussian(gen, (size, n_noise, dims.n_eve))
        gs_b = g_bob @ symbols
        gs_e = g_eve @ symbols
        for tau in range(size):
            pen_b += _lse_mean(coherent_table(gs_b, tau, w_b[tau], np.sqrt(s2b)))
            pen_e += _lse_mean(coherent_table(gs_e, tau, w_e[tau], np.sqrt(s2e)))
        return _finish(pen_b, size), _finish(pen_e, size)

    if sc.mode is Mode.CAS:
        payload = sample_unit_circle(gen, (size, n_noise, na))
    else:
        payload = sample_complex_gaussian(gen, (size, n_noise, na))
    w_b = sample_complex_gaussian(gen, (size, n_noise, dims.n_rx))
    w_e = sample_complex_gaussian(gen, (size, n_noise, dims.n_eve))

    post = not blind and sc.eve_receiver == 'auto' and not (
        sc.mode is Mode.CAS and na == 1)
    if post:
        t = postprocess_matrix(real.h_bob, real.h_eve)
        amp = np.sum(np.abs(t) ** 2, axis=1)        # diag(T T^H)
        s2_tilde = s2e[:, None, None] * amp          # (n_snr, 1, n_rx)

    if sc.mode is Mode.GAS:
        v_b = gas_variances(g_bob, s2b[:, None, None], ps)
        if post:
            v_e = gas_variances(g_bob, s2_tilde, ps)
        elif not blind:
            v_e = gas_variances(g_eve, s2e[:, None, None], ps)

    for tau, pat in enumerate(ps.patterns):
        cols = list(pat)
        y_b = (payload[tau] @ g_bob[:, cols].T)[None] + sb * w_b[tau][None]
        if sc.mode is Mode.CAS:
            r_b = np.abs(y_b) ** 2
            if na == 1:
                lt = cas_general_table(g_bob, r_b, tau,
                                       (s2b / 2)[:, None, None], ps)
            else:
                lt = cas_identity_table(r_b, tau, prec.beta, na,
                                        (s2b / 2)[:, None, None], ps)
        else:
            lt = gas_table(y_b, tau, v_b, sc.gas_normalize)
        pen_b += _lse_mean(lt)

        if blind:
            continue
        y_e = (payload[tau] @ g_eve[:, cols].T)[None] + se * w_e[tau][None]
        if post:
            y_e = y_e @ t.T
        if sc.mode is Mode.CAS:
            r_e = np.abs(y_e) ** 2
            if na == 1:
                lt = cas_general_table(g_eve, r_e, tau,
                                       (s2e / 2)[:, None, None], ps)
            else:
                lt = cas_identity_table(r_e, tau, prec.beta, na,
                                        s2_tilde / 2, ps)
        else:
            lt = gas_table(y_e, tau, v_e, sc.gas_normalize)
        pen_e += _lse_mean(lt)

    c_eve = np.zeros(s2e.size) if blind else _finish(pen_e, size)
    return _finish(pen_b, size), c_eve


def _run_trials(scenario, sigma2_bob, sigma2_eve, budget, seed, workers):
    job = partial(channel_trial, scenario, sigma2_bob, sigma2_eve,
                  budget.n_noise, seed)
    indices = range(budget.n_channels)
    if workers <= 1:
        out = [job(i) for i in indices]
    else:
        chunk = max(1, budget.n_channels // (4 * workers))
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            # map preserves index order regardless of completion order
            out = list(pool.map(job, indices, chunksize=chunk))
    bob = np.array([o[0] for o in out])
    eve = np.array([o[1] for o in out])
    return bob, eve


def secrecy_sweep(scenario, snr_grid_db, budget=McBudget(), seed=0, workers=1):
    """
    Secrecy capacity over an SNR grid with ``sigma2_bob == sigma2_eve``.

    Every SNR point sees the same channel realizations and the same
    unit-variance noise and scrambling draws, so curves are smooth and
    paired across the grid.
    """
    snr = np.atleast_1d(np.asarray(snr_grid_db, dtype=float))
    s2 = snr_to_sigma2(snr)
    bob, eve = _run_trials(scenario, s2, s2, budget, seed, workers)
    size = scenario.alphabet_size
    results = []
    for j in range(snr.size):
        cb = summarize(bob[:, j], budget.n_noise, size)
        ce = summarize(eve[:, j], budget.n_noise, size)
        results.append(SecrecyResult(cb, ce, cb.bits - ce.bits,
                                     scenario.eve_blind))
    return SweepResult(snr, results, size, bob, eve)


def estimate_secrecy(scenario, noise, budget=McBudget(), seed=0, workers=1):
    """``C_S = C_B - C_E`` at one noise setting (not clamped at zero)."""
    if not isinstance(noise, NoiseSpec):
        noise = NoiseSpec.from_snr_db(noise)
    bob, eve = _run_trials(scenario, [noise.sigma2_bob], [noise.sigma2_eve],
                           budget, seed, workers)
    cb = summarize(bob[:, 0], budget.n_noise, scenario.alphabet_size)
    ce = summarize(eve[:, 0], budget.n_noise, scenario.alphabet_size)
    return SecrecyResult(cb, ce, cb.bits - ce.bits, scenario.eve_blind)
