"""
Discrete-input continuous-output (DCMC) capacity estimation.

For equiprobable inputs,

    C = log2|B| - (1/|B|) sum_tau E[ log2 sum_eps Theta[eps, tau] ],

estimated by Monte Carlo over noise draws for each channel realization and
then averaged over realizations.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ..numerics import LN2, Rng, log_sum_exp, sample_complex_gaussian
from .kernels import coherent_table

__all__ = ['McBudget', 'CapacityEstimate', 'channel_capacity',
           'summarize', 'dcmc_capacity', 'coherent_provider',
           'brute_force_dcmc', 'outage_cdf']


@dataclass(frozen=True)
class McBudget:
    n_channels: int = 100
    n_noise: int = 200

    def __post_init__(self):
        if self.n_channels < 1 or self.n_noise < 1:
            raise ValueError("budget counts must be positive")


@dataclass(frozen=True)
class CapacityEstimate:
    bits: float
    std_err: float
    n_channels: int
    n_noise: int


def channel_capacity(log_theta, alphabet_size, clamp=True):
    """
    Capacity for one channel realization from a table of ``ln Theta``.

    Parameters
    ----------
    log_theta : array_like, shape (n_tau, n_draws, n_eps)
        Natural-log likelihood ratios for every true symbol ``tau``.
    alphabet_size : int
    clamp : bool
        Clip the result into ``[0, log2(alphabet_size)]``.
    """
    lt = np.asarray(log_theta, dtype=float)
    if lt.ndim != 3 or lt.shape[0] != alphabet_size or lt.shape[2] != alphabet_size:
        raise ValueError(f"log-theta table of shape {lt.shape} does not match "
                         f"alphabet size {alphabet_size}")
    penalty = np.mean(log_sum_exp(lt, axis=2)) / LN2
    cap = np.log2(alphabet_size) - penalty
    if clamp:
        cap = min(max(cap, 0.0), np.log2(alphabet_size))
    return float(cap)


def summarize(per_channel, n_noise, alphabet_size):
    """
    Ergodic capacity from unclamped per-channel estimates.

    The mean over realizations is floored at zero and capped at
    ``log2(alphabet_size)``; the standard error is that of the raw mean.
    """
    vals = np.asarray(per_channel, dtype=float)
    se = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else 0.0
    bits = min(max(vals.mean(), 0.0), np.log2(alphabet_size))
    return CapacityEstimate(bits=float(bits), std_err=float(se),
                            n_channels=int(vals.size), n_noise=int(n_noise))


def dcmc_capacity(provider, alphabet_size, budget):
    """
    Monte Carlo DCMC capacity.

    ``provider(channel_index, n_noise)`` must return the ``ln Theta`` table of
    shape ``(alphabet_size, n_noise, alphabet_size)`` for that realization.
    Realizations are processed in index order, so the result depends only on
    what the provider returns.
    """
    per_channel = [channel_capacity(provider(c, budget.n_noise), alphabet_size,
                                    clamp=False)
                   for c in range(budget.n_channels)]
    return summarize(per_channel, budget.n_noise, alphabet_size)


def coherent_provider(g, symbols, sigma2, seed=0):
    """
    Provider for a fixed linear channel ``y = g s + w`` with a finite alphabet.

    Each channel index draws fresh noise from its own substream, so repeated
    indices give independent replicas of the same channel.
    """
    gs = np.asarray(g, dtype=complex) @ np.asarray(symbols, dtype=complex)
    n_out, n_sym = gs.shape
    sigma = np.sqrt(sigma2)

    def provider(index, n_noise):
        gen = Rng(seed, index).generator()
        w = sample_complex_gaussian(gen, (n_sym, n_noise, n_out), 1.0)
        return np.stack([coherent_table(gs, tau, w[tau], sigma)
                         for tau in range(n_sym)])
    return provider


def brute_force_dcmc(g, symbols, sigma2, n_nodes=32):
    """
    DCMC capacity of ``y = g s + w`` by tensor Gauss-Hermite quadrature.

    The integral over the output space is rewritten as an expectation over
    the complex noise, one pair of real Hermite axes per receive antenna.
    Limited to two receive antennas and four symbols.

    Parameters
    ----------
    g : array_like, shape (n_out, n_in)
    symbols : array_like, shape (n_in, n_symbols)
    sigma2 : float
        Complex noise variance per receive antenna.
    n_nodes : int
        Hermite nodes per real axis.
    """
    g = np.atleast_2d(np.asarray(g, dtype=complex))
    symbols = np.atleast_2d(np.asarray(symbols, dtype=complex))
    gs = g @ symbols
    n_out, n_sym = gs.shape
    if n_out > 2 or n_sym > 4:
        raise ValueError("brute-force quadrature supports at most 2 receive "
                         "antennas and 4 symbols")
    if not np.isfinite(sigma2):
        return 0.0
    nodes, weights = np.polynomial.hermite.hermgauss(n_nodes)
    # real noise component ~ N(0, sigma2 / 2) = sigma * t with weight e^{-t^2}
    axes = [nodes] * (2 * n_out)
    grid = np.array(list(itertools.product(*axes)))            # (P, 2 n_out)
    wgt = np.prod(np.array(list(itertools.product(*([weights] * (2 * n_out))))),
                  axis=1) / np.pi ** n_out
    sigma = np.sqrt(sigma2)
    w = sigma * (grid[:, 0::2] + 1j * grid[:, 1::2])            # (P, n_out)
    penalty = 0.0
    for tau in range(n_sym):
        d = gs[:, [tau]] - gs                                   # (n_out, n_sym)
        # -(||d + w||^2 - ||w||^2) / sigma2
        lt = -(np.sum(np.abs(d) ** 2, axis=0)[None, :]
               + 2.0 * (w @ d.conj()).real) / sigma2
        penalty += np.dot(wgt, log_sum_exp(lt, axis=1)) / LN2
    return float(np.log2(n_sym) - penalty / n_sym)


def outage_cdf(samples, n_points=101):
    """
    Empirical CDF of per-realization secrecy capacity.

    Returns a list of ``(threshold, P[C_S <= threshold])`` on a uniform grid
    spanning ``[min, max]`` of the samples.
    """
    vals = np.sort(np.asarray(samples, dtype=float))
    if vals.size == 0:
        raise ValueError("outage_cdf needs at least one sample")
    lo, hi = vals[0], vals[-1]
    grid = np.array([lo]) if hi == lo else np.linspace(lo, hi, n_points)
    prob = np.searchsorted(vals, grid, side='right') / vals.size
    return [(float(t), float(p)) for t, p in zip(grid, prob)]
