"""
Random sampling and log-domain special functions shared by the estimators.

Every Monte Carlo trial owns a substream derived from ``(seed, stream_id)``
so results never depend on how trials are scheduled across workers.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ['Rng', 'make_generator', 'sample_complex_gaussian',
           'sample_unit_circle', 'log_bessel_i0',
           'noncentral_chi2_df2_logpdf', 'log_sum_exp']

_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 12
LN2 = np.log(2.0)


@dataclass(frozen=True)
class Rng:
    """Seed plus stream index identifying one reproducible random substream.

    The value itself is immutable and cheap to pass to worker processes;
    call :meth:`generator` to obtain a fresh ``numpy.random.Generator``
    positioned at the start of the substream.
    """
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2 ** 64 and 0 <= self.stream_id < 2 ** 64):
            raise ValueError("seed and stream_id must be unsigned 64-bit")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))


def make_generator(rng) -> np.random.Generator:
    """Accept an :class:`Rng` or an already-running Generator."""
    if isinstance(rng, Rng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected Rng or numpy Generator, got {type(rng)!r}")


def sample_complex_gaussian(rng, n, variance=1.0):
    """
    Draw circularly symmetric complex Gaussian samples.

    Parameters
    ----------
    rng : Rng or numpy.random.Generator
    n : int or tuple of int
        Output shape.
    variance : float
        E[|w|^2]; each of the real and imaginary parts gets half of it.

    Returns
    -------
    numpy.ndarray of complex128
    """
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    gen = make_generator(rng)
    shape = (n,) if np.isscalar(n) else tuple(n)
    parts = gen.standard_normal(shape + (2,))
    return np.sqrt(variance / 2.0) * (parts[..., 0] + 1j * parts[..., 1])


def sample_unit_circle(rng, n):
    """Unit-modulus samples with phase uniform on [0, 2*pi)."""
    shape = (n,) if np.isscalar(n) else tuple(n)
    if np.prod(shape) < 1:
        raise ValueError("need at least one sample")
    theta = make_generator(rng).uniform(0.0, 2.0 * np.pi, size=shape)
    return np.exp(1j * theta)


def log_bessel_i0(x):
    """
    Natural log of the modified Bessel function I0, overflow free.

    Small arguments use the power series of I0 - 1 through ``log1p`` so
    that ln I0(x) ~ x^2/4 keeps full relative precision; larger arguments
    use the exponentially scaled ``i0e`` so that nothing overflows.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("log_bessel_i0 requires x >= 0")
    out = np.empty_like(x)
    small = x < _SERIES_CUTOFF
    if np.any(small):
        q = 0.25 * x[small] ** 2
        term = np.ones_like(q)
        acc = np.zeros_like(q)
        for k in range(1, _SERIES_TERMS + 1):
            term = term * q / (k * k)
            acc += term
        out[small] = np.log1p(acc)
    big = ~small
    if np.any(big):
        out[big] = np.log(special.i0e(x[big])) + x[big]
    return out[()] if out.ndim == 0 else out


def noncentral_chi2_df2_logpdf(x, lam):
    """
    Log-density of the noncentral chi-square law with two degrees of freedom.

    ``f(x; lam) = 0.5 * exp(-(x + lam)/2) * I0(sqrt(lam * x))``, evaluated
    entirely in the log domain. Broadcasts over ``x`` and ``lam``.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(x < 0) or np.any(lam < 0):
        raise ValueError("x and lambda must be non-negative")
    return -LN2 - 0.5 * (x + lam) + log_bessel_i0(np.sqrt(lam * x))


def log_sum_exp(values, axis=None):
    """
    ln(sum(exp(values))) with max subtraction.

    With ``axis=None`` the input is flattened and a float is returned.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty sequence")
    if axis is None:
        v = v.ravel()
        axis = 0
    m = np.max(v, axis=axis, keepdims=True)
    # all -inf along the axis: the sum is zero
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide='ignore'):
        out = np.log(np.sum(np.exp(v - m_safe), axis=axis, keepdims=True)) + m_safe
    out = np.squeeze(out, axis=axis)
    return float(out) if out.ndim == 0 else out
