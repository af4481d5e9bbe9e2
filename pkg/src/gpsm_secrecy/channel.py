"""
MIMOME channel realizations and the matrix kernels the estimators rely on.

Alice has ``n_tx`` antennas, Bob ``n_rx`` and Eve ``n_eve``. Channels are
frequency-flat Rayleigh, optionally with exponential Kronecker correlation
and a Gaussian CSIT error on Alice's copy of Bob's channel.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import make_generator, sample_complex_gaussian

__all__ = ['SystemDims', 'ChannelRealization', 'CorrelationSpec',
           'RankDeficiencyError', 'ConditionError', 'rayleigh',
           'exp_correlation', 'matrix_sqrt_psd', 'apply_kronecker',
           'split_csit', 'left_pseudo_inverse', 'draw_realization']

MAX_CONDITION = 1e12


class RankDeficiencyError(ValueError):
    """A matrix has fewer rows than columns, so no left inverse exists."""


class ConditionError(ValueError):
    """A matrix is too ill-conditioned to invert reliably."""


@dataclass(frozen=True)
class SystemDims:
    n_tx: int
    n_rx: int
    n_active: int
    n_eve: int

    def __post_init__(self):
        if self.n_tx < self.n_rx:
            raise ValueError(f"need n_tx >= n_rx, got {self.n_tx} < {self.n_rx}")
        if not 1 <= self.n_active < self.n_rx:
            raise ValueError(
                f"need 1 <= n_active < n_rx, got n_active={self.n_active}, "
                f"n_rx={self.n_rx}")
        if self.n_eve < 1:
            raise ValueError("n_eve must be at least 1")

    @property
    def eve_can_postprocess(self) -> bool:
        return self.n_eve >= self.n_tx


@dataclass(frozen=True)
class ChannelRealization:
    h_bob: np.ndarray
    h_eve: np.ndarray
    h_bob_alice_view: np.ndarray


@dataclass(frozen=True)
class CorrelationSpec:
    """Common exponential correlation coefficient for every array."""
    rho: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")


def rayleigh(rng, rows, cols):
    """iid CN(0, 1) matrix of shape ``(rows, cols)``."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    return sample_complex_gaussian(rng, (rows, cols), 1.0)


def exp_correlation(n, rho):
    """Exponential correlation matrix ``R[i, j] = rho**|i - j|``."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    idx = np.arange(n)
    return float(rho) ** np.abs(idx[:, None] - idx[None, :])


def matrix_sqrt_psd(r, tol=1e-12):
    """
    Symmetric square root of a real PSD matrix via eigendecomposition.

    Eigenvalues down to ``-tol`` are clamped to zero; anything more
    negative, or an asymmetric input, raises ``ValueError``.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(r, r.T, atol=1e-12, rtol=0):
        raise ValueError("matrix is not symmetric")
    w, v = np.linalg.eigh(r)
    if w.min() < -tol:
        raise ValueError(f"matrix is indefinite (min eigenvalue {w.min():.3g})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def apply_kronecker(h0, r_rx, r_tx):
    """Correlate an iid channel: ``R_rx^(1/2) @ h0 @ (R_tx^(1/2)).T``."""
    h0 = np.asarray(h0)
    rows, cols = h0.shape
    if np.shape(r_rx) != (rows, rows) or np.shape(r_tx) != (cols, cols):
        raise ValueError(
            f"correlation shapes {np.shape(r_rx)}, {np.shape(r_tx)} do not "
            f"conform to a {rows}x{cols} channel")
    return matrix_sqrt_psd(r_rx) @ h0 @ matrix_sqrt_psd(r_tx).T


def split_csit(rng, rows, cols, sigma_i):
    """
    Draw Bob's channel and Alice's imperfect estimate of it.

    Returns ``(h_true, h_alice_view)`` where ``h_alice_view`` has entry
    variance ``1 - sigma_i**2`` and the error ``h_true - h_alice_view`` has
    entry variance ``sigma_i**2``. Both component matrices are always drawn
    so the random stream is consumed identically for every ``sigma_i``.
    """
    if not 0.0 <= sigma_i <= 1.0:
        raise ValueError(f"sigma_i must lie in [0, 1], got {sigma_i}")
    gen = make_generator(rng)
    h_avg = rayleigh(gen, rows, cols)
    h_err = rayleigh(gen, rows, cols)
    if sigma_i == 0.0:
        return h_avg.copy(), h_avg
    h_alice = np.sqrt(1.0 - sigma_i ** 2) * h_avg
    return h_alice + sigma_i * h_err, h_alice


def left_pseudo_inverse(h):
    """
    ``(h^H h)^-1 h^H`` for a tall, full-column-rank complex matrix.

    Solved through a thin QR factorisation, ``h = Q R`` gives
    ``pinv(h) = R^-1 Q^H``, so the Gram matrix is never formed.
    """
    h = np.asarray(h)
    m, n = h.shape
    if m < n:
        raise RankDeficiencyError(
            f"{m}x{n} matrix has more columns than rows; no left inverse")
    q, r = np.linalg.qr(h, mode='reduced')
    # cond(h^H h) = cond(h)^2 = cond(R)^2
    cond = np.linalg.cond(r)
    if not np.isfinite(cond) or cond ** 2 > MAX_CONDITION:
        raise ConditionError(f"condition number of h^H h is {cond ** 2:.3g}")
    return np.linalg.solve(r, q.conj().T)


def draw_realization(rng, dims, csit_sigma_i=0.0, rho=0.0):
    """
    One draw of ``(H_B, H_E)`` plus Alice's view of ``H_B``.

    The stream is always consumed in the same order (Bob average part, Bob
    error part, Eve) so sweeps over ``csit_sigma_i`` or ``rho`` stay paired
    on identical underlying Gaussian draws.
    """
    gen = make_generator(rng)
    h_bob, h_alice = split_csit(gen, dims.n_rx, dims.n_tx, csit_sigma_i)
    h_eve = rayleigh(gen, dims.n_eve, dims.n_tx)
    if rho > 0.0:
        r_tx = exp_correlation(dims.n_tx, rho)
        r_bob = exp_correlation(dims.n_rx, rho)
        r_eve = exp_correlation(dims.n_eve, rho)
        h_bob = apply_kronecker(h_bob, r_bob, r_tx)
        h_alice = apply_kronecker(h_alice, r_bob, r_tx)
        h_eve = apply_kronecker(h_eve, r_eve, r_tx)
    elif rho != 0.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    return ChannelRealization(h_bob=h_bob, h_eve=h_eve,
                              h_bob_alice_view=h_alice)
