"""
Log-likelihood-ratio kernels ``ln Theta[eps, tau] = ln p(z|eps) - ln p(z|tau)``.

Each kernel exists twice: a single-instance function that reads like the
formula, and a ``*_table`` routine that evaluates every candidate ``eps`` for
a batch of observations at once. The estimators only call the tables; the
tests pin the two against each other.
"""

import numpy as np

from ..channel import left_pseudo_inverse
from ..numerics import log_bessel_i0, noncentral_chi2_df2_logpdf

__all__ = ['UnsupportedModeError', 'log_theta_coherent', 'coherent_table',
           'noncoherent_receive', 'log_theta_cas_general',
           'cas_general_table', 'log_theta_cas_identity',
           'cas_identity_table', 'eve_postprocess', 'postprocess_matrix',
           'gas_variances', 'log_theta_gas', 'gas_table']


class UnsupportedModeError(ValueError):
    """The requested kernel does not apply to this transmission mode."""


# --- coherent (modulated GPSM) ---------------------------------------------

def log_theta_coherent(g, s_tau, s_eps, w, sigma2):
    """``(-||g (s_tau - s_eps) + w||^2 + ||w||^2) / sigma2``."""
    d = np.asarray(g) @ (np.asarray(s_tau) - np.asarray(s_eps))
    w = np.asarray(w)
    return float((-np.sum(np.abs(d + w) ** 2) + np.sum(np.abs(w) ** 2))
                 / sigma2)


def coherent_table(gs, tau, w_unit, sigma):
    """
    Coherent kernel for one true symbol against every candidate.

    Parameters
    ----------
    gs : ndarray, shape (n_out, n_symbols)
        Noiseless received point ``G s`` for every super-symbol.
    tau : int
        Index of the transmitted super-symbol.
    w_unit : ndarray, shape (n_draws, n_out)
        Unit-variance noise; the actual noise is ``sigma * w_unit``.
    sigma : float or sequence of float
        Noise standard deviation(s). A sequence adds a leading axis.

    Returns
    -------
    ndarray, shape (n_draws, n_symbols) or (n_sigma, n_draws, n_symbols)
    """
    d = gs[:, [tau]] - gs                         # (n_out, n_symbols)
    dist2 = np.sum(np.abs(d) ** 2, axis=0)        # (n_symbols,)
    cross = (w_unit @ d.conj()).real              # Re <d, w> per draw
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))[:, None, None]
    out = -(dist2[None, None, :] + 2.0 * sig * cross[None]) / sig ** 2
    return out[0] if np.ndim(sigma) == 0 else out


# --- circular antenna scrambling ---------------------------------------------

def noncoherent_receive(g, pattern, payload, w):
    """Energy detector output ``|G[:, pattern] @ e + w|^2`` per antenna."""
    values = getattr(payload, 'values', payload)
    g = np.asarray(g)
    y = g[:, list(pattern)] @ np.asarray(values) + np.asarray(w)
    return np.abs(y) ** 2


def _column_of(pattern_set, k):
    if pattern_set.n_active != 1:
        raise UnsupportedModeError(
            "the general-channel CAS kernel needs n_active == 1; use the "
            "identity-structure kernel for n_active > 1")
    return pattern_set.patterns[k][0]


def log_theta_cas_general(g, r, tau, eps, sigma2_0, pattern_set):
    """
    Noncoherent CAS kernel for a single active antenna and arbitrary ``g``.

    Each entry ``r_i / sigma2_0`` is noncentral chi-square with two degrees
    of freedom and noncentrality ``|g[i, c]|^2 / sigma2_0`` where ``c`` is
    the active column of the hypothesis.
    """
    g = np.asarray(g)
    x = np.asarray(r) / sigma2_0
    lam_eps = np.abs(g[:, _column_of(pattern_set, eps)]) ** 2 / sigma2_0
    lam_tau = np.abs(g[:, _column_of(pattern_set, tau)]) ** 2 / sigma2_0
    return float(np.sum(noncentral_chi2_df2_logpdf(x, lam_eps)
                        - noncentral_chi2_df2_logpdf(x, lam_tau)))


def cas_general_table(g, r, tau, sigma2_0, pattern_set):
    """
    Batched :func:`log_theta_cas_general`.

    ``r`` has shape ``(..., n_draws, n_out)``; ``sigma2_0`` is a scalar or
    broadcasts as ``(..., 1, 1)``. Returns ``(..., n_draws, n_patterns)``.
    """
    g = np.asarray(g)
    cols = [_column_of(pattern_set, k) for k in range(len(pattern_set))]
    sigma2_0 = np.asarray(sigma2_0, dtype=float)
    lam = (np.abs(g[:, cols]) ** 2).T / sigma2_0          # (..., n_pat, n_out)
    x = np.asarray(r) / sigma2_0                          # (..., n_draws, n_out)
    ll = noncentral_chi2_df2_logpdf(x[..., None, :],
                                    lam[..., None, :, :]).sum(axis=-1)
    return ll - ll[..., [tau]]


def log_theta_cas_identity(r, tau, eps, beta, n_active, sigma2_0, pattern_set):
    """
    Noncoherent CAS kernel when the equivalent channel is a scaled identity.

    Active antennas of a hypothesis have noncentrality
    ``beta / (n_active * sigma2_0)``, inactive ones zero. ``sigma2_0`` may be
    a per-antenna array (Eve after post-processing).
    """
    x = np.asarray(r) / sigma2_0
    lam_on = beta / (n_active * np.asarray(sigma2_0, dtype=float))
    mask = pattern_set.indicator()
    lam_eps = np.where(mask[eps], lam_on, 0.0)
    lam_tau = np.where(mask[tau], lam_on, 0.0)
    return float(np.sum(noncentral_chi2_df2_logpdf(x, lam_eps)
                        - noncentral_chi2_df2_logpdf(x, lam_tau)))


def cas_identity_table(r, tau, beta, n_active, sigma2_0, pattern_set):
    """
    Batched :func:`log_theta_cas_identity`.

    Only antennas where the two hypotheses disagree contribute, so the
    per-antenna gain ``ln f(x; lam_on) - ln f(x; 0)`` is computed once and
    summed through the pattern mask. ``r`` is ``(..., n_draws, n_out)`` and
    ``sigma2_0`` must broadcast against it.
    """
    sigma2_0 = np.asarray(sigma2_0, dtype=float)
    x = np.asarray(r) / sigma2_0
    lam_on = beta / (n_active * sigma2_0)
    gain = -0.5 * lam_on + log_bessel_i0(np.sqrt(lam_on * x))
    score = gain @ pattern_set.indicator().T.astype(float)
    return score - score[..., [tau]]


# --- Eve post-processing ---------------------------------------------------------

def postprocess_matrix(h_bob, h_eve):
    """``T = H_B (H_E^H H_E)^-1 H_E^H``; needs ``n_eve >= n_tx``."""
    return np.asarray(h_bob) @ left_pseudo_inverse(h_eve)


def eve_postprocess(h_bob, h_eve, y_eve, sigma2_eve):
    """
    Map Eve's observation onto Bob's channel.

    Returns
    -------
    y_tilde : ndarray
        ``T @ y_eve`` (``y_eve`` may carry a leading batch axis).
    noise_var : ndarray, shape (n_rx,)
        Per-entry variance ``sigma2_eve * diag(T T^H)`` of the mapped noise.
    """
    t = postprocess_matrix(h_bob, h_eve)
    y_eve = np.asarray(y_eve)
    y_tilde = y_eve @ t.T if y_eve.ndim > 1 else t @ y_eve
    noise_var = sigma2_eve * np.sum(np.abs(t) ** 2, axis=1)
    return y_tilde, noise_var


# --- Gaussian antenna scrambling ----------------------------------------------------

def gas_variances(g, sigma2, pattern_set):
    """
    ``V[k, i] = sum_{c in pattern k} |g[i, c]|^2 + sigma2_i``.

    ``sigma2`` may be a scalar, a per-entry vector, or carry leading batch
    axes shaped ``(..., 1, 1)`` / ``(..., 1, n_out)``.
    """
    power = np.abs(np.asarray(g)) ** 2                   # (n_out, n_rx)
    mask = pattern_set.indicator().astype(float)         # (n_pat, n_rx)
    return mask @ power.T + np.asarray(sigma2, dtype=float)


def log_theta_gas(g, y, tau, eps, sigma2, pattern_set, normalize=True):
    """
    GAS kernel: entries of ``y`` treated as independent zero-mean complex
    Gaussians whose variance depends on the hypothesis.

    With ``normalize=False`` the ``ln V`` terms are dropped, which is only
    an exact density ratio when the products of variances agree across
    hypotheses.
    """
    v = gas_variances(g, sigma2, pattern_set)
    a = np.abs(np.asarray(y)) ** 2
    out = np.sum(a / v[tau] - a / v[eps])
    if normalize:
        out += np.sum(np.log(v[tau]) - np.log(v[eps]))
    return float(out)


def gas_table(y, tau, variances, normalize=True):
    """
    Batched :func:`log_theta_gas` from precomputed ``variances``.

    ``y`` is ``(..., n_draws, n_out)`` and ``variances`` ``(..., n_pat, n_out)``.
    """
    inv = np.swapaxes(1.0 / variances, -1, -2)
    ll = -(np.abs(np.asarray(y)) ** 2) @ inv
    if normalize:
        ll = ll - np.sum(np.log(variances), axis=-1)[..., None, :]
    return ll - ll[..., [tau]]
