"""
Generalised pre-coded spatial modulation (GPSM) transceiver.

Information rides on which ``n_active`` of Bob's ``n_rx`` antennas light up
(the spatial symbol) and, in the modulated mode, on M-PSK symbols placed on
the active antennas. Under antenna scrambling the symbols are replaced by
random draws (unit circle for CAS, complex Gaussian for GAS) and only the
activation pattern carries data.

Convention: the equivalent channel ``G = sqrt(beta / n_active) * H @ P``
already carries the power scaling. Detectors and likelihood kernels take
``G`` as given and never rescale.
"""

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channel import ConditionError, MAX_CONDITION
from .numerics import sample_complex_gaussian, sample_unit_circle

__all__ = ['Mode', 'PatternSet', 'Payload', 'Precoder', 'SuperSymbol',
           'build_pattern_set', 'k_eff', 'psk_constellation', 'ci_precoder',
           'equivalent_channel', 'make_payload', 'super_symbol', 'transmit',
           'super_alphabet', 'ml_detect', 'decoupled_detect']


class Mode(str, enum.Enum):
    MODULATED = 'gpsm'
    CAS = 'cas'
    GAS = 'gas'


@dataclass(frozen=True)
class PatternSet:
    n_rx: int
    n_active: int
    patterns: tuple
    k_ant: int

    def __len__(self):
        return len(self.patterns)

    def indicator(self) -> np.ndarray:
        """Boolean ``(len(self), n_rx)`` mask of active antennas per pattern."""
        mask = np.zeros((len(self.patterns), self.n_rx), dtype=bool)
        for k, pat in enumerate(self.patterns):
            mask[k, list(pat)] = True
        return mask


@dataclass(frozen=True)
class Payload:
    mode: Mode
    values: np.ndarray


@dataclass(frozen=True)
class Precoder:
    p: np.ndarray
    beta: float


@dataclass(frozen=True)
class SuperSymbol:
    pattern_index: int
    payload: Payload
    s: np.ndarray


def build_pattern_set(n_rx, n_active):
    """
    Lexicographically first ``2**k_ant`` activation patterns.

    ``k_ant = floor(log2(C(n_rx, n_active)))``.

    >>> ps = build_pattern_set(4, 2)
    >>> ps.k_ant, ps.patterns
    (2, ((0, 1), (0, 2), (0, 3), (1, 2)))
    """
    if not 1 <= n_active < n_rx:
        raise ValueError(
            f"need 1 <= n_active < n_rx, got n_active={n_active}, n_rx={n_rx}")
    total = math.comb(n_rx, n_active)
    k_ant = total.bit_length() - 1
    combos = itertools.islice(itertools.combinations(range(n_rx), n_active),
                              2 ** k_ant)
    return PatternSet(n_rx=n_rx, n_active=n_active, patterns=tuple(combos),
                      k_ant=k_ant)


def k_eff(pattern_set, mode, m_ary=4):
    """Bits per channel use: spatial bits, plus symbol bits when modulated."""
    mode = Mode(mode)
    if mode is Mode.MODULATED:
        if m_ary < 2 or m_ary & (m_ary - 1):
            raise ValueError(f"m_ary must be a power of two >= 2, got {m_ary}")
        return pattern_set.k_ant + pattern_set.n_active * int(math.log2(m_ary))
    return pattern_set.k_ant


def psk_constellation(m_ary):
    """
    Unit-energy Gray-labelled M-PSK; entry ``m`` is the point for label ``m``.

    QPSK sits on the diagonals, label 0 at ``(1 + 1j) / sqrt(2)``.
    """
    if m_ary < 2 or m_ary & (m_ary - 1):
        raise ValueError(f"m_ary must be a power of two >= 2, got {m_ary}")
    offset = 0.0 if m_ary == 2 else np.pi / m_ary
    k = np.arange(m_ary)
    gray = k ^ (k >> 1)
    points = np.empty(m_ary, dtype=complex)
    points[gray] = np.exp(1j * (2 * np.pi * k / m_ary + offset))
    return points


def ci_precoder(h):
    """
    Channel-inversion precoder ``P = H^H (H H^H)^-1`` and its power factor.

    ``beta = n_rx / Tr[(H H^H)^-1]`` keeps ``E||x||^2 = 1`` for
    equiprobable super-symbols.
    """
    h = np.asarray(h)
    n_rx, n_tx = h.shape
    if n_tx < n_rx:
        raise ValueError(f"need n_tx >= n_rx for channel inversion, got {h.shape}")
    gram = h @ h.conj().T
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ConditionError(f"H H^H has condition number {cond:.3g}")
    gram_inv = np.linalg.inv(gram)
    p = h.conj().T @ gram_inv
    beta = n_rx / np.trace(gram_inv).real
    return Precoder(p=p, beta=float(beta))


def equivalent_channel(h, precoder, n_active):
    """``sqrt(beta / n_active) * h @ P`` for any receiver channel ``h``."""
    return np.sqrt(precoder.beta / n_active) * (np.asarray(h) @ precoder.p)


def make_payload(rng, mode, n_active, m_ary=4, symbol_indices=None):
    """Symbols to place on the active antennas for one super-symbol."""
    mode = Mode(mode)
    if mode is Mode.MODULATED:
        if symbol_indices is None:
            raise ValueError("modulated payload needs symbol_indices")
        idx = np.asarray(symbol_indices, dtype=int)
        if idx.shape != (n_active,) or np.any((idx < 0) | (idx >= m_ary)):
            raise ValueError(f"invalid symbol indices {symbol_indices!r}")
        return Payload(mode, psk_constellation(m_ary)[idx])
    if mode is Mode.CAS:
        return Payload(mode, sample_unit_circle(rng, n_active))
    return Payload(mode, sample_complex_gaussian(rng, n_active, 1.0))


def super_symbol(pattern_set, pattern_index, payload):
    if not 0 <= pattern_index < len(pattern_set):
        raise ValueError(f"pattern index {pattern_index} out of range "
                         f"[0, {len(pattern_set)})")
    values = np.asarray(payload.values)
    if values.shape != (pattern_set.n_active,):
        raise ValueError("payload length must equal n_active")
    s = np.zeros(pattern_set.n_rx, dtype=complex)
    s[list(pattern_set.patterns[pattern_index])] = values
    return SuperSymbol(pattern_index, payload, s)


def transmit(precoder, s):
    """Precoded transmit vector ``sqrt(beta / n_active) * P @ s``."""
    s = s.s if isinstance(s, SuperSymbol) else np.asarray(s)
    n_active = np.count_nonzero(s)
    if n_active == 0:
        return np.zeros(precoder.p.shape[0], dtype=complex)
    return np.sqrt(precoder.beta / n_active) * (precoder.p @ s)


def super_alphabet(pattern_set, m_ary):
    """
    Every modulated super-symbol, in lexicographic label order.

    Returns
    -------
    symbols : numpy.ndarray, shape (n_rx, n_patterns * m_ary**n_active)
        Column ``b`` is the super-symbol with label ``labels[b]``.
    labels : list of (pattern_index, tuple of symbol indices)
    """
    points = psk_constellation(m_ary)
    combos = list(itertools.product(range(m_ary), repeat=pattern_set.n_active))
    symbols = np.zeros((pattern_set.n_rx, len(pattern_set) * len(combos)),
                       dtype=complex)
    labels = []
    col = 0
    for k, pat in enumerate(pattern_set.patterns):
        for combo in combos:
            symbols[list(pat), col] = points[list(combo)]
            labels.append((k, combo))
            col += 1
    return symbols, labels


def ml_detect(y, g, pattern_set, m_ary):
    """
    Joint ML detection of pattern and symbols by exhaustive search.

    Ties go to the lexicographically smallest ``(pattern, symbols)`` label.
    """
    symbols, labels = super_alphabet(pattern_set, m_ary)
    resid = np.asarray(y)[:, None] - np.asarray(g) @ symbols
    dist = np.sum(np.abs(resid) ** 2, axis=0)
    return labels[int(np.argmin(dist))]


def decoupled_detect(y, g, pattern_set, m_ary):
    """
    Pattern by largest energy on its antennas, then per-antenna slicing.

    The slicer scales each symbol by the diagonal entry of ``g`` for that
    antenna, which is the row-of-H times column-of-P gain.
    """
    y = np.asarray(y)
    energy = np.abs(y) ** 2
    mask = pattern_set.indicator()
    k_hat = int(np.argmax(mask.astype(float) @ energy))
    pat = list(pattern_set.patterns[k_hat])
    points = psk_constellation(m_ary)
    gain = np.diag(np.asarray(g))[pat]
    dist = np.abs(y[pat, None] - gain[:, None] * points[None, :]) ** 2
    return k_hat, tuple(int(m) for m in np.argmin(dist, axis=1))
