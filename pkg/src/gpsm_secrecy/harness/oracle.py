"""
Self-checks of the Monte-Carlo capacity estimator.

Two families of checks:

* Monte-Carlo DCMC estimates on tiny instances against tensor
  Gauss-Hermite quadrature, within three combined standard errors.
* Eve observing a GAS transmission directly (no post-processing) gains no
  information, with the unnormalized kernel, to within ``lemma_tol`` bits.

``theta_scale`` multiplies every likelihood ratio inside the Monte-Carlo
estimator only. It exists to confirm the checks can fail.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..channel import SystemDims
from ..gpsm import Mode, psk_constellation
from ..numerics import Rng, sample_complex_gaussian
from ..secrecy import (McBudget, Scenario, coherent_provider, dcmc_capacity,
                       brute_force_dcmc, secrecy_sweep)

__all__ = ['OracleCheck', 'OracleReport', 'tiny_instances', 'run_oracle_checks']

SIGMA_MULTIPLIER = 3.0
LEMMA_TOL = 0.05


@dataclass
class OracleCheck:
    name: str
    reference: float
    estimate: float
    deviation: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class OracleReport:
    checks: list
    theta_scale: float = 1.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {'theta_scale': self.theta_scale, 'passed': self.passed,
                'checks': [asdict(c) for c in self.checks]}


def _complex_list(a):
    return [[complex(v).real, complex(v).imag] for v in np.ravel(a)]


def tiny_instances(seed=0):
    """
    Five ``(name, g, symbols, sigma2)`` instances small enough for quadrature.

    The first is BPSK over a unit scalar channel with complex noise variance
    2, i.e. unit variance on the real axis.
    """
    bpsk = psk_constellation(2)[None, :]
    qpsk = psk_constellation(4)[None, :]
    gen = Rng(seed, 1000).generator()
    g_vec = sample_complex_gaussian(gen, (2, 1))
    g_mat = sample_complex_gaussian(gen, (2, 2))
    spatial = np.array([[1, -1, 0, 0], [0, 0, 1, -1]], dtype=complex)
    vecs = sample_complex_gaussian(gen, (2, 4))
    vecs /= np.linalg.norm(vecs, axis=0)
    return [
        ('bpsk_awgn', np.ones((1, 1)), bpsk, 2.0),
        ('qpsk_awgn', np.ones((1, 1)), qpsk, 0.5),
        ('bpsk_simo', g_vec, bpsk, 1.0),
        ('spatial_2x2', g_mat, spatial, 0.5),
        ('random_2x2', g_mat, vecs, 1.0),
    ]


def _scaled(provider, theta_scale):
    if theta_scale == 1.0:
        return provider
    shift = math.log(theta_scale)

    def wrapped(index, n_noise):
        return provider(index, n_noise) + shift
    return wrapped


def _quadrature(g, symbols, sigma2):
    n_out = np.atleast_2d(g).shape[0]
    hi, lo = (48, 40) if n_out == 1 else (20, 16)
    ref = brute_force_dcmc(g, symbols, sigma2, n_nodes=hi)
    return ref, abs(ref - brute_force_dcmc(g, symbols, sigma2, n_nodes=lo))


def equivalence_checks(seed=0, budget=McBudget(50, 2000), theta_scale=1.0):
    checks = []
    for name, g, symbols, sigma2 in tiny_instances(seed):
        ref, quad_err = _quadrature(g, symbols, sigma2)
        provider = _scaled(coherent_provider(g, symbols, sigma2, seed=seed),
                           theta_scale)
        est = dcmc_capacity(provider, symbols.shape[1], budget)
        tol = SIGMA_MULTIPLIER * math.hypot(est.std_err, quad_err)
        dev = abs(est.bits - ref)
        checks.append(OracleCheck(
            name=f"equivalence:{name}", reference=ref, estimate=est.bits,
            deviation=dev, tolerance=tol, passed=dev <= tol,
            details={'sigma2': sigma2, 'g': _complex_list(g),
                     'symbols': _complex_list(symbols),
                     'std_err': est.std_err, 'quadrature_err': quad_err}))
    return checks


def direct_eve_checks(seed=0, snr_grid_db=(0.0, 10.0, 20.0, 30.0),
                      budget=McBudget(100, 200), dims=SystemDims(16, 8, 2, 16),
                      tol=LEMMA_TOL, theta_scale=1.0):
    """Eve decoding a GAS transmission without post-processing."""
    scenario = Scenario(Mode.GAS, dims, eve_receiver='direct',
                        gas_normalize=False)
    sweep = secrecy_sweep(scenario, snr_grid_db, budget, seed=seed)
    shift = math.log2(theta_scale)
    checks = []
    for k, snr in enumerate(sweep.snr_db):
        raw = sweep.eve_per_channel[:, k] - shift
        c_eve = float(np.clip(raw.mean(), 0.0, math.log2(sweep.alphabet_size)))
        checks.append(OracleCheck(
            name=f"direct_eve:{snr:g}dB", reference=0.0, estimate=c_eve,
            deviation=abs(c_eve), tolerance=tol, passed=abs(c_eve) <= tol,
            details={'unclamped_mean': float(raw.mean()),
                     'per_channel_clamped_mean': float(np.clip(raw, 0, None).mean()),
                     'std_err': float(raw.std(ddof=1) / math.sqrt(raw.size))}))
    return checks


def run_oracle_checks(seed=0, theta_scale=1.0):
    checks = equivalence_checks(seed=seed, theta_scale=theta_scale)
    checks += direct_eve_checks(seed=seed, theta_scale=theta_scale)
    return OracleReport(checks, theta_scale)
