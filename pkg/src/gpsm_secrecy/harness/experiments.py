"""
Experiment drivers behind the CLI subcommands.

Each driver returns plain data (a :class:`ResultRecord` or similar) and,
when given an output directory, also writes it as CSV and JSON. CSV files
never contain timing information so identical inputs give identical bytes.
"""

import csv
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import __version__
from ..channel import draw_realization
from ..gpsm import (Mode, build_pattern_set, ci_precoder, equivalent_channel)
from ..numerics import Rng, sample_complex_gaussian, sample_unit_circle
from ..secrecy import outage_cdf, secrecy_sweep
from .config import ConfigError

__all__ = ['CSV_VERSION', 'CSV_COLUMNS', 'ResultRecord', 'ScatterData',
           'cmd_capacity', 'cmd_scatter', 'cmd_sweep_csit', 'cmd_sweep_corr',
           'cmd_sweep_eve', 'cmd_outage', 'records_to_csv', 'write_record',
           'scatter_statistics', 'positive_band', 'peak_secrecy']

CSV_VERSION = 1
CSV_COLUMNS = ('snr_db', 'c_bob', 'c_eve', 'c_sec', 'se_bob', 'se_eve')
SCATTER_COLUMNS = ('case', 'node', 'antenna', 're', 'im')
POSITIVE_THRESHOLD = 0.1


@dataclass
class ResultRecord:
    config: dict
    rows: list
    wall_clock_s: float = 0.0
    version: str = __version__
    label: str = ''
    eve_blind: bool = False
    extra: dict = field(default_factory=dict)

    def column(self, key):
        return np.array([row[key] for row in self.rows])

    def to_json(self):
        return json.dumps(asdict(self), indent=2)


def _rows_from_sweep(sweep):
    rows = []
    for snr, res in zip(sweep.snr_db, sweep.results):
        rows.append({'snr_db': float(snr),
                     'c_bob': res.c_bob.bits, 'c_eve': res.c_eve.bits,
                     'c_sec': res.c_sec,
                     'se_bob': res.c_bob.std_err, 'se_eve': res.c_eve.std_err})
    return rows


def records_to_csv(record):
    buf = io.StringIO()
    buf.write(f"# gpsm-secrecy results csv v{CSV_VERSION}\n")
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in record.rows:
        writer.writerow([repr(float(row[c])) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_record(record, out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, name)
    with open(base + '.csv', 'w') as fh:
        fh.write(records_to_csv(record))
    with open(base + '.json', 'w') as fh:
        fh.write(record.to_json())
    return base + '.csv'


def _sweep_record(config, label=''):
    config.validate()
    scenario = config.scenario()
    start = time.perf_counter()
    sweep = secrecy_sweep(scenario, config.snr_grid_db, config.budget,
                          seed=config.seed, workers=config.workers)
    record = ResultRecord(config=config.to_dict(), rows=_rows_from_sweep(sweep),
                          wall_clock_s=time.perf_counter() - start,
                          label=label, eve_blind=scenario.eve_blind)
    return record, sweep


def cmd_capacity(config, out_dir=None):
    """One secrecy sweep over the configured SNR grid."""
    record, _ = _sweep_record(config, label=config.name)
    if out_dir is not None:
        write_record(record, out_dir, config.name)
    return record


def _require_gas(config, what):
    if Mode(config.mode) is not Mode.GAS:
        raise ConfigError(f"{what} sweeps are only supported in GAS mode "
                          f"(got mode={config.mode!r})")


def _parameter_sweep(config, key, values, out_dir, what):
    _require_gas(config, what)
    records = []
    for value in values:
        cfg = config.override(**{key: float(value)})
        label = f"{config.name}_{key}{float(value):g}"
        record, _ = _sweep_record(cfg, label=label)
        records.append(record)
        if out_dir is not None:
            write_record(record, out_dir, label)
    return records


def cmd_sweep_csit(config, sigma_list, out_dir=None):
    """One record per CSIT error level, all on the same channel seeds."""
    return _parameter_sweep(config, 'csit_sigma_i', sigma_list, out_dir, 'CSIT')


def cmd_sweep_corr(config, rho_list, out_dir=None):
    """One record per correlation coefficient, all on the same channel seeds."""
    return _parameter_sweep(config, 'rho', rho_list, out_dir, 'correlation')


def _outage_at(config, snr_db):
    cfg = config.override(snr_grid_db=(float(snr_db),))
    cfg.validate()
    sweep = secrecy_sweep(cfg.scenario(), cfg.snr_grid_db, cfg.budget,
                          seed=cfg.seed, workers=cfg.workers)
    samples = sweep.secrecy_per_channel[:, 0]
    return samples, outage_cdf(samples)


def _write_outage(path, table):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w') as fh:
        fh.write(f"# gpsm-secrecy outage csv v{CSV_VERSION}\n")
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(('n_eve', 'threshold', 'probability'))
        for n_eve, cdf in table:
            for thr, prob in cdf:
                writer.writerow((n_eve, repr(thr), repr(prob)))


def cmd_outage(config, snr_db=10.0, out_dir=None):
    """Per-realization secrecy samples and their empirical CDF at one SNR."""
    samples, cdf = _outage_at(config, snr_db)
    if out_dir is not None:
        _write_outage(os.path.join(out_dir, f"{config.name}_outage.csv"),
                      [(config.n_eve, cdf)])
    return samples, cdf


def cmd_sweep_eve(config, n_eve_list, outage_snr_db=10.0, out_dir=None):
    """
    Capacity sweep per Eve array size plus outage CDFs at ``outage_snr_db``.

    Returns ``(records, outage)`` where ``outage`` maps ``n_eve`` to
    ``(samples, cdf)``. Sizes below ``n_tx`` leave Eve blind; their records
    carry ``eve_blind=True`` and a zero Eve capacity.
    """
    _require_gas(config, 'Eve-size')
    records, outage = [], {}
    for n_eve in n_eve_list:
        cfg = config.override(n_eve=int(n_eve))
        label = f"{config.name}_ne{int(n_eve)}"
        record, _ = _sweep_record(cfg, label=label)
        samples, cdf = _outage_at(cfg, outage_snr_db)
        record.extra['outage_snr_db'] = float(outage_snr_db)
        record.extra['outage_samples'] = [float(s) for s in samples]
        records.append(record)
        outage[int(n_eve)] = (samples, cdf)
        if out_dir is not None:
            write_record(record, out_dir, label)
    if out_dir is not None:
        _write_outage(os.path.join(out_dir, f"{config.name}_outage.csv"),
                      [(ne, cdf) for ne, (_, cdf) in outage.items()])
    return records, outage


# --- scatter ---------------------------------------------------------------------

@dataclass
class ScatterData:
    """Received samples keyed by ``(case, node)``; arrays are (n_samples, n_ant)."""
    snr_db: float
    samples: dict
    active: dict

    def rows(self):
        for (case, node), y in self.samples.items():
            for ant in range(y.shape[1]):
                for v in y[:, ant]:
                    yield case, node, ant, float(v.real), float(v.imag)

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# gpsm-secrecy scatter csv v{CSV_VERSION}\n")
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(SCATTER_COLUMNS)
        for case, node, ant, re, im in self.rows():
            writer.writerow((case, node, ant, repr(re), repr(im)))
        return buf.getvalue()


def cmd_scatter(config, n_samples=1000, snr_db=30.0, out_dir=None):
    """
    Raw received samples at Bob and Eve for a single channel realization.

    Three cases share the channel: CAS with one active antenna, CAS with
    ``max(n_active, 2)`` active antennas, and GAS with the same count. The
    first pattern of each set is transmitted throughout.
    """
    dims = config.dims
    multi = max(config.n_active, 2)
    if multi >= dims.n_rx:
        raise ConfigError(f"scatter needs n_rx > {multi}")
    gen = Rng(config.seed, 0).generator()
    real = draw_realization(gen, dims, 0.0, config.rho)
    prec = ci_precoder(real.h_bob_alice_view)
    sigma = np.sqrt(10.0 ** (-snr_db / 10.0))
    samples, active = {}, {}
    for case, na, mode in (('cas_na1', 1, Mode.CAS),
                           ('cas_multi', multi, Mode.CAS),
                           ('gas', multi, Mode.GAS)):
        pat = list(build_pattern_set(dims.n_rx, na).patterns[0])
        if mode is Mode.CAS:
            payload = sample_unit_circle(gen, (n_samples, na))
        else:
            payload = sample_complex_gaussian(gen, (n_samples, na))
        for node, h in (('bob', real.h_bob), ('eve', real.h_eve)):
            g = equivalent_channel(h, prec, na)
            w = sample_complex_gaussian(gen, (n_samples, h.shape[0]))
            samples[(case, node)] = payload @ g[:, pat].T + sigma * w
        active[case] = tuple(pat)
    data = ScatterData(float(snr_db), samples, active)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{config.name}_scatter.csv"), 'w') as fh:
            fh.write(data.to_csv())
    return data


def scatter_statistics(data):
    """
    Summary statistics of a :class:`ScatterData` sample set.

    ``cas_na1_bob_cv``
        Coefficient of variation of ``|y|`` on Bob's active antenna.
    ``cas_multi_eve_separation``
        Largest pairwise distance between Eve's per-antenna sample
        centroids, in units of the pooled standard deviation.
    ``gas_bob_variance_ratio``
        Smallest active-antenna variance over largest inactive one at Bob.
    ``gas_eve_variance_spread``
        Largest over smallest per-antenna variance at Eve.
    """
    stats = {}
    y = data.samples[('cas_na1', 'bob')][:, data.active['cas_na1'][0]]
    mag = np.abs(y)
    stats['cas_na1_bob_cv'] = float(mag.std() / mag.mean())

    y = data.samples[('cas_multi', 'eve')]
    mu = y.mean(axis=0)
    var = np.mean(np.abs(y - mu) ** 2, axis=0)
    worst = 0.0
    for i in range(y.shape[1]):
        for j in range(i + 1, y.shape[1]):
            pooled = np.sqrt(0.5 * (var[i] + var[j]))
            worst = max(worst, abs(mu[i] - mu[j]) / pooled)
    stats['cas_multi_eve_separation'] = float(worst)

    y = data.samples[('gas', 'bob')]
    var = y.var(axis=0)
    on = np.zeros(y.shape[1], dtype=bool)
    on[list(data.active['gas'])] = True
    stats['gas_bob_variance_ratio'] = float(var[on].min() / var[~on].max())
    var = data.samples[('gas', 'eve')].var(axis=0)
    stats['gas_eve_variance_spread'] = float(var.max() / var.min())
    return stats


# --- curve summaries ----------------------------------------------------------------

def peak_secrecy(record):
    return float(np.max(record.column('c_sec')))


def positive_band(record, threshold=POSITIVE_THRESHOLD):
    """
    SNR interval where the secrecy capacity exceeds ``threshold``.

    Edges are linearly interpolated between grid points; ``None`` marks an
    edge that lies outside the grid (or an empty band).
    """
    snr = record.column('snr_db')
    cs = record.column('c_sec')
    above = cs > threshold
    if not above.any():
        return None, None
    first = int(np.argmax(above))
    last = len(cs) - 1 - int(np.argmax(above[::-1]))

    def cross(i, j):
        return float(snr[i] + (threshold - cs[i]) * (snr[j] - snr[i])
                     / (cs[j] - cs[i]))
    lower = cross(first - 1, first) if first > 0 else None
    upper = cross(last, last + 1) if last < len(cs) - 1 else None
    return lower, upper
