"""
Command-line entry point.

Exit codes: 0 on success, 2 on a configuration error, 3 when an oracle
check fails.
"""

import argparse
import json
import logging
import os
import sys

from ..channel import ConditionError, RankDeficiencyError
from ..secrecy import UnsupportedModeError
from .config import ConfigError, ExperimentConfig, parse_snr_range
from . import experiments as ex
from .oracle import run_oracle_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3

log = logging.getLogger('gpsm_secrecy')

# (flag, config field, type)
FIELD_FLAGS = [
    ('--mode', 'mode', str),
    ('--n-tx', 'n_tx', int),
    ('--n-rx', 'n_rx', int),
    ('--n-active', 'n_active', int),
    ('--n-eve', 'n_eve', int),
    ('--m-ary', 'm_ary', int),
    ('--csit-sigma-i', 'csit_sigma_i', float),
    ('--rho', 'rho', float),
    ('--n-channels', 'n_channels', int),
    ('--n-noise', 'n_noise', int),
    ('--eve-receiver', 'eve_receiver', str),
    ('--name', 'name', str),
    ('--seed', 'seed', int),
    ('--workers', 'workers', int),
]


def _float_list(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list: {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="JSON experiment config")
    common.add_argument('--out', default='results', help="output directory")
    common.add_argument('--snr', help="SNR grid in dB, start:stop:step or "
                        "a,b,c; write --snr=-10:40:2 when the start is negative")
    common.add_argument('-v', '--verbose', action='store_true')
    for flag, dest, typ in FIELD_FLAGS:
        common.add_argument(flag, dest=dest, type=typ, default=None)

    parser = argparse.ArgumentParser(
        prog='gpsm-secrecy',
        description="Secrecy capacity of receive-side spatial modulation.")
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('capacity', parents=[common],
                   help="secrecy capacity versus SNR")
    p = sub.add_parser('scatter', parents=[common],
                       help="received-signal samples for one channel")
    p.add_argument('--samples', type=int, default=1000)
    p.add_argument('--scatter-snr', type=float, default=30.0)
    p = sub.add_parser('sweep-csit', parents=[common],
                       help="capacity versus SNR for several CSIT error levels")
    p.add_argument('--sigmas', type=_float_list, default=[0.3, 0.4, 0.5])
    p = sub.add_parser('sweep-corr', parents=[common],
                       help="capacity versus SNR for several correlation levels")
    p.add_argument('--rhos', type=_float_list, default=[0.3, 0.4, 0.5])
    p = sub.add_parser('sweep-eve', parents=[common],
                       help="capacity and outage for several Eve array sizes")
    p.add_argument('--n-eve-list', type=_int_list, default=[16, 18, 20, 22, 24])
    p.add_argument('--outage-snr', type=float, default=10.0)
    p = sub.add_parser('outage', parents=[common],
                       help="secrecy outage CDF at one SNR")
    p.add_argument('--outage-snr', type=float, default=10.0)
    p = sub.add_parser('oracle-check', parents=[common],
                       help="check the estimator against quadrature references")
    p.add_argument('--theta-scale', type=float, default=1.0,
                   help=argparse.SUPPRESS)
    return parser


def resolve_config(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    changes = {dest: getattr(args, dest) for _, dest, _ in FIELD_FLAGS}
    if args.snr:
        changes['snr_grid_db'] = parse_snr_range(args.snr)
    cfg = cfg.override(**changes)
    cfg.validate()
    return cfg


def _print_rows(record):
    print(f"# {record.label or record.config['name']}"
          + ("  (eve blind)" if record.eve_blind else ""))
    print("snr_db   c_bob   c_eve   c_sec")
    for row in record.rows:
        print(f"{row['snr_db']:6.1f} {row['c_bob']:7.3f} {row['c_eve']:7.3f} "
              f"{row['c_sec']:7.3f}")


def run(args):
    cfg = resolve_config(args)
    out = args.out
    cmd = args.command
    if cmd == 'capacity':
        _print_rows(ex.cmd_capacity(cfg, out))
    elif cmd == 'scatter':
        data = ex.cmd_scatter(cfg, args.samples, args.scatter_snr, out)
        for key, val in ex.scatter_statistics(data).items():
            print(f"{key}: {val:.4f}")
    elif cmd == 'sweep-csit':
        for rec in ex.cmd_sweep_csit(cfg, args.sigmas, out):
            _print_rows(rec)
    elif cmd == 'sweep-corr':
        for rec in ex.cmd_sweep_corr(cfg, args.rhos, out):
            _print_rows(rec)
    elif cmd == 'sweep-eve':
        records, outage = ex.cmd_sweep_eve(cfg, args.n_eve_list,
                                           args.outage_snr, out)
        for rec in records:
            _print_rows(rec)
        for n_eve, (samples, _) in outage.items():
            print(f"outage n_eve={n_eve}: max C_S {samples.max():.3f} "
                  f"at {args.outage_snr:g} dB")
    elif cmd == 'outage':
        samples, cdf = ex.cmd_outage(cfg, args.outage_snr, out)
        print(f"{len(samples)} realizations, C_S in "
              f"[{samples.min():.3f}, {samples.max():.3f}]")
    elif cmd == 'oracle-check':
        report = run_oracle_checks(seed=cfg.seed, theta_scale=args.theta_scale)
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, 'oracle_check.json'), 'w') as fh:
            json.dump(report.to_dict(), fh, indent=2)
        for c in report.checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: ref "
                  f"{c.reference:.5f} est {c.estimate:.5f} dev "
                  f"{c.deviation:.2e} tol {c.tolerance:.2e}")
        return EXIT_OK if report.passed else EXIT_CHECK
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(message)s')
    try:
        return run(args)
    except (ConfigError, UnsupportedModeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConditionError, RankDeficiencyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
