"""Experiment configuration: JSON document, validated before any compute."""

import json
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from ..channel import SystemDims
from ..secrecy import McBudget, Scenario

__all__ = ['ConfigError', 'ExperimentConfig', 'parse_snr_range',
           'DEFAULT_SNR_GRID']

DEFAULT_SNR_GRID = tuple(float(s) for s in np.arange(-10.0, 40.0 + 1e-9, 2.0))


class ConfigError(ValueError):
    pass


def parse_snr_range(text):
    """``'start:stop:step'`` (stop inclusive) or a comma separated list."""
    try:
        if ':' in text:
            start, stop, step = (float(t) for t in text.split(':'))
            if step <= 0:
                raise ConfigError("SNR step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + k * step, 12) for k in range(n))
        return tuple(float(t) for t in text.split(','))
    except ValueError as exc:
        raise ConfigError(f"bad SNR specification {text!r}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = 'gas'
    n_tx: int = 16
    n_rx: int = 8
    n_active: int = 2
    n_eve: int = 16
    m_ary: int = 4
    snr_grid_db: tuple = DEFAULT_SNR_GRID
    csit_sigma_i: float = 0.0
    rho: float = 0.0
    n_channels: int = 100
    n_noise: int = 200
    seed: int = 0
    workers: int = 1
    eve_receiver: str = 'auto'
    name: str = 'capacity'

    def __post_init__(self):
        object.__setattr__(self, 'snr_grid_db',
                           tuple(float(s) for s in self.snr_grid_db))

    # -- construction -----------------------------------------------------------

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    def to_dict(self):
        d = asdict(self)
        d['snr_grid_db'] = list(self.snr_grid_db)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def override(self, **changes):
        """Copy with every non-``None`` keyword applied."""
        return replace(self, **{k: v for k, v in changes.items()
                                if v is not None})

    # -- derived objects ----------------------------------------------------------

    @property
    def dims(self):
        return SystemDims(self.n_tx, self.n_rx, self.n_active, self.n_eve)

    @property
    def budget(self):
        return McBudget(self.n_channels, self.n_noise)

    def scenario(self):
        return Scenario(mode=self.mode, dims=self.dims, m_ary=self.m_ary,
                        csit_sigma_i=self.csit_sigma_i, rho=self.rho,
                        eve_receiver=self.eve_receiver)

    def validate(self):
        """Raise :class:`ConfigError` on anything the estimators would reject."""
        try:
            self.scenario()
            self.budget
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.snr_grid_db:
            raise ConfigError("empty SNR grid")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.name or '/' in self.name:
            raise ConfigError(f"invalid output name {self.name!r}")
        return self
