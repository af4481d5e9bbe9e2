"""Security capacity of GPSM with circular and Gaussian antenna scrambling."""

__version__ = '0.1.0'
