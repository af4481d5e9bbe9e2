"""Likelihood-ratio kernels and DCMC secrecy-capacity estimators."""

from .capacity import *  # noqa: F401,F403
from .kernels import *  # noqa: F401,F403
from .scenario import *  # noqa: F401,F403
