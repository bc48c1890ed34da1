"""Renyi entropy and divergence inference for count data."""

from ._renydiv import *  # noqa: F401,F403
from ._renydiv import __doc__  # noqa: F401

__version__ = "0.1.0"
