"""Inverse mean curvature flow annuli: fields, distances, diagnostics."""

from ._imcflab import *  # noqa: F401,F403
from ._imcflab import __doc__ as _doc  # noqa: F401

__version__ = "0.1.0"
