"""Recombinant innovation dynamics: simulation engine, statistical-law
estimators, and product-space analysis."""

from innodyn._innodyn import *  # noqa: F401,F403
from innodyn._innodyn import __doc__, __version__  # noqa: F401
