"""Topology optimization for hybrid QKD networks.

Thin Python surface over the C++ core: instance I/O and generation, the
MILP builder, the exact LP/MILP solver, and the deployment evaluator.
"""

from ._qkdtopo import *  # noqa: F401,F403
from ._qkdtopo import __version__  # noqa: F401
