"""Confidence-guided pseudo-label refinement for clustering-based
unsupervised representation learning.

Thin wrapper over the compiled ``_cgclab`` extension module.
"""

from ._cgclab import *  # noqa: F401,F403
from ._cgclab import __version__  # noqa: F401
