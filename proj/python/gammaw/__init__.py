"""Weighted Gamma calculus for L = Laplacian - grad U . grad.

Thin wrapper around the compiled ``_gammaw`` extension.
"""

from ._gammaw import *  # noqa: F401,F403
from ._gammaw import (  # noqa: F401
    Error,
    Field,
    Problem,
    SearchConfig,
    parse_field,
    run_cli,
)

__version__ = "0.1.0"
