"""Monte Carlo permanent estimators over matrix algebras, with exact oracles."""

from __future__ import annotations

from .errors import InvalidInputError, ResourceLimitError

__version__ = "0.1.0"

__all__ = ["InvalidInputError", "ResourceLimitError", "__version__"]
