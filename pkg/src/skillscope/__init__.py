"""Description-implementation consistency scanning for programmatic skills."""

from __future__ import annotations

__version__ = "0.1.0"
