"""Higher-order modal formalization of natural-language arguments."""
from __future__ import annotations

__version__ = "0.1.0"
