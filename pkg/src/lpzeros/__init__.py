"""p-adic L-functions of even Dirichlet characters: Iwasawa series, invariants and zeroes."""
from __future__ import annotations

__version__ = "0.1.0"
