"""Flat elliptic connections for crystallographic root systems, their
degree-truncated coefficient algebras, and the verification drivers
built on top of them."""

__version__ = "0.1.0"

from .elliptic import ModularPoint
from .liealg import build_quotient
from .rootsys import build_root_system

__all__ = ["ModularPoint", "build_quotient", "build_root_system", "__version__"]
