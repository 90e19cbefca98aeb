"""Numerics for a critically coupled unbounded Jacobi matrix.

Off-diagonal ``a_n = n**alpha``; diagonal ``b n**alpha`` on odd sites and ``0``
on even sites.
"""

from .errors import CritjacError
from .model import A0Convention, Coupling, ModelParams, PeriodicData

__version__ = "0.1.0"

__all__ = ["A0Convention", "Coupling", "CritjacError", "ModelParams", "PeriodicData", "__version__"]
