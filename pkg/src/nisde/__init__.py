"""Exact double extensions of restricted Lie (super)algebras over GF(p)."""

from .algebra import EVEN, ODD, AxiomReport, LieSuperAlgebra
from .forms import BilForm
from .linalg import Subspace

__version__ = "0.1.0"

__all__ = [
    "EVEN",
    "ODD",
    "AxiomReport",
    "BilForm",
    "LieSuperAlgebra",
    "Subspace",
    "__version__",
]
