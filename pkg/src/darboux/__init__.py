"""Exact search for preserved measures and integrals of rational maps.

The package finds polynomials p whose pullback under a rational map equals a
rational-function multiple of p (the multiplier being the cofactor), then
combines them into preserved measures, first integrals, 2-integrals, and
non-rational integrals. It also discretizes quadratic ODE fields and detects
parameter conditions under which extra structure appears. All reported
results are certified by exact arithmetic.
"""

from .context import Context
from .polynomial import Polynomial
from .rational import RationalFunction
from . import errors

__version__ = "0.1.0"

__all__ = ["Context", "Polynomial", "RationalFunction", "errors", "__version__"]
