"""stovaq: a numerical laboratory for stochastic-variational quantization.

Forward/backward diffusion ensembles, maximum-entropy density matching,
quantum hydrodynamics, hydrodynamic action stationarity, Noether charges,
and free scalar-field quantization on a 1D lattice -- each claim checked
against an independent numerical oracle.
"""

__version__ = "0.1.0"

from .grid import Grid1D, RealField, ComplexField, gradient, laplacian, integrate, l1_distance
from .params import PhysicalParams, Potential

__all__ = [
    "Grid1D",
    "RealField",
    "ComplexField",
    "gradient",
    "laplacian",
    "integrate",
    "l1_distance",
    "PhysicalParams",
    "Potential",
    "__version__",
]
