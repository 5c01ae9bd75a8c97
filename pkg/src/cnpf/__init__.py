"""Complete Nevanlinna-Pick kernels, Sarason functions and their factorizations."""

from .errors import CnpfError
from .kernels import KernelSpec, PointSet, gram_matrix, kernel_eval, kernel_matrix
from .series import Series, VectorSeries

__version__ = "0.1.0"

__all__ = [
    "CnpfError",
    "KernelSpec",
    "PointSet",
    "Series",
    "VectorSeries",
    "gram_matrix",
    "kernel_eval",
    "kernel_matrix",
    "__version__",
]
