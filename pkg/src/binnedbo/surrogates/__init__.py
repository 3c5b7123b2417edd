from .base import SurrogateBackend
from .external import ExternalBackend
from .gp import GpBackend, GpHyperparams
from .khist import KernelHistogramBackend

__all__ = [
    "SurrogateBackend",
    "GpBackend",
    "GpHyperparams",
    "KernelHistogramBackend",
    "ExternalBackend",
]
