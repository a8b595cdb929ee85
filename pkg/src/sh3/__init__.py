"""Dynamic-transition toolkit for the dispersive Swift-Hohenberg equation on a periodic domain."""

from .errors import SH3Error
from .spectrum import PartitionClass, SystemParams, analyze, growth_rate, i4_length
from .transition import TransitionType, classify

__all__ = [
    "PartitionClass",
    "SH3Error",
    "SystemParams",
    "TransitionType",
    "analyze",
    "classify",
    "growth_rate",
    "i4_length",
]
__version__ = "0.1.0"
