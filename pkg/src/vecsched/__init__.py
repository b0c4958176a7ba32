"""Online vector scheduling: streaming schedulers, adversaries and oracles."""
from .core import (FORBIDDEN, MAKESPAN, AllForbidden, AssignedForbidden, Assignment, Instance,
                   InvalidExponent, LoadMatrix, NormSpec, Pool, all_norms_report, load_matrix,
                   lr_norm)

__version__ = "0.1.0"

__all__ = [
    "FORBIDDEN", "MAKESPAN", "AllForbidden", "AssignedForbidden", "Assignment", "Instance",
    "InvalidExponent", "LoadMatrix", "NormSpec", "Pool", "all_norms_report", "load_matrix",
    "lr_norm",
]
