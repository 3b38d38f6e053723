"""Order trees over compact linear orders.

Admissible partition trees, simple staged families with regressive
witnesses, open partitions, fragmentation decompositions, and separating
families of step functions, all over explicitly materialized compact
linear orders (finite chains, ordinal intervals, split chains, order
sums).
"""

from .errors import (
    DomainError,
    GuaranteeFailure,
    InsufficientMaterialization,
    InternalInconsistency,
    NoRoom,
    NoSubsequence,
    NotSimpleError,
    OrdfragError,
    RangeError,
)
from .ordinal import Ordinal

__version__ = "0.1.0"

__all__ = [
    "Ordinal",
    "OrdfragError",
    "DomainError",
    "RangeError",
    "InsufficientMaterialization",
    "NoRoom",
    "NotSimpleError",
    "NoSubsequence",
    "InternalInconsistency",
    "GuaranteeFailure",
    "__version__",
]
