"""Exception types shared across the package.

Verified negative answers (NotSimpleError, NoRoom, NoSubsequence) are
first-class results, not bugs: callers such as the CLI turn them into
exit status 1 with a machine-readable report.
"""

from __future__ import annotations


class OrdfragError(Exception):
    """Base class for all package errors."""


class DomainError(OrdfragError):
    """An argument violates a documented precondition."""


class RangeError(OrdfragError):
    """A value exceeds a configured bound (fail loudly, never truncate)."""


class InsufficientMaterialization(OrdfragError):
    """The materialized part of a tree is too small to answer the query."""


class NoRoom(OrdfragError):
    """No pool node strictly above the required bound exists on a branch.

    Finite miniatures may lack the levels the infinite arguments take for
    granted; this error names the node and the level bound that could not
    be cleared.
    """

    def __init__(self, node: int, bound_level: int | None, detail: str = ""):
        self.node = node
        self.bound_level = bound_level
        self.detail = detail
        msg = f"no pool level available strictly above level {bound_level} on the branch of node {node}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotSimpleError(OrdfragError):
    """A construction required a simple node set but got a refutation."""

    def __init__(self, violator, level: int | None = None):
        self.violator = violator
        self.level = level
        where = f" at level {level}" if level is not None else ""
        super().__init__(
            f"node set{where} is not simple: |W| = {len(violator.members)} > "
            f"|N(W)| = {len(violator.neighborhood)}"
        )


class NoSubsequence(OrdfragError):
    """No level pairing exists for a cofinal transfer."""

    def __init__(self, source_level: int, detail: str = ""):
        self.source_level = source_level
        msg = f"no unused target level >= {source_level} available"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class InternalInconsistency(OrdfragError):
    """A postcondition the construction guarantees failed to hold.

    Raised instead of returning silently wrong output; always a bug report.
    """


class GuaranteeFailure(OrdfragError):
    """An approximation guarantee failed its exact recheck.

    Carries the full case trace so the instance can be replayed.
    """

    def __init__(self, message: str, trace: dict):
        self.trace = trace
        super().__init__(message + "; trace: " + repr(trace))
