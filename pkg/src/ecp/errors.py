"""Exception types shared across the package.

Service layers (CLI, HTTP) translate these into exit codes / status bodies;
library callers get ordinary exceptions with the offending identifiers attached.
"""
from __future__ import annotations


class ParseError(ValueError):
    """Malformed input table. Carries the 1-based line number of the bad row."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyDatasetError(ValueError):
    """No usable rows remain after filtering/validation."""


class DisconnectedSpecializationError(ValueError):
    """The specialization matrix splits into several bipartite components.

    Cross-component complexity comparisons are meaningless, so the spectral
    scores refuse to run. ``components`` lists (locations, activities) per part.
    """

    def __init__(self, components: list[tuple[tuple[str, ...], tuple[str, ...]]]):
        parts = "; ".join(
            f"[locations: {', '.join(locs)} | activities: {', '.join(acts)}]"
            for locs, acts in components
        )
        super().__init__(
            f"specialization matrix is disconnected into {len(components)} components: {parts}"
        )
        self.components = components


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class UnknownIdError(KeyError):
    """A location/activity identifier is not present in the dataset."""

    def __init__(self, kind: str, identifier: str):
        super().__init__(f"unknown {kind}: {identifier!r}")
        self.kind = kind
        self.identifier = identifier

    def __str__(self) -> str:  # KeyError quotes its arg; keep the message readable
        return f"unknown {self.kind}: {self.identifier!r}"


class MissingIndicatorError(ValueError):
    """A specialized location has no indicator value."""

    def __init__(self, location: str):
        super().__init__(f"no indicator value for specialized location {location!r}")
        self.location = location


class InfeasibleTargetError(ValueError):
    """A node can never be activated (entry probability 0 from every reachable state)."""

    def __init__(self, node: str):
        super().__init__(f"target {node!r} is unreachable: entry probability is 0 "
                         f"from every reachable state")
        self.node = node


class CapacityError(ValueError):
    """Instance is beyond the exact-DP capacity cap."""

    def __init__(self, inactive: int, cap: int):
        super().__init__(
            f"{inactive} inactive activities exceeds the exact-DP capacity of {cap}; "
            f"use a lookahead:K policy or Monte Carlo evaluation instead"
        )
        self.inactive = inactive
        self.cap = cap


class WorkspaceError(ValueError):
    """A workspace directory is missing, incomplete, or corrupted."""


class WorkspaceRebuildingError(WorkspaceError):
    """A workspace directory exists but has no manifest yet (mid-rebuild)."""
