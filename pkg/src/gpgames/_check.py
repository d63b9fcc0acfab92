from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Check:
    """Outcome of a verification: truthy on success, with a witness on failure.

    ``value`` carries any by-product of a successful check (for example the
    offset tables found by a strategic-equivalence test).
    """

    ok: bool
    witness: Any = None
    value: Any = None

    def __bool__(self) -> bool:
        return self.ok


class GPGError(Exception):
    """Base class for library errors."""


class CapExceeded(GPGError):
    """An exhaustive enumeration would exceed the configured cap."""


class NotAPotentialGame(GPGError):
    def __init__(self, cycle):
        super().__init__(f"not a potential game; improvement 4-cycle {cycle}")
        self.cycle = cycle


class NotGraphLocal(GPGError):
    """A potential has a nonzero interaction term on a non-clique subset."""

    def __init__(self, subset, profile):
        super().__init__(f"nonzero interaction on non-clique {subset} at {profile}")
        self.subset = subset
        self.profile = profile


class RejectedMove(GPGError):
    def __init__(self, player, strategy, gain):
        super().__init__(f"player {player} -> {strategy} is not a strict improvement (gain {gain})")
        self.player = player
        self.strategy = strategy
        self.gain = gain
