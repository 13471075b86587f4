"""
Gap tracker for recording skipped points and failed branches during batch runs.

Batch operations (build_envelope, alpha_sweep) never abort on a per-point or
per-branch failure; they record a GapEvent here and carry on.
"""

import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class GapEvent:
    """Record of a single skipped point or failed branch."""
    kind: str
    tag: str
    alpha: float | None
    location: tuple[float, float] | None
    message: str


@dataclass
class GapStats:
    """Statistics for gap events."""
    total_gaps: int = 0
    by_kind: Counter = field(default_factory=Counter)
    by_tag: Counter = field(default_factory=Counter)
    events: list[GapEvent] = field(default_factory=list)

    def add_event(self, event: GapEvent):
        self.events.append(event)
        self.total_gaps += 1
        self.by_kind[event.kind] += 1
        self.by_tag[event.tag] += 1

    def get_summary(self) -> dict:
        return {
            "total_gaps": self.total_gaps,
            "by_kind": dict(sorted(self.by_kind.items())),
            "by_tag": dict(sorted(self.by_tag.items())),
        }


class GapTracker:
    """Collects gap events of one run."""

    def __init__(self):
        self.stats = GapStats()
        self._lock = threading.Lock()

    def record(
        self,
        kind: str,
        tag: str,
        message: str,
        alpha: float | None = None,
        location: tuple[float, float] | None = None,
    ) -> GapEvent:
        """
        Record a gap event.

        Args:
            kind: What failed, e.g. "denominator_degenerate" or "no_branch"
            tag: Envelope component concerned (AEIL, IPTL, CTL, EVOLUTE)
            message: Error message of the underlying exception
            alpha: Family parameter of the run, if any
            location: (t, s) pair where the gap occurred, if any

        Returns:
            GapEvent object
        """
        event = GapEvent(
            kind=kind,
            tag=tag,
            alpha=alpha,
            location=None if location is None else (float(location[0]), float(location[1])),
            message=message,
        )
        with self._lock:
            self.stats.add_event(event)
        return event

    def get_stats(self) -> GapStats:
        return self.stats

    def get_recent_events(self, limit: int = 10) -> list[GapEvent]:
        return self.stats.events[-limit:]

    def count(self, kind: str | None = None) -> int:
        if kind is None:
            return self.stats.total_gaps
        return self.stats.by_kind[kind]

    def clear(self):
        with self._lock:
            self.stats = GapStats()


# Global gap tracker instance
_global_tracker: Optional[GapTracker] = None


def get_gap_tracker() -> GapTracker:
    """Get the global gap tracker instance."""
    global _global_tracker
    if _global_tracker is None:
        _global_tracker = GapTracker()
    return _global_tracker
