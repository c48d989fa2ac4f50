"""Logical and hybrid clocks for partially synchronous systems.

Three clock families live here, all immutable:

* :class:`VectorClock` tracks causality exactly.  Comparing two stamps
  classifies the pair as ordered, equal, or concurrent.
* :class:`HLCTimestamp` is a hybrid logical clock, a pair ``(l, c)``
  where ``l`` rides on the physical clock and ``c`` breaks ties among
  events sharing the same ``l``.  It is causally sound (an event that
  happened before another never carries a larger stamp) but not
  complete: distinct concurrent events may compare as ordered.
* :class:`HVClock` is a vector of physical-clock estimates kept inside
  a synchrony window of width ``eps``: entries that would fall more
  than ``eps`` behind the owner's physical clock are clamped up to the
  window edge.

Physical clocks are plain non-negative ``int`` ticks throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Ordering(Enum):
    """Outcome of comparing two clock stamps."""

    BEFORE = "before"
    AFTER = "after"
    CONCURRENT = "concurrent"
    EQUAL = "equal"


# ---------------------------------------------------------------------------
# Vector clocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class VectorClock:
    """An immutable vector clock stamp.

    ``entries[i]`` counts the events of process ``i`` known to this
    stamp; ``owner`` is the process that produced it.  All operations
    return new instances.
    """

    entries: tuple[int, ...]
    owner: int

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("vector clock needs at least one entry")
        if not 0 <= self.owner < len(self.entries):
            raise ValueError(f"owner {self.owner} out of range for {len(self.entries)} entries")
        if any(e < 0 for e in self.entries):
            raise ValueError("vector clock entries must be non-negative")

    @classmethod
    def zero(cls, n: int, owner: int) -> VectorClock:
        """The all-zero stamp for a system of ``n`` processes."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls((0,) * n, owner)

    def local_event(self) -> VectorClock:
        """Stamp a local event: increment the owner's own entry."""
        e = list(self.entries)
        e[self.owner] += 1
        return VectorClock(tuple(e), self.owner)

    def receive(self, msg: VectorClock) -> VectorClock:
        """Stamp a receive: componentwise max with ``msg``, then tick.

        The receive itself is an event, so the owner entry becomes
        ``max(local[owner], msg[owner]) + 1``.
        """
        if len(msg.entries) != len(self.entries):
            raise ValueError("vector clock dimension mismatch")
        merged = [max(a, b) for a, b in zip(self.entries, msg.entries)]
        merged[self.owner] += 1
        return VectorClock(tuple(merged), self.owner)

    def compare(self, other: VectorClock) -> Ordering:
        """Classify this stamp against ``other``.

        BEFORE / AFTER for strict causal order, EQUAL for identical
        entries, CONCURRENT when each side knows something the other
        does not.
        """
        if len(other.entries) != len(self.entries):
            raise ValueError("vector clock dimension mismatch")
        le = ge = True
        for a, b in zip(self.entries, other.entries):
            if a < b:
                ge = False
            elif a > b:
                le = False
        if le and ge:
            return Ordering.EQUAL
        if le:
            return Ordering.BEFORE
        if ge:
            return Ordering.AFTER
        return Ordering.CONCURRENT

    def happened_before(self, other: VectorClock) -> bool:
        return self.compare(other) is Ordering.BEFORE

    def concurrent_with(self, other: VectorClock) -> bool:
        return self.compare(other) is Ordering.CONCURRENT


# ---------------------------------------------------------------------------
# Hybrid logical clocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class HLCTimestamp:
    """A hybrid logical clock value ``(l, c)``.

    ``l`` is the largest physical clock the event is aware of and ``c``
    counts causal steps taken at that same ``l``.  Ordering is
    lexicographic on ``(l, c)``, which the dataclass field order gives
    us directly.
    """

    l: int
    c: int = 0

    def __post_init__(self) -> None:
        if self.l < 0 or self.c < 0:
            raise ValueError("HLC components must be non-negative")

    @classmethod
    def zero(cls) -> HLCTimestamp:
        return cls(0, 0)

    def advance(self, pt: int) -> HLCTimestamp:
        """Stamp a local or send event at physical time ``pt``."""
        l2 = max(self.l, pt)
        return HLCTimestamp(l2, self.c + 1 if l2 == self.l else 0)

    def receive(self, msg: HLCTimestamp, pt: int) -> HLCTimestamp:
        """Stamp a receive of ``msg`` at physical time ``pt``.

        The standard three-way split: if the new ``l`` ties both sides,
        ``c`` exceeds both counters; if it ties one side, that side's
        counter advances; a fresh ``l`` resets ``c`` to zero.
        """
        l2 = max(self.l, msg.l, pt)
        if l2 == self.l == msg.l:
            c2 = max(self.c, msg.c) + 1
        elif l2 == self.l:
            c2 = self.c + 1
        elif l2 == msg.l:
            c2 = msg.c + 1
        else:
            c2 = 0
        return HLCTimestamp(l2, c2)

    def concurrent_with(self, other: HLCTimestamp) -> bool:
        """HLC-level concurrency: identical ``(l, c)`` pairs.

        Events with equal stamps are guaranteed causally concurrent.
        The converse fails: concurrency in general cannot be decided
        from one scalar pair.
        """
        return self.l == other.l and self.c == other.c


# ---------------------------------------------------------------------------
# Hybrid vector clocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class HVClock:
    """A hybrid vector clock: per-process physical-clock estimates.

    The owner entry is the owner's physical clock.  Every entry is kept
    within ``eps`` of it; anything older is clamped up to
    ``entries[owner] - eps``, so in a system with clock spread at most
    ``eps`` the vector never underestimates by more than the window.
    """

    entries: tuple[int, ...]
    owner: int
    eps: int

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("hybrid vector clock needs at least one entry")
        if not 0 <= self.owner < len(self.entries):
            raise ValueError(f"owner {self.owner} out of range for {len(self.entries)} entries")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")

    @classmethod
    def zero(cls, n: int, owner: int, eps: int) -> HVClock:
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls((0,) * n, owner, eps)

    def _clamped(self, entries: list[int], pt: int) -> HVClock:
        floor = pt - self.eps
        entries[self.owner] = pt
        return HVClock(tuple(max(e, floor) for e in entries), self.owner, self.eps)

    def advance(self, pt: int) -> HVClock:
        """Advance the owner's physical clock to ``pt`` (monotone)."""
        if pt < self.entries[self.owner]:
            raise ValueError("physical clock may not move backwards")
        return self._clamped(list(self.entries), pt)

    def receive(self, msg: HVClock, pt: int) -> HVClock:
        """Merge ``msg`` componentwise at physical time ``pt``."""
        if len(msg.entries) != len(self.entries):
            raise ValueError("hybrid vector clock dimension mismatch")
        if msg.eps != self.eps:
            raise ValueError("hybrid vector clock window mismatch")
        if pt < self.entries[self.owner]:
            raise ValueError("physical clock may not move backwards")
        merged = [max(a, b) for a, b in zip(self.entries, msg.entries)]
        return self._clamped(merged, pt)
