"""Frame/slot domain model.

Defines the per-frame configuration, immutable slot subsets, the
latency-window coverage relation between an allocation and a generation
pattern, and the two aggregate service metrics (reliability rate and
spare-slot efficiency).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .backend import kernels as _K

# Slot subsets are packed into one 64-bit word, slot i <-> bit i - 1.
MAX_SLOTS = 64


@dataclass(frozen=True)
class FrameConfig:
    """Static frame parameters.

    ``num_slots`` slots per frame, a per-packet delay budget of ``latency``
    slots, and the long-run target unreliability rate in (0, 1).
    """

    num_slots: int
    latency: int
    target_unreliability: float

    def __post_init__(self) -> None:
        if not 1 <= self.num_slots <= MAX_SLOTS:
            raise ValueError(
                f"num_slots must be in [1, {MAX_SLOTS}], got {self.num_slots}")
        if self.latency < 0:
            raise ValueError(f"latency must be >= 0, got {self.latency}")
        if not 0.0 < self.target_unreliability < 1.0:
            raise ValueError("target_unreliability must lie strictly in (0, 1)")


@dataclass(frozen=True)
class SlotSet:
    """Immutable subset of slot indices, encoded as a bitmask.

    Slot indices are 1-based; slot ``i`` occupies bit ``i - 1``.  The
    encoding caps frames at 64 slots so subset operations stay O(1).
    """

    mask: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.mask < (1 << MAX_SLOTS):
            raise ValueError("slot mask outside the 64-slot encoding")

    @classmethod
    def of(cls, *slots: int) -> "SlotSet":
        return cls.from_slots(slots)

    @classmethod
    def from_slots(cls, slots: Iterable[int]) -> "SlotSet":
        mask = 0
        for s in slots:
            if not 1 <= s <= MAX_SLOTS:
                raise ValueError(f"slot index {s} outside [1, {MAX_SLOTS}]")
            mask |= 1 << (s - 1)
        return cls(mask)

    @property
    def members(self) -> tuple[int, ...]:
        """Member slot indices in ascending order."""
        return tuple(self)

    def fits(self, num_slots: int) -> bool:
        """Whether every member lies in {1, ..., num_slots}."""
        return self.mask < (1 << num_slots)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, slot: int) -> bool:
        return 1 <= slot <= MAX_SLOTS and (self.mask >> (slot - 1)) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        s = 1
        while m:
            if m & 1:
                yield s
            m >>= 1
            s += 1

    def __repr__(self) -> str:
        return f"SlotSet.of({', '.join(map(str, self))})"


@dataclass(frozen=True)
class FrameTrace:
    """Per-frame record emitted by a simulation run."""

    frame_index: int
    generated: SlotSet
    allocated: SlotSet
    reliability: int
    alpha_f: float
    theta_f: float
    allocated_count: int

    def __post_init__(self) -> None:
        if self.frame_index < 1:
            raise ValueError("frame_index is 1-based")
        if self.reliability not in (0, 1):
            raise ValueError("reliability must be 0 or 1")
        if self.allocated_count != len(self.allocated):
            raise ValueError("allocated_count does not match the allocation")


@dataclass(frozen=True)
class SimSummary:
    """Aggregate metrics over a run.

    ``trailing_200_reliability`` is the mean reliability over the last
    min(200, num_frames) frames, mirroring the windowed display used when
    plotting traces.
    """

    num_frames: int
    reliability_rate: float
    embb_efficiency: float
    trailing_200_reliability: float


def l_covers(allocated: SlotSet, generated: SlotSet, latency: int) -> bool:
    """True iff every generated slot can be served by a distinct allocated
    slot ``u`` with ``0 <= u - g <= latency``.

    Computed by greedy earliest-slot matching (packets in increasing slot
    order, each taking the smallest free allocated slot in its window),
    which is exact for these uniform-length windows; the exhaustive
    :func:`l_covers_oracle` pins that claim in the test suite.
    """
    if latency < 0:
        raise ValueError("latency must be >= 0")
    return bool(_K.l_covers(
        np.uint64(allocated.mask), np.uint64(generated.mask), latency))


def l_covers_oracle(allocated: SlotSet, generated: SlotSet, latency: int) -> bool:
    """Exhaustive reference for :func:`l_covers`.

    Tries every injective assignment of generated packets onto allocated
    slots.  Factorial cost; keep the generated set small (<= 8 packets).
    """
    if latency < 0:
        raise ValueError("latency must be >= 0")
    gen = generated.members
    if len(gen) > len(allocated):
        return False
    for assigned in itertools.permutations(allocated.members, len(gen)):
        if all(0 <= u - g <= latency for g, u in zip(gen, assigned)):
            return True
    return False


def reliability_indicator(allocated: SlotSet, generated: SlotSet,
                          latency: int) -> int:
    """1 if the allocation covers the generated pattern, else 0."""
    return 1 if l_covers(allocated, generated, latency) else 0


def reliability_rate(traces: Sequence[FrameTrace]) -> float:
    """Mean per-frame reliability over a trace window."""
    if not traces:
        raise ValueError("no frames")
    return sum(t.reliability for t in traces) / len(traces)


def embb_efficiency(traces: Sequence[FrameTrace], num_slots: int) -> float:
    """Fraction of slots left unallocated across the window."""
    if not traces:
        raise ValueError("no frames")
    for t in traces:
        if t.allocated_count > num_slots:
            raise ValueError("allocation larger than the frame")
    total = sum(t.allocated_count for t in traces)
    return 1.0 - total / (len(traces) * num_slots)
