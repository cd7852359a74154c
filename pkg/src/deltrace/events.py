"""Detectors for the channel-realization events that govern reconstruction.

All detectors look at deletion masks, not at the surviving bits: distinct
deletion patterns can produce identical traces, and the probability
formulas in `analytics` are statements about the realizations.

Two events matter:

* pattern witness — for a repeated block A^f inside the source, some trace's
  mask deletes no copy of A outright.  Without such a witness the trace set
  can never single out the source (see `detect_ambiguities`).
* run coverage — for every run i of the source there is a trace whose mask
  deleted no run completely and left run i untouched.  With coverage the
  maximal-runs reconstructor provably returns the source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import BitString, PatternSpan, RunProfile, span_matches
from .channel import MaskedTrace

__all__ = [
    "EventReport",
    "SandwichPattern",
    "AdjacentPattern",
    "AmbiguityWitness",
    "copy_fully_deleted",
    "has_pattern_witness",
    "run_coverage",
    "detect_events",
    "detect_ambiguities",
]


def _flags_matrix(traces: list[MaskedTrace], n: int) -> np.ndarray:
    if not traces:
        raise ValueError("need at least one trace")
    for mt in traces:
        if mt.source_length != n:
            raise ValueError("trace source length does not match")
    return np.vstack([mt.mask.flags for mt in traces])


def _windows_violated(flags: np.ndarray, windows) -> np.ndarray:
    """Per mask: is at least one of the (start, length) windows fully deleted?"""
    hit = np.zeros(flags.shape[0], dtype=bool)
    for start, length in windows:
        hit |= flags[:, start : start + length].all(axis=1)
    return hit


def _span_windows(span: PatternSpan):
    return [(span.offset + j * span.period, span.period) for j in range(span.copies)]


def _pattern_witness_from_flags(flags: np.ndarray, span: PatternSpan) -> bool:
    return not _windows_violated(flags, _span_windows(span)).all()


def _run_starts(lengths: np.ndarray) -> np.ndarray:
    return np.concatenate(([0], np.cumsum(lengths[:-1])))


def _run_coverage_from_flags(flags: np.ndarray, lengths: np.ndarray):
    counts = np.add.reduceat(flags.astype(np.int64), _run_starts(lengths), axis=1)
    clean = ~(counts == lengths[np.newaxis, :]).any(axis=1)  # no run fully deleted
    intact = counts == 0
    per_run = (clean[:, np.newaxis] & intact).any(axis=0)
    return bool(per_run.all()), per_run


def copy_fully_deleted(mask, span: PatternSpan, copy_index: int) -> bool:
    """Did this mask delete every bit of the copy_index-th copy of the block?"""
    if not 0 <= copy_index < span.copies:
        raise ValueError(f"copy_index must be in [0, {span.copies}), got {copy_index}")
    start = span.offset + copy_index * span.period
    return bool(mask.flags[start : start + span.period].all())


def has_pattern_witness(traces: list[MaskedTrace], span: PatternSpan) -> bool:
    """True iff some trace's mask deletes no copy of the block in the span."""
    flags = _flags_matrix(traces, traces[0].source_length if traces else 0)
    if span.end > flags.shape[1]:
        raise ValueError("span extends past the source")
    return _pattern_witness_from_flags(flags, span)


def run_coverage(traces: list[MaskedTrace], profile: RunProfile):
    """(covered, per_run): per_run[i] is True iff some trace deleted no run
    completely while leaving run i untouched; covered iff that holds for all i."""
    flags = _flags_matrix(traces, profile.total)
    covered, per_run = _run_coverage_from_flags(flags, np.asarray(profile.lengths, dtype=np.int64))
    return covered, tuple(bool(x) for x in per_run)


@dataclass(frozen=True)
class EventReport:
    """Event outcomes for one trace set: pattern witness per declared span,
    plus run coverage with its per-run detail."""

    pattern_witness: tuple[bool, ...]
    run_covered: bool
    per_run: tuple[bool, ...]

    def __post_init__(self):
        if self.run_covered != all(self.per_run):
            raise ValueError("run_covered must equal the conjunction of per_run")


def detect_events(traces: list[MaskedTrace], spans: list[PatternSpan], profile: RunProfile) -> EventReport:
    flags = _flags_matrix(traces, profile.total)
    witness = tuple(_pattern_witness_from_flags(flags, span) for span in spans)
    covered, per_run = _run_coverage_from_flags(flags, np.asarray(profile.lengths, dtype=np.int64))
    return EventReport(witness, covered, tuple(bool(x) for x in per_run))


@dataclass(frozen=True)
class SandwichPattern:
    """A contiguous window outer^left_copies + inner + outer^right_copies.

    Requires len(inner) <= len(outer) and inner != outer.  If every trace
    deletes one of the aligned outer copies outright, the trace set is
    ambiguous; the competing source swaps the window for
    outer^(left-1) inner outer inner 1^(len(outer)-len(inner)) outer^(right-1).
    """

    offset: int
    outer: BitString
    inner: BitString
    left_copies: int
    right_copies: int

    def __post_init__(self):
        object.__setattr__(self, "outer", BitString(self.outer))
        object.__setattr__(self, "inner", BitString(self.inner))
        if self.offset < 0 or self.left_copies < 1 or self.right_copies < 1:
            raise ValueError("need offset >= 0 and copies >= 1 on both sides")
        if len(self.inner) > len(self.outer):
            raise ValueError("inner block must not be longer than outer block")
        if self.inner == self.outer:
            raise ValueError("inner and outer blocks must differ")

    @property
    def end(self) -> int:
        return self.offset + (self.left_copies + self.right_copies) * len(self.outer) + len(self.inner)

    def window(self) -> BitString:
        return (
            BitString(np.tile(self.outer.bits, self.left_copies))
            + self.inner
            + BitString(np.tile(self.outer.bits, self.right_copies))
        )

    def outer_copy_windows(self):
        w = len(self.outer)
        left = [(self.offset + j * w, w) for j in range(self.left_copies)]
        base = self.offset + self.left_copies * w + len(self.inner)
        right = [(base + j * w, w) for j in range(self.right_copies)]
        return left + right

    def alternative_window(self) -> BitString:
        pad = BitString(np.ones(len(self.outer) - len(self.inner), dtype=np.uint8))
        return (
            BitString(np.tile(self.outer.bits, self.left_copies - 1))
            + self.inner
            + self.outer
            + self.inner
            + pad
            + BitString(np.tile(self.outer.bits, self.right_copies - 1))
        )


@dataclass(frozen=True)
class AdjacentPattern:
    """A contiguous window left^left_copies + right^right_copies of two
    distinct blocks.  If every trace deletes one of the aligned copies
    (either block) outright, the trace set is ambiguous; the competing
    source swaps the window for left^(l-1) right left right^(r-1)."""

    offset: int
    left: BitString
    left_copies: int
    right: BitString
    right_copies: int

    def __post_init__(self):
        object.__setattr__(self, "left", BitString(self.left))
        object.__setattr__(self, "right", BitString(self.right))
        if self.offset < 0 or self.left_copies < 1 or self.right_copies < 1:
            raise ValueError("need offset >= 0 and copies >= 1 on both sides")
        if not len(self.left) or not len(self.right):
            raise ValueError("blocks must be nonempty")
        if self.left == self.right:
            raise ValueError("blocks must differ")

    @property
    def end(self) -> int:
        return self.offset + self.left_copies * len(self.left) + self.right_copies * len(self.right)

    def window(self) -> BitString:
        return BitString(
            np.concatenate(
                [np.tile(self.left.bits, self.left_copies), np.tile(self.right.bits, self.right_copies)]
            )
        )

    def copy_windows(self):
        lw, rw = len(self.left), len(self.right)
        left = [(self.offset + j * lw, lw) for j in range(self.left_copies)]
        base = self.offset + self.left_copies * lw
        right = [(base + j * rw, rw) for j in range(self.right_copies)]
        return left + right

    def alternative_window(self) -> BitString:
        return (
            BitString(np.tile(self.left.bits, self.left_copies - 1))
            + self.right
            + self.left
            + BitString(np.tile(self.right.bits, self.right_copies - 1))
        )


@dataclass(frozen=True)
class AmbiguityWitness:
    """Proof that a trace set cannot single out the source: a competing
    source of the same length from which every trace could equally arise.

    condition 1 = repeated block, 2 = sandwich, 3 = adjacent blocks.
    """

    condition: int
    pattern: object
    alternative: BitString


def _splice(s: BitString, start: int, end: int, replacement: BitString) -> BitString:
    return BitString(np.concatenate([s.bits[:start], replacement.bits, s.bits[end:]]))


def _validated_alternative(s: BitString, pat) -> tuple[int, list, BitString]:
    """Check a declared pattern against s and build its competing source.

    Returns (condition number, copy windows, alternative string).
    """
    n = len(s)
    if isinstance(pat, PatternSpan):
        if pat.end > n or not span_matches(s, pat):
            raise ValueError(f"declared pattern absent from source at {pat}")
        flipped = s.bits[pat.offset : pat.offset + pat.period].copy()
        flipped[0] ^= 1
        alt = _splice(s, pat.offset, pat.offset + pat.period, BitString(flipped))
        return 1, _span_windows(pat), alt
    if isinstance(pat, SandwichPattern):
        if pat.end > n or BitString(s.bits[pat.offset : pat.end]) != pat.window():
            raise ValueError(f"declared pattern absent from source at {pat}")
        alt = _splice(s, pat.offset, pat.end, pat.alternative_window())
        if alt == s:
            raise ValueError("degenerate declaration: competing source equals the source")
        return 2, pat.outer_copy_windows(), alt
    if isinstance(pat, AdjacentPattern):
        if pat.end > n or BitString(s.bits[pat.offset : pat.end]) != pat.window():
            raise ValueError(f"declared pattern absent from source at {pat}")
        alt = _splice(s, pat.offset, pat.end, pat.alternative_window())
        if alt == s:
            raise ValueError("degenerate declaration: competing source equals the source")
        return 3, pat.copy_windows(), alt
    raise TypeError(f"unknown pattern declaration {type(pat).__name__}")


def detect_ambiguities(s: BitString, traces: list[MaskedTrace], patterns) -> list[AmbiguityWitness]:
    """Evaluate declared patterns against the masks; emit a witness for every
    pattern whose aligned copies were wiped out in every single trace."""
    flags = _flags_matrix(traces, len(s))
    out = []
    for pat in patterns:
        condition, windows, alt = _validated_alternative(s, pat)
        if _windows_violated(flags, windows).all():
            out.append(AmbiguityWitness(condition=condition, pattern=pat, alternative=alt))
    return out
