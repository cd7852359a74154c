"""Reconstruction from traces: the linear-time maximal-runs algorithm and the
exponential brute-force oracle that decides whether a trace set pins down a
unique length-n source.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bits import BitString, _bits_of, _run_lengths, is_subsequence

__all__ = [
    "FIRST_BIT_MISMATCH",
    "LENGTH_MISMATCH",
    "EMPTY_TRACE_SET",
    "ReconstructionResult",
    "SufficiencyVerdict",
    "maximal_runs",
    "consistent_sources",
    "is_levenshtein_sufficient",
]

FIRST_BIT_MISMATCH = "first-bit mismatch"
LENGTH_MISMATCH = "length mismatch"
EMPTY_TRACE_SET = "empty trace set"

# 2^n candidates with next-occurrence tables; beyond this the tables alone
# pass ~60 MB and enumeration stops being a desk-scale oracle.
DEFAULT_ORACLE_CAP = 20


@dataclass(frozen=True)
class ReconstructionResult:
    """Either a reconstructed string or a named failure reason."""

    string: BitString | None = None
    failure: str | None = None

    def __post_init__(self):
        if (self.string is None) == (self.failure is None):
            raise ValueError("exactly one of string/failure must be set")

    @property
    def ok(self) -> bool:
        return self.failure is None


def maximal_runs(n: int, traces) -> ReconstructionResult:
    """Reconstruct a length-n source from traces by run alignment.

    Take the traces with the maximal run count; if they agree on the first
    bit, output the longest observed i-th run for each i.  The result is
    returned only when those runs add up to exactly n bits.  O(n * T).
    """
    traces = list(traces)
    if not traces:
        return ReconstructionResult(failure=EMPTY_TRACE_SET)
    arrays = [_bits_of(t) for t in traces]
    lengths = [_run_lengths(a) for a in arrays]
    m_hat = max(l.size for l in lengths)
    if m_hat == 0:
        # every trace is empty: nothing to align
        if n == 0:
            return ReconstructionResult(string=BitString(()))
        return ReconstructionResult(failure=LENGTH_MISMATCH)
    chosen = [i for i, l in enumerate(lengths) if l.size == m_hat]
    first_bits = {int(arrays[i][0]) for i in chosen}
    if len(first_bits) != 1:
        return ReconstructionResult(failure=FIRST_BIT_MISMATCH)
    best = lengths[chosen[0]]
    for i in chosen[1:]:
        best = np.maximum(best, lengths[i])
    if int(best.sum()) != n:
        return ReconstructionResult(failure=LENGTH_MISMATCH)
    first = first_bits.pop()
    values = ((first + np.arange(m_hat)) % 2).astype(np.uint8)
    return ReconstructionResult(string=BitString(np.repeat(values, best)))


# ---------------------------------------------------------------------------
# brute-force unique-source oracle

_TABLES: dict[int, tuple] = {}


def _tables(n: int):
    """Candidate matrix in lexicographic order plus next-occurrence tables.

    Row i of the candidate matrix is the length-n binary expansion of i
    (leftmost bit most significant), so row order == lexicographic order.
    nxt[b][i, j] is the first position >= j where candidate i carries bit b,
    with n as the not-found sentinel.
    """
    cached = _TABLES.get(n)
    if cached is not None:
        return cached
    count = 1 << n
    if n:
        shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)
        cand = ((np.arange(count, dtype=np.uint32)[:, None] >> shifts) & 1).astype(np.uint8)
    else:
        cand = np.zeros((1, 0), dtype=np.uint8)
    nxt = np.full((2, count, n + 1), n, dtype=np.int16)
    for j in range(n - 1, -1, -1):
        for b in (0, 1):
            nxt[b, :, j] = np.where(cand[:, j] == b, j, nxt[b, :, j + 1])
    ones = cand.sum(axis=1, dtype=np.int16)
    _TABLES[n] = (cand, nxt, ones)
    return _TABLES[n]


def _consistent_rows(n: int, arrays) -> np.ndarray:
    cand, nxt, ones = _tables(n)
    alive = np.arange(1 << n, dtype=np.int64)
    need_one = max((int((a == 1).sum()) for a in arrays), default=0)
    need_zero = max((int((a == 0).sum()) for a in arrays), default=0)
    alive = alive[(ones[alive] >= need_one) & (n - ones[alive] >= need_zero)]
    for a in sorted(arrays, key=len, reverse=True):
        if a.size == 0 or alive.size == 0:
            break
        pos = np.zeros(alive.size, dtype=np.int16)
        for b in a:
            hit = nxt[b, alive, pos]
            keep = hit < n
            alive = alive[keep]
            if alive.size == 0:
                break
            pos = hit[keep] + 1
    return alive


def consistent_sources(n: int, traces, cap: int = DEFAULT_ORACLE_CAP) -> list[BitString]:
    """All length-n strings of which every trace is a subsequence, in
    lexicographic order.  Exhaustive over 2^n candidates, hence the cap."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise ValueError(f"brute-force infeasible: n={n} exceeds cap {cap}")
    if n > DEFAULT_ORACLE_CAP:
        warnings.warn(f"enumerating 2^{n} candidates; expect heavy memory use", stacklevel=2)
    arrays = [_bits_of(t) for t in traces]
    if any(a.size > n for a in arrays):
        return []
    rows = _consistent_rows(n, arrays)
    cand = _tables(n)[0]
    return [BitString(cand[i]) for i in rows]


@dataclass(frozen=True)
class SufficiencyVerdict:
    """Is the trace set enough to single out its source?  consistent_count
    is the number of length-n candidates embedding every trace; a witness is
    provided whenever some other candidate survives."""

    consistent_count: int
    sufficient: bool
    witness: BitString | None = None

    def __post_init__(self):
        if self.sufficient != (self.consistent_count == 1):
            raise ValueError("sufficient must mean exactly one consistent source")


def is_levenshtein_sufficient(s: BitString, traces, cap: int = DEFAULT_ORACLE_CAP) -> SufficiencyVerdict:
    """Decide by brute force whether the traces admit s as the only source."""
    s = s if isinstance(s, BitString) else BitString(s)
    traces = list(traces)
    for t in traces:
        if not is_subsequence(t, s):
            raise ValueError("traces inconsistent with source")
    sources = consistent_sources(len(s), traces, cap=cap)
    count = len(sources)
    if count == 1:
        return SufficiencyVerdict(consistent_count=1, sufficient=True)
    witness = next(x for x in sources if x != s)
    return SufficiencyVerdict(consistent_count=count, sufficient=False, witness=witness)
