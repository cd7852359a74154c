"""Independent reference implementations used only by the tests.

Everything here is deliberately written in plain Python with exhaustive
enumeration, trading speed for obviousness, so package results can be
checked against code that shares no logic with the implementation.
"""

from __future__ import annotations

import itertools
import math


def is_subseq_str(t: str, x: str) -> bool:
    """Two-pointer subsequence check on text strings."""
    i = 0
    for ch in x:
        if i < len(t) and t[i] == ch:
            i += 1
    return i == len(t)


def all_strings(n: int):
    for tup in itertools.product("01", repeat=n):
        yield "".join(tup)


def consistent_sources_oracle(n: int, traces: list[str]) -> list[str]:
    """All length-n strings embedding every trace, by exhaustive filtering."""
    return [x for x in all_strings(n) if all(is_subseq_str(t, x) for t in traces)]


def subsequences_oracle(x: str) -> set[str]:
    """Every subsequence of x, by enumerating kept-index subsets."""
    out = set()
    for r in range(len(x) + 1):
        for keep in itertools.combinations(range(len(x)), r):
            out.add("".join(x[i] for i in keep))
    return out


# ---------------------------------------------------------------------------
# exact event probabilities by enumerating every deletion mask matrix

def _mask_rows(n: int):
    return list(itertools.product((False, True), repeat=n))


def mask_matrix_probs(n: int, p: float, t_count: int):
    """Yield (rows, probability) over all (2^n)^T deletion outcomes."""
    rows = _mask_rows(n)
    row_prob = [p ** sum(r) * (1 - p) ** (n - sum(r)) for r in rows]
    for combo in itertools.product(range(len(rows)), repeat=t_count):
        prob = 1.0
        for idx in combo:
            prob *= row_prob[idx]
        yield [rows[i] for i in combo], prob


def every_trace_kills_a_copy(rows, windows) -> bool:
    """True iff each mask fully deletes at least one (start, width) window."""
    for row in rows:
        if not any(all(row[start + j] for j in range(width)) for start, width in windows):
            return False
    return True


def some_run_uncovered(rows, run_lengths) -> bool:
    """True iff no mask both keeps a remnant of every run and leaves some
    run untouched, for at least one run taken over all masks jointly."""
    starts = [0]
    for length in run_lengths[:-1]:
        starts.append(starts[-1] + length)
    covered = [False] * len(run_lengths)
    for row in rows:
        clean = all(
            not all(row[s + j] for j in range(length))
            for s, length in zip(starts, run_lengths)
        )
        if not clean:
            continue
        for i, (s, length) in enumerate(zip(starts, run_lengths)):
            if not any(row[s + j] for j in range(length)):
                covered[i] = True
    return not all(covered)


def event_prob_oracle(n: int, p: float, t_count: int, event) -> float:
    return math.fsum(prob for rows, prob in mask_matrix_probs(n, p, t_count) if event(rows))


# ---------------------------------------------------------------------------
# Wilson interval by direct quadratic solution

def wilson_oracle(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Roots of (phat - p)^2 = z^2 p (1-p) / n, solved with the quadratic
    formula rather than the rearranged textbook expression."""
    phat = successes / trials
    a = 1 + z * z / trials
    b = -(2 * phat + z * z / trials)
    c = phat * phat
    disc = b * b - 4 * a * c
    lo = (-b - math.sqrt(disc)) / (2 * a)
    hi = (-b + math.sqrt(disc)) / (2 * a)
    return (max(0.0, lo), min(1.0, hi))
