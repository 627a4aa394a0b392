"""Levenshtein distance over token sequences.

Three public operations: the exact distance, a bounded early-exit variant
(banded DP, band width 2*limit+1) for threshold queries, and the windowed
prefix alignment used by the decoder's offset estimator.  Batched numpy
versions of the same recurrences back the hot paths; they are equality
tested against the scalar forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError


class _Exceeds:
    """Sentinel: the bounded distance is greater than the limit."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EXCEEDS"


EXCEEDS = _Exceeds()


def levenshtein(a: Sequence[int], b: Sequence[int]) -> int:
    """Exact edit distance with unit insertion/deletion/substitution costs."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        append = cur.append
        for j, cb in enumerate(b, 1):
            append(min(cur[j - 1] + 1, prev[j] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_bounded(a: Sequence[int], b: Sequence[int], limit: int):
    """Exact distance when it is <= limit, else EXCEEDS.

    Banded DP: only cells within `limit` of the diagonal can matter; the
    scan aborts as soon as every cell in the current band exceeds limit.
    """
    if limit < 0:
        raise ParameterError("limit must be >= 0")
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return EXCEEDS
    if la < lb:
        a, b, la, lb = b, a, lb, la
    big = limit + 1
    prev = [min(j, big) for j in range(lb + 1)]
    for i in range(1, la + 1):
        lo = max(1, i - limit)
        hi = min(lb, i + limit)
        cur = [big] * (lb + 1)
        if lo == 1:
            cur[0] = min(i, big)
        ca = a[i - 1]
        best = cur[0] if lo == 1 else big
        for j in range(lo, hi + 1):
            c = prev[j - 1] + (ca != b[j - 1])
            up = prev[j] + 1
            if up < c:
                c = up
            left = cur[j - 1] + 1
            if left < c:
                c = left
            if c > big:
                c = big
            cur[j] = c
            if c < best:
                best = c
        if best > limit:
            return EXCEEDS
        prev = cur
    d = prev[lb]
    return d if d <= limit else EXCEEDS


@dataclass(frozen=True)
class Alignment:
    """Best windowed match of a codeword against a received prefix."""

    distance: int
    prefix_len: int
    offset: int


def _prefix_distances(codeword: Sequence[int], received: Sequence[int]) -> list[int]:
    """Final DP row: distances from `codeword` to every prefix of `received`."""
    m = len(received)
    prev = list(range(m + 1))
    for i, ca in enumerate(codeword, 1):
        cur = [i]
        append = cur.append
        for j, cb in enumerate(received, 1):
            append(min(cur[j - 1] + 1, prev[j] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev


def best_prefix_alignment(
    codeword: Sequence[int], received: Sequence[int], block_len: int, window: int
) -> Alignment:
    """Minimize distance(codeword, received[:L]) over L within the window.

    Ties prefer the smaller |L - block_len|, then the smaller L, so the offset
    estimate disturbs later blocks as little as possible.  When the
    received sequence is shorter than the window floor, the whole of it is
    the only admissible prefix.
    """
    if window < 0:
        raise ParameterError("window must be >= 0")
    lo = max(0, block_len - window)
    hi = min(len(received), block_len + window)
    if hi < lo:
        lo = hi
    row = _prefix_distances(codeword, received[:hi])
    best = None
    for length in range(lo, hi + 1):
        key = (row[length], abs(length - block_len), length)
        if best is None or key < best:
            best = key
    return Alignment(distance=best[0], prefix_len=best[2], offset=best[2] - block_len)


# --- batched numpy forms -------------------------------------------------

def bag_counts(seqs: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Per-sequence token histograms, shape (rows, alphabet)."""
    rows = seqs.shape[0]
    out = np.zeros((rows, alphabet_size), dtype=np.int32)
    if seqs.size:
        np.add.at(out, (np.repeat(np.arange(rows), seqs.shape[1]), seqs.ravel()), 1)
    return out


def pairwise_capped(a: np.ndarray, b: np.ndarray, cap: int) -> np.ndarray:
    """min(levenshtein(a[p], b[p]), cap) for each row pair p.

    Rows must have equal length within each array.  Values are capped at
    `cap`, which keeps the arithmetic equivalent to a banded computation
    with limit cap-1: any cell farther than cap-1 from the diagonal is
    saturated and cannot influence a sub-cap result.
    """
    pairs, n = a.shape
    m = b.shape[1]
    idx = np.arange(m + 1, dtype=np.int32)
    prev = np.broadcast_to(np.minimum(idx, cap), (pairs, m + 1)).astype(np.int32)
    scratch = np.empty((pairs, m + 1), dtype=np.int32)
    for t in range(1, n + 1):
        np.minimum(prev[:, :-1] + (a[:, t - 1 : t] != b), prev[:, 1:] + 1,
                   out=scratch[:, 1:])
        scratch[:, 0] = min(t, cap)
        row = np.minimum.accumulate(scratch - idx, axis=1)
        row += idx
        np.minimum(row, cap, out=row)
        prev = row
    return prev[:, m]


def prefix_distance_rows(codewords: np.ndarray, received: np.ndarray) -> np.ndarray:
    """Final DP rows for every codeword against prefixes of one sequence.

    Returns shape (k, len(received) + 1); row r gives the distances from
    codewords[r] to every prefix of `received`.
    """
    k, n = codewords.shape
    m = received.shape[0]
    idx = np.arange(m + 1, dtype=np.int32)
    prev = np.broadcast_to(idx, (k, m + 1)).astype(np.int32)
    scratch = np.empty((k, m + 1), dtype=np.int32)
    for t in range(1, n + 1):
        np.minimum(prev[:, :-1] + (codewords[:, t - 1 : t] != received),
                   prev[:, 1:] + 1, out=scratch[:, 1:])
        scratch[:, 0] = t
        row = np.minimum.accumulate(scratch - idx, axis=1)
        row += idx
        prev = row
    return prev
