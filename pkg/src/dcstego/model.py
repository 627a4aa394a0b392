"""Autoregressive token sources behind a deterministic distribution interface.

A model maps a context (token sequence) to a canonical next-token table.
Canonical means: entries sorted by descending probability with ties broken
by ascending token id, zero-probability tokens omitted, probabilities
summing to 1.  The ordering is a hard contract: encoder and decoder must
compute identical inverse-CDF intervals from the same table.
"""

from __future__ import annotations

import bisect
import math
import threading
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import ContextError, ParameterError

Tokens = tuple[int, ...]

SUM_TOLERANCE = 1e-9


class Distribution:
    """Canonically ordered next-token probability table.

    Immutable and hashable; carries precomputed cumulative sums so that
    inverse-CDF lookups are a single bisect.
    """

    __slots__ = ("tokens", "probs", "cum", "_hash")

    def __init__(self, tokens: Tokens, probs: tuple[float, ...]):
        self.tokens = tokens
        self.probs = probs
        acc = 0.0
        cum = []
        for p in probs:
            acc += p
            cum.append(acc)
        self.cum = tuple(cum)
        self._hash = hash((tokens, probs))

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[int, float]], tolerance: float = SUM_TOLERANCE
    ) -> "Distribution":
        """Canonicalize (token, prob) pairs: drop zeros, sort, renormalize.

        The probability sum must already be within `tolerance` of 1; the
        exact sum is then divided out so both sides of a session agree
        bit-for-bit on the stored doubles.
        """
        kept = [(t, p) for t, p in pairs if p > 0.0]
        if not kept:
            raise ParameterError("distribution has no positive-probability tokens")
        for t, p in kept:
            if t < 0:
                raise ParameterError(f"negative token id {t}")
            if p < 0.0 or math.isnan(p):
                raise ParameterError(f"invalid probability {p} for token {t}")
        kept.sort(key=lambda e: (-e[1], e[0]))
        tokens = tuple(t for t, _ in kept)
        if len(set(tokens)) != len(tokens):
            raise ParameterError("duplicate token ids in distribution")
        total = math.fsum(p for _, p in kept)
        if abs(total - 1.0) > tolerance:
            raise ParameterError(f"probabilities sum to {total!r}, not 1")
        if total != 1.0:
            probs = tuple(p / total for _, p in kept)
        else:
            probs = tuple(p for _, p in kept)
        return cls(tokens, probs)

    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.tokens, self.probs))

    def entropy_bits(self) -> float:
        return -sum(p * math.log2(p) for p in self.probs if p > 0.0)

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Distribution)
            and self.tokens == other.tokens
            and self.probs == other.probs
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{t}:{p:.6g}" for t, p in zip(self.tokens, self.probs))
        return f"Distribution({inner})"


class SourceModel(ABC):
    """Deterministic conditional next-token source over a finite alphabet."""

    alphabet_size: int

    @abstractmethod
    def distribution(self, context: Sequence[int]) -> Distribution:
        """Canonical next-token table for a context assumed valid."""


def next_token_dist(model: SourceModel, context: Sequence[int]) -> Distribution:
    """Validated lookup: rejects contexts with out-of-alphabet tokens."""
    v = model.alphabet_size
    for tok in context:
        if not 0 <= tok < v:
            raise ContextError(f"token {tok} outside alphabet of size {v}")
    return model.distribution(context)


def inv_cdf(dist: Distribution, r: float) -> int:
    """Token owning the half-open interval [cum_{j-1}, cum_j) containing r."""
    if not 0.0 <= r < 1.0:
        raise ParameterError(f"r={r!r} outside [0, 1)")
    j = bisect.bisect_right(dist.cum, r)
    if j >= len(dist.tokens):  # r beyond last cumulative due to rounding
        j = len(dist.tokens) - 1
    return dist.tokens[j]


@lru_cache(maxsize=65536)
def _truncate(dist: Distribution, p: float) -> Distribution:
    cut = bisect.bisect_left(dist.cum, p) + 1
    if cut >= len(dist.tokens):
        return dist
    total = dist.cum[cut - 1]
    # Renormalization can merge near-equal probabilities into exact ties,
    # so the canonical (descending prob, ascending id) order is re-imposed.
    pairs = sorted(
        zip(dist.tokens[:cut], (q / total for q in dist.probs[:cut])),
        key=lambda e: (-e[1], e[0]),
    )
    return Distribution(
        tuple(t for t, _ in pairs), tuple(q for _, q in pairs)
    )


def truncate_top_p(dist: Distribution, p: float) -> Distribution:
    """Nucleus truncation: shortest canonical prefix with cumulative >= p.

    The kept probabilities are renormalized by their exact sum; p = 1
    returns the distribution unchanged.
    """
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"top-p must be in (0, 1], got {p!r}")
    return _truncate(dist, p)


class UniformModel(SourceModel):
    """Uniform next-token distribution regardless of context."""

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise ParameterError("alphabet size must be >= 1")
        self.alphabet_size = alphabet_size
        p = 1.0 / alphabet_size
        self._dist = Distribution(tuple(range(alphabet_size)), (p,) * alphabet_size)

    def distribution(self, context: Sequence[int]) -> Distribution:
        return self._dist


class MarkovModel(SourceModel):
    """First-order chain: the distribution depends on the last context token.

    `transitions` is a row-stochastic table (one row per state); `initial`
    is the row used for the empty context.
    """

    def __init__(
        self,
        transitions: Sequence[Sequence[float]],
        initial: Sequence[float],
    ):
        v = len(transitions)
        if v < 1:
            raise ParameterError("transition table must have at least one row")
        if any(len(row) != v for row in transitions) or len(initial) != v:
            raise ParameterError("transition rows and initial row must have length V")
        self.alphabet_size = v
        self._rows = tuple(
            Distribution.from_pairs(enumerate(row)) for row in transitions
        )
        self._initial = Distribution.from_pairs(enumerate(initial))

    def distribution(self, context: Sequence[int]) -> Distribution:
        if len(context) == 0:
            return self._initial
        return self._rows[context[-1]]


class FixedTableModel(SourceModel):
    """Explicit context -> distribution map with a default fallback row.

    Unknown contexts fall back to the default row so that small
    hand-written tables can drive arbitrarily long generations.
    """

    def __init__(
        self,
        table: Mapping[Tokens, Sequence[float]],
        default: Sequence[float],
        alphabet_size: int,
    ):
        if alphabet_size < 1:
            raise ParameterError("alphabet size must be >= 1")
        self.alphabet_size = alphabet_size
        self._table = {
            tuple(ctx): Distribution.from_pairs(enumerate(row))
            for ctx, row in table.items()
        }
        self._default = Distribution.from_pairs(enumerate(default))

    def distribution(self, context: Sequence[int]) -> Distribution:
        return self._table.get(tuple(context), self._default)


class CachedModel(SourceModel):
    """Context-keyed memo wrapper; observationally identical to the inner model.

    Safe for concurrent readers; insertions are serialized.  `hits` and
    `misses` count lookups for instrumentation.
    """

    def __init__(self, inner: SourceModel):
        self.inner = inner
        self.alphabet_size = inner.alphabet_size
        self.hits = 0
        self.misses = 0
        self._cache: dict[Tokens, Distribution] = {}
        self._lock = threading.Lock()

    def distribution(self, context: Sequence[int]) -> Distribution:
        key = tuple(context)
        found = self._cache.get(key)
        if found is not None:
            with self._lock:
                self.hits += 1
            return found
        with self._lock:
            found = self._cache.get(key)
            if found is not None:
                self.hits += 1
                return found
            dist = self.inner.distribution(key)
            self._cache[key] = dist
            self.misses += 1
            return dist


def cached(model: SourceModel) -> CachedModel:
    """Wrap a model with a context-keyed distribution cache."""
    return CachedModel(model)
