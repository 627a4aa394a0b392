"""Edit-error channels and structured token-level perturbations.

The IID channel performs at most one basic edit per input position, each
with probability e, so the expected edit distance is bounded by e*n.  The
clustered mode draws the same number of edited positions but packs them
into contiguous runs.  Channel randomness is seeded independently of the
codec secret.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ParameterError
from .model import Tokens

IID = "iid"
CLUSTERED = "clustered"

NEAR_SUB = "near_sub"
GHOST_INSERT = "ghost_insert"
SPLIT_MERGE = "split_merge"


@dataclass(frozen=True)
class ChannelSpec:
    error_rate: float
    alphabet_size: int
    mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)  # (ins, del, sub)
    mode: str = IID
    run_length: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.error_rate <= 1.0:
            raise ParameterError("error rate must be in [0, 1]")
        if self.alphabet_size < 2:
            raise ParameterError("channel needs an alphabet of size >= 2")
        if len(self.mix) != 3 or any(p < 0 for p in self.mix):
            raise ParameterError("mix must be three nonnegative weights")
        if abs(sum(self.mix) - 1.0) > 1e-9:
            raise ParameterError("mix must sum to 1")
        if self.mode not in (IID, CLUSTERED):
            raise ParameterError(f"unknown channel mode {self.mode!r}")
        if self.mode == CLUSTERED and self.run_length < 1:
            raise ParameterError("run length must be >= 1")


def _edit_positions(n: int, spec: ChannelSpec, rng: random.Random) -> list[bool]:
    flags = [rng.random() < spec.error_rate for _ in range(n)]
    if spec.mode == IID or n == 0:
        return flags
    # Clustered: same edit count, packed into runs of run_length at random
    # starts (non-overlapping while space allows).
    count = sum(flags)
    marked = [False] * n
    remaining = count
    attempts = 0
    while remaining > 0 and attempts < 16 * n + 16:
        attempts += 1
        run = min(spec.run_length, remaining)
        start = rng.randrange(0, max(1, n - run + 1))
        if any(marked[start : start + run]):
            continue
        for j in range(start, start + run):
            marked[j] = True
        remaining -= run
    if remaining > 0:  # fall back to any free slots
        for j in range(n):
            if remaining == 0:
                break
            if not marked[j]:
                marked[j] = True
                remaining -= 1
    return marked


def apply_channel(x: Sequence[int], spec: ChannelSpec) -> Tokens:
    """One pass over the input, editing each marked position once."""
    rng = random.Random(spec.rng_seed)
    n = len(x)
    marked = _edit_positions(n, spec, rng)
    p_ins, p_del, _ = spec.mix
    v = spec.alphabet_size
    out: list[int] = []
    for pos, token in enumerate(x):
        if not marked[pos]:
            out.append(token)
            continue
        roll = rng.random()
        if roll < p_ins:
            out.append(rng.randrange(v))  # insert before the position
            out.append(token)
        elif roll < p_ins + p_del:
            pass  # delete
        else:
            other = rng.randrange(v - 1)  # substitute with a different token
            out.append(other if other < token else other + 1)
    return tuple(out)


def perturb_tokens(
    x: Sequence[int],
    kind: str,
    budget: float,
    *,
    alphabet_size: int,
    invisible_ids: Sequence[int] = (),
    expansions: Mapping[int, tuple[int, int]] | None = None,
    rng_seed: int = 0,
) -> Tokens:
    """Structured perturbations, each touching at most budget*n tokens.

    near_sub nudges token ids by one; ghost_insert inserts ids from a
    designated invisible subset; split_merge expands single tokens to the
    two-token forms of a supplied table.
    """
    if not 0.0 <= budget <= 0.1:
        raise ParameterError("budget must be in [0, 0.1]")
    if kind not in (NEAR_SUB, GHOST_INSERT, SPLIT_MERGE):
        raise ParameterError(f"unknown perturbation kind {kind!r}")
    if kind == GHOST_INSERT and not invisible_ids:
        raise ParameterError("ghost_insert needs a non-empty invisible id set")
    if kind == SPLIT_MERGE and not expansions:
        raise ParameterError("split_merge needs a non-empty expansion table")
    rng = random.Random(rng_seed)
    n = len(x)
    limit = int(budget * n)
    out = list(x)
    if limit == 0 or n == 0:
        return tuple(out)
    if kind == NEAR_SUB:
        for pos in sorted(rng.sample(range(n), limit)):
            token = out[pos]
            candidates = [t for t in (token - 1, token + 1) if 0 <= t < alphabet_size]
            if candidates:
                out[pos] = rng.choice(candidates)
        return tuple(out)
    if kind == GHOST_INSERT:
        positions = sorted(rng.sample(range(n + 1), min(limit, n + 1)), reverse=True)
        for pos in positions:
            out.insert(pos, rng.choice(list(invisible_ids)))
        return tuple(out)
    eligible = [pos for pos, token in enumerate(x) if token in expansions]
    rng.shuffle(eligible)
    chosen = sorted(eligible[:limit], reverse=True)
    for pos in chosen:
        a, b = expansions[x[pos]]
        out[pos : pos + 1] = [a, b]
    return tuple(out)
