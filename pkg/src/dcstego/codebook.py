"""Per-block candidate generation from tagged randomness.

Each block independently generates k candidate sequences of block_len tokens by
inverse-CDF sampling of the (top-p truncated) model, driven by the
CODEBOOK substream.  Candidate i at step t always reads the value tagged
(block_index, i, t), so construction order cannot change the result.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError
from .model import SourceModel, Tokens, _truncate, inv_cdf
from .randomness import KeyedValues, Seed


@dataclass(frozen=True)
class Codebook:
    """k candidate sequences with per-distinct-sequence multiplicities."""

    entries: tuple[Tokens, ...]
    multiplicity: dict[Tokens, int]

    @property
    def k(self) -> int:
        return len(self.entries)

    def distinct(self) -> list[Tokens]:
        """Distinct sequences in first-occurrence order."""
        return list(self.multiplicity)


def _check_args(k: int, block_len: int, top_p: float) -> None:
    if k < 1:
        raise ParameterError("k must be >= 1")
    if block_len < 1:
        raise ParameterError("block length must be >= 1")
    if not 0.0 < top_p <= 1.0:
        raise ParameterError(f"top-p must be in (0, 1], got {top_p!r}")


def _assemble(candidates: list[Tokens]) -> Codebook:
    multiplicity: dict[Tokens, int] = {}
    for seq in candidates:
        multiplicity[seq] = multiplicity.get(seq, 0) + 1
    return Codebook(entries=tuple(candidates), multiplicity=multiplicity)


def construct_codebook(
    model: SourceModel,
    history: Sequence[int],
    k: int,
    block_len: int,
    top_p: float,
    seed: Seed,
    block_index: int,
) -> Codebook:
    """Generate candidates one at a time, each restarting from `history`."""
    _check_args(k, block_len, top_p)
    values = KeyedValues(seed)
    base = list(history)
    candidates: list[Tokens] = []
    for i in range(k):
        ctx = list(base)
        seq: list[int] = []
        for t in range(block_len):
            dist = _truncate(model.distribution(ctx), top_p)
            token = inv_cdf(dist, values.codebook_value(block_index, i, t))
            seq.append(token)
            ctx.append(token)
        candidates.append(tuple(seq))
    return _assemble(candidates)


def construct_codebook_batched(
    model: SourceModel,
    history: Sequence[int],
    k: int,
    block_len: int,
    top_p: float,
    seed: Seed,
    block_index: int,
) -> Codebook:
    """Step-synchronized construction coalescing shared-prefix queries.

    At each step, candidates that share a generated prefix share a context,
    so the model is queried once per distinct prefix.  Output is
    byte-identical to construct_codebook.
    """
    _check_args(k, block_len, top_p)
    rand = KeyedValues(seed).codebook_block(block_index, k, block_len)
    plain = top_p >= 1.0
    # Group candidates by generated prefix; each group carries one full
    # context list, copied only when the group splits.
    base = list(history)
    groups: dict[Tokens, tuple[list[int], list[int]]] = {(): (list(range(k)), base)}
    t = 0
    while t < block_len and len(groups) < k:
        next_groups: dict[Tokens, tuple[list[int], list[int]]] = {}
        for prefix, (members, ctx) in groups.items():
            dist = model.distribution(ctx)
            if not plain:
                dist = _truncate(dist, top_p)
            cum = dist.cum
            tokens = dist.tokens
            last = len(tokens) - 1
            split: dict[int, list[int]] = {}
            for i in members:
                j = bisect_right(cum, rand[i][t])
                split.setdefault(tokens[j if j <= last else last], []).append(i)
            first = True
            for token, sub in split.items():
                if first:
                    ctx.append(token)
                    next_groups[prefix + (token,)] = (sub, ctx)
                    first = False
                else:
                    next_groups[prefix + (token,)] = (sub, ctx[:-1] + [token])
        groups = next_groups
        t += 1
    candidates: list[Tokens] = [()] * k
    model_dist = model.distribution
    for prefix, (members, ctx) in groups.items():
        if t == block_len:  # fully generated during the shared phase
            for i in members:
                candidates[i] = prefix
            continue
        i = members[0]  # once groups == k every group is a singleton
        row = rand[i]
        seq = list(prefix)
        for step in range(t, block_len):
            dist = model_dist(ctx)
            if not plain:
                dist = _truncate(dist, top_p)
            cum = dist.cum
            j = bisect_right(cum, row[step])
            token = dist.tokens[j if j < len(cum) else len(cum) - 1]
            seq.append(token)
            ctx.append(token)
        candidates[i] = tuple(seq)
    return _assemble(candidates)
