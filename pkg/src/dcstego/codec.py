"""Block-wise encoder and sliding-window minimum-distance decoder.

Per block, both ends rebuild the same candidate codebook from the shared
seed, partition it, and allocate prefix codes.  The encoder routes the
next message bits to a group and emits a concrete member chosen by one
shared SELECT value; the decoder finds the candidate nearest the received
window, recovers the group's code, re-selects the member the encoder
actually emitted (keeping histories synchronized even when the carrier
was corrupted), and advances by the matched window length.

Framing is a 32-bit big-endian payload bit-length header; the bit stream
is extended with deterministic PAD bits whenever a block needs to peek
past the end of the framed message.  Peeked bits beyond a block's
consumed prefix are re-read by the next block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codebook import Codebook, construct_codebook_batched
from .coding import PrefixCodebook, allocate, unit_match
from .distance import pairwise_capped, prefix_distance_rows
from .errors import FrameError, LivelockError, ParameterError
from .grouping import Partition, group
from .model import SourceModel, Tokens, _truncate
from .randomness import KeyedValues, PadStream, Seed

HEADER_BITS = 32


@dataclass(frozen=True)
class CodecParams:
    """Shared configuration both ends must agree on."""

    distance_threshold: int
    codebook_size: int
    block_len: int
    window: int
    top_p: float
    seed: Seed
    max_blocks: int | None = None

    def __post_init__(self):
        k = self.codebook_size
        if k < 1 or k & (k - 1):
            raise ParameterError(f"codebook size must be a power of two, got {k}")
        if not 0 <= self.distance_threshold < self.block_len:
            raise ParameterError(
                f"need 0 <= distance threshold < block length, got "
                f"{self.distance_threshold} vs {self.block_len}"
            )
        if not 0 <= self.window <= self.block_len:
            raise ParameterError("window must be in [0, block length]")
        if not 0.0 < self.top_p <= 1.0:
            raise ParameterError(f"top-p must be in (0, 1], got {self.top_p!r}")
        if self.max_blocks is not None and self.max_blocks < 1:
            raise ParameterError("max_blocks must be >= 1")

    @property
    def ell(self) -> int:
        return self.codebook_size.bit_length() - 1

    def default_max_blocks(self, framed_bits: int) -> int:
        per_block = max(1, self.ell)
        return 16 * max(1, -(-framed_bits // per_block))


def frame_secret(payload_bits: str) -> str:
    """Prepend the 32-bit big-endian payload bit length."""
    if len(payload_bits) >= 1 << HEADER_BITS:
        raise ParameterError("payload too long for the 32-bit length header")
    if any(c not in "01" for c in payload_bits):
        raise ParameterError("payload must be a string of 0/1 characters")
    return format(len(payload_bits), f"0{HEADER_BITS}b") + payload_bits


class SecretBuffer:
    """Framed bit stream with a cursor, padded on demand from a PAD stream."""

    def __init__(self, framed: str, pad: PadStream):
        self._bits = framed
        self._framed_len = len(framed)
        self._pad = pad
        self.cursor = 0

    def peek(self, count: int) -> str:
        short = self.cursor + count - len(self._bits)
        if short > 0:
            self._bits += self._pad.take(short)
        return self._bits[self.cursor : self.cursor + count]

    def consume(self, count: int) -> None:
        self.cursor += count

    @property
    def done(self) -> bool:
        return self.cursor >= self._framed_len

    @property
    def framed_len(self) -> int:
        return self._framed_len


@dataclass
class BlockRecord:
    block_index: int
    group_count: int
    group_id: int
    consumed: str
    chosen: Tokens
    d_min: int | None
    step_entropies: tuple[float, ...] = ()


@dataclass
class Transcript:
    """Optional per-block log collected during encoding."""

    blocks: list[BlockRecord] = field(default_factory=list)

    def total_consumed_bits(self) -> int:
        return sum(len(b.consumed) for b in self.blocks)

    def total_entropy_bits(self) -> float:
        return sum(sum(b.step_entropies) for b in self.blocks)

    def d_min_values(self) -> list[int]:
        return [b.d_min for b in self.blocks if b.d_min is not None]


def build_block(
    model: SourceModel, history: Sequence[int], params: CodecParams, block_index: int
) -> tuple[Codebook, Partition, PrefixCodebook]:
    """Codebook, partition, and prefix codes for one block."""
    codebook = construct_codebook_batched(
        model,
        history,
        params.codebook_size,
        params.block_len,
        params.top_p,
        params.seed,
        block_index,
    )
    partition = group(codebook, params.distance_threshold)
    pcb = allocate(partition, params.codebook_size)
    return codebook, partition, pcb


def _merged_member_weights(
    partition: Partition, pcb: PrefixCodebook, codebook: Codebook, rep: int
) -> list[tuple[Tokens, int]]:
    """Distinct member sequences of a (merged) group with multiplicities.

    Ordered by descending weight, ties by ascending sequence, mirroring the
    canonical distribution order.
    """
    weights: dict[Tokens, int] = {}
    for gid, members in enumerate(partition.groups):
        if pcb.merged[gid] != rep:
            continue
        for index in members:
            seq = codebook.entries[index]
            weights[seq] = weights.get(seq, 0) + 1
    return sorted(weights.items(), key=lambda e: (-e[1], e[0]))


def _choose_member(members: list[tuple[Tokens, int]], value: float) -> Tokens:
    """Inverse-CDF over multiplicity weights driven by one SELECT value."""
    total = sum(w for _, w in members)
    target = value * total
    acc = 0
    for seq, weight in members:
        acc += weight
        if acc > target:
            return seq
    return members[-1][0]


def select_sequence(
    partition: Partition,
    pcb: PrefixCodebook,
    codebook: Codebook,
    secret: SecretBuffer,
    seed: Seed,
    block_index: int,
) -> tuple[Tokens, str, int]:
    """Route head bits to a group, pick its member, consume the group code."""
    head = secret.peek(pcb.ell)
    rep, code = unit_match(pcb, head)
    members = _merged_member_weights(partition, pcb, codebook, rep)
    chosen = _choose_member(members, KeyedValues(seed).select_value(block_index))
    secret.consume(len(code))
    return chosen, code, rep


@dataclass
class BlockOutcome:
    """Result of encoding a single stand-alone block (evaluation helper)."""

    chosen: Tokens
    group_id: int
    consumed: str
    codebook: Codebook
    partition: Partition
    pcb: PrefixCodebook


def encode_single_block(
    model: SourceModel,
    history: Sequence[int],
    head_bits: str,
    params: CodecParams,
    block_index: int = 0,
) -> BlockOutcome:
    """One unframed block: route `head_bits`, emit the selected member."""
    codebook, partition, pcb = build_block(model, history, params, block_index)
    if len(head_bits) < pcb.ell:
        raise ParameterError(f"need {pcb.ell} head bits, got {len(head_bits)}")
    rep, code = unit_match(pcb, head_bits)
    members = _merged_member_weights(partition, pcb, codebook, rep)
    chosen = _choose_member(
        members, KeyedValues(params.seed).select_value(block_index)
    )
    return BlockOutcome(chosen, rep, code, codebook, partition, pcb)


def _record_block(
    transcript: Transcript,
    model: SourceModel,
    history_before: list[int],
    params: CodecParams,
    block_index: int,
    codebook: Codebook,
    partition: Partition,
    pcb: PrefixCodebook,
    rep: int,
    code: str,
    chosen: Tokens,
) -> None:
    merged_of = pcb.merged
    own = rep
    others = [
        seq
        for gid, members in enumerate(partition.groups)
        if merged_of[gid] != own
        for seq in {codebook.entries[i] for i in members}
    ]
    d_min = None
    if others:
        arr = np.asarray(others, dtype=np.int64)
        chosen_arr = np.broadcast_to(
            np.asarray(chosen, dtype=np.int64), arr.shape
        )
        cap = params.block_len + 1
        d_min = int(pairwise_capped(chosen_arr, arr, cap).min())
    ctx = list(history_before)
    entropies = []
    for tok in chosen:
        dist = _truncate(model.distribution(ctx), params.top_p)
        entropies.append(dist.entropy_bits())
        ctx.append(tok)
    transcript.blocks.append(
        BlockRecord(
            block_index=block_index,
            group_count=partition.count,
            group_id=rep,
            consumed=code,
            chosen=chosen,
            d_min=d_min,
            step_entropies=tuple(entropies),
        )
    )


def encode(
    model: SourceModel,
    history: Sequence[int],
    secret_bits: str,
    params: CodecParams,
    transcript: Transcript | None = None,
) -> Tokens:
    """Embed `secret_bits` (a 0/1 string) into a generated token sequence."""
    if not secret_bits:
        raise ParameterError("secret must be non-empty")
    framed = frame_secret(secret_bits)
    secret = SecretBuffer(framed, PadStream(params.seed))
    max_blocks = params.max_blocks or params.default_max_blocks(len(framed))
    values = KeyedValues(params.seed)
    out: list[int] = []
    hist = list(history)
    block_index = 0
    while not secret.done:
        if block_index >= max_blocks:
            raise LivelockError(block_index, secret.cursor)
        codebook, partition, pcb = build_block(model, hist, params, block_index)
        head = secret.peek(pcb.ell)
        rep, code = unit_match(pcb, head)
        members = _merged_member_weights(partition, pcb, codebook, rep)
        chosen = _choose_member(members, values.select_value(block_index))
        secret.consume(len(code))
        if transcript is not None:
            _record_block(
                transcript, model, hist, params, block_index,
                codebook, partition, pcb, rep, code, chosen,
            )
        out.extend(chosen)
        hist.extend(chosen)
        block_index += 1
    return tuple(out)


@dataclass
class DecodeResult:
    payload: str
    truncated: bool
    header_value: int | None
    recovered: str
    selected: list[Tokens]
    offsets: list[int]

    @property
    def ok(self) -> bool:
        return not self.truncated


def _nearest_entry(
    codebook: Codebook, window: Tokens, params: CodecParams
) -> tuple[int, int]:
    """(candidate index, matched prefix length) of the closest codeword.

    Entries tie-break by smallest candidate index; the matched length uses
    each entry's own (distance, |L - block_len|, L) preference.
    """
    block_len = params.block_len
    slack = params.window
    exact = window[:block_len]
    if len(exact) == block_len and exact in codebook.multiplicity:
        return codebook.entries.index(exact), block_len
    distinct = codebook.distinct()
    lo = max(0, block_len - slack)
    hi = min(len(window), block_len + slack)
    if hi < lo:
        lo = hi
    rows = prefix_distance_rows(
        np.asarray(distinct, dtype=np.int64),
        np.asarray(window[:hi], dtype=np.int64),
    )
    best: dict[Tokens, tuple[int, int, int]] = {}
    for seq, row in zip(distinct, rows):
        key = min(
            (int(row[length]), abs(length - block_len), length)
            for length in range(lo, hi + 1)
        )
        best[seq] = key
    d_min = min(key[0] for key in best.values())
    for index, seq in enumerate(codebook.entries):
        key = best[seq]
        if key[0] == d_min:
            return index, key[2]
    raise AssertionError("unreachable: some entry must attain the minimum")


def decode(
    model: SourceModel,
    history: Sequence[int],
    received: Sequence[int],
    params: CodecParams,
    expected_min_bits: int | None = None,
    transcript: Transcript | None = None,
) -> DecodeResult:
    """Recover the framed payload from a (possibly corrupted) carrier."""
    values = KeyedValues(params.seed)
    received = tuple(received)
    block_len = params.block_len
    slack = params.window
    bits = ""
    hist = list(history)
    selected: list[Tokens] = []
    offsets: list[int] = []
    pos = 0
    block_index = 0
    while pos < len(received):
        codebook, partition, pcb = build_block(model, hist, params, block_index)
        window = received[pos : pos + block_len + slack]
        index, matched_len = _nearest_entry(codebook, window, params)
        rep = pcb.merged[partition.group_of[index]]
        members = _merged_member_weights(partition, pcb, codebook, rep)
        resynced = _choose_member(members, values.select_value(block_index))
        code = pcb.codes[rep]
        bits += code
        hist.extend(resynced)
        selected.append(resynced)
        offsets.append(matched_len - block_len)
        pos += max(1, matched_len)
        block_index += 1
        if len(bits) >= HEADER_BITS:
            header = int(bits[:HEADER_BITS], 2)
            want = max(header, expected_min_bits or 0)
            if len(bits) - HEADER_BITS >= want:
                break
    return _strip_frame(bits, params, selected, offsets)


def _strip_frame(
    bits: str, params: CodecParams, selected: list[Tokens], offsets: list[int]
) -> DecodeResult:
    if len(bits) < HEADER_BITS:
        return DecodeResult(
            payload="", truncated=True, header_value=None,
            recovered=bits, selected=selected, offsets=offsets,
        )
    header = int(bits[:HEADER_BITS], 2)
    if params.max_blocks is not None and header > params.ell * params.max_blocks:
        raise FrameError(
            f"header claims {header} payload bits; at most "
            f"{params.ell * params.max_blocks} are consumable in this session"
        )
    body = bits[HEADER_BITS:]
    if len(body) >= header:
        return DecodeResult(
            payload=body[:header], truncated=False, header_value=header,
            recovered=bits, selected=selected, offsets=offsets,
        )
    return DecodeResult(
        payload=body, truncated=True, header_value=header,
        recovered=bits, selected=selected, offsets=offsets,
    )
