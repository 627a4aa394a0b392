"""Keyed deterministic randomness, addressable by tagged substreams.

Both ends of a session expand the same 32-byte secret into uniform values
on [0, 1).  Values are random-access: each one is addressed by a tag, so
the decoder can regenerate exactly the values the encoder consumed even
though it evaluates them in a different order.

Tag wire layout (normative, so independent implementations agree):

    1 byte  phase        (CODEBOOK=0, SELECT=1, PAD=2)
    8 bytes block_index  (big-endian)
    8 bytes i            (candidate index; 0 outside CODEBOOK)
    8 bytes t            (step index;      0 outside CODEBOOK)
    8 bytes counter      (per-call counter; 0 outside PAD)

A value is the top 52 bits of BLAKE2b(key=seed, data=tag, digest=8 bytes),
divided by 2**52, which is exactly representable as a double.

Exactly one SELECT value is consumed per block (counter fixed at 0); the
PAD substream uses block_index 0 and advances its counter per value.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from enum import IntEnum

from .errors import ParameterError

SEED_BYTES = 32
_TAG = struct.Struct(">BQQQQ")
_SCALE = 2.0 ** -52


class Phase(IntEnum):
    CODEBOOK = 0
    SELECT = 1
    PAD = 2


@dataclass(frozen=True)
class Seed:
    """A 32-byte shared secret, compared for equality only."""

    key: bytes

    def __post_init__(self):
        if not isinstance(self.key, bytes) or len(self.key) != SEED_BYTES:
            raise ParameterError(f"seed must be exactly {SEED_BYTES} bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Seed":
        text = text.strip()
        if len(text) != 2 * SEED_BYTES:
            raise ParameterError(f"seed hex must be {2 * SEED_BYTES} characters")
        return cls(bytes.fromhex(text))

    @property
    def hex(self) -> str:
        return self.key.hex()

    def derive_child(self, index: int) -> "Seed":
        """Derive an independent 32-byte seed for trial `index`."""
        child = hashlib.blake2b(
            index.to_bytes(8, "big"), key=self.key, digest_size=SEED_BYTES
        ).digest()
        return Seed(child)


@dataclass(frozen=True)
class StreamTag:
    phase: Phase
    block_index: int
    i: int = 0
    t: int = 0
    counter: int = 0

    def encode(self) -> bytes:
        return _TAG.pack(self.phase, self.block_index, self.i, self.t, self.counter)


def stream_value(seed: Seed, tag: StreamTag) -> float:
    """Uniform value on [0, 1) addressed by (seed, tag)."""
    digest = hashlib.blake2b(tag.encode(), key=seed.key, digest_size=8).digest()
    return (int.from_bytes(digest, "big") >> 12) * _SCALE


class KeyedValues:
    """Session-side fast path over the same (seed, tag) -> value map.

    Reuses a pre-keyed hash state; outputs are bit-identical to
    stream_value on the corresponding tags.
    """

    __slots__ = ("seed", "_base", "_buf")

    def __init__(self, seed: Seed):
        self.seed = seed
        self._base = hashlib.blake2b(key=seed.key, digest_size=8)
        self._buf = bytearray(_TAG.size)

    def _raw(self, phase: int, block_index: int, i: int, t: int, counter: int) -> int:
        _TAG.pack_into(self._buf, 0, phase, block_index, i, t, counter)
        h = self._base.copy()
        h.update(self._buf)
        return int.from_bytes(h.digest(), "big") >> 12

    def _value(self, phase: int, block_index: int, i: int, t: int, counter: int) -> float:
        return self._raw(phase, block_index, i, t, counter) * _SCALE

    def codebook_value(self, block_index: int, i: int, t: int) -> float:
        return self._value(Phase.CODEBOOK, block_index, i, t, 0)

    def select_value(self, block_index: int) -> float:
        return self._value(Phase.SELECT, block_index, 0, 0, 0)

    def codebook_block(self, block_index: int, k: int, block_len: int) -> list[list[float]]:
        """All CODEBOOK values for one block, indexed [i][t]."""
        pack = _TAG.pack_into
        buf = self._buf
        copy = self._base.copy
        out = []
        for i in range(k):
            row = []
            append = row.append
            for t in range(block_len):
                pack(buf, 0, 0, block_index, i, t, 0)
                h = copy()
                h.update(buf)
                append((int.from_bytes(h.digest(), "big") >> 12) * _SCALE)
            out.append(row)
        return out


class PadStream:
    """Deterministic bit stream from the PAD substream of a seed.

    Successive take() calls continue the stream; a fresh stream for the
    same seed replays the same bits.
    """

    def __init__(self, seed: Seed):
        self._values = KeyedValues(seed)
        self._counter = 0
        self._buffer = ""

    def take(self, count: int) -> str:
        if count < 0:
            raise ParameterError("bit count must be >= 0")
        while len(self._buffer) < count:
            raw = self._values._raw(Phase.PAD, 0, 0, 0, self._counter)
            self._counter += 1
            self._buffer += format(raw, "052b")
        out, self._buffer = self._buffer[:count], self._buffer[count:]
        return out


def pad_bits(seed: Seed, count: int) -> str:
    """First `count` bits of a fresh PAD stream for `seed`."""
    return PadStream(seed).take(count)
