"""Edit-error-resilient steganography via distance-constrained codebooks.

Hidden bits select among candidate token sequences regenerated from a
shared secret; candidates closer than a distance threshold encode the
same bits, so the decoder's minimum-distance rule absorbs insertions,
deletions, and substitutions up to the designed margin while the output
stays distributed exactly like ordinary model samples.
"""

from .channel import ChannelSpec, apply_channel, perturb_tokens
from .codebook import Codebook, construct_codebook, construct_codebook_batched
from .codec import (
    CodecParams,
    DecodeResult,
    Transcript,
    decode,
    encode,
    encode_single_block,
    select_sequence,
)
from .coding import PrefixCodebook, allocate, unit_match
from .distance import (
    EXCEEDS,
    Alignment,
    best_prefix_alignment,
    levenshtein,
    levenshtein_bounded,
)
from .errors import (
    BridgeError,
    ContextError,
    FrameError,
    LivelockError,
    ParameterError,
    StegoError,
)
from .grouping import Partition, group
from .model import (
    CachedModel,
    Distribution,
    FixedTableModel,
    MarkovModel,
    SourceModel,
    UniformModel,
    cached,
    inv_cdf,
    next_token_dist,
    truncate_top_p,
)
from .randomness import PadStream, Phase, Seed, StreamTag, pad_bits, stream_value

__all__ = [
    "Alignment",
    "BridgeError",
    "CachedModel",
    "ChannelSpec",
    "Codebook",
    "CodecParams",
    "ContextError",
    "DecodeResult",
    "Distribution",
    "EXCEEDS",
    "FixedTableModel",
    "FrameError",
    "LivelockError",
    "MarkovModel",
    "ParameterError",
    "Partition",
    "PadStream",
    "Phase",
    "PrefixCodebook",
    "Seed",
    "SourceModel",
    "StegoError",
    "StreamTag",
    "Transcript",
    "UniformModel",
    "allocate",
    "apply_channel",
    "best_prefix_alignment",
    "cached",
    "construct_codebook",
    "construct_codebook_batched",
    "decode",
    "encode",
    "encode_single_block",
    "group",
    "inv_cdf",
    "levenshtein",
    "levenshtein_bounded",
    "next_token_dist",
    "pad_bits",
    "perturb_tokens",
    "select_sequence",
    "stream_value",
    "truncate_top_p",
    "unit_match",
]

__version__ = "0.1.0"
