"""Stdio responders that expose token models to a steganographic codec.

One JSON object per line in, one per line out, strictly in request order.
The codec side keeps all sampling and truncation; responders only report
next-token distributions (canonical order, probabilities summing to 1),
tokenize/detokenize text, and advertise their alphabet.
"""

from .protocol import canonical_pairs, run_responder

__version__ = "0.1.0"

__all__ = ["canonical_pairs", "run_responder"]
