"""Request loop and response shaping shared by all responders.

Responses always carry the request id; malformed input produces an error
response (id echoed when recoverable) instead of killing the process.
Distributions are canonicalized here: descending probability, ties broken
by ascending token id, zero entries dropped, sum within 1e-6 of 1.
"""

from __future__ import annotations

import json
import sys
from typing import Iterable

SUM_TOLERANCE = 1e-6


def canonical_pairs(pairs: Iterable[tuple[int, float]]) -> tuple[list[int], list[float]]:
    kept = sorted(
        ((t, p) for t, p in pairs if p > 0.0),
        key=lambda e: (-e[1], e[0]),
    )
    if not kept:
        raise ValueError("distribution has no positive entries")
    total = sum(p for _, p in kept)
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValueError(f"probabilities sum to {total!r}")
    return [t for t, _ in kept], [p for _, p in kept]


def apply_top_p(tokens: list[int], probs: list[float], top_p: float):
    """Server-side nucleus cut on an already-canonical table."""
    if top_p >= 1.0:
        return tokens, probs
    acc = 0.0
    cut = len(tokens)
    for index, p in enumerate(probs):
        acc += p
        if acc >= top_p:
            cut = index + 1
            break
    kept = probs[:cut]
    total = sum(kept)
    return tokens[:cut], [p / total for p in kept]


class Responder:
    """Model-specific behaviour plugged into the request loop."""

    name = "responder"
    alphabet = 0

    def dist(self, ctx: list[int], top_p: float) -> tuple[list[int], list[float]]:
        raise NotImplementedError

    def tokenize(self, text: str) -> list[int]:
        raise NotImplementedError

    def detokenize(self, tokens: list[int]) -> str:
        raise NotImplementedError


def _handle(responder: Responder, request: dict) -> dict:
    op = request.get("op")
    if op == "info":
        return {"alphabet": responder.alphabet, "name": responder.name}
    if op == "dist":
        ctx = request.get("ctx", [])
        if not isinstance(ctx, list) or any(
            not isinstance(t, int) or not 0 <= t < responder.alphabet for t in ctx
        ):
            return {"error": f"invalid context for alphabet {responder.alphabet}"}
        top_p = float(request.get("top_p", 1.0))
        if not 0.0 < top_p <= 1.0:
            return {"error": f"top_p {top_p} outside (0, 1]"}
        tokens, probs = responder.dist(ctx, top_p)
        return {"tokens": tokens, "probs": probs}
    if op == "tokenize":
        text = request.get("text")
        if not isinstance(text, str):
            return {"error": "tokenize needs a text field"}
        try:
            return {"tokens": responder.tokenize(text)}
        except ValueError as exc:
            return {"error": str(exc)}
    if op == "detokenize":
        ctx = request.get("ctx")
        if not isinstance(ctx, list):
            return {"error": "detokenize needs a ctx field"}
        return {"text": responder.detokenize(ctx)}
    return {"error": f"unknown op {op!r}"}


def run_responder(
    responder: Responder,
    stdin=None,
    stdout=None,
    die_after: int | None = None,
) -> None:
    """Serve until end of input; `die_after` aborts after N requests (tests)."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    served = 0
    for line in stdin:
        if not line.strip():
            continue
        if die_after is not None and served >= die_after:
            return
        request_id = None
        try:
            request = json.loads(line)
            if isinstance(request, dict):
                request_id = request.get("id")
                response = _handle(responder, request)
            else:
                response = {"error": "request must be a JSON object"}
        except json.JSONDecodeError as exc:
            response = {"error": f"malformed JSON: {exc}"}
        except Exception as exc:  # never die mid-protocol
            response = {"error": f"internal: {exc}"}
        response["id"] = request_id
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        served += 1
