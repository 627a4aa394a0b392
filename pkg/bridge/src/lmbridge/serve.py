"""Real language-model responder over stdio.

Loads a causal LM and its tokenizer, reports exact next-token softmax
distributions in float64, and never samples: the codec drives all
randomness.  Determinism is inherited from fixed weights and greedy-free
evaluation (no dropout, no sampling, single-threaded requests).

Run as:  python -m lmbridge.serve --model NAME [--device cpu]
"""

from __future__ import annotations

import argparse
import sys

from .protocol import Responder, apply_top_p, canonical_pairs, run_responder


class CausalLMResponder(Responder):
    def __init__(self, model_name: str, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:
            raise SystemExit(f"serve needs torch and transformers: {exc}")
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_name)
        self._model = AutoModelForCausalLM.from_pretrained(model_name)
        self._model.to(device)
        self._model.eval()
        self._device = device
        self.name = model_name
        self.alphabet = int(self._model.config.vocab_size)

    def dist(self, ctx: list[int], top_p: float):
        torch = self._torch
        with torch.no_grad():
            if ctx:
                ids = torch.tensor([ctx], dtype=torch.long, device=self._device)
            else:
                bos = self._tokenizer.bos_token_id or 0
                ids = torch.tensor([[bos]], dtype=torch.long, device=self._device)
            logits = self._model(ids).logits[0, -1].double()
            probs = torch.softmax(logits, dim=0)
            probs = probs / probs.sum()  # exact unit sum in float64
        pairs = [(i, p) for i, p in enumerate(probs.tolist()) if p > 0.0]
        tokens, table = canonical_pairs(pairs)
        return apply_top_p(tokens, table, top_p)

    def tokenize(self, text: str) -> list[int]:
        return list(self._tokenizer.encode(text, add_special_tokens=False))

    def detokenize(self, tokens: list[int]) -> str:
        return self._tokenizer.decode(tokens)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="causal-LM stdio responder")
    parser.add_argument("--model", required=True)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)
    try:
        responder = CausalLMResponder(args.model, args.device)
    except Exception as exc:
        sys.stderr.write(f"model load failed: {exc}\n")
        return 1
    run_responder(responder)
    return 0


if __name__ == "__main__":
    sys.exit(main())
