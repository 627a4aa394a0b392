"""Table-backed responder for protocol conformance testing without weights.

Reads the codec's model-definition format (the [model] section of its
config files; uniform, markov, and table kinds) with an independent
parser, and answers dist requests from the parsed rows.  Tokens are their
own text form: tokenize splits decimal ids on whitespace and detokenize
joins them, which round-trips exactly.

Run as:  python -m lmbridge.mock --table MODEL_FILE [--die-after N]
"""

from __future__ import annotations

import argparse
import sys

from .protocol import Responder, apply_top_p, canonical_pairs, run_responder


def parse_model_file(text: str) -> dict:
    fields: list[tuple[str, str]] = []
    in_model = False
    seen_section = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            seen_section = True
            in_model = line[1:-1].strip().lower() == "model"
            continue
        if not seen_section:
            in_model = True  # bare table files need no section header
        if in_model and ":" in line:
            key, value = line.split(":", 1)
            fields.append((key.strip().lower(), value.strip()))
    plain = dict(fields)
    kind = plain.get("kind", "table")
    alphabet = int(plain.get("alphabet", 0))
    spec = {"kind": kind, "alphabet": alphabet}
    if kind == "uniform":
        return spec
    if kind == "markov":
        rows = {}
        for key, value in fields:
            if key.startswith("row "):
                rows[int(key[4:])] = [float(x) for x in value.split()]
        spec["rows"] = [rows[i] for i in range(alphabet)]
        spec["initial"] = [float(x) for x in plain["initial"].split()]
        return spec
    if kind == "table":
        contexts = {}
        for key, value in fields:
            if key == "ctx" or key.startswith("ctx "):
                ctx = tuple(int(t) for t in key[3:].split())
                contexts[ctx] = [float(x) for x in value.split()]
        spec["contexts"] = contexts
        spec["default"] = [float(x) for x in plain["default"].split()]
        return spec
    raise ValueError(f"mock cannot serve model kind {kind!r}")


class TableResponder(Responder):
    def __init__(self, spec: dict):
        self._spec = spec
        self.alphabet = spec["alphabet"]
        self.name = f"mock-{spec['kind']}"

    def _row(self, ctx: list[int]) -> list[float]:
        spec = self._spec
        if spec["kind"] == "uniform":
            return [1.0 / self.alphabet] * self.alphabet
        if spec["kind"] == "markov":
            return spec["initial"] if not ctx else spec["rows"][ctx[-1]]
        return spec["contexts"].get(tuple(ctx), spec["default"])

    def dist(self, ctx: list[int], top_p: float):
        tokens, probs = canonical_pairs(enumerate(self._row(ctx)))
        return apply_top_p(tokens, probs, top_p)

    def tokenize(self, text: str) -> list[int]:
        out = []
        for piece in text.split():
            token = int(piece)
            if not 0 <= token < self.alphabet:
                raise ValueError(f"token {token} outside alphabet")
            out.append(token)
        return out

    def detokenize(self, tokens: list[int]) -> str:
        return " ".join(str(t) for t in tokens)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="mock stdio model responder")
    parser.add_argument("--table", required=True, help="model definition file")
    parser.add_argument("--die-after", type=int, default=None,
                        help="abort after N requests (failure-injection)")
    args = parser.parse_args(argv)
    with open(args.table, "r", encoding="utf-8") as fh:
        spec = parse_model_file(fh.read())
    run_responder(TableResponder(spec), die_after=args.die_after)
    return 0


if __name__ == "__main__":
    sys.exit(main())
