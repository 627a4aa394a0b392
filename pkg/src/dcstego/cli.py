"""Command-line front end.

Subcommands: encode, decode, channel, bench, security, voronoi.  Every run
is reproducible from (config, seed); flags override config values.  Token
streams are decimal ids separated by single spaces, one line per message;
secrets travel as hex.

Exit codes: 0 success, 2 parameter/config error, 3 livelock,
4 truncated decode, 5 malformed frame, 6 bridge failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .channel import ChannelSpec, apply_channel
from .codec import decode, encode
from .config import Config, build_model, parse_config, serialize_config
from .errors import (
    BridgeError,
    FrameError,
    LivelockError,
    ParameterError,
    StegoError,
)
from .randomness import Seed

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_LIVELOCK = 3
EXIT_TRUNCATED = 4
EXIT_FRAME = 5
EXIT_BRIDGE = 6


def hex_to_bits(text: str) -> str:
    text = text.strip()
    if not text:
        raise ParameterError("empty secret")
    try:
        int(text, 16)
    except ValueError:
        raise ParameterError(f"secret is not hex: {text!r}") from None
    return "".join(format(int(c, 16), "04b") for c in text)


def bits_to_hex(bits: str) -> str:
    if not bits:
        return ""
    padded = bits + "0" * (-len(bits) % 4)
    return "".join(
        format(int(padded[i : i + 4], 2), "x") for i in range(0, len(padded), 4)
    )


def parse_tokens(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split())


def format_tokens(tokens) -> str:
    return " ".join(map(str, tokens)) + "\n"


def _load_config(args) -> Config:
    if not args.config:
        raise ParameterError("--config is required")
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    if getattr(args, "seed", None):
        cfg = Config(
            model=cfg.model,
            codec=replace(cfg.codec, seed=Seed.from_hex(args.seed)),
            channel=cfg.channel,
        )
    if getattr(args, "e", None) is not None:
        channel = cfg.channel or ChannelSpec(
            error_rate=0.0, alphabet_size=max(2, cfg.model.alphabet)
        )
        cfg = Config(
            model=cfg.model,
            codec=cfg.codec,
            channel=replace(channel, error_rate=args.e),
        )
    return cfg


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_encode(args) -> int:
    cfg = _load_config(args)
    model = build_model(cfg.model)
    try:
        history = parse_tokens(args.history or "")
        stego = encode(model, history, hex_to_bits(args.secret), cfg.codec)
    finally:
        if hasattr(model, "close"):
            model.close()
    _write_out(args, format_tokens(stego))
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(serialize_config(cfg))
    return EXIT_OK


def cmd_decode(args) -> int:
    cfg = _load_config(args)
    model = build_model(cfg.model)
    try:
        history = parse_tokens(args.history or "")
        if args.tokens:
            token_text = args.tokens
        elif args.infile:
            with open(args.infile, "r", encoding="utf-8") as fh:
                token_text = fh.read()
        else:
            token_text = sys.stdin.read()
        result = decode(model, history, parse_tokens(token_text), cfg.codec)
    finally:
        if hasattr(model, "close"):
            model.close()
    _write_out(args, bits_to_hex(result.payload) + "\n")
    return EXIT_TRUNCATED if result.truncated else EXIT_OK


def cmd_channel(args) -> int:
    cfg = _load_config(args)
    if cfg.channel is None:
        raise ParameterError("config has no [channel] section and no --e flag")
    if args.tokens:
        token_text = args.tokens
    else:
        token_text = sys.stdin.read()
    out = apply_channel(parse_tokens(token_text), cfg.channel)
    _write_out(args, format_tokens(out))
    return EXIT_OK


def cmd_bench(args) -> int:
    from . import evaluation

    cfg = _load_config(args)
    model = build_model(cfg.model)
    channel = cfg.channel or ChannelSpec(
        error_rate=0.0, alphabet_size=model.alphabet_size
    )
    grid = [float(x) for x in args.e_grid.split(",")]
    master = Seed.from_hex(args.master_seed) if args.master_seed else cfg.codec.seed
    sweep = evaluation.robustness_sweep(
        model, cfg.codec, channel, grid, args.message_bits,
        args.trials, master, workers=args.workers,
    )
    lines = ["error_rate,trials,successes,rate,wilson_low,wilson_high"]
    for e, report in sweep:
        pt = report.curve[0]
        lines.append(
            f"{e!r},{pt.trials},{pt.successes},{pt.rate!r},"
            f"{pt.wilson_low!r},{pt.wilson_high!r}"
        )
        sys.stderr.write(f"e={e}:\n" + report.to_text())
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_security(args) -> int:
    from . import evaluation

    cfg = _load_config(args)
    model = build_model(cfg.model)
    master = Seed.from_hex(args.master_seed) if args.master_seed else cfg.codec.seed
    report = evaluation.security_test(
        model, cfg.codec, args.trials, master, workers=args.workers
    )
    _write_out(args, report.to_text())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return EXIT_OK


def cmd_voronoi(args) -> int:
    from . import evaluation

    weights = [int(x) for x in args.weights.split(",")] if args.weights else None
    report = evaluation.voronoi_experiment(
        args.codewords, args.length, args.alphabet, args.threshold,
        args.probes, weights=weights, rng_seed=args.rng_seed,
    )
    _write_out(args, report.to_text())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcstego",
        description="Edit-resilient steganographic codec over token models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="embed a hex secret into stego tokens")
    enc.add_argument("--config", required=True)
    enc.add_argument("--secret", required=True, help="hex payload")
    enc.add_argument("--seed", help="64 hex chars; overrides config")
    enc.add_argument("--history", help="space-separated token ids")
    enc.add_argument("--out")
    enc.add_argument("--manifest", help="write a reproduction config here")
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="recover the hex secret from tokens")
    dec.add_argument("--config", required=True)
    dec.add_argument("--tokens", help="token line (default: stdin)")
    dec.add_argument("--infile", help="read token line from a file")
    dec.add_argument("--seed", help="64 hex chars; overrides config")
    dec.add_argument("--history", help="space-separated token ids")
    dec.add_argument("--out")
    dec.set_defaults(func=cmd_decode)

    chan = sub.add_parser("channel", help="pass tokens through the edit channel")
    chan.add_argument("--config", required=True)
    chan.add_argument("--tokens")
    chan.add_argument("--e", type=float, help="override channel error rate")
    chan.add_argument("--out")
    chan.set_defaults(func=cmd_channel)

    bench = sub.add_parser("bench", help="robustness curve over an error grid")
    bench.add_argument("--config", required=True)
    bench.add_argument("--e-grid", default="0,0.05,0.1,0.15,0.2")
    bench.add_argument("--trials", type=int, default=200)
    bench.add_argument("--message-bits", type=int, default=128)
    bench.add_argument("--master-seed", help="64 hex chars")
    bench.add_argument("--workers", type=int)
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)

    sec = sub.add_parser("security", help="single-block distribution test")
    sec.add_argument("--config", required=True)
    sec.add_argument("--trials", type=int, required=True)
    sec.add_argument("--master-seed", help="64 hex chars")
    sec.add_argument("--workers", type=int)
    sec.add_argument("--csv", help="write per-sequence counts here")
    sec.add_argument("--out")
    sec.set_defaults(func=cmd_security)

    vor = sub.add_parser("voronoi", help="decoding-region probe experiment")
    vor.add_argument("--codewords", type=int, default=50)
    vor.add_argument("--length", type=int, default=60)
    vor.add_argument("--alphabet", type=int, default=50)
    vor.add_argument("--threshold", type=int, default=10)
    vor.add_argument("--probes", type=int, default=10000)
    vor.add_argument("--weights", help="comma-separated probe weights")
    vor.add_argument("--rng-seed", type=int, default=0)
    vor.add_argument("--csv")
    vor.add_argument("--out")
    vor.set_defaults(func=cmd_voronoi)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LivelockError as exc:
        sys.stderr.write(f"livelock: {exc}\n")
        return EXIT_LIVELOCK
    except FrameError as exc:
        sys.stderr.write(f"frame error: {exc}\n")
        return EXIT_FRAME
    except BridgeError as exc:
        sys.stderr.write(f"bridge error: {exc}\n")
        return EXIT_BRIDGE
    except (ParameterError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMETER
    except StegoError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
