"""Flat "key: value" config files with [model], [codec], [channel] sections.

The format is diff-friendly structured text with no parser dependencies.
parse_config(serialize_config(cfg)) == cfg holds for every valid config,
so an encode run's manifest reproduces the decode bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channel import ChannelSpec
from .codec import CodecParams
from .errors import ParameterError
from .model import (
    FixedTableModel,
    MarkovModel,
    SourceModel,
    UniformModel,
)
from .randomness import Seed

MODEL_KINDS = ("uniform", "markov", "table", "bridge")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    alphabet: int = 0
    rows: tuple[tuple[float, ...], ...] = ()
    initial: tuple[float, ...] = ()
    contexts: tuple[tuple[tuple[int, ...], tuple[float, ...]], ...] = ()
    default: tuple[float, ...] = ()
    command: str = ""


@dataclass(frozen=True)
class Config:
    model: ModelConfig
    codec: CodecParams
    channel: ChannelSpec | None = None


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split())


def parse_config(text: str) -> Config:
    sections: dict[str, list[tuple[str, str]]] = {}
    current: list[tuple[str, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            current = sections.setdefault(name, [])
            continue
        if ":" not in line:
            raise ParameterError(f"line {lineno}: expected 'key: value'")
        if current is None:
            raise ParameterError(f"line {lineno}: key outside any [section]")
        key, value = line.split(":", 1)
        current.append((key.strip().lower(), value.strip()))
    if "model" not in sections:
        raise ParameterError("config needs a [model] section")
    if "codec" not in sections:
        raise ParameterError("config needs a [codec] section")
    model = _parse_model(sections["model"])
    codec = _parse_codec(dict(sections["codec"]))
    channel = None
    if "channel" in sections:
        channel = _parse_channel(dict(sections["channel"]), model.alphabet)
    return Config(model=model, codec=codec, channel=channel)


def _parse_model(items: list[tuple[str, str]]) -> ModelConfig:
    plain = dict(items)
    kind = plain.get("kind", "").lower()
    if kind not in MODEL_KINDS:
        raise ParameterError(f"model kind must be one of {MODEL_KINDS}, got {kind!r}")
    alphabet = int(plain.get("alphabet", 0))
    if kind == "uniform":
        return ModelConfig(kind=kind, alphabet=alphabet)
    if kind == "markov":
        rows: dict[int, tuple[float, ...]] = {}
        for key, value in items:
            if key.startswith("row "):
                rows[int(key[4:])] = _parse_floats(value)
        if sorted(rows) != list(range(alphabet)):
            raise ParameterError("markov model needs rows 0..V-1")
        return ModelConfig(
            kind=kind,
            alphabet=alphabet,
            rows=tuple(rows[i] for i in range(alphabet)),
            initial=_parse_floats(plain.get("initial", "")),
        )
    if kind == "table":
        contexts = []
        for key, value in items:
            if key == "ctx" or key.startswith("ctx "):
                ctx = _parse_ints(key[3:].strip()) if len(key) > 3 else ()
                contexts.append((ctx, _parse_floats(value)))
        if "default" not in plain:
            raise ParameterError("table model needs a default row")
        return ModelConfig(
            kind=kind,
            alphabet=alphabet,
            contexts=tuple(contexts),
            default=_parse_floats(plain["default"]),
        )
    command = plain.get("command", "")
    if not command:
        raise ParameterError("bridge model needs a command")
    return ModelConfig(kind=kind, alphabet=alphabet, command=command)


def _parse_codec(plain: dict[str, str]) -> CodecParams:
    try:
        seed = Seed.from_hex(plain["seed"])
    except KeyError:
        raise ParameterError("codec section needs a seed") from None
    max_blocks = plain.get("max_blocks")
    return CodecParams(
        distance_threshold=int(plain["distance_threshold"]),
        codebook_size=int(plain["codebook_size"]),
        block_len=int(plain["block_len"]),
        window=int(plain.get("window", 0)),
        top_p=float(plain.get("top_p", 1.0)),
        seed=seed,
        max_blocks=int(max_blocks) if max_blocks is not None else None,
    )


def _parse_channel(plain: dict[str, str], alphabet: int) -> ChannelSpec:
    mix = _parse_floats(plain.get("mix", "")) or (1 / 3, 1 / 3, 1 / 3)
    return ChannelSpec(
        error_rate=float(plain.get("error_rate", 0.0)),
        alphabet_size=int(plain.get("alphabet", alphabet)),
        mix=tuple(mix),
        mode=plain.get("mode", "iid"),
        run_length=int(plain.get("run_length", 1)),
        rng_seed=int(plain.get("rng_seed", 0)),
    )


def serialize_config(cfg: Config) -> str:
    lines = ["[model]", f"kind: {cfg.model.kind}"]
    if cfg.model.alphabet:
        lines.append(f"alphabet: {cfg.model.alphabet}")
    if cfg.model.kind == "markov":
        lines.append("initial: " + " ".join(repr(p) for p in cfg.model.initial))
        for i, row in enumerate(cfg.model.rows):
            lines.append(f"row {i}: " + " ".join(repr(p) for p in row))
    elif cfg.model.kind == "table":
        lines.append("default: " + " ".join(repr(p) for p in cfg.model.default))
        for ctx, row in cfg.model.contexts:
            key = "ctx" if not ctx else "ctx " + " ".join(map(str, ctx))
            lines.append(f"{key}: " + " ".join(repr(p) for p in row))
    elif cfg.model.kind == "bridge":
        lines.append(f"command: {cfg.model.command}")
    c = cfg.codec
    lines += [
        "",
        "[codec]",
        f"distance_threshold: {c.distance_threshold}",
        f"codebook_size: {c.codebook_size}",
        f"block_len: {c.block_len}",
        f"window: {c.window}",
        f"top_p: {c.top_p!r}",
        f"seed: {c.seed.hex}",
    ]
    if c.max_blocks is not None:
        lines.append(f"max_blocks: {c.max_blocks}")
    if cfg.channel is not None:
        ch = cfg.channel
        lines += [
            "",
            "[channel]",
            f"error_rate: {ch.error_rate!r}",
            f"alphabet: {ch.alphabet_size}",
            "mix: " + " ".join(repr(p) for p in ch.mix),
            f"mode: {ch.mode}",
            f"run_length: {ch.run_length}",
            f"rng_seed: {ch.rng_seed}",
        ]
    return "\n".join(lines) + "\n"


def build_model(cfg: ModelConfig) -> SourceModel:
    """Instantiate the configured model (spawning a child for bridge kind)."""
    if cfg.kind == "uniform":
        return UniformModel(cfg.alphabet)
    if cfg.kind == "markov":
        return MarkovModel(cfg.rows, cfg.initial)
    if cfg.kind == "table":
        table = {ctx: row for ctx, row in cfg.contexts}
        return FixedTableModel(table, cfg.default, cfg.alphabet)
    if cfg.kind == "bridge":
        from .bridge import BridgedModel

        return BridgedModel.spawn(cfg.command)
    raise ParameterError(f"unknown model kind {cfg.kind!r}")
