"""Command-line behaviour: round trips, exit codes, config round-trip."""

from __future__ import annotations

import random
import subprocess
import sys

import pytest

from dcstego.channel import ChannelSpec
from dcstego.cli import (
    EXIT_LIVELOCK,
    EXIT_OK,
    EXIT_TRUNCATED,
    bits_to_hex,
    hex_to_bits,
    main,
)
from dcstego.codec import CodecParams
from dcstego.config import (
    Config,
    ModelConfig,
    parse_config,
    serialize_config,
)
from dcstego.randomness import Seed

SEED_HEX = bytes(range(32)).hex()

MARKOV_CFG = f"""
[model]
kind: markov
alphabet: 4
initial: 0.4 0.3 0.2 0.1
row 0: 0.25 0.25 0.25 0.25
row 1: 0.1 0.6 0.2 0.1
row 2: 0.3 0.3 0.2 0.2
row 3: 0.2 0.2 0.3 0.3

[codec]
distance_threshold: 1
codebook_size: 8
block_len: 5
window: 2
top_p: 1.0
seed: {SEED_HEX}

[channel]
error_rate: 0.1
mix: 0.334 0.333 0.333
mode: iid
run_length: 1
rng_seed: 17
"""

ZERO_ENTROPY_CFG = f"""
[model]
kind: table
alphabet: 2
default: 1.0 0.0

[codec]
distance_threshold: 1
codebook_size: 4
block_len: 4
window: 1
top_p: 1.0
seed: {SEED_HEX}
max_blocks: 8
"""


@pytest.fixture
def markov_cfg(tmp_path):
    path = tmp_path / "markov.cfg"
    path.write_text(MARKOV_CFG)
    return str(path)


@pytest.fixture
def zero_cfg(tmp_path):
    path = tmp_path / "zero.cfg"
    path.write_text(ZERO_ENTROPY_CFG)
    return str(path)


def test_hex_bits_round_trip():
    assert hex_to_bits("deadbeef") == format(0xDEADBEEF, "032b")
    assert bits_to_hex(hex_to_bits("deadbeef")) == "deadbeef"
    assert bits_to_hex("") == ""


def test_encode_emits_token_line(markov_cfg, tmp_path, capsys):
    out = tmp_path / "stego.txt"
    code = main(["encode", "--config", markov_cfg, "--secret", "deadbeef",
                 "--out", str(out)])
    assert code == EXIT_OK
    line = out.read_text()
    assert line.endswith("\n")
    tokens = [int(t) for t in line.split()]
    assert tokens and all(0 <= t < 4 for t in tokens)
    assert len(tokens) % 5 == 0


def test_encode_deterministic(markov_cfg, tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    main(["encode", "--config", markov_cfg, "--secret", "0badc0de", "--out", str(a)])
    main(["encode", "--config", markov_cfg, "--secret", "0badc0de", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_encode_decode_pipe(markov_cfg, tmp_path):
    stego = tmp_path / "stego.txt"
    recovered = tmp_path / "out.txt"
    assert main(["encode", "--config", markov_cfg, "--secret", "cafef00d",
                 "--out", str(stego)]) == EXIT_OK
    code = main(["decode", "--config", markov_cfg, "--infile", str(stego),
                 "--out", str(recovered)])
    assert code == EXIT_OK
    assert recovered.read_text().strip() == "cafef00d"


def test_decode_truncated_exit(markov_cfg, tmp_path):
    stego = tmp_path / "stego.txt"
    main(["encode", "--config", markov_cfg, "--secret", "cafef00dcafef00d",
          "--out", str(stego)])
    tokens = stego.read_text().split()
    half = " ".join(tokens[: len(tokens) // 3])
    out = tmp_path / "trunc.txt"
    code = main(["decode", "--config", markov_cfg, "--tokens", half,
                 "--out", str(out)])
    assert code == EXIT_TRUNCATED


def test_livelock_exit_code(zero_cfg, tmp_path):
    code = main(["encode", "--config", zero_cfg, "--secret", "ff",
                 "--out", str(tmp_path / "x.txt")])
    assert code == EXIT_LIVELOCK


def test_mismatched_seed_never_crashes(markov_cfg, tmp_path):
    rng = random.Random(5)
    stego = tmp_path / "stego.txt"
    out = tmp_path / "out.txt"
    exact = 0
    for trial in range(100):
        secret = "".join(rng.choice("0123456789abcdef") for _ in range(8))
        wrong = Seed(bytes((trial + i + 1) % 256 for i in range(32))).hex
        main(["encode", "--config", markov_cfg, "--secret", secret,
              "--out", str(stego)])
        code = main(["decode", "--config", markov_cfg, "--seed", wrong,
                     "--infile", str(stego), "--out", str(out)])
        assert code in (EXIT_OK, EXIT_TRUNCATED)
        exact += out.read_text().strip() == secret
    assert exact == 0


def test_channel_zero_rate_is_identity(markov_cfg, tmp_path):
    out = tmp_path / "chan.txt"
    code = main(["channel", "--config", markov_cfg, "--e", "0.0",
                 "--tokens", "1 2 3 0 1", "--out", str(out)])
    assert code == EXIT_OK
    assert out.read_text() == "1 2 3 0 1\n"


def test_manifest_reproduces_decode(markov_cfg, tmp_path):
    stego = tmp_path / "stego.txt"
    manifest = tmp_path / "manifest.cfg"
    main(["encode", "--config", markov_cfg, "--secret", "abcd1234",
          "--out", str(stego), "--manifest", str(manifest)])
    out = tmp_path / "rec.txt"
    code = main(["decode", "--config", str(manifest), "--infile", str(stego),
                 "--out", str(out)])
    assert code == EXIT_OK
    assert out.read_text().strip() == "abcd1234"


def test_bench_emits_curve(markov_cfg, tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = main([
        "bench", "--config", markov_cfg, "--e-grid", "0,0.1,0.2",
        "--trials", "10", "--message-bits", "16", "--workers", "1",
        "--out", str(out),
    ])
    assert code == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("error_rate,")
    assert len(lines) == 4


def test_security_command(markov_cfg, tmp_path):
    # Uses a tiny dedicated config so the sequence space stays enumerable.
    cfg = parse_config(MARKOV_CFG)
    small = Config(
        model=cfg.model,
        codec=CodecParams(
            distance_threshold=1, codebook_size=8, block_len=3, window=1,
            top_p=1.0, seed=cfg.codec.seed,
        ),
        channel=None,
    )
    path = tmp_path / "small.cfg"
    path.write_text(serialize_config(small))
    out = tmp_path / "sec.txt"
    code = main(["security", "--config", str(path), "--trials", "3200",
                 "--workers", "1", "--out", str(out)])
    assert code == EXIT_OK
    assert "tv_distance:" in out.read_text()


def test_voronoi_command(tmp_path):
    out = tmp_path / "vor.txt"
    code = main(["voronoi", "--codewords", "8", "--length", "20",
                 "--alphabet", "20", "--threshold", "4", "--probes", "50",
                 "--weights", "1,2", "--out", str(out)])
    assert code == EXIT_OK
    assert "min_cell_radius:" in out.read_text()


def test_config_round_trip():
    cfg = parse_config(MARKOV_CFG)
    assert parse_config(serialize_config(cfg)) == cfg


def test_config_round_trip_table_and_bridge():
    table = Config(
        model=ModelConfig(
            kind="table",
            alphabet=3,
            contexts=(((0, 1), (0.2, 0.3, 0.5)), ((), (0.1, 0.1, 0.8))),
            default=(0.4, 0.3, 0.3),
        ),
        codec=CodecParams(
            distance_threshold=1, codebook_size=4, block_len=4, window=1,
            top_p=0.9, seed=Seed.from_hex(SEED_HEX), max_blocks=64,
        ),
        channel=ChannelSpec(error_rate=0.2, alphabet_size=3, rng_seed=5),
    )
    assert parse_config(serialize_config(table)) == table
    bridge = Config(
        model=ModelConfig(kind="bridge", alphabet=0, command="python -m x"),
        codec=table.codec,
        channel=None,
    )
    assert parse_config(serialize_config(bridge)) == bridge


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[model]\nkind: markov\nalphabet: 2\n")
    code = main(["encode", "--config", str(bad), "--secret", "ff"])
    assert code == 2


def test_module_entry_point(markov_cfg, tmp_path):
    stego = subprocess.run(
        [sys.executable, "-m", "dcstego.cli", "encode", "--config", markov_cfg,
         "--secret", "1234abcd"],
        capture_output=True, text=True,
    )
    assert stego.returncode == 0
    decoded = subprocess.run(
        [sys.executable, "-m", "dcstego.cli", "decode", "--config", markov_cfg],
        input=stego.stdout, capture_output=True, text=True,
    )
    assert decoded.returncode == 0
    assert decoded.stdout.strip() == "1234abcd"
