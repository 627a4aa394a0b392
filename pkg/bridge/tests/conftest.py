"""Helpers for driving responders and the codec CLI as subprocesses."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

MOCK_CMD = [sys.executable, "-m", "lmbridge.mock"]
CODEC_CLI = [sys.executable, "-m", "dcstego.cli"]

TABLE_MODEL = """\
[model]
kind: table
alphabet: 4
default: 0.4 0.3 0.2 0.1
ctx: 0.25 0.25 0.25 0.25
ctx 0: 0.7 0.2 0.1 0.0
ctx 0 1: 0.05 0.05 0.45 0.45
"""


class MockSession:
    """One mock responder child plus a JSON request/response helper."""

    def __init__(self, table_path, extra_args=()):
        self.proc = subprocess.Popen(
            MOCK_CMD + ["--table", str(table_path), *extra_args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self.next_id = 0

    def send_line(self, line: str) -> str:
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()
        return self.proc.stdout.readline()

    def request(self, **payload) -> dict:
        payload.setdefault("id", self.next_id)
        self.next_id = payload["id"] + 1
        return json.loads(self.send_line(json.dumps(payload)))

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            self.proc.wait(timeout=10)


@pytest.fixture
def table_file(tmp_path):
    path = tmp_path / "model.cfg"
    path.write_text(TABLE_MODEL)
    return path


@pytest.fixture
def mock_session(table_file):
    session = MockSession(table_file)
    yield session
    session.close()


def run_codec(args, stdin_text=None):
    return subprocess.run(
        CODEC_CLI + args, input=stdin_text, capture_output=True, text=True
    )
