"""Client for external model processes speaking line-delimited JSON.

The child advertises its alphabet via an "info" exchange and then answers
"dist" / "tokenize" / "detokenize" requests one line at a time, in order.
All sampling and truncation stay on this side; the child only reports
distributions.  Request ids are audited so an out-of-order or mismatched
response is surfaced as a bridge failure rather than silent corruption.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from typing import Sequence

from .errors import BridgeError
from .model import Distribution, SourceModel

BRIDGE_SUM_TOLERANCE = 1e-6


class BridgedModel(SourceModel):
    """SourceModel backed by a child process; deterministic per the protocol."""

    def __init__(self, process: subprocess.Popen, name: str = ""):
        self._proc = process
        self._next_id = 0
        self.name = name
        info = self._request({"op": "info"})
        try:
            self.alphabet_size = int(info["alphabet"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BridgeError(f"bad info response: {info!r}") from exc
        self.name = info.get("name", name)

    @classmethod
    def spawn(cls, command: str) -> "BridgedModel":
        try:
            proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BridgeError(f"cannot launch bridge: {exc}") from exc
        return cls(proc, name=command)

    def _request(self, payload: dict) -> dict:
        request_id = self._next_id
        self._next_id += 1
        payload = {"id": request_id, **payload}
        proc = self._proc
        if proc.poll() is not None:
            raise BridgeError("bridge process has exited")
        try:
            proc.stdin.write(json.dumps(payload) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeError(f"bridge pipe failed: {exc}") from exc
        if not line:
            raise BridgeError("bridge closed its output mid-session")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeError(f"bridge sent invalid JSON: {line!r}") from exc
        if response.get("id") != request_id:
            raise BridgeError(
                f"response id {response.get('id')!r} does not match "
                f"request id {request_id} (ordering violation)"
            )
        if "error" in response:
            raise BridgeError(f"bridge error: {response['error']}")
        return response

    def distribution(self, context: Sequence[int]) -> Distribution:
        response = self._request(
            {"op": "dist", "ctx": list(context), "top_p": 1.0}
        )
        tokens = response.get("tokens")
        probs = response.get("probs")
        if not isinstance(tokens, list) or not isinstance(probs, list) or (
            len(tokens) != len(probs)
        ):
            raise BridgeError(f"malformed dist response: {response!r}")
        return Distribution.from_pairs(
            zip(tokens, probs), tolerance=BRIDGE_SUM_TOLERANCE
        )

    def tokenize(self, text: str) -> list[int]:
        return list(self._request({"op": "tokenize", "text": text})["tokens"])

    def detokenize(self, tokens: Sequence[int]) -> str:
        return self._request({"op": "detokenize", "ctx": list(tokens)})["text"]

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self) -> "BridgedModel":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
