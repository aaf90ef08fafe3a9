"""Client side of the line-delimited environment protocol.

Spawns an ``optiplan serve`` subprocess and talks to it over stdio. The
client never imports the simulator; everything it knows about the
environment (observation length, action count, task config) comes from the
``hello_ack`` handshake.
"""

from __future__ import annotations

import json
import subprocess
import sys
from collections import deque
from typing import Any


class BridgeError(RuntimeError):
    """Protocol-level failure; carries the tail of the exchange transcript."""

    def __init__(self, message: str, transcript: list[str]):
        tail = "\n".join(transcript)
        super().__init__(f"{message}\ntranscript tail:\n{tail}")
        self.transcript = transcript


class BridgeClient:
    """One protocol session against a bridge server subprocess."""

    TRANSCRIPT_TAIL = 12

    def __init__(self, config_path: str | None = None, cmd: list[str] | None = None):
        if cmd is None:
            cmd = [sys.executable, "-m", "optiplan.cli", "serve"]
            if config_path is not None:
                cmd += ["--config", config_path]
        self._proc = subprocess.Popen(
            cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._transcript: deque[str] = deque(maxlen=self.TRANSCRIPT_TAIL)
        self.obs_len: int | None = None
        self.action_count: int | None = None
        self.server_config: dict[str, Any] | None = None

    def _request(self, payload: dict[str, Any]) -> dict[str, Any]:
        line = json.dumps(payload)
        self._transcript.append("> " + line)
        assert self._proc.stdin is not None and self._proc.stdout is not None
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
            reply = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeError(f"bridge process gone: {exc}", list(self._transcript))
        if not reply:
            raise BridgeError("bridge closed the stream", list(self._transcript))
        self._transcript.append("< " + reply.rstrip("\n"))
        resp = json.loads(reply)
        if resp.get("type") == "error":
            raise BridgeError(
                f"bridge error {resp.get('code')}: {resp.get('message')}",
                list(self._transcript),
            )
        return resp

    def hello(self) -> dict[str, Any]:
        ack = self._request({"type": "hello"})
        self.obs_len = ack["obs_len"]
        self.action_count = ack["action_count"]
        self.server_config = ack["config"]
        return ack

    def reset(self, seed: int | None = None, scenario: dict | None = None) -> dict[str, Any]:
        payload: dict[str, Any] = {"type": "reset"}
        if scenario is not None:
            payload["scenario"] = scenario
        else:
            payload["seed"] = int(seed if seed is not None else 0)
        return self._request(payload)

    def step(self, action: int) -> dict[str, Any]:
        return self._request({"type": "step", "action": int(action)})

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._request({"type": "close"})
            except (BridgeError, ValueError):
                pass
            try:
                self._proc.stdin.close()  # type: ignore[union-attr]
            except OSError:
                pass
            self._proc.wait(timeout=10)

    def __enter__(self) -> "BridgeClient":
        self.hello()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
