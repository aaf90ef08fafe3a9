"""Line-delimited environment-server protocol for external agents.

One JSON object per line, one response per request; the state machine is
hello -> (reset -> step*)* -> close. See docs/PROTOCOL.md for the frozen
wire format and a worked transcript.
"""

from __future__ import annotations

import json
import socketserver
import sys
from dataclasses import asdict, dataclass

from .dynamics import K, DynamicsParams, State, step
from .task import Outcome, TaskConfig, observe, reward, status
from .world3d import GenConfig, SpatialIndex, generate_scenario, scenario_from_dict

PROTOCOL_VERSION = 1

E_PARSE = "E_PARSE"
E_ORDER = "E_ORDER"
E_ACTION = "E_ACTION"


@dataclass(frozen=True)
class BridgeConfig:
    gen_cfg: GenConfig = GenConfig()
    dyn: DynamicsParams = DynamicsParams()
    task_cfg: TaskConfig = TaskConfig()


class Session:
    """One protocol session; state machine over parsed request dicts.

    `handle_line` maps a raw request line to a response dict and never
    raises on malformed input.
    """

    def __init__(self, cfg: BridgeConfig):
        self.cfg = cfg
        self._greeted = False
        self._world: SpatialIndex | None = None
        self._x: State | None = None
        self._t = 0
        self._done = True
        self.closed = False

    def handle_line(self, line: str) -> dict:
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            return _error(E_PARSE, f"malformed JSON: {exc.msg}")
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return _error(E_PARSE, "expected an object with a string 'type' field")
        kind = msg["type"]
        if kind == "hello":
            return self._on_hello()
        if kind == "reset":
            return self._on_reset(msg)
        if kind == "step":
            return self._on_step(msg)
        if kind == "close":
            self.closed = True
            return {"type": "close_ack"}
        return _error(E_PARSE, f"unknown command {kind!r}")

    def _on_hello(self) -> dict:
        if self._greeted:
            return _error(E_ORDER, "hello already received")
        self._greeted = True
        return {
            "type": "hello_ack",
            "version": PROTOCOL_VERSION,
            "action_count": K,
            "obs_len": self.cfg.task_cfg.obs_len(),
            "config": {
                "dynamics": asdict(self.cfg.dyn),
                "task": asdict(self.cfg.task_cfg),
                "generation": asdict(self.cfg.gen_cfg),
            },
        }

    def _on_reset(self, msg: dict) -> dict:
        if not self._greeted:
            return _error(E_ORDER, "reset before hello")
        try:
            if "scenario" in msg:
                scenario = scenario_from_dict(msg["scenario"], source="reset")
            elif "seed" in msg:
                scenario = generate_scenario(int(msg["seed"]), self.cfg.gen_cfg)
            else:
                return _error(E_PARSE, "reset needs a 'seed' or inline 'scenario'")
        except Exception as exc:
            return _error(E_PARSE, f"bad reset payload: {exc}")
        self._world = SpatialIndex(scenario)
        self._x = State(p=scenario.start, v=(0.0, 0.0, 0.0))
        self._t = 0
        outcome = status(self._x, self._t, self._world, self.cfg.task_cfg)
        self._done = outcome is not Outcome.RUNNING
        return self._state_response(outcome)

    def _on_step(self, msg: dict) -> dict:
        if not self._greeted or self._world is None:
            return _error(E_ORDER, "step before reset")
        if self._done:
            return _error(E_ORDER, "episode finished; reset first")
        action = msg.get("action")
        if not isinstance(action, int) or isinstance(action, bool) or not 0 <= action < K:
            return _error(E_ACTION, f"action must be an integer in [0, {K}), got {action!r}")
        self._x = step(self._x, action, self.cfg.dyn)
        self._t += 1
        outcome = status(self._x, self._t, self._world, self.cfg.task_cfg)
        self._done = outcome is not Outcome.RUNNING
        return self._state_response(outcome)

    def _state_response(self, outcome: Outcome) -> dict:
        return {
            "type": "state",
            "obs": observe(self._x, self._world, self.cfg.dyn, self.cfg.task_cfg),
            "reward": reward(self._x, self._world, self.cfg.task_cfg),
            "done": self._done,
            "outcome": outcome.value,
            "step_index": self._t,
        }


def _error(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def serve_session(rfile, wfile, cfg: BridgeConfig) -> None:
    """Serve one session over text streams until close or EOF."""
    session = Session(cfg)
    for line in rfile:
        response = session.handle_line(line)
        wfile.write(json.dumps(response) + "\n")
        wfile.flush()
        if session.closed:
            break


def serve_stdio(cfg: BridgeConfig) -> None:
    serve_session(sys.stdin, sys.stdout, cfg)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        rfile = self.rfile
        session = Session(self.server.bridge_cfg)
        for raw in rfile:
            response = session.handle_line(raw.decode("utf-8", errors="replace"))
            self.wfile.write((json.dumps(response) + "\n").encode())
            if session.closed:
                break


class BridgeServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr, cfg: BridgeConfig):
        super().__init__(addr, _Handler)
        self.bridge_cfg = cfg


def serve_tcp(cfg: BridgeConfig, host: str = "127.0.0.1", port: int = 0) -> BridgeServer:
    """Bind a threaded TCP server (one session per connection); caller runs
    serve_forever / shutdown."""
    return BridgeServer((host, port), cfg)
