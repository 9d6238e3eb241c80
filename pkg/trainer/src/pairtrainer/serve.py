"""HTTP generation endpoint speaking the augmentation wire protocol.

The contract: a POST body of ``{"request_id", "source_text", "hint",
"relation"}`` yields ``200`` with ``{"request_id", "generated_text"}``, the
response id echoing the request id.  Anything malformed yields a 400-class
response; the server never crashes on bad input.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import torch

from .model import ModelBundle

_REQUIRED_FIELDS = ("request_id", "source_text", "hint", "relation")


class GenerationHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def do_POST(self):  # noqa: N802 (http.server naming)
        try:
            length = int(self.headers.get("Content-Length") or 0)
            payload = json.loads(self.rfile.read(length))
        except (ValueError, json.JSONDecodeError):
            self._reply(400, {"error": "body is not valid JSON"})
            return
        problem = self._validate(payload)
        if problem:
            self._reply(400, {"error": problem})
            return
        try:
            text = self.server.generate(payload["source_text"], payload["hint"])
        except Exception:  # noqa: BLE001 — a bad request must never kill the server
            self._reply(500, {"error": "generation failed"})
            return
        self._reply(200, {"request_id": payload["request_id"], "generated_text": text})

    @staticmethod
    def _validate(payload) -> str | None:
        if not isinstance(payload, dict):
            return "body must be a JSON object"
        for name in _REQUIRED_FIELDS:
            if not isinstance(payload.get(name), str):
                return f"field {name!r} must be a string"
        if not payload["hint"].strip():
            return "field 'hint' must be non-empty"
        return None

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *_args) -> None:
        """Stay silent; request logging would interleave with CLI output."""


class GenerationServer(ThreadingHTTPServer):
    """Serves one loaded model; decoding is serialized behind a lock."""

    daemon_threads = True

    def __init__(
        self,
        bundle: ModelBundle,
        host: str = "127.0.0.1",
        port: int = 0,
        temperature: float = 0.0,
        seed: int = 0,
    ):
        super().__init__((host, port), GenerationHandler)
        self._bundle = bundle
        self._temperature = temperature
        self._lock = threading.Lock()
        self._generator = torch.Generator()
        self._generator.manual_seed(seed)

    @classmethod
    def from_checkpoint(
        cls,
        checkpoint_dir: Path | str,
        host: str = "127.0.0.1",
        port: int = 0,
        temperature: float = 0.0,
        seed: int = 0,
    ) -> "GenerationServer":
        return cls(ModelBundle.load(checkpoint_dir), host, port, temperature, seed)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def generate(self, source_text: str, hint: str) -> str:
        with self._lock:
            return self._bundle.generate_text(
                source_text,
                hint,
                temperature=self._temperature,
                generator=self._generator,
            )

    def start_background(self) -> threading.Thread:
        """Serve on a daemon thread; call ``shutdown()`` to stop."""
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def serve(
    checkpoint_dir: Path | str,
    host: str = "127.0.0.1",
    port: int = 8000,
    temperature: float = 0.0,
    seed: int = 0,
) -> None:
    """Load a checkpoint and serve it until interrupted (blocking)."""
    server = GenerationServer.from_checkpoint(
        checkpoint_dir, host, port, temperature, seed
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
