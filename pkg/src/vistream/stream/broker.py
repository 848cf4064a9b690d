"""Single-partition topic broker over TCP.

Topics are append-only in-memory logs created on first produce. With a
journal path, every accepted message is appended to a JSON-lines file
before it is acknowledged, and the journal is replayed on start.
"""

from __future__ import annotations

import json
import logging
import os
import socket
import socketserver
import threading
from dataclasses import dataclass, field

from .protocol import MAX_PAYLOAD, ProtocolError, decode_body, payload_size, read_frame_bytes, write_frame

log = logging.getLogger(__name__)


class BrokerStartupError(OSError):
    pass


@dataclass
class Topic:
    name: str
    log: list = field(default_factory=list)

    @property
    def next_offset(self) -> int:
        return len(self.log)


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        broker: Broker = self.server.broker
        sock: socket.socket = self.request
        while True:
            try:
                body = read_frame_bytes(sock)
            except (EOFError, ConnectionError, OSError):
                return
            except ProtocolError as exc:
                self._reply({"ok": False, "err": str(exc)})
                return
            try:
                reply = broker.dispatch(decode_body(body))
            except ProtocolError as exc:
                reply = {"ok": False, "err": str(exc)}
            if not self._reply(reply):
                return

    def _reply(self, obj) -> bool:
        try:
            write_frame(self.request, obj)
            return True
        except OSError:
            return False


class _Server(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True
    block_on_close = False


class Broker:
    def __init__(self, host: str = "127.0.0.1", port: int = 0, journal: str | os.PathLike | None = None):
        self.host = host
        self.port = port
        self.journal_path = journal
        self.topics: dict[str, Topic] = {}
        self._lock = threading.Lock()
        self._journal = None
        self._server: _Server | None = None
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return (self.host, self.port)

    def start(self) -> "Broker":
        try:
            server = _Server((self.host, self.port), _Handler, bind_and_activate=False)
            # allow_reuse_address lets a restarted broker rebind quickly; a second
            # live listener on the same port still fails to bind
            server.server_bind()
            server.server_activate()
        except OSError as exc:
            server.server_close()
            raise BrokerStartupError(f"cannot bind {self.host}:{self.port}: {exc}") from exc
        server.broker = self
        self._server = server
        self.port = server.server_address[1]
        if self.journal_path is not None:
            self._replay_journal()
            self._journal = open(self.journal_path, "a", encoding="utf-8")
        self._thread = threading.Thread(target=server.serve_forever, name="broker", daemon=True)
        self._thread.start()
        log.info("broker listening on %s:%d", self.host, self.port)
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        if self._journal is not None:
            self._journal.close()
            self._journal = None

    def __enter__(self):
        return self.start() if self._server is None else self

    def __exit__(self, *exc):
        self.stop()

    def serve_forever(self) -> None:
        """Block the calling thread until interrupted."""
        if self._server is None:
            self.start()
        try:
            self._thread.join()
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def _replay_journal(self) -> None:
        if not os.path.exists(self.journal_path):
            return
        good = 0
        with open(self.journal_path, "rb") as fh:
            for line in fh:
                if not line.endswith(b"\n"):
                    break
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    break
                self.topics.setdefault(entry["topic"], Topic(entry["topic"])).log.append(entry["msg"])
                good += len(line)
        # drop a torn tail so later appends start on a clean line
        if good != os.path.getsize(self.journal_path):
            with open(self.journal_path, "r+b") as fh:
                fh.truncate(good)

    def append(self, topic: str, msg: dict) -> int:
        with self._lock:
            t = self.topics.get(topic)
            if t is None:
                t = self.topics[topic] = Topic(topic)
            offset = t.next_offset
            if self._journal is not None:
                self._journal.write(json.dumps({"topic": topic, "msg": msg}) + "\n")
                self._journal.flush()
                os.fsync(self._journal.fileno())
            t.log.append(msg)
            return offset

    def read(self, topic: str, start: int, max_count: int) -> tuple[list, int]:
        with self._lock:
            t = self.topics.get(topic)
            if t is None:
                return [], start
            end = min(start + max_count, t.next_offset)
            if start >= end:
                return [], start
            return list(t.log[start:end]), end

    def dispatch(self, req: dict) -> dict:
        op = req.get("op")
        topic = req.get("topic")
        if not isinstance(topic, str) or not topic:
            return {"ok": False, "err": "topic must be a non-empty string"}
        if op == "produce":
            msg = req.get("msg")
            if not isinstance(msg, dict):
                return {"ok": False, "err": "msg must be an object"}
            size = payload_size(msg)
            if size > MAX_PAYLOAD:
                return {"ok": False, "err": f"message too large: {size} bytes (max {MAX_PAYLOAD})"}
            return {"ok": True, "offset": self.append(topic, msg)}
        if op == "consume":
            start, max_count = req.get("from"), req.get("max")
            if not isinstance(start, int) or start < 0 or not isinstance(max_count, int) or max_count < 1:
                return {"ok": False, "err": "from must be >= 0 and max >= 1"}
            msgs, nxt = self.read(topic, start, max_count)
            return {"ok": True, "msgs": msgs, "next": nxt}
        return {"ok": False, "err": f"unknown op {op!r}"}


def start_broker(address: tuple[str, int] = ("127.0.0.1", 0), journal=None) -> Broker:
    return Broker(address[0], address[1], journal=journal).start()


def parse_address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"broker address must look like HOST:PORT, got {text!r}")
    return host, int(port)
