from __future__ import annotations

import logging
import socket
import time

from .protocol import (
    MAX_PAYLOAD,
    Message,
    MessageTooLarge,
    ProtocolError,
    TransportError,
    payload_size,
    read_frame,
    write_frame,
)

log = logging.getLogger(__name__)


class BrokerError(RuntimeError):
    """The broker answered ``ok: false``."""


class BrokerClient:
    """Blocking client for one broker connection.

    Transport failures are retried ``retries`` times with exponential
    backoff starting at ``backoff`` seconds, then surface as
    :class:`TransportError`. A retried produce may append twice; consumers
    must tolerate duplicates.
    """

    def __init__(self, address: tuple[str, int], timeout: float = 10.0, retries: int = 5, backoff: float = 0.1):
        self.address = tuple(address)
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._sock: socket.socket | None = None

    def _connect(self) -> socket.socket:
        if self._sock is None:
            sock = socket.create_connection(self.address, timeout=self.timeout)
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._sock = sock
        return self._sock

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.close()
            finally:
                self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def request(self, req: dict) -> dict:
        delay = self.backoff
        for attempt in range(self.retries + 1):
            try:
                sock = self._connect()
                write_frame(sock, req)
                resp = read_frame(sock)
                break
            except (OSError, EOFError, ProtocolError) as exc:
                self.close()
                if attempt == self.retries:
                    raise TransportError(f"broker {self.address[0]}:{self.address[1]} unreachable: {exc}") from exc
                log.debug("transport error (%s), retrying in %.2fs", exc, delay)
                time.sleep(delay)
                delay = min(delay * 2, 5.0)
        if not resp.get("ok"):
            raise BrokerError(resp.get("err", "unknown broker error"))
        return resp

    def produce(self, topic: str, msg: Message | dict) -> int:
        wire = msg.to_wire() if isinstance(msg, Message) else msg
        size = payload_size(wire)
        if size > MAX_PAYLOAD:
            raise MessageTooLarge(f"message of {size} bytes exceeds {MAX_PAYLOAD}")
        return self.request({"op": "produce", "topic": topic, "msg": wire})["offset"]

    def consume(self, topic: str, start: int, max_count: int = 100) -> tuple[list[dict], int]:
        """Raw message objects ``[start, start+max)`` and the next offset."""
        resp = self.request({"op": "consume", "topic": topic, "from": start, "max": max_count})
        return resp["msgs"], resp["next"]
