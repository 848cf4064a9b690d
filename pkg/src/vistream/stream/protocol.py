"""Length-prefixed JSON framing shared by broker and clients.

Every frame is a 4-byte big-endian unsigned length followed by that many
bytes of UTF-8 JSON (one object).
"""

from __future__ import annotations

import json
import socket
import struct
from dataclasses import dataclass

HEADER = struct.Struct(">I")
MAX_PAYLOAD = 1024 * 1024  # largest accepted message, in encoded bytes
MAX_FRAME = 8 * MAX_PAYLOAD  # anything larger drops the connection


class ProtocolError(Exception):
    pass


class TransportError(ConnectionError):
    """Connection-level failure; the request may be retried."""


class MalformedMessage(ValueError):
    pass


class MessageTooLarge(ValueError):
    pass


def encode_frame(obj: dict) -> bytes:
    text = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    try:
        body = text.encode("utf-8")
    except UnicodeEncodeError:
        # lone surrogates: fall back to \u escapes, which are plain ASCII
        body = json.dumps(obj, separators=(",", ":")).encode("ascii")
    return HEADER.pack(len(body)) + body


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(min(n - len(buf), 65536))
        if not chunk:
            raise EOFError("peer closed the connection")
        buf += chunk
    return bytes(buf)


def read_frame_bytes(sock: socket.socket) -> bytes:
    (length,) = HEADER.unpack(_recv_exact(sock, HEADER.size))
    if length > MAX_FRAME:
        raise ProtocolError(f"frame of {length} bytes exceeds {MAX_FRAME}")
    return _recv_exact(sock, length)


def decode_body(body: bytes) -> dict:
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"undecodable frame: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("frame must hold a JSON object")
    return obj


def read_frame(sock: socket.socket) -> dict:
    return decode_body(read_frame_bytes(sock))


def write_frame(sock: socket.socket, obj: dict) -> None:
    sock.sendall(encode_frame(obj))


def payload_size(msg: dict) -> int:
    return len(json.dumps(msg, ensure_ascii=False, separators=(",", ":")).encode("utf-8", "surrogatepass"))


@dataclass(frozen=True)
class Message:
    id: str
    text: str
    source: str = ""
    ts: int = 0

    def to_wire(self) -> dict:
        return {"id": self.id, "text": self.text, "source": self.source, "ts": self.ts}

    @classmethod
    def from_wire(cls, obj) -> "Message":
        if not isinstance(obj, dict):
            raise MalformedMessage("message is not an object")
        mid, text, source, ts = obj.get("id"), obj.get("text"), obj.get("source", ""), obj.get("ts", 0)
        if not isinstance(mid, str) or not mid:
            raise MalformedMessage("missing or empty id")
        if not isinstance(text, str):
            raise MalformedMessage("text must be a string")
        if not isinstance(source, str):
            raise MalformedMessage("source must be a string")
        if not isinstance(ts, int) or isinstance(ts, bool):
            raise MalformedMessage("ts must be an integer")
        try:
            text.encode("utf-8")
            mid.encode("utf-8")
        except UnicodeEncodeError as exc:
            raise MalformedMessage(f"invalid UTF-8 text: {exc.reason}") from None
        return cls(mid, text, source, ts)
