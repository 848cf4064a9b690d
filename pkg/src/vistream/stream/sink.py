"""Durable CSV sinks and the consumer offset file."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass

SINK_HEADER = (
    "id",
    "ts",
    "source",
    "text",
    "label",
    "p_other",
    "p_discrimination",
    "p_supportive",
    "empty_after_preprocess",
    "processed_at",
)
DEAD_LETTER_HEADER = ("raw_frame_base64", "reason", "received_at")


class SinkError(OSError):
    pass


@dataclass(frozen=True)
class SinkRow:
    id: str
    ts: int
    source: str
    text: str
    label: int
    probabilities: tuple[float, float, float]
    empty_after_preprocess: bool
    processed_at: int

    def cells(self) -> list[str]:
        return [
            self.id,
            str(self.ts),
            self.source,
            self.text,
            f"{self.label}.0",
            *(repr(float(p)) for p in self.probabilities),
            "true" if self.empty_after_preprocess else "false",
            str(self.processed_at),
        ]


def _encode_rows(rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


class CsvAppender:
    """Append-only CSV file; every append is flushed and fsynced."""

    def __init__(self, path: str | os.PathLike, header):
        self.path = os.fspath(path)
        self._fh = open(self.path, "ab")
        if self._fh.tell() == 0:
            self._write(_encode_rows([header]))

    def _write(self, data: bytes) -> int:
        try:
            self._fh.write(data)
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise SinkError(f"cannot write {self.path}: {exc}") from exc
        return self._fh.tell()

    @property
    def size(self) -> int:
        return self._fh.tell()

    def append(self, rows) -> int:
        """Write rows; returns the file size after the write."""
        rows = [r.cells() if isinstance(r, SinkRow) else r for r in rows]
        if not rows:
            return self.size
        return self._write(_encode_rows(rows))

    def truncate(self, size: int) -> None:
        if size < self.size:
            self._fh.truncate(size)
            self._fh.seek(size)

    def close(self) -> None:
        self._fh.close()


@dataclass(frozen=True)
class Checkpoint:
    next_offset: int
    sink_bytes: int


class OffsetStore:
    """Committed consumer position, replaced atomically (write temp, rename)."""

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)

    def load(self) -> Checkpoint | None:
        try:
            with open(self.path, encoding="utf-8") as fh:
                obj = json.load(fh)
            return Checkpoint(int(obj["next_offset"]), int(obj["sink_bytes"]))
        except FileNotFoundError:
            return None

    def commit(self, cp: Checkpoint) -> None:
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({"next_offset": cp.next_offset, "sink_bytes": cp.sink_bytes}, fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)


def read_sink(path: str | os.PathLike) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
