from __future__ import annotations

import csv
import logging
import os
import time
from dataclasses import dataclass, field

from .client import BrokerClient
from .protocol import Message

log = logging.getLogger(__name__)


@dataclass
class ReplayStats:
    produced: int = 0
    skipped: int = 0
    offsets: list[int] = field(default_factory=list)


def replay_csv_as_stream(
    path: str | os.PathLike,
    topic: str,
    rate: float = 0.0,
    *,
    client: BrokerClient | None = None,
    address: tuple[str, int] | None = None,
) -> ReplayStats:
    """Produce every row of an ingest-format CSV as one message, in file order.

    ``rate`` is messages per second (0 means as fast as possible); sending
    is paced so ``n`` messages take at least ``n / rate`` seconds. Rows with
    no text are skipped and counted.
    """
    if client is None:
        if address is None:
            raise ValueError("need a client or a broker address")
        client = BrokerClient(address)
    stats = ReplayStats()
    default_source = os.path.basename(os.fspath(path))
    t0 = time.monotonic()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise ValueError(f"{path}: header lacks a 'text' column")
        for i, row in enumerate(reader):
            text = row.get("text")
            if text is None or not text.strip() or None in row:
                stats.skipped += 1
                continue
            msg = Message(
                id=row.get("id") or f"r{i}",
                text=text,
                source=row.get("source") or default_source,
                ts=time.time_ns() // 1_000_000,
            )
            stats.offsets.append(client.produce(topic, msg))
            stats.produced += 1
            if rate > 0:
                wait = t0 + stats.produced / rate - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
    if stats.skipped:
        log.warning("skipped %d malformed rows in %s", stats.skipped, path)
    return stats
