"""Classifying consumer: broker topic in, CSV sink out."""

from __future__ import annotations

import base64
import json
import logging
import os
import threading
import time
from dataclasses import dataclass

from ..features import Vocabulary, to_csr, transform
from ..textprep import NormalizerConfig, default_config, preprocess
from .client import BrokerClient
from .protocol import MalformedMessage, Message
from .sink import DEAD_LETTER_HEADER, SINK_HEADER, Checkpoint, CsvAppender, OffsetStore, SinkRow

log = logging.getLogger(__name__)


@dataclass
class PipelineStats:
    consumed: int = 0
    written: int = 0
    dead_lettered: int = 0
    next_offset: int = 0


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


def _raw_b64(raw) -> str:
    data = json.dumps(raw, ensure_ascii=False, separators=(",", ":")).encode("utf-8", "surrogatepass")
    return base64.b64encode(data).decode("ascii")


def classify_messages(msgs, model, vocab: Vocabulary, config: NormalizerConfig):
    """Split raw messages into sink rows and ``(raw, reason)`` rejects, keeping order."""
    parsed, rejects = [], []
    for raw in msgs:
        try:
            parsed.append(Message.from_wire(raw))
        except MalformedMessage as exc:
            rejects.append((raw, str(exc)))
    if not parsed:
        return [], rejects
    docs = [preprocess(m.text, config, m.id) for m in parsed]
    X = to_csr([transform(d, vocab) for d in docs], len(vocab))
    proba = model.predict_proba(X)
    labels = proba.argmax(axis=1)
    stamp = _now_ms()
    rows = [
        SinkRow(m.id, m.ts, m.source, m.text, int(k), tuple(float(p) for p in pr), d.empty, stamp)
        for m, d, k, pr in zip(parsed, docs, labels, proba)
    ]
    return rows, rejects


def run_pipeline(
    address: tuple[str, int],
    topic: str,
    model,
    vocab: Vocabulary,
    config: NormalizerConfig | None,
    sink_path: str | os.PathLike,
    *,
    batch_size: int = 100,
    poll_interval: float = 0.1,
    stop_event: threading.Event | None = None,
    idle_timeout: float | None = None,
    offset_path: str | os.PathLike | None = None,
    dead_letter_path: str | os.PathLike | None = None,
    client: BrokerClient | None = None,
) -> PipelineStats:
    """Consume ``topic`` until stopped, appending one sink row per message.

    The offset is committed only after the sink append is on disk, so a
    crash re-delivers the uncommitted batch. On restart the sink is cut
    back to its size at the last commit, which drops rows from the batch
    that is about to be re-delivered. Stops when ``stop_event`` is set or,
    with ``idle_timeout``, after that many seconds without new messages.
    """
    if getattr(model, "n_classes_", 3) != 3:
        raise ValueError("the sink schema needs a three-class model")
    if getattr(model, "n_features_in_", len(vocab)) != len(vocab):
        raise ValueError(f"model expects {model.n_features_in_} features, vocabulary has {len(vocab)}")
    config = config or default_config()
    sink_path = os.fspath(sink_path)
    offsets = OffsetStore(offset_path or sink_path + ".offset")
    sink = CsvAppender(sink_path, SINK_HEADER)
    dead = CsvAppender(dead_letter_path or sink_path + ".deadletter.csv", DEAD_LETTER_HEADER)
    own_client = client is None
    client = client or BrokerClient(address)
    stats = PipelineStats()
    try:
        cp = offsets.load()
        if cp is None:
            cp = Checkpoint(0, sink.size)
            offsets.commit(cp)
        else:
            sink.truncate(cp.sink_bytes)
        stats.next_offset = cp.next_offset
        last_data = time.monotonic()
        while not (stop_event is not None and stop_event.is_set()):
            msgs, nxt = client.consume(topic, stats.next_offset, batch_size)
            if not msgs:
                if idle_timeout is not None and time.monotonic() - last_data >= idle_timeout:
                    break
                time.sleep(poll_interval)
                continue
            last_data = time.monotonic()
            rows, rejects = classify_messages(msgs, model, vocab, config)
            size = sink.append(rows)
            if rejects:
                stamp = _now_ms()
                dead.append([[_raw_b64(raw), reason, str(stamp)] for raw, reason in rejects])
                log.warning("dead-lettered %d malformed messages", len(rejects))
            offsets.commit(Checkpoint(nxt, size))
            stats.consumed += len(msgs)
            stats.written += len(rows)
            stats.dead_lettered += len(rejects)
            stats.next_offset = nxt
    finally:
        sink.close()
        dead.close()
        if own_client:
            client.close()
    return stats
