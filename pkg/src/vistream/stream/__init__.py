"""Online system: broker, producer, classifying consumer and CSV sink."""

from .broker import Broker, BrokerStartupError, parse_address, start_broker
from .client import BrokerClient, BrokerError
from .pipeline import PipelineStats, classify_messages, run_pipeline
from .protocol import MAX_PAYLOAD, MalformedMessage, Message, MessageTooLarge, ProtocolError, TransportError
from .replay import ReplayStats, replay_csv_as_stream
from .sink import DEAD_LETTER_HEADER, SINK_HEADER, Checkpoint, OffsetStore, SinkError, SinkRow, read_sink

__all__ = [
    "Broker",
    "BrokerClient",
    "BrokerError",
    "BrokerStartupError",
    "Checkpoint",
    "DEAD_LETTER_HEADER",
    "MAX_PAYLOAD",
    "MalformedMessage",
    "Message",
    "MessageTooLarge",
    "OffsetStore",
    "PipelineStats",
    "ProtocolError",
    "ReplayStats",
    "SINK_HEADER",
    "SinkError",
    "SinkRow",
    "TransportError",
    "classify_messages",
    "parse_address",
    "read_sink",
    "replay_csv_as_stream",
    "run_pipeline",
    "start_broker",
]
