"""Topic traffic recording: the bag file format.

Layout (little-endian, bit-exact):

    magic     8 bytes  b"SOBAG001"
    u32       header JSON length
    header    UTF-8 JSON: {"version": 1,
                           "topics": {topic: schema_name},
                           "schemas": {schema_name: schema_text}}
    records   repeated until EOF:
        u64   timestamp_ns (non-decreasing)
        u16   topic name length
        ...   topic name (UTF-8)
        u32   payload length
        ...   payload (one wire-format message)

The header carries full schema definitions so a bag replays into a fresh
graph without any out-of-band schema exchange.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

from sobot.codec import FieldType, MessageSchema, SchemaRegistry, parse_schema_text
from sobot.errors import SobotError

MAGIC = b"SOBAG001"


class BagCorrupt(SobotError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


def schema_to_text(schema: MessageSchema) -> str:
    lines = [f"message {schema.name}"]
    for fname, ftype in schema.fields:
        lines.append(f"  {ftype} {fname}")
    return "\n".join(lines) + "\n"


def _collect_schemas(name: str, registry: SchemaRegistry, out: dict[str, str]) -> None:
    if name in out:
        return
    schema = registry.get(name)
    out[name] = schema_to_text(schema)

    def visit(ft: FieldType) -> None:
        if ft.kind == "ref":
            _collect_schemas(ft.ref, registry, out)
        elif ft.kind == "array" and ft.elem is not None:
            visit(ft.elem)

    for _, ftype in schema.fields:
        visit(ftype)


class BagWriter:
    def __init__(self, path: str, topics: dict[str, str], registry: SchemaRegistry):
        self.path = path
        self.topics = dict(topics)
        schemas: dict[str, str] = {}
        for schema_name in topics.values():
            _collect_schemas(schema_name, registry, schemas)
        header = json.dumps(
            {"version": 1, "topics": self.topics, "schemas": schemas},
            sort_keys=True,
        ).encode("utf-8")
        self._fh = open(path, "wb")
        self._fh.write(MAGIC)
        self._fh.write(struct.pack("<I", len(header)))
        self._fh.write(header)
        self._last_ts = 0
        self.count = 0

    def write(self, timestamp_ns: int, topic: str, payload: bytes) -> None:
        if topic not in self.topics:
            raise SobotError(f"topic {topic!r} not declared in bag header")
        timestamp_ns = max(int(timestamp_ns), self._last_ts)  # keep non-decreasing
        name = topic.encode("utf-8")
        self._fh.write(struct.pack("<QH", timestamp_ns, len(name)))
        self._fh.write(name)
        self._fh.write(struct.pack("<I", len(payload)))
        self._fh.write(payload)
        self._last_ts = timestamp_ns
        self.count += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "BagWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class BagRecord:
    timestamp_ns: int
    topic: str
    payload: bytes


class BagReader:
    def __init__(self, path: str):
        self.path = path
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:8] != MAGIC:
            raise BagCorrupt("bad magic", 0)
        if len(blob) < 12:
            raise BagCorrupt("truncated header length", 8)
        (header_len,) = struct.unpack_from("<I", blob, 8)
        if 12 + header_len > len(blob):
            raise BagCorrupt("truncated header", 12)
        try:
            header = json.loads(blob[12 : 12 + header_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise BagCorrupt("header is not valid JSON", 12) from None
        if header.get("version") != 1:
            raise BagCorrupt(f"unsupported version {header.get('version')}", 12)
        self.topics: dict[str, str] = dict(header["topics"])
        self.schema_texts: dict[str, str] = dict(header["schemas"])
        self.records: list[BagRecord] = []
        pos = 12 + header_len
        last_ts = 0
        while pos < len(blob):
            start = pos
            if pos + 10 > len(blob):
                raise BagCorrupt("truncated record head", start)
            ts, topic_len = struct.unpack_from("<QH", blob, pos)
            pos += 10
            if pos + topic_len + 4 > len(blob):
                raise BagCorrupt("truncated topic name", start)
            topic = blob[pos : pos + topic_len].decode("utf-8", errors="replace")
            pos += topic_len
            (payload_len,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            if pos + payload_len > len(blob):
                raise BagCorrupt("truncated payload", start)
            payload = blob[pos : pos + payload_len]
            pos += payload_len
            if topic not in self.topics:
                raise BagCorrupt(f"record topic {topic!r} absent from header", start)
            if ts < last_ts:
                raise BagCorrupt("timestamps decrease", start)
            last_ts = ts
            self.records.append(BagRecord(ts, topic, payload))

    def load_schemas(self, registry: SchemaRegistry) -> None:
        for text in self.schema_texts.values():
            for schema in parse_schema_text(text):
                registry.register(schema)
