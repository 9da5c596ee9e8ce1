"""Typed message schemas and the schema registry.

A schema is an ordered list of ``(field_name, field_type)`` pairs.  Field
types are scalars (``bool i8 u8 i16 u16 i32 u32 i64 u64 f32 f64``),
``string``, ``bytes``, arrays of any element type (``T[]``), or references
to another schema by its slash-namespaced name (``std/Twist``).

Schemas can also be declared in a text file, one ``message`` block per
schema:

    message std/CameraInfo
      u32 width
      u32 height
      f64 fx
      f64 fy
      f64 cx
      f64 cy

Lines starting with ``#`` are comments.  Arrays use the ``T[]`` suffix;
nested references are written as the schema name.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from sobot.errors import CyclicSchema, DuplicateName, SchemaMismatch

SCALARS = frozenset(
    {"bool", "i8", "u8", "i16", "u16", "i32", "u32", "i64", "u64", "f32", "f64"}
)

INT_RANGES = {
    "i8": (-(2**7), 2**7 - 1),
    "u8": (0, 2**8 - 1),
    "i16": (-(2**15), 2**15 - 1),
    "u16": (0, 2**16 - 1),
    "i32": (-(2**31), 2**31 - 1),
    "u32": (0, 2**32 - 1),
    "i64": (-(2**63), 2**63 - 1),
    "u64": (0, 2**64 - 1),
}


@dataclass(frozen=True)
class FieldType:
    kind: str  # "scalar" | "string" | "bytes" | "array" | "ref"
    scalar: str = ""
    elem: "FieldType | None" = None
    ref: str = ""

    @staticmethod
    def parse(text: str) -> "FieldType":
        text = text.strip()
        if text.endswith("[]"):
            return FieldType("array", elem=FieldType.parse(text[:-2]))
        if text in SCALARS:
            return FieldType("scalar", scalar=text)
        if text == "string":
            return FieldType("string")
        if text == "bytes":
            return FieldType("bytes")
        if "/" in text:
            return FieldType("ref", ref=text)
        raise ValueError(f"unknown field type {text!r}")

    def __str__(self) -> str:
        if self.kind == "scalar":
            return self.scalar
        if self.kind == "array":
            return f"{self.elem}[]"
        if self.kind == "ref":
            return self.ref
        return self.kind


@dataclass(frozen=True)
class MessageSchema:
    name: str
    fields: tuple[tuple[str, FieldType], ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("schema name must be nonempty")
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate field names in schema {self.name!r}")

    @staticmethod
    def make(name: str, fields: list[tuple[str, str]]) -> "MessageSchema":
        """Build a schema from ``(field_name, type_string)`` pairs."""
        return MessageSchema(
            name, tuple((fname, FieldType.parse(ftype)) for fname, ftype in fields)
        )

    def field_names(self) -> list[str]:
        return [n for n, _ in self.fields]


def _refs_of(schema: MessageSchema) -> set[str]:
    out: set[str] = set()

    def visit(ft: FieldType) -> None:
        if ft.kind == "ref":
            out.add(ft.ref)
        elif ft.kind == "array":
            visit(ft.elem)  # type: ignore[arg-type]

    for _, ft in schema.fields:
        visit(ft)
    return out


class SchemaRegistry:
    """Name → schema mapping with cycle detection and atomic registration.

    Dangling references are allowed at registration time (so mutually
    referencing schemas can be declared in any order); they are resolved
    on first use.  Registering a schema that would close a reference
    cycle fails with :class:`CyclicSchema`.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_name: dict[str, MessageSchema] = {}
        self._ids: dict[str, int] = {}

    def register(self, schema: MessageSchema) -> int:
        with self._lock:
            existing = self._by_name.get(schema.name)
            if existing is not None:
                if existing == schema:
                    return self._ids[schema.name]
                raise DuplicateName(
                    f"schema {schema.name!r} already registered with a different definition"
                )
            self._check_acyclic(schema)
            self._by_name[schema.name] = schema
            self._ids[schema.name] = len(self._ids) + 1
            return self._ids[schema.name]

    def _check_acyclic(self, new: MessageSchema) -> None:
        graph = {name: _refs_of(s) for name, s in self._by_name.items()}
        graph[new.name] = _refs_of(new)
        seen: set[str] = set()
        stack: set[str] = set()

        def dfs(name: str) -> None:
            if name in stack:
                raise CyclicSchema(f"schema reference cycle through {name!r}")
            if name in seen or name not in graph:
                return
            stack.add(name)
            for ref in graph[name]:
                dfs(ref)
            stack.remove(name)
            seen.add(name)

        dfs(new.name)

    def get(self, name: str) -> MessageSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaMismatch(f"schema {name!r} not registered") from None

    def contains(self, name: str) -> bool:
        return name in self._by_name

    def names(self) -> list[str]:
        return sorted(self._by_name)

    def id_of(self, name: str) -> int:
        return self._ids[name]


def parse_schema_text(text: str) -> list[MessageSchema]:
    """Parse the declarative schema file format."""
    schemas: list[MessageSchema] = []
    name: str | None = None
    fields: list[tuple[str, FieldType]] = []

    def flush() -> None:
        nonlocal name, fields
        if name is not None:
            schemas.append(MessageSchema(name, tuple(fields)))
        name, fields = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("message "):
            flush()
            name = line[len("message ") :].strip()
            continue
        parts = line.split()
        if len(parts) != 2 or name is None:
            raise ValueError(f"schema file line {lineno}: expected 'type name', got {raw!r}")
        ftype, fname = parts
        fields.append((fname, FieldType.parse(ftype)))
    flush()
    return schemas


def load_schema_file(path: str, registry: SchemaRegistry) -> list[int]:
    with open(path, "r", encoding="utf-8") as fh:
        schemas = parse_schema_text(fh.read())
    return [registry.register(s) for s in schemas]
