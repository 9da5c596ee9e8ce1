"""Schema-driven typed messages and bit-exact binary serialization."""

from sobot.codec.ndarray import (
    ND_DTYPES,
    NdArrayMessage,
    from_message_fields,
    from_numpy,
    ndarray_to_nested,
    nested_to_ndarray,
    to_message_fields,
    to_numpy,
)
from sobot.codec.schema import (
    FieldType,
    MessageSchema,
    SchemaRegistry,
    load_schema_file,
    parse_schema_text,
)
from sobot.codec.standard import (
    CameraInfo,
    ImageFrame,
    TwistCommand,
    default_registry,
    load_standard_schemas,
    string_value,
)
from sobot.codec.wire import MessageValue, decode, encode, validate

__all__ = [
    "FieldType",
    "MessageSchema",
    "SchemaRegistry",
    "MessageValue",
    "NdArrayMessage",
    "ND_DTYPES",
    "encode",
    "decode",
    "validate",
    "ndarray_to_nested",
    "nested_to_ndarray",
    "to_message_fields",
    "from_message_fields",
    "to_numpy",
    "from_numpy",
    "parse_schema_text",
    "load_schema_file",
    "load_standard_schemas",
    "default_registry",
    "ImageFrame",
    "CameraInfo",
    "TwistCommand",
    "string_value",
]
