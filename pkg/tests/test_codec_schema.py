import pytest

from sobot.codec import MessageSchema, SchemaRegistry, parse_schema_text
from sobot.errors import CyclicSchema, DuplicateName


def twist_schema():
    return MessageSchema.make(
        "std/Twist",
        [(f"{axis}_{c}", "f64") for axis in ("linear", "angular") for c in "xyz"],
    )


def test_register_and_lookup_roundtrip():
    reg = SchemaRegistry()
    schema = twist_schema()
    sid = reg.register(schema)
    assert reg.get("std/Twist") == schema
    assert reg.id_of("std/Twist") == sid


def test_reregistration_is_idempotent():
    reg = SchemaRegistry()
    first = reg.register(twist_schema())
    second = reg.register(twist_schema())
    assert first == second


def test_same_name_different_fields_rejected():
    reg = SchemaRegistry()
    reg.register(twist_schema())
    other = MessageSchema.make("std/Twist", [("data", "string")])
    with pytest.raises(DuplicateName):
        reg.register(other)


def test_reference_cycle_rejected():
    reg = SchemaRegistry()
    reg.register(MessageSchema.make("t/a", [("child", "t/b")]))
    with pytest.raises(CyclicSchema):
        reg.register(MessageSchema.make("t/b", [("parent", "t/a")]))
    # the failed registration must not leave t/b behind
    assert not reg.contains("t/b")


def test_self_cycle_rejected():
    reg = SchemaRegistry()
    with pytest.raises(CyclicSchema):
        reg.register(MessageSchema.make("t/self", [("me", "t/self")]))


def test_duplicate_field_names_rejected():
    with pytest.raises(ValueError):
        MessageSchema.make("t/dup", [("a", "u8"), ("a", "u8")])


def test_empty_name_rejected():
    with pytest.raises(ValueError):
        MessageSchema.make("", [("a", "u8")])


def test_schema_text_parsing():
    text = """
    # comment
    message demo/Point
      f64 x
      f64 y

    message demo/Path
      demo/Point[] points
      string label
    """
    schemas = parse_schema_text(text)
    assert [s.name for s in schemas] == ["demo/Point", "demo/Path"]
    path = schemas[1]
    assert path.fields[0][0] == "points"
    assert path.fields[0][1].kind == "array"
    assert path.fields[0][1].elem.ref == "demo/Point"


def test_schema_text_bad_line():
    with pytest.raises(ValueError):
        parse_schema_text("message t/x\n  f64 a b\n")
