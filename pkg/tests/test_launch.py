import pytest

from sobot.bus import (
    BadParam,
    Bus,
    LaunchConfig,
    PackageRegistry,
    UnknownPackage,
    load_launch,
)


@pytest.fixture
def bus():
    b = Bus()
    yield b
    b.shutdown()


@pytest.fixture
def packages():
    reg = PackageRegistry()
    reg.register(
        "demo",
        {
            "talker": "launch_pkg:talker",
            "listener": "launch_pkg:listener",
            "crasher": "launch_pkg:crasher",
        },
    )
    return reg


def cfg(*entries):
    return LaunchConfig.from_dict({"nodes": list(entries)})


def test_empty_config_empty_graph(bus, packages):
    graph = load_launch(bus, cfg(), packages)
    info = bus.graph_info()
    assert info.nodes == {} and info.topics == {} and info.services == {}
    graph.shutdown()


def test_enabled_nodes_run_with_params(bus, packages):
    graph = load_launch(
        bus,
        cfg(
            {"package": "demo", "node": "listener"},
            {"package": "demo", "node": "talker", "params": {"count": 5}},
        ),
        packages,
    )
    assert bus.drain()
    listener = graph.nodes[0]
    info = bus.graph_info()
    assert set(info.nodes) == {"talker", "listener"}
    assert info.topics["/chat"].schema == "std/String"
    graph.shutdown()
    assert bus.graph_info().nodes == {}


def test_disabled_node_leaves_no_trace(bus, packages):
    with load_launch(
        bus,
        cfg(
            {"package": "demo", "node": "listener"},
            {"package": "demo", "node": "talker", "enabled": False},
        ),
        packages,
    ):
        info = bus.graph_info()
        assert set(info.nodes) == {"listener"}
        assert info.topics["/chat"].publishers == ()


def test_remapping_applies(bus, packages):
    with load_launch(
        bus,
        cfg({"package": "demo", "node": "talker",
             "remappings": {"chat": "/alt/chat"}}),
        packages,
    ):
        info = bus.graph_info()
        assert "/alt/chat" in info.topics
        assert "/chat" not in info.topics


def test_unknown_package_and_node(bus, packages):
    with pytest.raises(UnknownPackage) as err:
        load_launch(bus, cfg({"package": "ghost", "node": "talker"}), packages)
    assert "ghost" in str(err.value)
    with pytest.raises(UnknownPackage):
        load_launch(bus, cfg({"package": "demo", "node": "ghost"}), packages)
    assert bus.graph_info().nodes == {}


def test_bad_param_is_named(bus, packages):
    with pytest.raises(BadParam) as err:
        load_launch(
            bus,
            cfg({"package": "demo", "node": "talker", "params": {"count": "x"}}),
            packages,
        )
    assert "count" in str(err.value)
    assert bus.graph_info().nodes == {}


def test_spawn_failure_rolls_back(bus, packages):
    with pytest.raises(RuntimeError):
        load_launch(
            bus,
            cfg(
                {"package": "demo", "node": "listener"},
                {"package": "demo", "node": "crasher"},
            ),
            packages,
        )
    assert bus.graph_info().nodes == {}


def test_launch_determinism_graph_diff(bus, packages):
    config = cfg(
        {"package": "demo", "node": "listener"},
        {"package": "demo", "node": "talker", "params": {"count": 0}},
    )
    with load_launch(bus, config, packages):
        first = bus.graph_info().signature()
    second_bus = Bus()
    try:
        with load_launch(second_bus, config, packages):
            second = second_bus.graph_info().signature()
    finally:
        second_bus.shutdown()
    assert first == second


def test_yaml_roundtrip(tmp_path):
    text = """
nodes:
  - package: demo
    node: talker
    params: {count: 2}
    remappings: {chat: /alt}
  - package: demo
    node: listener
    enabled: false
"""
    path = tmp_path / "demo.yaml"
    path.write_text(text)
    config = LaunchConfig.from_file(str(path))
    assert config.entries[0].params == {"count": 2}
    assert config.entries[0].remappings == {"chat": "/alt"}
    assert config.entries[1].enabled is False
