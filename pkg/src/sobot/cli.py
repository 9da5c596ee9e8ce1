"""Operator command line.

    sobot launch <config.yaml> [--manifest pkg.yaml ...] [--tcp-port N]
                 [--duration S] [--bridge-port N] [--behavior-port N]
                 [--data-dir DIR]
    sobot topic list|echo|pub [...]      (attach over TCP)
    sobot service list|call [...]
    sobot record <out.bag> <topic> [...] --duration S
    sobot play <in.bag>

Exit codes: 0 success, 2 unusable file/path, 3 unknown name
(package/topic/service), 4 malformed input or corrupt data, 1 anything
else.  `topic echo` prints string topics exactly as

    data: "<text>"
    ----
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import threading
import time

from sobot.bus import (
    BadLaunchConfig,
    BadParam,
    Bus,
    BusClient,
    LaunchConfig,
    NotFound,
    PackageRegistry,
    TcpServer,
    Timeout,
    UnknownPackage,
    builtin_packages,
    load_launch,
    topic_key,
)
from sobot.bridge.jsoncodec import FieldMissing, TypeMismatch, json_to_message, message_to_json
from sobot.codec import decode, encode
from sobot.errors import CodecError, SobotError

EXIT_OK = 0
EXIT_FILE = 2
EXIT_UNKNOWN_NAME = 3
EXIT_BAD_INPUT = 4

DEFAULT_CONNECT = "127.0.0.1:7741"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _parse_connect(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def _client(args) -> BusClient:
    host, port = _parse_connect(args.connect)
    try:
        return BusClient(host, port)
    except OSError as exc:
        raise CliError(1, f"cannot reach bus at {args.connect}: {exc}")


def cmd_launch(args) -> int:
    if not os.path.exists(args.config):
        raise CliError(EXIT_FILE, f"launch config not found: {args.config}")
    packages = builtin_packages()
    for manifest in args.manifest:
        if not os.path.exists(manifest):
            raise CliError(EXIT_FILE, f"manifest not found: {manifest}")
        try:
            packages.register_manifest(manifest)
        except BadLaunchConfig as exc:
            raise CliError(EXIT_BAD_INPUT, str(exc))
    try:
        config = LaunchConfig.from_file(args.config)
    except (BadLaunchConfig, BadParam) as exc:
        raise CliError(EXIT_BAD_INPUT, f"{args.config}: {exc}")

    bus = Bus()
    server = None
    behavior = None
    bridge = None
    try:
        try:
            graph = load_launch(bus, config, packages)
        except UnknownPackage as exc:
            raise CliError(EXIT_UNKNOWN_NAME, str(exc))
        except (BadParam, BadLaunchConfig) as exc:
            raise CliError(EXIT_BAD_INPUT, str(exc))
        server = TcpServer(bus, port=args.tcp_port)
        print(f"graph up: {len(graph.nodes)} nodes, bus on tcp {server.port}",
              flush=True)
        behavior_port = args.behavior_port
        if behavior_port is None and "SOBOT_BEHAVIOR_PORT" in os.environ:
            behavior_port = int(os.environ["SOBOT_BEHAVIOR_PORT"])
        if behavior_port is not None:
            from sobot.behavior import serve_behavior

            behavior = serve_behavior(bus, args.data_dir, port=behavior_port)
            print(f"behavior REST on http://127.0.0.1:{behavior.port}", flush=True)
        if args.bridge_port is not None:
            from sobot.bridge import serve_bridge

            bridge = serve_bridge(bus, port=args.bridge_port)
            print(f"bridge on ws://127.0.0.1:{bridge.port}/ws", flush=True)

        stop = threading.Event()
        signal.signal(signal.SIGINT, lambda *a: stop.set())
        signal.signal(signal.SIGTERM, lambda *a: stop.set())
        if args.duration is not None:
            stop.wait(args.duration)
        else:
            while not stop.wait(0.2):
                pass
        graph.shutdown()
        return EXIT_OK
    finally:
        if bridge is not None:
            bridge.close()
        if behavior is not None:
            behavior.close()
        if server is not None:
            server.close()
        bus.shutdown()


def _echo_lines(value_json: dict, schema_name: str) -> list[str]:
    if schema_name == "std/String":
        return [f'data: {json.dumps(value_json["data"], ensure_ascii=False)}', "----"]
    lines = [f"{k}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}"
             for k, v in value_json.items()]
    lines.append("----")
    return lines


def cmd_topic(args) -> int:
    client = _client(args)
    try:
        graph = client.graph()
        topics = graph["topics"]
        if args.action == "list":
            for name in sorted(topics):
                t = topics[name]
                print(f"{name}  [{t['schema']}]  "
                      f"{len(t['publishers'])} pub / {len(t['subscribers'])} sub")
            return EXIT_OK
        key = topic_key(args.topic)
        if key not in topics:
            raise CliError(EXIT_UNKNOWN_NAME, f"unknown topic {key}")
        schema_name = topics[key]["schema"]
        if args.action == "echo":
            done = threading.Event()
            seen = 0

            def on_message(value) -> None:
                nonlocal seen
                if args.count and seen >= args.count:
                    return
                for line in _echo_lines(
                        message_to_json(value, client.registry), schema_name):
                    print(line, flush=True)
                seen += 1
                if args.count and seen >= args.count:
                    done.set()

            client.subscribe(key, schema_name, on_message)
            done.wait(args.timeout)
            return EXIT_OK
        # pub
        try:
            payload = json.loads(args.json)
            value = json_to_message(payload, client.registry.get(schema_name),
                                    client.registry)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_BAD_INPUT, f"bad JSON: {exc}")
        except (FieldMissing, TypeMismatch) as exc:
            raise CliError(EXIT_BAD_INPUT, str(exc))
        client.publish(key, value)
        time.sleep(0.1)  # let the envelope flush before the socket closes
        return EXIT_OK
    finally:
        client.close()


def cmd_service(args) -> int:
    client = _client(args)
    try:
        services = client.graph()["services"]
        if args.action == "list":
            for name in sorted(services):
                s = services[name]
                print(f"{name}  {s['request']} -> {s['response']}  [{s['provider']}]")
            return EXIT_OK
        if args.name not in services:
            raise CliError(EXIT_UNKNOWN_NAME, f"unknown service {args.name!r}")
        info = services[args.name]
        try:
            payload = json.loads(args.json)
            request = json_to_message(payload, client.registry.get(info["request"]),
                                      client.registry)
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_BAD_INPUT, f"bad JSON: {exc}")
        except (FieldMissing, TypeMismatch) as exc:
            raise CliError(EXIT_BAD_INPUT, str(exc))
        try:
            response = client.call_decoded(args.name, request, info["response"])
        except NotFound as exc:
            raise CliError(EXIT_UNKNOWN_NAME, str(exc))
        except Timeout as exc:
            raise CliError(1, str(exc))
        print(json.dumps(message_to_json(response, client.registry),
                         sort_keys=True, ensure_ascii=False))
        return EXIT_OK
    finally:
        client.close()


def cmd_record(args) -> int:
    from sobot.bag import BagWriter

    client = _client(args)
    try:
        topics = client.graph()["topics"]
        wanted = {}
        for name in args.topics:
            key = topic_key(name)
            if key not in topics:
                raise CliError(EXIT_UNKNOWN_NAME, f"unknown topic {key}")
            if topics[key]["schema"] is None:
                raise CliError(EXIT_UNKNOWN_NAME, f"topic {key} has no schema yet")
            wanted[key] = topics[key]["schema"]
        writer = BagWriter(args.out, wanted, client.registry)
        lock = threading.Lock()

        def recorder(key: str):
            def on_message(value) -> None:
                with lock:
                    writer.write(time.monotonic_ns(), key,
                                 encode(value, client.registry))

            return on_message

        for key, schema_name in wanted.items():
            client.subscribe(key, schema_name, recorder(key))
        stopper = threading.Event()
        signal.signal(signal.SIGINT, lambda *a: stopper.set())
        stopper.wait(args.duration)
        with lock:
            writer.close()
        print(f"recorded {writer.count} messages to {args.out}")
        return EXIT_OK
    finally:
        client.close()


def cmd_play(args) -> int:
    from sobot.bag import BagCorrupt, BagReader

    if not os.path.exists(args.bag):
        raise CliError(EXIT_FILE, f"bag not found: {args.bag}")
    try:
        reader = BagReader(args.bag)
    except BagCorrupt as exc:
        raise CliError(EXIT_BAD_INPUT, str(exc))
    client = _client(args)
    try:
        reader.load_schemas(client.registry)
        for topic, schema_name in reader.topics.items():
            client.advertise(topic, schema_name)
        time.sleep(0.1)
        if reader.records:
            t0 = reader.records[0].timestamp_ns
            start = time.monotonic()
            for rec in reader.records:
                due = start + (rec.timestamp_ns - t0) / 1e9 / args.rate
                delay = due - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                client.publish_raw(rec.topic, rec.payload)
        time.sleep(0.2)
        print(f"played {len(reader.records)} messages from {args.bag}")
        return EXIT_OK
    finally:
        client.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sobot",
                                     description="social-robot bus operator tool")
    sub = parser.add_subparsers(dest="command", required=True)

    p_launch = sub.add_parser("launch", help="run a node graph from a config")
    p_launch.add_argument("config")
    p_launch.add_argument("--manifest", action="append", default=[],
                          help="extra package manifest YAML (repeatable)")
    p_launch.add_argument("--tcp-port", type=int, default=7741)
    p_launch.add_argument("--duration", type=float, default=None,
                          help="exit after this many seconds")
    p_launch.add_argument("--bridge-port", type=int, default=None)
    p_launch.add_argument("--behavior-port", type=int, default=None)
    p_launch.add_argument("--data-dir", default="./sobot-data",
                          help="behavior service data directory")
    p_launch.set_defaults(fn=cmd_launch)

    p_topic = sub.add_parser("topic", help="inspect or drive topics")
    p_topic.add_argument("action", choices=["list", "echo", "pub"])
    p_topic.add_argument("topic", nargs="?")
    p_topic.add_argument("json", nargs="?")
    p_topic.add_argument("--connect", default=DEFAULT_CONNECT)
    p_topic.add_argument("--count", type=int, default=0,
                         help="echo: stop after N messages")
    p_topic.add_argument("--timeout", type=float, default=10.0)
    p_topic.set_defaults(fn=cmd_topic)

    p_service = sub.add_parser("service", help="list or call services")
    p_service.add_argument("action", choices=["list", "call"])
    p_service.add_argument("name", nargs="?")
    p_service.add_argument("json", nargs="?", default="{}")
    p_service.add_argument("--connect", default=DEFAULT_CONNECT)
    p_service.set_defaults(fn=cmd_service)

    p_record = sub.add_parser("record", help="record topics to a bag")
    p_record.add_argument("out")
    p_record.add_argument("topics", nargs="+")
    p_record.add_argument("--connect", default=DEFAULT_CONNECT)
    p_record.add_argument("--duration", type=float, default=2.0)
    p_record.set_defaults(fn=cmd_record)

    p_play = sub.add_parser("play", help="replay a bag onto the bus")
    p_play.add_argument("bag")
    p_play.add_argument("--connect", default=DEFAULT_CONNECT)
    p_play.add_argument("--rate", type=float, default=1.0)
    p_play.set_defaults(fn=cmd_play)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "topic" and args.action in ("echo", "pub") and not args.topic:
        print("error: topic name required", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.command == "topic" and args.action == "pub" and args.json is None:
        print("error: pub needs a JSON payload", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.command == "service" and args.action == "call" and not args.name:
        print("error: service name required", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SobotError, CodecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
