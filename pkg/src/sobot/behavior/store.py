"""Embedded, file-backed persistence for behavior data.

On-disk layout under one data directory:

    profiles.json       {profile_id: profile record}, sorted keys
    robot.json          the single active robot definition (absent if unset)
    assets/<id>         opaque asset bytes, flat, keyed by id
    assets/manifest.json  {asset_id: {"size": n, "sha256": hex}}

All writes go through an atomic temp-file + rename.  `export_dump`
serializes the whole store (assets base64-encoded) as canonical JSON with
sorted keys, so two stores with equal content dump byte-identically.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field

from sobot.errors import SobotError

AFFECT_LABELS = ("neutral", "happy", "sad", "surprised", "angry")
ACTUATOR_KINDS = ("wheel_pair", "servo", "dc_motor", "speaker", "display")
SENSOR_KINDS = ("camera", "microphone")


class NotFound(SobotError):
    def __init__(self, what: str):
        super().__init__(what)


class ValidationError(SobotError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class AssetMissing(SobotError):
    def __init__(self, path: str, asset_id: str):
        self.path = path
        self.asset_id = asset_id
        super().__init__(f"{path}: asset {asset_id!r} not in store")


def validate_profile(raw: dict, assets: "AssetStore") -> dict:
    for key in ("id", "affect_label", "face_asset", "sound_asset"):
        if not isinstance(raw.get(key), str) or not raw.get(key):
            raise ValidationError(key, "required string")
    if raw["affect_label"] not in AFFECT_LABELS:
        raise ValidationError("affect_label",
                              f"{raw['affect_label']!r} not in {AFFECT_LABELS}")
    for key in ("face_asset", "sound_asset"):
        if not assets.exists(raw[key]):
            raise AssetMissing(key, raw[key])
    description = raw.get("description", "")
    if not isinstance(description, str):
        raise ValidationError("description", "must be a string")
    extra = set(raw) - {"id", "affect_label", "face_asset", "sound_asset", "description"}
    if extra:
        raise ValidationError(sorted(extra)[0], "unexpected field")
    return {
        "id": raw["id"],
        "affect_label": raw["affect_label"],
        "face_asset": raw["face_asset"],
        "sound_asset": raw["sound_asset"],
        "description": description,
    }


def validate_robot(raw: dict) -> dict:
    if not isinstance(raw.get("robot_name"), str) or not raw["robot_name"]:
        raise ValidationError("robot_name", "required string")
    out = {"robot_name": raw["robot_name"], "actuators": [], "sensors": []}
    for group, kinds in (("actuators", ACTUATOR_KINDS), ("sensors", SENSOR_KINDS)):
        items = raw.get(group, [])
        if not isinstance(items, list):
            raise ValidationError(group, "must be a list")
        names = set()
        for i, item in enumerate(items):
            path = f"{group}[{i}]"
            if not isinstance(item, dict):
                raise ValidationError(path, "must be an object")
            name = item.get("name")
            kind = item.get("kind")
            if not isinstance(name, str) or not name:
                raise ValidationError(f"{path}.name", "required string")
            if name in names:
                raise ValidationError(f"{path}.name", f"duplicate component {name!r}")
            names.add(name)
            if kind not in kinds:
                raise ValidationError(f"{path}.kind", f"{kind!r} not in {kinds}")
            params = item.get("params", {})
            if not isinstance(params, dict):
                raise ValidationError(f"{path}.params", "must be an object")
            out[group].append({"name": name, "kind": kind, "params": params})
    extra = set(raw) - {"robot_name", "actuators", "sensors"}
    if extra:
        raise ValidationError(sorted(extra)[0], "unexpected field")
    return out


def _atomic_write(path: str, blob: bytes) -> None:
    tmp = f"{path}.tmp.{os.getpid()}.{threading.get_ident()}"
    with open(tmp, "wb") as fh:
        fh.write(blob)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _canonical(doc) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


class AssetStore:
    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._manifest_path = os.path.join(root, "manifest.json")
        self._lock = threading.Lock()
        if os.path.exists(self._manifest_path):
            with open(self._manifest_path, "rb") as fh:
                self._manifest = json.loads(fh.read().decode("utf-8"))
        else:
            self._manifest = {}

    def _flush(self) -> None:
        _atomic_write(self._manifest_path, _canonical(self._manifest))

    def put(self, asset_id: str, blob: bytes) -> None:
        if not asset_id or "/" in asset_id or asset_id.startswith("."):
            raise ValidationError("asset_id", f"bad asset id {asset_id!r}")
        with self._lock:
            _atomic_write(os.path.join(self.root, asset_id), blob)
            self._manifest[asset_id] = {
                "size": len(blob),
                "sha256": hashlib.sha256(blob).hexdigest(),
            }
            self._flush()

    def get(self, asset_id: str) -> bytes:
        if not self.exists(asset_id):
            raise NotFound(f"asset {asset_id!r}")
        with open(os.path.join(self.root, asset_id), "rb") as fh:
            return fh.read()

    def exists(self, asset_id: str) -> bool:
        return asset_id in self._manifest

    def ids(self) -> list[str]:
        return sorted(self._manifest)


class BehaviorStore:
    """Profiles + robot definition + assets under one directory."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self.assets = AssetStore(os.path.join(data_dir, "assets"))
        self._profiles_path = os.path.join(data_dir, "profiles.json")
        self._robot_path = os.path.join(data_dir, "robot.json")
        self._lock = threading.RLock()
        self._profiles: dict[str, dict] = {}
        self._robot: dict | None = None
        if os.path.exists(self._profiles_path):
            with open(self._profiles_path, "rb") as fh:
                self._profiles = json.loads(fh.read().decode("utf-8"))
        if os.path.exists(self._robot_path):
            with open(self._robot_path, "rb") as fh:
                self._robot = json.loads(fh.read().decode("utf-8"))

    # -- profiles ------------------------------------------------------

    def create_profile(self, raw: dict) -> dict:
        with self._lock:
            record = validate_profile(raw, self.assets)
            if record["id"] in self._profiles:
                raise ValidationError("id", f"profile {record['id']!r} already exists")
            self._profiles[record["id"]] = record
            _atomic_write(self._profiles_path, _canonical(self._profiles))
            return record

    def update_profile(self, profile_id: str, raw: dict) -> dict:
        with self._lock:
            if profile_id not in self._profiles:
                raise NotFound(f"profile {profile_id!r}")
            raw = {**raw, "id": profile_id}
            record = validate_profile(raw, self.assets)
            self._profiles[profile_id] = record
            _atomic_write(self._profiles_path, _canonical(self._profiles))
            return record

    def get_profile(self, profile_id: str) -> dict:
        with self._lock:
            if profile_id not in self._profiles:
                raise NotFound(f"profile {profile_id!r}")
            return dict(self._profiles[profile_id])

    def list_profiles(self) -> list[dict]:
        with self._lock:
            return [dict(self._profiles[k]) for k in sorted(self._profiles)]

    def delete_profile(self, profile_id: str) -> None:
        with self._lock:
            if profile_id not in self._profiles:
                raise NotFound(f"profile {profile_id!r}")
            del self._profiles[profile_id]
            _atomic_write(self._profiles_path, _canonical(self._profiles))

    # -- robot definition ----------------------------------------------

    def put_robot(self, raw: dict) -> dict:
        with self._lock:
            record = validate_robot(raw)
            self._robot = record
            _atomic_write(self._robot_path, _canonical(record))
            return record

    def get_robot(self) -> dict:
        with self._lock:
            if self._robot is None:
                raise NotFound("robot definition")
            return json.loads(json.dumps(self._robot))

    # -- dump ------------------------------------------------------------

    def export_dump(self) -> bytes:
        with self._lock:
            doc = {
                "version": 1,
                "profiles": self._profiles,
                "robot": self._robot,
                "assets": {
                    asset_id: base64.b64encode(self.assets.get(asset_id)).decode("ascii")
                    for asset_id in self.assets.ids()
                },
            }
            return _canonical(doc)

    def import_dump(self, blob: bytes) -> None:
        doc = json.loads(blob.decode("utf-8"))
        if doc.get("version") != 1:
            raise ValidationError("version", f"unsupported dump version {doc.get('version')}")
        with self._lock:
            for asset_id, b64 in doc.get("assets", {}).items():
                self.assets.put(asset_id, base64.b64decode(b64))
            for raw in doc.get("profiles", {}).values():
                record = validate_profile(raw, self.assets)
                self._profiles[record["id"]] = record
            _atomic_write(self._profiles_path, _canonical(self._profiles))
            if doc.get("robot") is not None:
                self.put_robot(doc["robot"])
