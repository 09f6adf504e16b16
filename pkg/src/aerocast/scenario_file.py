"""JSON scenario files: schema-checked loading and lossless writing."""

from __future__ import annotations

import json
from dataclasses import fields
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import AerocastError
from .lcrt import DroneNode
from .simulator import MobileSpec, Policy, Scenario

SCHEMA_VERSION = 1
_SCALARS = (
    "radius", "traffic_rate", "packet_size", "duration", "timestep", "channel_rate",
    "per_hop_latency", "seed", "queue_capacity",
)


class ParseError(AerocastError):
    pass


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("aerocast").joinpath("scenario.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def from_dict(doc: dict) -> Scenario:
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ParseError(f"{where}: {exc.message}") from None
    kwargs = {k: doc[k] for k in _SCALARS if k in doc}
    if "policy" in doc:
        kwargs["policy"] = Policy(doc["policy"])
    kwargs["scenario_id"] = doc["scenario_id"]
    kwargs["drones"] = tuple(
        DroneNode(d["id"], tuple(d["position"]), bool(d.get("is_source", False))) for d in doc["drones"]
    )
    kwargs["mobiles"] = tuple(
        MobileSpec(m["drone"], tuple(m["origin"]), tuple(m["destination"]), m["speed"], m.get("start_time", 0.0))
        for m in doc.get("mobiles", [])
    )
    try:
        return Scenario(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None


def to_dict(sc: Scenario) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "scenario_id": sc.scenario_id}
    for f in fields(sc):
        if f.name in _SCALARS:
            doc[f.name] = getattr(sc, f.name)
    doc["policy"] = sc.policy.value
    doc["drones"] = [
        {"id": d.id, "position": list(d.position), "is_source": d.is_source} for d in sc.drones
    ]
    doc["mobiles"] = [
        {
            "drone": m.drone,
            "origin": list(m.origin),
            "destination": list(m.destination),
            "speed": m.speed,
            "start_time": m.start_time,
        }
        for m in sc.mobiles
    ]
    return doc


def load(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return from_dict(doc)


def dumps(sc: Scenario) -> str:
    return json.dumps(to_dict(sc), indent=2) + "\n"


def save(sc: Scenario, path) -> None:
    Path(path).write_text(dumps(sc), encoding="utf-8", newline="\n")
