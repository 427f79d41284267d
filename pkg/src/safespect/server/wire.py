"""Wire protocol messages exchanged with the cockpit (docs/protocol.md).

Text framing: one JSON object per message with a `type` tag. encode/decode
round-trip every message kind; unknown tags and malformed payloads raise
ProtocolError with the offending field path.
"""

from __future__ import annotations

import json
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    pass


class InputFrameModel(BaseModel):
    model_config = {"extra": "forbid"}

    axes: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    takeoff: bool = False
    rth: bool = False
    autopilot_toggle: bool = False
    mark: Optional[tuple[float, float]] = None
    gaze_origin: tuple[float, float, float] = (0.0, 0.0, 1.7)
    gaze_direction: tuple[float, float, float] = (0.0, 1.0, 0.0)


class Hello(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["hello"] = "hello"
    mode: str
    schema_version: int = PROTOCOL_VERSION


class Input(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["input"] = "input"
    frame: InputFrameModel


class Pause(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["pause"] = "pause"


class Resume(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["resume"] = "resume"


class Welcome(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["welcome"] = "welcome"
    schema_version: int = PROTOCOL_VERSION
    scenario_digest: str
    mode: str
    scenario: dict
    tick_rate_hz: float


class Frame(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["frame"] = "frame"
    tick: int
    drone: dict
    hud: dict
    events: list[str]


class MissionEnd(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["mission_end"] = "mission_end"
    metrics: dict


class Error(BaseModel):
    model_config = {"extra": "forbid"}
    type: Literal["error"] = "error"
    message: str


WireMessage = Union[Hello, Input, Pause, Resume, Welcome, Frame, MissionEnd, Error]

_BY_TAG = {
    "hello": Hello,
    "input": Input,
    "pause": Pause,
    "resume": Resume,
    "welcome": Welcome,
    "frame": Frame,
    "mission_end": MissionEnd,
    "error": Error,
}


def encode(msg: WireMessage) -> str:
    return msg.model_dump_json()


def decode(text: str) -> WireMessage:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed message: {exc}") from exc
    if not isinstance(doc, dict) or "type" not in doc:
        raise ProtocolError("message must be an object with a 'type' tag")
    cls = _BY_TAG.get(doc["type"])
    if cls is None:
        raise ProtocolError(f"unknown message type {doc['type']!r}")
    try:
        return cls.model_validate(doc)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(p) for p in first["loc"])
        raise ProtocolError(f"invalid {doc['type']} message at {path}: {first['msg']}") from exc
