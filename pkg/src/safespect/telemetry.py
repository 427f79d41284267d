"""Deterministic tick logging: canonical line-delimited records, stable
hashing, and the parsing side of replay (`.telemetry.jsonl`)."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .geometry import Vec3

TELEMETRY_VERSION = 1


class SequenceError(ValueError):
    """Record ticks must increase by exactly one."""


class LogFormatError(ValueError):
    """The telemetry document is corrupt or missing its header."""


class ScenarioMismatch(ValueError):
    """Replay inputs do not belong to this scenario/engine/seed."""


@dataclass(frozen=True)
class InputFrame:
    axes: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    takeoff: bool = False
    rth: bool = False
    autopilot_toggle: bool = False
    mark: tuple[float, float] | None = None
    gaze_origin: Vec3 = (0.0, 0.0, 1.7)
    gaze_direction: Vec3 = (0.0, 1.0, 0.0)

    def clamped(self) -> "InputFrame":
        axes = tuple(max(-1.0, min(1.0, a)) for a in self.axes)
        return InputFrame(
            axes=axes,
            takeoff=self.takeoff,
            rth=self.rth,
            autopilot_toggle=self.autopilot_toggle,
            mark=self.mark,
            gaze_origin=self.gaze_origin,
            gaze_direction=self.gaze_direction,
        )


def input_to_dict(f: InputFrame) -> dict:
    return {
        "axes": list(f.axes),
        "takeoff": f.takeoff,
        "rth": f.rth,
        "autopilot_toggle": f.autopilot_toggle,
        "mark": list(f.mark) if f.mark is not None else None,
        "gaze_origin": list(f.gaze_origin),
        "gaze_direction": list(f.gaze_direction),
    }


def input_from_dict(d: dict) -> InputFrame:
    return InputFrame(
        axes=tuple(d.get("axes", (0.0, 0.0, 0.0, 0.0))),
        takeoff=bool(d.get("takeoff", False)),
        rth=bool(d.get("rth", False)),
        autopilot_toggle=bool(d.get("autopilot_toggle", False)),
        mark=tuple(d["mark"]) if d.get("mark") is not None else None,
        gaze_origin=tuple(d.get("gaze_origin", (0.0, 0.0, 1.7))),
        gaze_direction=tuple(d.get("gaze_direction", (0.0, 1.0, 0.0))),
    )


@dataclass(frozen=True)
class TelemetryRecord:
    tick: int
    input: InputFrame
    drone: dict
    view: dict
    events: tuple[str, ...]
    hud_element_count: int


def _jsonable(value):
    """Replace non-finite floats so canonical JSON stays portable."""
    if isinstance(value, float):
        if math.isinf(value):
            return {"inf": 1 if value > 0 else -1}
        if math.isnan(value):
            return {"nan": 1}
        return value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def canonical_line(obj: dict) -> str:
    """Canonical serialization: sorted keys, no whitespace, shortest
    round-trip float repr (json default)."""
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def record_to_dict(rec: TelemetryRecord) -> dict:
    return {
        "tick": rec.tick,
        "input": input_to_dict(rec.input),
        "drone": rec.drone,
        "view": rec.view,
        "events": list(rec.events),
        "hud_element_count": rec.hud_element_count,
    }


@dataclass
class TelemetryLog:
    header: dict
    records: list[TelemetryRecord] = field(default_factory=list)

    @classmethod
    def new(cls, scenario_sha256: str, engine_sha256: str, seed: int, mode: str, scenario_doc: str) -> "TelemetryLog":
        return cls(
            header={
                "format": "safespect-telemetry",
                "version": TELEMETRY_VERSION,
                "scenario_sha256": scenario_sha256,
                "engine_sha256": engine_sha256,
                "seed": seed,
                "mode": mode,
                "scenario_doc": scenario_doc,
            }
        )


def record_tick(log: TelemetryLog, rec: TelemetryRecord) -> TelemetryLog:
    expected = log.records[-1].tick + 1 if log.records else 0
    if rec.tick != expected:
        raise SequenceError(f"expected tick {expected}, got {rec.tick}")
    log.records.append(rec)
    return log


def serialize_log(log: TelemetryLog) -> str:
    lines = [canonical_line(log.header)]
    lines.extend(canonical_line(record_to_dict(r)) for r in log.records)
    return "\n".join(lines) + "\n"


def stream_hash(log: TelemetryLog) -> str:
    return hashlib.sha256(serialize_log(log).encode("utf-8")).hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_log(text: str) -> TelemetryLog:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LogFormatError("empty telemetry document")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"bad header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != "safespect-telemetry":
        raise LogFormatError("missing telemetry header")
    log = TelemetryLog(header=header)
    for i, ln in enumerate(lines[1:]):
        try:
            d = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise LogFormatError(f"bad record at line {i + 2}: {exc}") from exc
        rec = TelemetryRecord(
            tick=d["tick"],
            input=input_from_dict(d["input"]),
            drone=d["drone"],
            view=d["view"],
            events=tuple(d["events"]),
            hud_element_count=d["hud_element_count"],
        )
        record_tick(log, rec)
    return log


# --- input scripts (same InputFrame lines, lighter header) --------------


def serialize_script(frames: list[InputFrame], scenario_sha256: str) -> str:
    header = {"format": "safespect-script", "version": TELEMETRY_VERSION, "scenario_sha256": scenario_sha256}
    lines = [canonical_line(header)]
    lines.extend(canonical_line(input_to_dict(f)) for f in frames)
    return "\n".join(lines) + "\n"


def parse_script(text: str) -> tuple[dict, list[InputFrame]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LogFormatError("empty script document")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"bad header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != "safespect-script":
        raise LogFormatError("missing script header")
    frames = []
    for i, ln in enumerate(lines[1:]):
        try:
            frames.append(input_from_dict(json.loads(ln)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise LogFormatError(f"bad input frame at line {i + 2}: {exc}") from exc
    return header, frames
