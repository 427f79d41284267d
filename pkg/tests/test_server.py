import json
import warnings
from pathlib import Path

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from safespect.server import wire
from safespect.server.app import ServiceConfig, create_app
from safespect.stock import stock_document

SCRIPT_PATH = (
    Path(__file__).resolve().parent.parent
    / "src"
    / "safespect"
    / "data"
    / "scripts"
    / "short_a_perfect.script.jsonl"
)


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(ServiceConfig(realtime_factor=0.0))) as c:
        yield c


@pytest.fixture(scope="module")
def perfect_script():
    return SCRIPT_PATH.read_text()


class TestRest:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["protocol"] == wire.PROTOCOL_VERSION

    def test_scenario_listing(self, client):
        stock = client.get("/scenarios").json()["stock"]
        assert "short_a" in stock
        doc = client.get("/scenarios/short_a").json()["document"]
        assert json.loads(doc)["seed"] == 11

    def test_unknown_scenario(self, client):
        resp = client.get("/scenarios/nope")
        assert resp.status_code == 422
        assert resp.json()["code"] == "unknown_scenario"

    def test_validate_ok(self, client):
        body = client.post("/validate", json={"document": stock_document("short_a")}).json()
        assert body["ok"] and body["violations"] == []

    def test_validate_schema_violation(self, client):
        doc = json.loads(stock_document("short_a"))
        doc["layers"] = 0
        body = client.post("/validate", json={"document": json.dumps(doc)}).json()
        assert not body["ok"]
        assert any("layers" in v for v in body["violations"])

    def test_validate_parse_error(self, client):
        body = client.post("/validate", json={"document": "{oops"}).json()
        assert not body["ok"] and body["parse_error"]

    def test_fly_and_replay_round_trip(self, client, perfect_script):
        resp = client.post(
            "/fly",
            json={"scenario": stock_document("short_a"), "script": perfect_script, "mode": "adapt_ar"},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["metrics"]["marked_pct"] == 100.0
        assert body["metrics"]["coverage_pct"] == 100.0
        assert body["metrics"]["false_marks"] == 0

        rep = client.post("/replay", json={"telemetry": body["telemetry"]}).json()
        assert rep["ok"] and rep["live_hash"] == body["telemetry_hash"]

        met = client.post("/metrics", json={"telemetry": body["telemetry"]}).json()
        assert met["metrics"]["marked_pct"] == 100.0

    def test_fly_scenario_mismatch(self, client, perfect_script):
        resp = client.post(
            "/fly",
            json={"scenario": stock_document("long_a"), "script": perfect_script, "mode": "adapt_ar"},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "scenario_mismatch"

    def test_fly_bad_mode(self, client, perfect_script):
        resp = client.post(
            "/fly",
            json={"scenario": stock_document("short_a"), "script": perfect_script, "mode": "hologram"},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "bad_mode"

    def test_replay_corrupt_log(self, client):
        resp = client.post("/replay", json={"telemetry": "not a log"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "bad_telemetry"


class TestWireProtocol:
    def test_round_trip_every_kind(self):
        msgs = [
            wire.Hello(mode="adapt_ar"),
            wire.Input(frame=wire.InputFrameModel(axes=(0.1, 0.0, 0.0, 0.0))),
            wire.Pause(),
            wire.Resume(),
            wire.Welcome(scenario_digest="a" * 64, mode="adapt_ar", scenario={}, tick_rate_hz=50.0),
            wire.Frame(tick=3, drone={}, hud={}, events=["takeoff"]),
            wire.MissionEnd(metrics={"marked_pct": 50.0}),
            wire.Error(message="boom"),
        ]
        for msg in msgs:
            assert wire.decode(wire.encode(msg)) == msg

    def test_unknown_tag(self):
        with pytest.raises(wire.ProtocolError):
            wire.decode('{"type":"teleport"}')

    def test_malformed_json(self):
        with pytest.raises(wire.ProtocolError):
            wire.decode("{nope")

    def test_error_names_field_path(self):
        with pytest.raises(wire.ProtocolError) as exc:
            wire.decode('{"type":"input","frame":{"axes":[1,2]}}')
        assert "frame.axes" in str(exc.value)

    def test_extra_field_rejected(self):
        with pytest.raises(wire.ProtocolError):
            wire.decode('{"type":"pause","extra":1}')


class TestWebSocket:
    def make_client(self):
        return TestClient(create_app(ServiceConfig(realtime_factor=0.0)))

    def test_handshake_and_first_frames(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                welcome = wire.decode(ws.receive_text())
                assert isinstance(welcome, wire.Welcome)
                assert welcome.tick_rate_hz == 50.0
                assert welcome.scenario["seed"] == 11
                frame = wire.decode(ws.receive_text())
                assert isinstance(frame, wire.Frame)
                assert frame.tick == 0

    def test_schema_version_mismatch_refused(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar", schema_version=99)))
                msg = wire.decode(ws.receive_text())
                assert isinstance(msg, wire.Error)
                assert "schema version" in msg.message

    def test_bad_mode_refused(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="hologram")))
                msg = wire.decode(ws.receive_text())
                assert isinstance(msg, wire.Error)

    def test_takeoff_input_is_applied(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                wire.decode(ws.receive_text())  # welcome
                ws.send_text(
                    wire.encode(wire.Input(frame=wire.InputFrameModel(takeoff=True)))
                )
                seen_takeoff = False
                for _ in range(40):
                    msg = wire.decode(ws.receive_text())
                    assert isinstance(msg, wire.Frame)
                    if "takeoff" in msg.events:
                        seen_takeoff = True
                        assert msg.drone["airborne"]
                        break
                assert seen_takeoff

    def test_button_edges_do_not_repeat_when_held(self):
        # after a takeoff input, later held frames must not re-send the edge
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                wire.decode(ws.receive_text())
                ws.send_text(
                    wire.encode(wire.Input(frame=wire.InputFrameModel(takeoff=True)))
                )
                takeoffs = 0
                for _ in range(60):
                    msg = wire.decode(ws.receive_text())
                    takeoffs += msg.events.count("takeoff")
                assert takeoffs <= 1

    def test_second_cockpit_refused_while_attached(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                wire.decode(ws.receive_text())
                with client.websocket_connect("/session") as ws2:
                    msg = wire.decode(ws2.receive_text())
                    assert isinstance(msg, wire.Error)
                    assert "busy" in msg.message

    def test_session_survives_reconnect(self):
        with self.make_client() as client:
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                wire.decode(ws.receive_text())
                ws.send_text(
                    wire.encode(wire.Input(frame=wire.InputFrameModel(takeoff=True)))
                )
                last_tick = -1
                for _ in range(30):
                    msg = wire.decode(ws.receive_text())
                    last_tick = msg.tick
            with client.websocket_connect("/session") as ws:
                ws.send_text(wire.encode(wire.Hello(mode="adapt_ar")))
                welcome = wire.decode(ws.receive_text())
                assert isinstance(welcome, wire.Welcome)
                frame = wire.decode(ws.receive_text())
                assert frame.tick > last_tick
                assert frame.drone["airborne"]
