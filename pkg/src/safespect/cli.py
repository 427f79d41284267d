"""Headless command line, a thin client of the session service API.

By default every subcommand talks to an in-process service instance; pass
--url to target a running `safespect serve` instead. Environment variables
use the SAFESPECT_ prefix (e.g. SAFESPECT_PORT).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .hud import ADAPT_AR, FULL_AR, TWOD_ONLY
from .server.app import ServiceConfig, create_app
from .stock import STOCK_NAMES, stock_document

MODE_ALIASES = {"2d": TWOD_ONLY, "full": FULL_AR, "adapt": ADAPT_AR}

EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_DIVERGED = 4
EXIT_BIND = 5


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=120.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return TestClient(create_app())


def _read_scenario(value: str) -> str:
    """A path to a .scenario.json file, or the name of a stock scenario."""
    if value in STOCK_NAMES:
        return stock_document(value)
    path = Path(value)
    if not path.exists():
        raise click.ClickException(f"no such scenario file or stock name: {value}")
    return path.read_text()


@click.group(context_settings={"auto_envvar_prefix": "SAFESPECT"})
def main():
    """Drone facade-inspection simulator: validate, fly, score, replay, serve."""


@main.command()
@click.argument("scenario")
@click.option("--url", default=None, help="Remote service URL (default: in-process).")
def validate(scenario, url):
    """Check a scenario document; exit 0 iff it has no violations."""
    text = _read_scenario(scenario)
    with _client(url) as client:
        body = client.post("/validate", json={"document": text}).json()
    if body.get("parse_error"):
        click.echo(f"parse error: {body['parse_error']}", err=True)
        sys.exit(EXIT_PARSE)
    if not body["ok"]:
        for v in body["violations"]:
            click.echo(v, err=True)
        sys.exit(EXIT_PARSE)
    for v in body["violations"]:
        click.echo(v, err=True)
    if body["violations"]:
        sys.exit(EXIT_VIOLATIONS)
    click.echo("ok")


@main.command()
@click.option("--scenario", required=True, help="Scenario file or stock name.")
@click.option("--script", "script_path", required=True, type=click.Path(exists=True), help="Per-tick input script.")
@click.option("--mode", default="adapt", type=click.Choice(sorted(MODE_ALIASES)), show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Telemetry output path.")
@click.option("--seed-override", type=int, default=None)
@click.option("--url", default=None)
def fly(scenario, script_path, mode, out, seed_override, url):
    """Run a scripted flight headlessly; prints the metrics report."""
    text = _read_scenario(scenario)
    script = Path(script_path).read_text()
    with _client(url) as client:
        resp = client.post(
            "/fly",
            json={
                "scenario": text,
                "script": script,
                "mode": MODE_ALIASES[mode],
                "seed_override": seed_override,
            },
        )
    if resp.status_code == 422:
        body = resp.json()
        click.echo(body.get("message", "request rejected"), err=True)
        sys.exit(EXIT_MISMATCH if body.get("code") == "scenario_mismatch" else EXIT_PARSE)
    body = resp.json()
    if out:
        Path(out).write_text(body["telemetry"])
    click.echo(json.dumps(body["metrics"], indent=2, sort_keys=True))


@main.command()
@click.argument("telemetry", type=click.Path(exists=True))
@click.option("--url", default=None)
def metrics(telemetry, url):
    """Recompute the metrics report from a telemetry log."""
    with _client(url) as client:
        resp = client.post("/metrics", json={"telemetry": Path(telemetry).read_text()})
    if resp.status_code == 422:
        click.echo(resp.json().get("message", "corrupt log"), err=True)
        sys.exit(EXIT_PARSE)
    click.echo(json.dumps(resp.json()["metrics"], indent=2, sort_keys=True))


@main.command()
@click.argument("telemetry", type=click.Path(exists=True))
@click.option("--url", default=None)
def replay(telemetry, url):
    """Re-run a log's inputs and verify the stream hash; exit 0 iff identical."""
    with _client(url) as client:
        resp = client.post("/replay", json={"telemetry": Path(telemetry).read_text()})
    if resp.status_code == 422:
        click.echo(resp.json().get("message", "corrupt log"), err=True)
        sys.exit(EXIT_PARSE)
    body = resp.json()
    if body["ok"]:
        click.echo(f"replay ok: {body['live_hash']}")
        return
    tick = body.get("divergent_tick")
    click.echo(f"replay diverged at tick {tick}" if tick is not None else "replay hash mismatch", err=True)
    sys.exit(EXIT_DIVERGED)


@main.command()
@click.option("--scenario", default="short_a", help="Scenario file or stock name.")
@click.option("--mode", default="adapt", type=click.Choice(sorted(MODE_ALIASES)), show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--realtime-factor", default=1.0, show_default=True, type=float)
@click.option("--seed-override", type=int, default=None)
def serve(scenario, mode, host, port, realtime_factor, seed_override):
    """Run the session service for a cockpit."""
    import uvicorn

    config = ServiceConfig(
        scenario_doc=_read_scenario(scenario),
        mode=MODE_ALIASES[mode],
        realtime_factor=realtime_factor,
        seed_override=seed_override,
    )
    import socket

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"bind failed on {host}:{port}: {exc}", err=True)
        sys.exit(EXIT_BIND)
    finally:
        probe.close()

    app = create_app(config)
    click.echo(f"safespect service listening on {host}:{port} (mode={MODE_ALIASES[mode]})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--scenario", default="short_a", help="Scenario file or stock name.")
@click.option("--mode", default="adapt", type=click.Choice(sorted(MODE_ALIASES)))
@click.option("--out", type=click.Path(), required=True)
def script(scenario, mode, out):
    """Record a fresh autopilot input script with the built-in flight bot."""
    from .scenario import emit_scenario, parse_scenario
    from .scripting import record_autopilot_flight
    from .telemetry import serialize_script, sha256_text

    spec = parse_scenario(_read_scenario(scenario))
    frames = record_autopilot_flight(spec, MODE_ALIASES[mode])
    Path(out).write_text(serialize_script(frames, sha256_text(emit_scenario(spec))))
    click.echo(f"wrote {len(frames)} input frames to {out}")


if __name__ == "__main__":
    main()
