"""safespect: deterministic drone facade-inspection simulator with an
adaptive mission/safety HUD, a session service, and headless tooling."""

__version__ = "0.1.0"
