"""HTTP service wrapping the detection/benchmark package."""

from .app import app, create_app

__all__ = ["app", "create_app"]
