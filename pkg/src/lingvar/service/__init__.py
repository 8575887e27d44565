"""HTTP service wrapping the pipeline stages."""

from .app import create_app

__all__ = ["create_app"]
