"""Web service layer: FastAPI app and websocket wire types."""

from .app import create_app

__all__ = ["create_app"]
