from .app import create_app
from .session import LiveSession, SessionState

__all__ = ["create_app", "LiveSession", "SessionState"]
