"""VRB core module."""

from .config import Settings, get_settings
from .logging import bind_context, clear_context, configure_logging, get_logger

__all__ = [
    "Settings",
    "get_settings",
    "configure_logging",
    "get_logger",
    "bind_context",
    "clear_context",
]
