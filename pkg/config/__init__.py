"""Environment-driven defaults for the endqt simulator."""

from . import settings

__all__ = ["settings"]
