"""
ToroExtremal v1.0 - Utils Package
"""

from .serialization import dumps, loads, to_jsonable

__all__ = ["dumps", "loads", "to_jsonable"]
