"""Fingerprint minutiae extraction, compact templates and matching."""

from ._afis import *  # noqa: F401,F403
from ._afis import AfisError

__all__ = [name for name in dir() if not name.startswith("_")]
