"""Small helpers shared by the CSV writers."""

from __future__ import annotations

import contextlib


def text_sink(target):
    """Context manager yielding a writable text stream for a path or an open stream."""
    if hasattr(target, "write"):
        return contextlib.nullcontext(target)
    return open(target, "w", newline="")
