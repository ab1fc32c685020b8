"""Parallelism cap shared by batch operations (LINKSPECTRA_THREADS)."""

import os


def max_threads() -> int:
    raw = os.environ.get("LINKSPECTRA_THREADS", "")
    if raw.strip():
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"LINKSPECTRA_THREADS={raw!r} is not an integer") from None
        if value < 1:
            raise ValueError("LINKSPECTRA_THREADS must be >= 1")
        return value
    return min(4, os.cpu_count() or 1)
