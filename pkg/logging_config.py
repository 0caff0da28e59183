"""Central Loguru configuration for structured logging.

Records go to stderr as JSON so stdout stays free for reports. A rotating
file sink is added only when ``LOG_PATH`` is set.
"""

from __future__ import annotations

import os
import shutil
import sys
import threading
from pathlib import Path

from loguru import logger

LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
LOG_PATH = os.getenv("LOG_PATH", "")
LOG_ROTATION = os.getenv("LOG_ROTATION", "10 MB")
LOG_RETENTION = os.getenv("LOG_RETENTION", "7 days")
# Bytes required to enable file logging (default 50 MB)
MIN_FREE_SPACE = 50 * 1024 * 1024
# Set to a truthy value to disable file logging even when LOG_PATH is set
DISABLE_FILE_LOGGING = os.getenv("DISABLE_FILE_LOGGING", "").lower() in {
    "1",
    "true",
    "yes",
}

_lock = threading.Lock()
_sink_ids: list[int] = []
_configured = False


def _configure(level: str = LOG_LEVEL) -> None:
    """Configure Loguru sinks with structured JSON output in a thread-safe manner."""
    global _sink_ids, _configured
    with _lock:
        if not _configured:
            # drop loguru's default plain-text stderr handler
            logger.remove()
            _configured = True
        for sink_id in _sink_ids:
            logger.remove(sink_id)
        _sink_ids = [logger.add(sys.stderr, level=level, serialize=True)]

    if not LOG_PATH or DISABLE_FILE_LOGGING:
        return

    path = Path(LOG_PATH)
    path.parent.mkdir(parents=True, exist_ok=True)
    free_space = shutil.disk_usage(path.parent).free
    if free_space < MIN_FREE_SPACE:
        logger.warning(
            "Insufficient disk space for {}; skipping file logging ({:.2f} MB free)",
            path,
            free_space / (1024 * 1024),
        )
        return

    with _lock:
        _sink_ids.append(
            logger.add(
                path,
                rotation=LOG_ROTATION,
                retention=LOG_RETENTION,
                level=level,
                enqueue=True,
                serialize=True,
            )
        )


def set_log_level(level: str) -> None:
    """Update logger level at runtime."""
    _configure(level)


_configure()
