"""Clock injection and timestamp helpers.

A clock is any zero-argument callable returning the current UTC time as
integer epoch milliseconds. Services take a clock so tests and the
simulator can control time.
"""

from __future__ import annotations

import time
from datetime import datetime, timezone


def system_clock() -> int:
    return time.time_ns() // 1_000_000


class ManualClock:
    """Settable clock for tests: starts at `start` ms and only moves on demand."""

    def __init__(self, start: int = 1_000_000_000_000):
        self._now = start

    def __call__(self) -> int:
        return self._now

    def advance(self, ms: int) -> None:
        self._now += ms

    def set(self, now: int) -> None:
        self._now = now


def ms_to_iso(ms: int) -> str:
    """Epoch ms -> ISO-8601 UTC with millisecond precision, e.g. 2026-01-02T03:04:05.678Z."""
    seconds, millis = divmod(ms, 1000)
    dt = datetime.fromtimestamp(seconds, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{millis:03d}Z"


def iso_to_ms(text: str) -> int:
    dt = datetime.strptime(text, "%Y-%m-%dT%H:%M:%S.%fZ").replace(tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)
