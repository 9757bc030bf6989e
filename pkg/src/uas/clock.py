"""Simulation clock: 5-minute ticks counted from a fixed UTC epoch.

The epoch falls on a Monday so every 4-week window holds exactly 20 workdays.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

TICK_MINUTES = 5
TICKS_PER_DAY = 24 * 60 // TICK_MINUTES  # 288
MINUTES_PER_DAY = 24 * 60

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)  # a Monday


def tick_to_datetime(tick: int) -> datetime:
    return EPOCH + timedelta(minutes=TICK_MINUTES * int(tick))


def tick_to_iso(tick: int) -> str:
    return tick_to_datetime(tick).strftime("%Y-%m-%dT%H:%M:%SZ")


def iso_to_tick(stamp: str) -> int:
    dt = datetime.strptime(stamp, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)
    minutes = (dt - EPOCH).total_seconds() / 60.0
    tick, rem = divmod(minutes, TICK_MINUTES)
    if rem:
        raise ValueError(f"timestamp {stamp!r} is not aligned to {TICK_MINUTES}-minute ticks")
    return int(tick)


def minute_of_day(tick: int) -> int:
    return (int(tick) * TICK_MINUTES) % MINUTES_PER_DAY


def day_index(tick: int) -> int:
    return int(tick) // TICKS_PER_DAY


def weekday(tick: int) -> int:
    """0 = Monday ... 6 = Sunday."""
    return day_index(tick) % 7
