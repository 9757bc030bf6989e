"""Per-tick state kernels, compiled with numba when available.

The inner loop of a scenario advances every agent's needs, activity timers,
and travel progress once per 5-minute tick.  That update is the hot path, so
it lives here in two interchangeable implementations: a numba ``@njit`` loop
and a pure-numpy vectorized fallback.  Selection order:

* ``UAS_NUMBA=0`` (or ``false``/``off``) forces the numpy path;
* otherwise the numba path is used when numba imports cleanly.

``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import math
import os

import numpy as np

# Activity codes shared with the engine.  Kept as plain ints so the jitted
# kernel does not depend on enum objects.
ACT_HOME = 0
ACT_WORK = 1
ACT_EAT = 2
ACT_RECREATE = 3
ACT_TRAVEL = 4

# Event bits reported per agent per tick.
EV_ARRIVED = 1
EV_COMPLETED = 2
EV_HUNGRY = 4
EV_SOCIAL = 8


def _env_allows_numba() -> bool:
    flag = os.environ.get("UAS_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


def advance_tick_numpy(
    activity: np.ndarray,
    hunger: np.ndarray,
    social: np.ndarray,
    msm: np.ndarray,
    onset: np.ndarray,
    rate: np.ndarray,
    remaining: np.ndarray,
    progress: np.ndarray,
    total: np.ndarray,
    events: np.ndarray,
    dt: float,
    social_rate: float,
    awake: bool,
    hunger_crit: float,
    social_crit: float,
    step_m: float,
) -> None:
    """Vectorized reference implementation of one tick of state updates.

    Mutates the state arrays in place and writes an event bitmask per agent.
    Needs accrue per the standard rule: the meal clock always advances, hunger
    grows once the clock passes the onset threshold, and social need grows
    only while awake and not recreating.
    """
    events[:] = 0

    msm += dt
    hunger += np.where(msm > onset, rate * dt, 0.0)
    if awake:
        social += np.where(activity != ACT_RECREATE, social_rate * dt, 0.0)

    busy = (activity == ACT_EAT) | (activity == ACT_RECREATE)
    remaining[busy] -= dt
    events[busy & (remaining <= 0.0)] |= EV_COMPLETED

    moving = activity == ACT_TRAVEL
    progress[moving] = np.minimum(progress[moving] + step_m, total[moving])
    events[moving & (progress >= total)] |= EV_ARRIVED

    if awake:
        interruptible = (
            (activity == ACT_HOME) | (activity == ACT_WORK) | (activity == ACT_RECREATE)
        )
        events[interruptible & (hunger >= hunger_crit)] |= EV_HUNGRY
        events[(activity == ACT_HOME) & (social >= social_crit)] |= EV_SOCIAL


def _advance_tick_loop(
    activity,
    hunger,
    social,
    msm,
    onset,
    rate,
    remaining,
    progress,
    total,
    events,
    dt,
    social_rate,
    awake,
    hunger_crit,
    social_crit,
    step_m,
):  # pragma: no cover - exercised through the jitted wrapper
    n = activity.shape[0]
    for i in range(n):
        ev = 0
        act = activity[i]

        msm[i] += dt
        if msm[i] > onset[i]:
            hunger[i] += rate[i] * dt
        if awake and act != ACT_RECREATE:
            social[i] += social_rate * dt

        if act == ACT_EAT or act == ACT_RECREATE:
            remaining[i] -= dt
            if remaining[i] <= 0.0:
                ev |= EV_COMPLETED
        elif act == ACT_TRAVEL:
            p = progress[i] + step_m
            if p > total[i]:
                p = total[i]
            progress[i] = p
            if p >= total[i]:
                ev |= EV_ARRIVED

        if awake:
            if act != ACT_EAT and act != ACT_TRAVEL and hunger[i] >= hunger_crit:
                ev |= EV_HUNGRY
            if act == ACT_HOME and social[i] >= social_crit:
                ev |= EV_SOCIAL
        events[i] = ev


def haversine_km_numpy(lat1, lon1, lat2, lon2):
    """Great-circle distance in km between coordinate arrays (degrees)."""
    r = 6371.0088
    p1 = np.radians(lat1)
    p2 = np.radians(lat2)
    dp = p2 - p1
    dl = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dp / 2.0) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dl / 2.0) ** 2
    return 2.0 * r * np.arcsin(np.sqrt(a))


def _haversine_km_loop(lat1, lon1, lat2, lon2, out):  # pragma: no cover
    r = 6371.0088
    for i in range(lat1.shape[0]):
        p1 = math.radians(lat1[i])
        p2 = math.radians(lat2[i])
        dp = p2 - p1
        dl = math.radians(lon2[i]) - math.radians(lon1[i])
        a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
        out[i] = 2.0 * r * math.asin(math.sqrt(a))


USE_NUMBA = False
advance_tick = advance_tick_numpy
haversine_km = haversine_km_numpy

if _env_allows_numba():
    try:
        from numba import njit

        _advance_jit = njit(cache=True)(_advance_tick_loop)
        _haversine_jit = njit(cache=True)(_haversine_km_loop)

        def advance_tick_numba(
            activity,
            hunger,
            social,
            msm,
            onset,
            rate,
            remaining,
            progress,
            total,
            events,
            dt,
            social_rate,
            awake,
            hunger_crit,
            social_crit,
            step_m,
        ) -> None:
            _advance_jit(
                activity,
                hunger,
                social,
                msm,
                onset,
                rate,
                remaining,
                progress,
                total,
                events,
                float(dt),
                float(social_rate),
                bool(awake),
                float(hunger_crit),
                float(social_crit),
                float(step_m),
            )

        def haversine_km_numba(lat1, lon1, lat2, lon2):
            lat1 = np.ascontiguousarray(lat1, dtype=np.float64)
            lon1 = np.ascontiguousarray(lon1, dtype=np.float64)
            lat2 = np.ascontiguousarray(lat2, dtype=np.float64)
            lon2 = np.ascontiguousarray(lon2, dtype=np.float64)
            out = np.empty(lat1.shape[0], dtype=np.float64)
            _haversine_jit(lat1, lon1, lat2, lon2, out)
            return out

        advance_tick = advance_tick_numba
        haversine_km = haversine_km_numba
        USE_NUMBA = True
    except ImportError:  # numba missing: numpy fallback already bound
        pass
