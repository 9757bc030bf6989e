"""Dataset bundle writer: CSV tables zipped per split, labels and metadata.

Published layout per scenario: ``train.zip`` and ``test.zip``, each holding
``trajectory.csv``, ``staypoints.csv``, and ``social_links.csv``, next to
``labels.json`` and ``info.json``.  Output bytes are a pure function of the
simulation result: archive metadata carries a fixed timestamp and formatting
is pinned, so identical runs produce identical files.
"""

from __future__ import annotations

import io
import json
import os
import zipfile
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .anomalies import ActiveAnomaly
from .clock import TICKS_PER_DAY, tick_to_iso
from .engine import SimulationResult
from .errors import DataIntegrityError
from .injection import Cause, InfectionRecord
from .worldmap import SiteKind, WorldMap, project_points

TRAJECTORY_COLUMNS = ["agent_id", "timestamp", "latitude", "longitude"]
STAYPOINT_COLUMNS = [
    "agent_id",
    "arrival",
    "departure",
    "venue_type",
    "site_id",
    "latitude",
    "longitude",
]
SOCIAL_LINK_COLUMNS = ["agent_id", "friend_id", "timestamp"]

COORD_FORMAT = "%.6f"
ZIP_DATE_TIME = (1980, 1, 1, 0, 0, 0)
TRAJECTORY_CHUNK_TICKS = TICKS_PER_DAY


@dataclass(frozen=True)
class StaypointRecord:
    agent_id: int
    arrival: int
    departure: int
    venue_type: str
    site_id: int
    latitude: float
    longitude: float


def close_staypoint(agent_id: int, site, arrival: int, departure: int, world: WorldMap):
    """Materialize one completed stay as a record; guards against bad spans."""
    if departure <= arrival:
        raise DataIntegrityError(
            f"staypoint for agent {agent_id} has departure {departure} <= arrival {arrival}"
        )
    lat, lon = project_points(world, np.asarray(site.position, dtype=float))
    return StaypointRecord(
        agent_id=int(agent_id),
        arrival=int(arrival),
        departure=int(departure),
        venue_type=site.kind.value,
        site_id=site.id,
        latitude=float(lat),
        longitude=float(lon),
    )


def trajectory_rows(positions: np.ndarray, tick: int, world: WorldMap) -> pd.DataFrame:
    """One tick of trajectory records: one row per agent, projected to WGS84."""
    lat_lon = project_points(world, positions.astype(np.float64))
    return pd.DataFrame(
        {
            "agent_id": np.arange(len(positions), dtype=np.int64),
            "timestamp": tick_to_iso(tick),
            "latitude": lat_lon[:, 0],
            "longitude": lat_lon[:, 1],
        }
    )


def clip_staypoints(staypoints: np.ndarray, start: int, end: int) -> np.ndarray:
    """Restrict (agent, site, arrival, departure) rows to [start, end)."""
    if len(staypoints) == 0:
        return staypoints.reshape(0, 4)
    arr = staypoints.copy()
    keep = (arr[:, 3] > start) & (arr[:, 2] < end)
    arr = arr[keep]
    arr[:, 2] = np.maximum(arr[:, 2], start)
    arr[:, 3] = np.minimum(arr[:, 3], end)
    return arr


def build_labels(anomalies: list[ActiveAnomaly], test_start: int, test_end: int) -> list[dict]:
    """Ground-truth entries clipped to the test window; normal agents omitted."""
    out = []
    for anom in anomalies:
        start = max(anom.start, test_start)
        end = min(anom.end, test_end)
        if start >= end:
            continue
        out.append(
            {
                "agent_id": int(anom.agent_id),
                "label": anom.label,
                "start": tick_to_iso(start),
                "end": tick_to_iso(end),
            }
        )
    out.sort(key=lambda d: (d["agent_id"], d["start"]))
    return out


def infection_log_entries(infections: list[InfectionRecord]) -> list[dict]:
    out = []
    for rec in sorted(infections, key=lambda r: (r.exposed_at, r.agent_id)):
        out.append(
            {
                "agent_id": rec.agent_id,
                "cause": rec.cause.value,
                "source_agent": rec.source_agent,
                "source_site": rec.source_site,
                "exposed_at": tick_to_iso(rec.exposed_at),
                "infectious_at": tick_to_iso(rec.infectious_at),
                "recovered_at": tick_to_iso(rec.recovered_at),
            }
        )
    return out


def _staypoint_frame(rows: np.ndarray, world: WorldMap) -> pd.DataFrame:
    if len(rows) == 0:
        return pd.DataFrame(columns=STAYPOINT_COLUMNS)
    sites = [world.site(int(s)) for s in rows[:, 1]]
    coords = project_points(world, np.asarray([s.position for s in sites], dtype=float))
    return pd.DataFrame(
        {
            "agent_id": rows[:, 0],
            "arrival": [tick_to_iso(t) for t in rows[:, 2]],
            "departure": [tick_to_iso(t) for t in rows[:, 3]],
            "venue_type": [s.kind.value for s in sites],
            "site_id": rows[:, 1],
            "latitude": coords[:, 0],
            "longitude": coords[:, 1],
        }
    )


def _link_frame(rows: np.ndarray) -> pd.DataFrame:
    if len(rows) == 0:
        return pd.DataFrame(columns=SOCIAL_LINK_COLUMNS)
    return pd.DataFrame(
        {
            "agent_id": rows[:, 0],
            "friend_id": rows[:, 1],
            "timestamp": [tick_to_iso(t) for t in rows[:, 2]],
        }
    )


def _frame_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=COORD_FORMAT, lineterminator="\n")


def _write_member(zf: zipfile.ZipFile, name: str, chunks) -> int:
    """Stream text chunks into one archive member; returns data rows written."""
    info = zipfile.ZipInfo(name, date_time=ZIP_DATE_TIME)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    rows = 0
    with zf.open(info, "w") as raw:
        first = True
        for chunk in chunks:
            text = _frame_csv(chunk) if isinstance(chunk, pd.DataFrame) else chunk
            if not first:
                text = text.split("\n", 1)[1]  # drop repeated header
            raw.write(text.encode("utf-8"))
            rows += text.count("\n") - (1 if first else 0)
            first = False
    return rows


def _trajectory_chunks(result: SimulationResult, world: WorldMap, start: int, end: int):
    n = result.trajectory.shape[1]
    agent_col = np.tile(np.arange(n, dtype=np.int64), TRAJECTORY_CHUNK_TICKS)
    for chunk_start in range(start, end, TRAJECTORY_CHUNK_TICKS):
        chunk_end = min(chunk_start + TRAJECTORY_CHUNK_TICKS, end)
        ticks = range(chunk_start, chunk_end)
        block = result.trajectory[chunk_start - result.emit_start : chunk_end - result.emit_start]
        coords = project_points(world, block.reshape(-1, 2).astype(np.float64))
        stamps = np.repeat([tick_to_iso(t) for t in ticks], n)
        agents = agent_col if len(ticks) == TRAJECTORY_CHUNK_TICKS else np.tile(
            np.arange(n, dtype=np.int64), len(ticks)
        )
        yield pd.DataFrame(
            {
                "agent_id": agents,
                "timestamp": stamps,
                "latitude": coords[:, 0],
                "longitude": coords[:, 1],
            }
        )


def write_split_zip(
    path: str, result: SimulationResult, world: WorldMap, start: int, end: int
) -> dict[str, int]:
    """Write one split archive; returns row counts per table."""
    links = result.links
    if len(links):
        link_mask = (links[:, 2] < end) if start == result.emit_start else (
            (links[:, 2] >= start) & (links[:, 2] < end)
        )
        link_rows = links[link_mask]
    else:
        link_rows = np.zeros((0, 3), dtype=np.int64)
    sp_rows = clip_staypoints(result.staypoints, start, end)

    counts = {}
    with zipfile.ZipFile(path, "w") as zf:
        counts["trajectory"] = _write_member(
            zf, "trajectory.csv", _trajectory_chunks(result, world, start, end)
        )
        counts["staypoints"] = _write_member(
            zf, "staypoints.csv", [_staypoint_frame(sp_rows, world)]
        )
        counts["social_links"] = _write_member(
            zf, "social_links.csv", [_link_frame(link_rows)]
        )
    return counts


def build_info(
    result: SimulationResult,
    world: WorldMap,
    counts: dict[str, dict[str, int]],
    scenario: dict,
) -> dict:
    """Flat scenario metadata document plus the infection log."""
    w = result.windows
    info = {
        "n_agents": int(result.trajectory.shape[1]),
        "region": world.region_name,
        "mechanism": scenario.get("mechanism"),
        "anomaly_type": scenario.get("anomaly_type"),
        "intensity_mix": scenario.get("intensity_mix"),
        "seed": scenario.get("seed"),
        "transmission_prob": scenario.get("transmission_prob"),
        "selection": scenario.get("selection"),
        "n_central": scenario.get("n_central"),
        "train_start": tick_to_iso(w.train_start),
        "train_end": tick_to_iso(w.test_start),
        "test_start": tick_to_iso(w.test_start),
        "test_end": tick_to_iso(w.end),
        "train_trajectory_rows": counts["train"]["trajectory"],
        "train_staypoint_rows": counts["train"]["staypoints"],
        "train_social_link_rows": counts["train"]["social_links"],
        "test_trajectory_rows": counts["test"]["trajectory"],
        "test_staypoint_rows": counts["test"]["staypoints"],
        "test_social_link_rows": counts["test"]["social_links"],
        "source_site_id": None,
        "source_site_latitude": None,
        "source_site_longitude": None,
        "infection_log": infection_log_entries(result.infections),
    }
    if result.source_site is not None:
        site = world.site(result.source_site)
        lat, lon = project_points(world, np.asarray(site.position, dtype=float))
        info["source_site_id"] = site.id
        info["source_site_latitude"] = round(float(lat), 6)
        info["source_site_longitude"] = round(float(lon), 6)
    return info


def split_and_write(
    result: SimulationResult, world: WorldMap, scenario: dict, out_dir: str
) -> dict:
    """Write the full published bundle for one scenario; returns info dict."""
    os.makedirs(out_dir, exist_ok=True)
    w = result.windows
    counts = {
        "train": write_split_zip(
            os.path.join(out_dir, "train.zip"), result, world, w.train_start, w.test_start
        ),
        "test": write_split_zip(
            os.path.join(out_dir, "test.zip"), result, world, w.test_start, w.end
        ),
    }
    labels = build_labels(result.anomalies, w.test_start, w.end)
    info = build_info(result, world, counts, scenario)
    _dump_json(os.path.join(out_dir, "labels.json"), labels)
    _dump_json(os.path.join(out_dir, "info.json"), info)
    return info


def _dump_json(path: str, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
