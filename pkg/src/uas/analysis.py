"""Diagnostics over published bundles: visit counts, set overlap, distances,
compartment curves, and spatial exports.

Everything here runs from the emitted files alone (plus ``info.json``), so the
reports can be rebuilt without the map or the simulator state.  All outputs
are plain CSV/JSON data files; plotting stays external.
"""

from __future__ import annotations

import json
import os
import zipfile
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ._kernels import haversine_km
from .clock import TICKS_PER_DAY, iso_to_tick, tick_to_iso
from .errors import DataIntegrityError, ProcessingError

JACCARD_EMPTY_SENTINEL = -0.1
RESTAURANT = "Restaurant"
WORKPLACE = "Workplace"
RECREATION = "Recreation"
HOME = "Home"


# ---------------------------------------------------------------------------
# loading


@dataclass
class Bundle:
    info: dict
    labels: list[dict]
    train: dict[str, pd.DataFrame]
    test: dict[str, pd.DataFrame]


def load_split(scenario_dir: str, split: str) -> dict[str, pd.DataFrame]:
    path = os.path.join(scenario_dir, f"{split}.zip")
    if not os.path.exists(path):
        raise ProcessingError(f"missing archive {path}")
    out = {}
    with zipfile.ZipFile(path) as zf:
        for member in ("trajectory.csv", "staypoints.csv", "social_links.csv"):
            with zf.open(member) as fh:
                out[member.removesuffix(".csv")] = pd.read_csv(fh)
    return out


def load_bundle(scenario_dir: str) -> Bundle:
    with open(os.path.join(scenario_dir, "info.json")) as fh:
        info = json.load(fh)
    with open(os.path.join(scenario_dir, "labels.json")) as fh:
        labels = json.load(fh)
    return Bundle(
        info=info,
        labels=labels,
        train=load_split(scenario_dir, "train"),
        test=load_split(scenario_dir, "test"),
    )


# ---------------------------------------------------------------------------
# per-agent statistics


def visit_counts(staypoints: pd.DataFrame, n_agents: int) -> pd.DataFrame:
    """Restaurant and workplace staypoint counts per agent (zero-filled)."""
    idx = pd.RangeIndex(n_agents, name="agent_id")
    out = pd.DataFrame(0, index=idx, columns=["restaurant_visits", "workplace_visits"])
    if len(staypoints):
        by_kind = staypoints.groupby(["agent_id", "venue_type"]).size()
        for venue, column in ((RESTAURANT, "restaurant_visits"), (WORKPLACE, "workplace_visits")):
            if venue in by_kind.index.get_level_values(1):
                counts = by_kind.xs(venue, level=1)
                out.loc[counts.index, column] = counts
    return out.reset_index()


def jaccard(train_sites: set, test_sites: set) -> float:
    """Intersection over union; both-empty yields the -0.1 sentinel."""
    union = train_sites | test_sites
    if not union:
        return JACCARD_EMPTY_SENTINEL
    return len(train_sites & test_sites) / len(union)


def recreation_site_sets(staypoints: pd.DataFrame) -> dict[int, set]:
    rec = staypoints[staypoints["venue_type"] == RECREATION]
    return {int(a): set(g["site_id"]) for a, g in rec.groupby("agent_id")}


def jaccard_by_agent(
    train_staypoints: pd.DataFrame, test_staypoints: pd.DataFrame, n_agents: int
) -> pd.Series:
    train_sets = recreation_site_sets(train_staypoints)
    test_sets = recreation_site_sets(test_staypoints)
    values = [
        jaccard(train_sets.get(i, set()), test_sets.get(i, set())) for i in range(n_agents)
    ]
    return pd.Series(values, index=pd.RangeIndex(n_agents, name="agent_id"), name="jaccard")


def avg_daily_distance(trajectory: pd.DataFrame, n_agents: int) -> pd.Series:
    """Sum of consecutive-fix great-circle hops per agent, per day, in km.

    The trajectory must be gap-free: exactly one fix per agent per tick over
    the emitted window.
    """
    n_rows = len(trajectory)
    if n_rows % max(n_agents, 1) != 0:
        raise DataIntegrityError("trajectory rows are not a multiple of the agent count")
    ticks = n_rows // n_agents
    per_agent = trajectory.groupby("agent_id").size()
    if len(per_agent) != n_agents or per_agent.nunique() != 1:
        raise DataIntegrityError("trajectory has gaps: unequal fix counts across agents")
    days = ticks / TICKS_PER_DAY

    frame = trajectory.sort_values(["agent_id", "timestamp"], kind="mergesort")
    lat = frame["latitude"].to_numpy()
    lon = frame["longitude"].to_numpy()
    hops = haversine_km(lat[:-1], lon[:-1], lat[1:], lon[1:])
    # zero out hops that cross agent boundaries
    boundaries = np.arange(1, n_agents) * ticks - 1
    hops[boundaries] = 0.0
    totals = np.add.reduceat(np.concatenate([hops, [0.0]]), np.arange(0, n_rows, ticks))
    return pd.Series(
        totals / days, index=pd.RangeIndex(n_agents, name="agent_id"), name="km_per_day"
    )


# ---------------------------------------------------------------------------
# epidemic views


def epi_curve(
    infection_log: list[dict], n_agents: int, start_tick: int, end_tick: int
) -> pd.DataFrame:
    """Daily compartment census derived from transition timestamps."""
    exposed = np.asarray([iso_to_tick(r["exposed_at"]) for r in infection_log])
    infectious = np.asarray([iso_to_tick(r["infectious_at"]) for r in infection_log])
    recovered = np.asarray([iso_to_tick(r["recovered_at"]) for r in infection_log])
    rows = []
    for tick in range(start_tick, end_tick, TICKS_PER_DAY):
        if len(exposed):
            n_e = int(np.sum((exposed <= tick) & (tick < infectious)))
            n_i = int(np.sum((infectious <= tick) & (tick < recovered)))
            n_r = int(np.sum(recovered <= tick))
        else:
            n_e = n_i = n_r = 0
        rows.append(
            {
                "timestamp": tick_to_iso(tick),
                "n_susceptible": n_agents - n_e - n_i - n_r,
                "n_exposed": n_e,
                "n_infectious": n_i,
                "n_recovered": n_r,
            }
        )
    return pd.DataFrame(rows)


def seir_summary(infection_log: list[dict], cutoff_tick: int) -> dict[str, int]:
    """Ever-entered counts per compartment by the cutoff.

    Seeds enter infectious directly, so they count toward infectious and
    recovered but never toward exposed.
    """
    n_e = sum(1 for r in infection_log if r["cause"] != "seed")
    n_i = sum(1 for r in infection_log if iso_to_tick(r["infectious_at"]) <= cutoff_tick)
    n_r = sum(1 for r in infection_log if iso_to_tick(r["recovered_at"]) <= cutoff_tick)
    return {"exposed": n_e, "infectious": n_i, "recovered": n_r}


def home_coordinates(staypoints: pd.DataFrame) -> pd.DataFrame:
    """Per-agent home position inferred as the most-visited Home venue."""
    homes = staypoints[staypoints["venue_type"] == HOME]
    if not len(homes):
        return pd.DataFrame(columns=["agent_id", "latitude", "longitude"])
    counts = (
        homes.groupby(["agent_id", "site_id", "latitude", "longitude"])
        .size()
        .rename("visits")
        .reset_index()
    )
    counts.sort_values(["agent_id", "visits", "site_id"], ascending=[True, False, True], inplace=True)
    top = counts.drop_duplicates("agent_id")
    return top[["agent_id", "latitude", "longitude"]]


def spatial_anomaly_map(
    labels: list[dict], homes: pd.DataFrame, source: tuple[float, float]
) -> pd.DataFrame:
    """Anomalous agents' home coordinates plus the flagged source site row."""
    anomalous = sorted({int(entry["agent_id"]) for entry in labels})
    rows = [
        {
            "agent_id": -1,
            "latitude": source[0],
            "longitude": source[1],
            "is_source": 1,
        }
    ]
    by_agent = homes.set_index("agent_id") if len(homes) else pd.DataFrame()
    for agent_id in anomalous:
        if agent_id in getattr(by_agent, "index", []):
            rows.append(
                {
                    "agent_id": agent_id,
                    "latitude": float(by_agent.loc[agent_id, "latitude"]),
                    "longitude": float(by_agent.loc[agent_id, "longitude"]),
                    "is_source": 0,
                }
            )
    return pd.DataFrame(rows, columns=["agent_id", "latitude", "longitude", "is_source"])


# ---------------------------------------------------------------------------
# report writer


def write_report(scenario_dir: str) -> str:
    """Run every applicable diagnostic for one scenario bundle."""
    bundle = load_bundle(scenario_dir)
    info = bundle.info
    n_agents = int(info["n_agents"])
    report_dir = os.path.join(scenario_dir, "report")
    os.makedirs(report_dir, exist_ok=True)

    for split, tables in (("train", bundle.train), ("test", bundle.test)):
        counts = visit_counts(tables["staypoints"], n_agents)
        counts.to_csv(os.path.join(report_dir, f"visit_counts_{split}.csv"), index=False)

    label_by_agent = {}
    for entry in bundle.labels:
        label_by_agent.setdefault(int(entry["agent_id"]), entry["label"])
    jac = jaccard_by_agent(
        bundle.train["staypoints"], bundle.test["staypoints"], n_agents
    )
    km = avg_daily_distance(bundle.test["trajectory"], n_agents)
    jaccard_frame = pd.DataFrame(
        {
            "agent_id": np.arange(n_agents),
            "jaccard": jac.to_numpy(),
            "avg_daily_distance_km": km.to_numpy(),
            "label": [label_by_agent.get(i, "0") for i in range(n_agents)],
        }
    )
    jaccard_frame.to_csv(os.path.join(report_dir, "jaccard.csv"), index=False)

    mechanism = info.get("mechanism")
    if mechanism in ("infectious", "location"):
        start = iso_to_tick(info["test_start"])
        end = iso_to_tick(info["test_end"])
        curve = epi_curve(info["infection_log"], n_agents, start, end)
        curve.to_csv(os.path.join(report_dir, "epi_curve.csv"), index=False)
        summary = seir_summary(info["infection_log"], end)
        with open(os.path.join(report_dir, "seir_summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    if mechanism == "location":
        homes = home_coordinates(bundle.train["staypoints"])
        source = (info["source_site_latitude"], info["source_site_longitude"])
        spatial = spatial_anomaly_map(bundle.labels, homes, source)
        spatial.to_csv(os.path.join(report_dir, "spatial_map.csv"), index=False)
    return report_dir
