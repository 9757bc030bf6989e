"""Run one configured scenario and move its output through raw and published forms.

``run`` produces a compact raw directory (arrays plus JSON metadata); ``process``
turns raw output into the published bundle.  Both steps are deterministic, so
re-processing overwrites byte-identical files.
"""

from __future__ import annotations

import json
import os
import shutil

import numpy as np

from .agents import initialize_population
from .anomalies import ActiveAnomaly, AnomalyType, Intensity
from .config import ScenarioConfig
from .emission import split_and_write
from .engine import Engine, SimulationResult
from .errors import ProcessingError
from .injection import Cause, InfectionRecord
from .worldmap import WorldMap

RAW_ARRAYS = "raw.npz"
RAW_META = "meta.json"
RAW_CONFIG = "config.json"


def run_scenario(cfg: ScenarioConfig) -> tuple[WorldMap, SimulationResult]:
    cfg.validate()
    world = cfg.build_world()
    needs = cfg.build_needs()
    # independent streams for population setup and the tick loop
    pop_seed, engine_seed = np.random.SeedSequence(cfg.seed).generate_state(2)
    population = initialize_population(world, cfg.n_agents, needs, int(pop_seed))
    engine = Engine(
        world,
        population,
        needs,
        cfg.build_schedule(),
        cfg.windows(),
        cfg.mechanism_spec(),
        cfg.type_mix(),
        cfg.intensity_mix_enum(),
        seed=int(engine_seed),
    )
    return world, engine.run()


def save_raw(result: SimulationResult, cfg: ScenarioConfig, region: str, raw_dir: str) -> None:
    """Persist a finished run; written atomically via a sibling temp dir."""
    tmp = raw_dir + ".tmp"
    if os.path.exists(tmp):
        shutil.rmtree(tmp)
    os.makedirs(tmp)
    np.savez_compressed(
        os.path.join(tmp, RAW_ARRAYS),
        trajectory=result.trajectory,
        staypoints=result.staypoints,
        links=result.links,
        epi_census=result.epi_census,
    )
    meta = {
        "region": region,
        "emit_start": result.emit_start,
        "source_site": result.source_site,
        "anomalies": [
            {
                "agent_id": a.agent_id,
                "type": int(a.type),
                "intensity": int(a.intensity),
                "start": a.start,
                "end": a.end,
                "label": a.label,
            }
            for a in result.anomalies
        ],
        "infections": [
            {
                "agent_id": r.agent_id,
                "cause": r.cause.value,
                "source_agent": r.source_agent,
                "source_site": r.source_site,
                "exposed_at": r.exposed_at,
                "infectious_at": r.infectious_at,
                "recovered_at": r.recovered_at,
            }
            for r in result.infections
        ],
    }
    with open(os.path.join(tmp, RAW_META), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    cfg.save(os.path.join(tmp, RAW_CONFIG))
    if os.path.exists(raw_dir):
        shutil.rmtree(raw_dir)
    os.replace(tmp, raw_dir)


def load_raw(raw_dir: str) -> tuple[ScenarioConfig, str, SimulationResult]:
    config_path = os.path.join(raw_dir, RAW_CONFIG)
    meta_path = os.path.join(raw_dir, RAW_META)
    arrays_path = os.path.join(raw_dir, RAW_ARRAYS)
    for path, what in (
        (config_path, "scenario config"),
        (meta_path, "run metadata"),
        (arrays_path, "simulation arrays"),
    ):
        if not os.path.exists(path):
            raise ProcessingError(f"raw output {raw_dir} is missing {what} ({path})")
    cfg = ScenarioConfig.load(config_path)
    with open(meta_path) as fh:
        meta = json.load(fh)
    with np.load(arrays_path) as arrays:
        try:
            trajectory = arrays["trajectory"]
            staypoints = arrays["staypoints"]
            links = arrays["links"]
            epi_census = arrays["epi_census"]
        except KeyError as exc:
            raise ProcessingError(f"raw output {raw_dir} is missing array {exc}") from None
    anomalies = [
        ActiveAnomaly(
            a["agent_id"],
            AnomalyType(a["type"]),
            Intensity(a["intensity"]),
            a["start"],
            a["end"],
        )
        for a in meta["anomalies"]
    ]
    infections = [
        InfectionRecord(
            agent_id=r["agent_id"],
            cause=Cause(r["cause"]),
            exposed_at=r["exposed_at"],
            infectious_at=r["infectious_at"],
            recovered_at=r["recovered_at"],
            source_agent=r["source_agent"],
            source_site=r["source_site"],
        )
        for r in meta["infections"]
    ]
    result = SimulationResult(
        trajectory=trajectory,
        emit_start=int(meta["emit_start"]),
        windows=cfg.windows(),
        staypoints=staypoints,
        links=links,
        anomalies=anomalies,
        infections=infections,
        epi_census=epi_census,
        source_site=meta["source_site"],
        population=None,
    )
    return cfg, meta["region"], result


def scenario_out_dir(out_root: str, mechanism: str, region: str, name: str) -> str:
    return os.path.join(out_root, mechanism, f"{region}_{name}")


def process_raw(raw_dir: str, out_root: str) -> str:
    """Convert one raw run into its published bundle; idempotent."""
    cfg, region, result = load_raw(raw_dir)
    world = cfg.build_world()
    bundle_dir = scenario_out_dir(out_root, cfg.mechanism, region, cfg.name)
    split_and_write(result, world, cfg.info_fields(), bundle_dir)
    return bundle_dir
