"""uas: deterministic synthetic city mobility datasets with labeled anomalies."""

from .agents import (
    Activity,
    AgentView,
    NeedsConfig,
    Population,
    Schedule,
    choose_recreation,
    colocation_update,
    initialize_population,
    update_needs,
)
from .anomalies import (
    ActiveAnomaly,
    AnomalyProfile,
    AnomalyType,
    Intensity,
    NORMAL_LABEL,
    apply_profile,
    deactivate,
    label_code,
    profile_for,
)
from .config import ScenarioConfig
from .engine import CentralSpec, Engine, InfectiousSpec, LocationSpec, SimulationResult, Windows
from .injection import (
    Cause,
    EpidemicConfig,
    InfectionRecord,
    InfectionState,
    LocationSourceConfig,
    SourceSelection,
    seed_epidemic,
    seir_tick,
    select_central,
    select_source_site,
)
from .scenario import process_raw, run_scenario
from .worldmap import (
    MapSpec,
    RoadGraph,
    Site,
    SiteKind,
    WorldMap,
    generate_synthetic_map,
    load_map,
    nearest_site,
    popularity_rank,
    shortest_path_length,
    to_wgs84,
)

__version__ = "0.1.0"
