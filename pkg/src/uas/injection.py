"""Mechanisms that decide which agents turn anomalous and when.

Three mechanisms: direct central assignment over the whole test window,
compartmental spread over per-tick co-location contacts, and infection from a
single source site with one exposure draw per visit.  Every infected agent
gets an :class:`InfectionRecord` carrying its provenance and transition times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from .agents import Population
from .anomalies import ActiveAnomaly, AnomalyType, Intensity
from .clock import TICK_MINUTES
from .errors import ConfigurationError, SiteNotFoundError
from .worldmap import Site, SiteKind, WorldMap, nearest_site, popularity_rank

MINUTES_PER_DAY = 1440.0


class InfectionState(IntEnum):
    SUSCEPTIBLE = 0
    EXPOSED = 1
    INFECTIOUS = 2
    RECOVERED = 3


class Cause(str, Enum):
    SEED = "seed"
    CONTACT = "contact"
    LOCATION = "location"


class SourceSelection(str, Enum):
    NEAREST_TO_RANDOM_AGENT = "random"
    MOST_POPULAR = "popular"


@dataclass
class EpidemicConfig:
    initial_infected: int = 10
    transmission_prob: float = 0.1  # per co-location tick per pair
    exposed_days: tuple[float, float] = (0.0, 7.0)
    infectious_days: tuple[float, float] = (7.0, 14.0)
    # Co-location counts at any shared site except an agent's own home;
    # restrict the kinds here to model transmission at fewer venue types.
    site_kinds: tuple[SiteKind, ...] = (
        SiteKind.WORKPLACE,
        SiteKind.RESTAURANT,
        SiteKind.RECREATION,
    )

    def validate(self) -> None:
        if self.initial_infected < 1:
            raise ConfigurationError("initial_infected must be at least 1")
        if not 0.0 <= self.transmission_prob <= 1.0:
            raise ConfigurationError("transmission_prob must lie in [0, 1]")
        for name in ("exposed_days", "infectious_days"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ConfigurationError(f"{name} range must be ordered and non-negative")


@dataclass
class LocationSourceConfig:
    selection: SourceSelection = SourceSelection.NEAREST_TO_RANDOM_AGENT
    transmission_prob: float = 0.1  # per visit
    exposed_days: tuple[float, float] = (0.0, 7.0)
    active_days: tuple[float, float] = (7.0, 14.0)

    def validate(self) -> None:
        if not 0.0 <= self.transmission_prob <= 1.0:
            raise ConfigurationError("transmission_prob must lie in [0, 1]")
        for name in ("exposed_days", "active_days"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ConfigurationError(f"{name} range must be ordered and non-negative")


@dataclass
class InfectionRecord:
    """Provenance and transition ticks for one infected agent."""

    agent_id: int
    cause: Cause
    exposed_at: int
    infectious_at: int
    recovered_at: int
    source_agent: int | None = None  # set iff cause == CONTACT
    source_site: int | None = None  # set iff cause == LOCATION

    def __post_init__(self) -> None:
        if not self.exposed_at <= self.infectious_at <= self.recovered_at:
            raise ValueError("infection timestamps must be ordered")


def draw_from_mix(mix: dict, rng: np.random.Generator):
    """Weighted draw over a {key: weight} mapping with deterministic ordering."""
    keys = sorted(mix.keys())
    weights = np.asarray([float(mix[k]) for k in keys])
    if weights.sum() <= 0:
        raise ConfigurationError("mix weights must sum to a positive value")
    probs = weights / weights.sum()
    return keys[int(rng.choice(len(keys), p=probs))]


def sample_duration_ticks(
    rng: np.random.Generator, days_range: tuple[float, float]
) -> int:
    """Uniform duration in the given day range, rounded up to >= 1 tick."""
    lo, hi = days_range
    minutes = rng.uniform(lo * MINUTES_PER_DAY, hi * MINUTES_PER_DAY)
    return max(1, int(np.ceil(minutes / TICK_MINUTES)))


def select_central(
    population: Population,
    n: int,
    type_mix: dict[AnomalyType, float],
    intensity_mix: dict[Intensity, float],
    test_start: int,
    test_end: int,
    rng: np.random.Generator,
) -> list[ActiveAnomaly]:
    """Uniformly sample ``n`` distinct agents, each anomalous for the whole test."""
    if n > len(population):
        raise ConfigurationError(
            f"cannot select {n} anomalous agents from a population of {len(population)}"
        )
    if n == 0:
        return []
    chosen = np.sort(rng.choice(len(population), size=n, replace=False))
    out = []
    for agent_id in chosen:
        atype = draw_from_mix(type_mix, rng)
        intensity = draw_from_mix(intensity_mix, rng)
        out.append(ActiveAnomaly(int(agent_id), atype, intensity, test_start, test_end))
    return out


def seed_epidemic(
    population: Population,
    config: EpidemicConfig,
    test_start: int,
    rng: np.random.Generator,
) -> list[InfectionRecord]:
    """Make the initial agents infectious at test start; seeds skip exposure."""
    config.validate()
    if config.initial_infected > len(population):
        raise ConfigurationError("more initial infections than agents")
    chosen = np.sort(rng.choice(len(population), size=config.initial_infected, replace=False))
    records = []
    for agent_id in chosen:
        dur = sample_duration_ticks(rng, config.infectious_days)
        records.append(
            InfectionRecord(
                agent_id=int(agent_id),
                cause=Cause.SEED,
                exposed_at=test_start,
                infectious_at=test_start,
                recovered_at=test_start + dur,
            )
        )
    return records


def seir_tick(
    states: np.ndarray,
    colocations: np.ndarray,
    config: EpidemicConfig,
    tick: int,
    rng: np.random.Generator,
) -> list[InfectionRecord]:
    """One transmission round over (susceptible, infectious) co-location pairs.

    ``colocations`` is an (m, 2) array of agent-id pairs sharing a site this
    tick.  Each pair gets an independent Bernoulli(transmission_prob) draw; a
    susceptible agent turns exposed on its first success (later pairs for the
    same agent are then moot).  Only agents in SUSCEPTIBLE can transition.
    """
    if len(colocations) == 0 or config.transmission_prob <= 0.0:
        return []
    pairs = np.asarray(colocations, dtype=np.int64).reshape(-1, 2)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[order]
    valid = states[pairs[:, 0]] == InfectionState.SUSCEPTIBLE
    pairs = pairs[valid]
    if len(pairs) == 0:
        return []

    hits = rng.random(len(pairs)) < config.transmission_prob
    hit_pairs = pairs[hits]
    if len(hit_pairs) == 0:
        return []
    # first successful pair per susceptible agent, in (agent, source) order
    _, first_idx = np.unique(hit_pairs[:, 0], return_index=True)

    records = []
    for k in first_idx:
        agent_id, source = int(hit_pairs[k, 0]), int(hit_pairs[k, 1])
        e_dur = sample_duration_ticks(rng, config.exposed_days)
        i_dur = sample_duration_ticks(rng, config.infectious_days)
        records.append(
            InfectionRecord(
                agent_id=agent_id,
                cause=Cause.CONTACT,
                exposed_at=tick,
                infectious_at=tick + e_dur,
                recovered_at=tick + e_dur + i_dur,
                source_agent=source,
            )
        )
    return records


def select_source_site(
    world: WorldMap,
    population: Population,
    selection: SourceSelection,
    visit_log,
    rng: np.random.Generator,
) -> Site:
    """Pick the contaminated recreation site for a location-based scenario.

    ``visit_log`` holds the recreation site ids visited during the normal
    period; it feeds the popularity ranking in MOST_POPULAR mode.
    """
    if selection == SourceSelection.MOST_POPULAR:
        try:
            return popularity_rank(world, visit_log, SiteKind.RECREATION)[0]
        except SiteNotFoundError:
            raise ConfigurationError(
                "popular source selection requires recreation visits in the normal period"
            ) from None
    agent_id = int(rng.integers(0, len(population)))
    home = world.site(int(population.home[agent_id]))
    return nearest_site(world, home.position, SiteKind.RECREATION)


def location_tick(
    arriving_susceptibles: list[int],
    source_site: int,
    config: LocationSourceConfig,
    tick: int,
    rng: np.random.Generator,
) -> list[InfectionRecord]:
    """One exposure draw per susceptible agent starting a visit at the source."""
    records = []
    for agent_id in sorted(arriving_susceptibles):
        if rng.random() < config.transmission_prob:
            e_dur = sample_duration_ticks(rng, config.exposed_days)
            a_dur = sample_duration_ticks(rng, config.active_days)
            records.append(
                InfectionRecord(
                    agent_id=int(agent_id),
                    cause=Cause.LOCATION,
                    exposed_at=tick,
                    infectious_at=tick + e_dur,
                    recovered_at=tick + e_dur + a_dur,
                    source_site=int(source_site),
                )
            )
    return records


def activate_behavior(
    record: InfectionRecord, atype: AnomalyType, intensity: Intensity
) -> ActiveAnomaly:
    """Anomalous behavior spans exactly the infectious interval.

    Exposed agents behave normally and carry no label; behavior and ground
    truth both begin at infectious onset.
    """
    return ActiveAnomaly(
        record.agent_id, atype, intensity, record.infectious_at, record.recovered_at
    )
