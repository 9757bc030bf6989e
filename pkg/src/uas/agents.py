"""Agent state and the needs-driven behavior primitives.

Population state is kept as flat arrays (one entry per agent) so the per-tick
kernels can run over it directly; :class:`AgentView` exposes a single agent as
an attribute-style record for decision code and tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _kernels
from .errors import ConfigurationError, SiteNotFoundError
from .worldmap import Site, SiteKind, WorldMap, nearest_site

FAVORITE_CAPACITY = 5
NEARBY_PICK_PROB = 0.8
WALK_SPEED_M_PER_MIN = 5000.0 / 60.0  # constant travel speed on shortest paths


class Activity(IntEnum):
    AT_HOME = _kernels.ACT_HOME
    WORKING = _kernels.ACT_WORK
    EATING = _kernels.ACT_EAT
    RECREATING = _kernels.ACT_RECREATE
    TRAVELING = _kernels.ACT_TRAVEL


@dataclass
class NeedsConfig:
    """Baseline need dynamics; every value is a tunable knob.

    Defaults are calibrated so that, with per-agent appetite factors in
    [0.8, 1.2], agents eat 2-3 meals a day, roughly half take a midday meal
    away from home on workdays, and nobody leaves work for food twice in one
    shift.  ``wake_minute``/``sleep_minute`` bound the window in which agents
    may initiate activities; the overnight gap anchors each day's meal phase.
    """

    baseline_time_to_hunger: float = 420.0  # minutes after a meal before hunger grows
    baseline_hunger_rate: float = 1.0  # hunger units per minute once growing
    hunger_critical: float = 100.0
    meal_duration: float = 30.0
    social_need_rate: float = 0.1  # units per awake, non-recreating minute
    social_critical: float = 100.0
    recreation_visit_duration: float = 90.0
    wake_minute: int = 420  # 07:00
    sleep_minute: int = 1380  # 23:00

    def validate(self) -> None:
        positive = (
            "baseline_time_to_hunger",
            "baseline_hunger_rate",
            "hunger_critical",
            "meal_duration",
            "social_need_rate",
            "social_critical",
            "recreation_visit_duration",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"needs field {name!r} must be strictly positive")
        if not 0 <= self.wake_minute < self.sleep_minute <= 1440:
            raise ConfigurationError("wake/sleep minutes must satisfy 0 <= wake < sleep <= 1440")

    def is_awake(self, minute_of_day: int) -> bool:
        return self.wake_minute <= minute_of_day < self.sleep_minute


@dataclass
class Schedule:
    work_start: int = 540  # 09:00
    work_end: int = 1020  # 17:00
    workdays: tuple[int, ...] = (0, 1, 2, 3, 4)  # Mon-Fri
    lunch_propensity: float = 1.0  # eating is need-driven, not optional

    def validate(self) -> None:
        if not 0 <= self.work_start < self.work_end <= 1440:
            raise ConfigurationError("work_start must precede work_end within one day")
        if not 0 <= self.lunch_propensity <= 1:
            raise ConfigurationError("lunch_propensity must lie in [0, 1]")

    def is_workday(self, weekday: int) -> bool:
        return weekday in self.workdays

    def in_work_hours(self, minute_of_day: int) -> bool:
        return self.work_start <= minute_of_day < self.work_end


class Population:
    """Structure-of-arrays state for all agents in one scenario."""

    def __init__(self, n: int, needs: NeedsConfig | None = None):
        self.n = n
        self.needs = needs if needs is not None else NeedsConfig()
        self.home = np.zeros(n, dtype=np.int32)  # home site id
        self.workplace = np.zeros(n, dtype=np.int32)
        self.interest_group = np.zeros(n, dtype=np.int16)
        self.appetite_time_factor = np.ones(n, dtype=np.float64)
        self.appetite_rate_factor = np.ones(n, dtype=np.float64)
        self.hunger_level = np.zeros(n, dtype=np.float64)
        self.social_level = np.zeros(n, dtype=np.float64)
        self.minutes_since_meal = np.zeros(n, dtype=np.float64)
        self.activity = np.full(n, int(Activity.AT_HOME), dtype=np.int8)
        self.pos_x = np.zeros(n, dtype=np.float64)
        self.pos_y = np.zeros(n, dtype=np.float64)
        self.friends: list[set[int]] = [set() for _ in range(n)]
        self.favorite_sites: list[list[int]] = [[] for _ in range(n)]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> "AgentView":
        return AgentView(self, int(i))

    def __iter__(self):
        return (AgentView(self, i) for i in range(self.n))


class AgentView:
    """Single-agent window onto a :class:`Population`."""

    __slots__ = ("_pop", "id")

    def __init__(self, pop: Population, i: int):
        object.__setattr__(self, "_pop", pop)
        object.__setattr__(self, "id", i)

    def __getattr__(self, name):
        pop = object.__getattribute__(self, "_pop")
        i = object.__getattribute__(self, "id")
        if name == "friends":
            return pop.friends[i]
        if name == "favorite_sites":
            return pop.favorite_sites[i]
        if name == "current_position":
            return (pop.pos_x[i], pop.pos_y[i])
        if name == "activity":
            return Activity(pop.activity[i])
        try:
            return getattr(pop, name)[i]
        except AttributeError:
            raise AttributeError(name) from None

    def __setattr__(self, name, value):
        pop = object.__getattribute__(self, "_pop")
        i = object.__getattribute__(self, "id")
        if name == "current_position":
            pop.pos_x[i], pop.pos_y[i] = value
            return
        if name == "activity":
            pop.activity[i] = int(value)
            return
        getattr(pop, name)[i] = value


def initialize_population(
    world: WorldMap, n_agents: int, needs: NeedsConfig, seed: int
) -> Population:
    """Seeded population with uniform home/work assignment and appetite spread.

    Appetite time factors are uniform in [0.8, 1.2] so that some agents need a
    midday meal on workdays and some do not.  Social levels start spread below
    the critical threshold so recreation visits do not synchronize.
    """
    if n_agents < 1:
        raise ConfigurationError(f"n_agents must be at least 1, got {n_agents}")
    needs.validate()
    rng = np.random.default_rng(seed)
    pop = Population(n_agents, needs)

    homes = world.sites_of_kind(SiteKind.HOME)
    works = world.sites_of_kind(SiteKind.WORKPLACE)
    groups = world.interest_groups

    pop.home[:] = [homes[k].id for k in rng.integers(0, len(homes), n_agents)]
    pop.workplace[:] = [works[k].id for k in rng.integers(0, len(works), n_agents)]
    pop.interest_group[:] = [groups[k] for k in rng.integers(0, len(groups), n_agents)]
    pop.appetite_time_factor[:] = rng.uniform(0.8, 1.2, n_agents)
    pop.social_level[:] = rng.uniform(0.0, needs.social_critical, n_agents)

    for i in range(n_agents):
        pos = world.site(int(pop.home[i])).position
        pop.pos_x[i], pop.pos_y[i] = pos
    return pop


def update_needs(agent: AgentView, dt_minutes: float, awake: bool = True) -> None:
    """Advance one agent's needs by ``dt_minutes``.

    The meal clock always runs; hunger grows once the clock passes the
    agent's onset threshold; social need grows while awake and not recreating.
    Scalar twin of the array kernel in :mod:`uas._kernels`.
    """
    pop = object.__getattribute__(agent, "_pop")
    needs = pop.needs
    agent.minutes_since_meal = agent.minutes_since_meal + dt_minutes
    onset = needs.baseline_time_to_hunger * agent.appetite_time_factor
    if agent.minutes_since_meal > onset:
        agent.hunger_level = (
            agent.hunger_level + needs.baseline_hunger_rate * agent.appetite_rate_factor * dt_minutes
        )
    if awake and agent.activity != Activity.RECREATING:
        agent.social_level = agent.social_level + needs.social_need_rate * dt_minutes


def minutes_until_hunger_critical(
    needs: NeedsConfig, time_factor: float, rate_factor: float
) -> float:
    """Closed-form minutes from a fresh meal to critical hunger."""
    onset = needs.baseline_time_to_hunger * time_factor
    return onset + needs.hunger_critical / (needs.baseline_hunger_rate * rate_factor)


def remember_favorite(agent: AgentView, site_id: int) -> None:
    """LRU append with capacity FAVORITE_CAPACITY."""
    fav = agent.favorite_sites
    if site_id in fav:
        fav.remove(site_id)
    fav.append(site_id)
    while len(fav) > FAVORITE_CAPACITY:
        fav.pop(0)


def choose_recreation(
    agent: AgentView,
    world: WorldMap,
    rng: np.random.Generator,
    random_site_prob: float = 0.0,
) -> Site:
    """Pick a recreation site for a visit and remember it as a favorite.

    Normal behavior: probability 0.8 the nearest site in the agent's interest
    group (any group if the group has none), else a uniform pick among the
    agent's favorites (falling back to nearest-in-group while favorites are
    empty).  ``random_site_prob`` overrides the whole choice with a uniform
    draw over all recreation sites, used for socially anomalous behavior.
    """
    rec_sites = world.sites_of_kind(SiteKind.RECREATION)
    if random_site_prob > 0.0 and rng.random() < random_site_prob:
        site = rec_sites[int(rng.integers(0, len(rec_sites)))]
        remember_favorite(agent, site.id)
        return site

    group = int(agent.interest_group)
    try:
        nearest = nearest_site(world, agent.current_position, SiteKind.RECREATION, group)
    except SiteNotFoundError:
        nearest = nearest_site(world, agent.current_position, SiteKind.RECREATION, None)

    fav = agent.favorite_sites
    if rng.random() < NEARBY_PICK_PROB or not fav:
        site = nearest
    else:
        site = world.site(fav[int(rng.integers(0, len(fav)))])
    remember_favorite(agent, site.id)
    return site


def colocation_update(
    agents_at_site: list[AgentView], site: Site, tick: int
) -> list[tuple[int, int, int]]:
    """Befriend every co-present pair that is not already linked.

    Returns one (agent_id, friend_id, tick) event per newly formed pair with
    agent_id < friend_id.  Friendship is symmetric and permanent.
    """
    events: list[tuple[int, int, int]] = []
    ordered = sorted(agents_at_site, key=lambda a: a.id)
    for idx, a in enumerate(ordered):
        for b in ordered[idx + 1 :]:
            if b.id not in a.friends:
                a.friends.add(b.id)
                b.friends.add(a.id)
                events.append((a.id, b.id, tick))
    return events
