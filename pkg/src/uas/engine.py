"""Scenario driver: a deterministic tick loop over the whole population.

Each 5-minute tick: scheduled infection/anomaly transitions fire, flagged
agents re-plan by need priority (eat > work > socialize > stay home, gated by
the awake window), positions are emitted, transmission draws run over current
co-location, and the state kernel advances needs/timers/travel for everyone.

Numeric state lives in flat arrays so the kernel in :mod:`uas._kernels` can
chew through it; only rare transition events touch Python-level logic.  One
seeded RNG stream drives a scenario, and agents are always processed in id
order, so identical inputs reproduce identical outputs byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .agents import (
    Activity,
    NeedsConfig,
    Population,
    Schedule,
    WALK_SPEED_M_PER_MIN,
    choose_recreation,
    colocation_update,
)
from .anomalies import (
    ActiveAnomaly,
    AnomalyType,
    EffectiveBehavior,
    Intensity,
    NEUTRAL_PROFILE,
    apply_profile,
    profile_for,
)
from .clock import TICK_MINUTES, TICKS_PER_DAY, day_index, minute_of_day, weekday
from .errors import ConfigurationError
from .injection import (
    Cause,
    EpidemicConfig,
    InfectionRecord,
    InfectionState,
    LocationSourceConfig,
    SourceSelection,
    draw_from_mix,
    location_tick,
    seed_epidemic,
    seir_tick,
    select_central,
    select_source_site,
)
from .worldmap import SiteKind, WorldMap, nearest_site

STEP_M = WALK_SPEED_M_PER_MIN * TICK_MINUTES  # meters advanced per tick while traveling

ACT_HOME = _kernels.ACT_HOME
ACT_WORK = _kernels.ACT_WORK
ACT_EAT = _kernels.ACT_EAT
ACT_REC = _kernels.ACT_RECREATE
ACT_TRAVEL = _kernels.ACT_TRAVEL


@dataclass
class Windows:
    warmup_days: int = 28
    train_days: int = 28
    test_days: int = 28

    def validate(self) -> None:
        for name in ("warmup_days", "train_days", "test_days"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")

    @property
    def train_start(self) -> int:
        return self.warmup_days * TICKS_PER_DAY

    @property
    def test_start(self) -> int:
        return (self.warmup_days + self.train_days) * TICKS_PER_DAY

    @property
    def end(self) -> int:
        return (self.warmup_days + self.train_days + self.test_days) * TICKS_PER_DAY


@dataclass
class CentralSpec:
    n_anomalous: int = 120


@dataclass
class InfectiousSpec:
    epidemic: EpidemicConfig = field(default_factory=EpidemicConfig)


@dataclass
class LocationSpec:
    source: LocationSourceConfig = field(default_factory=LocationSourceConfig)


MechanismSpec = CentralSpec | InfectiousSpec | LocationSpec


@dataclass
class SimulationResult:
    """Raw scenario output, all times in ticks and positions in local meters."""

    trajectory: np.ndarray  # (emitted_ticks, n_agents, 2) float32
    emit_start: int
    windows: Windows
    staypoints: np.ndarray  # (m, 4) int64: agent, site, arrival, departure
    links: np.ndarray  # (k, 3) int64: agent_a, agent_b, tick (a < b)
    anomalies: list[ActiveAnomaly]
    infections: list[InfectionRecord]
    epi_census: np.ndarray  # (days, 5) int64: day, S, E, I, R (empty for central)
    source_site: int | None
    population: Population | None  # None when rehydrated from raw output


class Engine:
    def __init__(
        self,
        world: WorldMap,
        population: Population,
        needs: NeedsConfig,
        schedule: Schedule,
        windows: Windows,
        mechanism: MechanismSpec,
        type_mix: dict[AnomalyType, float],
        intensity_mix: dict[Intensity, float],
        seed: int,
    ):
        needs.validate()
        schedule.validate()
        windows.validate()
        self.world = world
        self.pop = population
        self.needs = needs
        self.schedule = schedule
        self.windows = windows
        self.mechanism = mechanism
        self.type_mix = type_mix
        self.intensity_mix = intensity_mix
        self.rng = np.random.default_rng(seed)

        n = len(population)
        self.n = n

        # site tables indexed by dense site index
        sites = sorted(world.sites, key=lambda s: s.id)
        self._site_ids = np.asarray([s.id for s in sites], dtype=np.int64)
        self._site_index = {s.id: k for k, s in enumerate(sites)}
        self._site_xy = np.asarray([s.position for s in sites], dtype=np.float64)
        self._site_node = np.asarray(
            [world.graph.index_of(s.attached_node) for s in sites], dtype=np.int64
        )
        kind_order = [SiteKind.HOME, SiteKind.WORKPLACE, SiteKind.RESTAURANT, SiteKind.RECREATION]
        self._kind_code = np.asarray([kind_order.index(s.kind) for s in sites], dtype=np.int8)

        self.home_idx = np.asarray(
            [self._site_index[int(sid)] for sid in population.home], dtype=np.int64
        )
        self.work_idx = np.asarray(
            [self._site_index[int(sid)] for sid in population.workplace], dtype=np.int64
        )

        # runtime state
        self.cur_site = self.home_idx.copy()
        self.site_since = np.zeros(n, dtype=np.int64)
        self.remaining = np.zeros(n, dtype=np.float64)
        self.progress = np.zeros(n, dtype=np.float64)
        self.total = np.zeros(n, dtype=np.float64)
        self.travel_dest = np.full(n, -1, dtype=np.int64)
        self.travel_purpose = np.zeros(n, dtype=np.int8)
        self.paths: list[tuple[np.ndarray, np.ndarray] | None] = [None] * n
        self.events = np.zeros(n, dtype=np.uint8)

        self.onset_eff = needs.baseline_time_to_hunger * population.appetite_time_factor.copy()
        self.rate_eff = needs.baseline_hunger_rate * population.appetite_rate_factor.copy()
        self.eff_skip = np.zeros(n, dtype=np.float64)
        self.eff_random = np.zeros(n, dtype=np.float64)
        self.eff_period = np.zeros(n, dtype=np.int32)
        self.anomaly_start_day = np.zeros(n, dtype=np.int64)
        self.orig_group = population.interest_group.copy()
        self.active: list[ActiveAnomaly | None] = [None] * n

        self.skip_day = np.full(n, -1, dtype=np.int64)
        self.skip_val = np.zeros(n, dtype=bool)
        self.lunch_day = np.full(n, -1, dtype=np.int64)
        self.lunch_val = np.ones(n, dtype=bool)

        self.inf_state = np.full(n, int(InfectionState.SUSCEPTIBLE), dtype=np.int8)
        self.infections: list[InfectionRecord] = []
        self.anomalies: list[ActiveAnomaly] = []
        self._scheduled: dict[int, list[tuple[str, object]]] = {}
        self._force_replan: set[int] = set()
        self._source_site_idx: int | None = None
        self._source_arrivals: list[int] = []

        self.rec_occupants: dict[int, set[int]] = {}
        self.staypoints: list[tuple[int, int, int, int]] = []
        self.links: list[tuple[int, int, int]] = []
        self.rec_visit_log: list[int] = []
        self.censuses: list[tuple[int, int, int, int, int]] = []

        emit_ticks = windows.end - windows.train_start
        self.trajectory = np.zeros((emit_ticks, n, 2), dtype=np.float32)

        if isinstance(mechanism, InfectiousSpec):
            mechanism.epidemic.validate()
            allowed = set(mechanism.epidemic.site_kinds)
            self._transmit_ok = np.asarray(
                [k in allowed for k in kind_order], dtype=bool
            )[self._kind_code]
        elif isinstance(mechanism, LocationSpec):
            mechanism.source.validate()
            self._transmit_ok = None
        else:
            self._transmit_ok = None

    # ------------------------------------------------------------------
    # top-level loop

    def run(self) -> SimulationResult:
        total_ticks = self.windows.end
        for tick in range(total_ticks):
            self.step(tick)
        self._close_all_staypoints(total_ticks)
        return self._result()

    def step(self, tick: int) -> None:
        """Advance the whole scenario by one tick."""
        tod = minute_of_day(tick)
        day = day_index(tick)
        wd = weekday(tick)
        awake = self.needs.is_awake(tod)
        workday = self.schedule.is_workday(wd)

        if tick == self.windows.test_start:
            self._inject_at_test_start(tick)
        for kind, payload in self._scheduled.pop(tick, ()):
            if kind == "infectious":
                self._turn_infectious(payload)
            elif kind == "recovered":
                self._turn_recovered(payload)
            elif kind == "anomaly_on":
                self._activate_anomaly(payload)
        if tod == 0:
            self._interest_switches(day)
            if not isinstance(self.mechanism, CentralSpec):
                self._record_census(day)

        self._decision_pass(tick, tod, day, awake, workday)

        if self.windows.train_start <= tick < self.windows.end:
            self._emit_positions(tick)

        if tick >= self.windows.test_start:
            self._transmission(tick)

        _kernels.advance_tick(
            self.pop.activity,
            self.pop.hunger_level,
            self.pop.social_level,
            self.pop.minutes_since_meal,
            self.onset_eff,
            self.rate_eff,
            self.remaining,
            self.progress,
            self.total,
            self.events,
            float(TICK_MINUTES),
            self.needs.social_need_rate,
            awake,
            self.needs.hunger_critical,
            self.needs.social_critical,
            STEP_M,
        )

    # ------------------------------------------------------------------
    # injection

    def _inject_at_test_start(self, tick: int) -> None:
        if isinstance(self.mechanism, CentralSpec):
            anomalies = select_central(
                self.pop,
                self.mechanism.n_anomalous,
                self.type_mix,
                self.intensity_mix,
                tick,
                self.windows.end,
                self.rng,
            )
            for anom in anomalies:
                self._schedule(tick, "anomaly_on", anom)
        elif isinstance(self.mechanism, InfectiousSpec):
            records = seed_epidemic(self.pop, self.mechanism.epidemic, tick, self.rng)
            for rec in records:
                self._register_infection(rec)
        else:
            site = select_source_site(
                self.world,
                self.pop,
                self.mechanism.source.selection,
                self.rec_visit_log,
                self.rng,
            )
            self._source_site_idx = self._site_index[site.id]

    def _register_infection(self, rec: InfectionRecord) -> None:
        self.infections.append(rec)
        if rec.cause == Cause.SEED:
            self._schedule(rec.infectious_at, "infectious", rec)
        else:
            self.inf_state[rec.agent_id] = int(InfectionState.EXPOSED)
            self._schedule(rec.infectious_at, "infectious", rec)
        self._schedule(rec.recovered_at, "recovered", rec)

    def _schedule(self, tick: int, kind: str, payload) -> None:
        self._scheduled.setdefault(tick, []).append((kind, payload))

    def _turn_infectious(self, rec: InfectionRecord) -> None:
        self.inf_state[rec.agent_id] = int(InfectionState.INFECTIOUS)
        atype = draw_from_mix(self.type_mix, self.rng)
        intensity = draw_from_mix(self.intensity_mix, self.rng)
        anom = ActiveAnomaly(rec.agent_id, atype, intensity, rec.infectious_at, rec.recovered_at)
        self._activate_anomaly(anom)

    def _turn_recovered(self, rec: InfectionRecord) -> None:
        self.inf_state[rec.agent_id] = int(InfectionState.RECOVERED)
        self._deactivate_anomaly(rec.agent_id)

    def _activate_anomaly(self, anom: ActiveAnomaly) -> None:
        i = anom.agent_id
        self.active[i] = anom
        self.anomalies.append(anom)
        self.orig_group[i] = self.pop.interest_group[i]
        self.anomaly_start_day[i] = day_index(anom.start)
        eff = apply_profile(self.pop[i], profile_for(anom.type, anom.intensity))
        self._set_effective(i, eff)
        self.skip_day[i] = -1
        if anom.type == AnomalyType.WORK and self.pop.activity[i] == ACT_WORK:
            self._force_replan.add(i)

    def _deactivate_anomaly(self, i: int) -> None:
        if self.active[i] is None:
            return
        self.pop.interest_group[i] = self.orig_group[i]
        self.active[i] = None
        eff = apply_profile(self.pop[i], NEUTRAL_PROFILE)
        self._set_effective(i, eff)
        self.skip_day[i] = -1
        self._force_replan.add(i)

    def _set_effective(self, i: int, eff: EffectiveBehavior) -> None:
        self.onset_eff[i] = self.needs.baseline_time_to_hunger * eff.appetite_time_factor
        self.rate_eff[i] = self.needs.baseline_hunger_rate * eff.appetite_rate_factor
        self.eff_skip[i] = eff.work_skip_prob
        self.eff_random[i] = eff.social_random_prob
        self.eff_period[i] = eff.interest_change_period

    def _interest_switches(self, day: int) -> None:
        ids = np.nonzero(self.eff_period > 0)[0]
        groups = self.world.interest_groups
        for i in ids:
            start_day = self.anomaly_start_day[i]
            if day > start_day and (day - start_day) % self.eff_period[i] == 0:
                current = int(self.pop.interest_group[i])
                others = [g for g in groups if g != current]
                if others:
                    self.pop.interest_group[i] = others[int(self.rng.integers(0, len(others)))]

    # ------------------------------------------------------------------
    # decisions

    def _decision_pass(self, tick: int, tod: int, day: int, awake: bool, workday: bool) -> None:
        process = self.events != 0
        act = self.pop.activity
        if tod == self.needs.wake_minute:
            process |= act == ACT_HOME
        if workday and tod == self.schedule.work_start:
            process |= act == ACT_HOME
        if tod == self.schedule.work_end:
            process |= act == ACT_WORK
        if self._force_replan:
            process[list(self._force_replan)] = True
            self._force_replan.clear()
        for i in np.nonzero(process)[0]:
            self._handle(int(i), tick, tod, day, awake, workday)

    def _handle(self, i: int, tick: int, tod: int, day: int, awake: bool, workday: bool) -> None:
        ev = int(self.events[i])
        act = int(self.pop.activity[i])
        if act == ACT_TRAVEL:
            if ev & _kernels.EV_ARRIVED:
                self._arrive(i, tick, tod, day, awake, workday)
            return
        if ev & _kernels.EV_COMPLETED:
            if act == ACT_EAT:
                self.pop.hunger_level[i] = 0.0
                self.pop.minutes_since_meal[i] = 0.0
            elif act == ACT_REC:
                self.pop.social_level[i] = 0.0
                self._leave_recreation(i)
            self.pop.activity[i] = ACT_HOME  # transient idle at the same site
        self._replan(i, tick, tod, day, awake, workday, planned=None)

    def _arrive(self, i: int, tick: int, tod: int, day: int, awake: bool, workday: bool) -> None:
        dest = int(self.travel_dest[i])
        purpose = int(self.travel_purpose[i])
        self.paths[i] = None
        self.cur_site[i] = dest
        self.site_since[i] = tick
        self.pop.pos_x[i], self.pop.pos_y[i] = self._site_xy[dest]
        self.pop.activity[i] = ACT_HOME  # transient idle until replanned
        self.travel_dest[i] = -1
        self._replan(i, tick, tod, day, awake, workday, planned=(purpose, dest))

    def _replan(
        self,
        i: int,
        tick: int,
        tod: int,
        day: int,
        awake: bool,
        workday: bool,
        planned: tuple[int, int] | None,
    ) -> None:
        pop = self.pop
        if not awake:
            target_act, target_site = ACT_HOME, int(self.home_idx[i])
        elif pop.hunger_level[i] >= self.needs.hunger_critical and self._will_eat_now(i, day):
            target_act = ACT_EAT
            if planned is not None and planned[0] == ACT_EAT:
                target_site = planned[1]
            elif self.cur_site[i] == self.home_idx[i]:
                target_site = int(self.home_idx[i])
            else:
                target_site = self._nearest_restaurant(i)
        elif (
            workday
            and self.schedule.in_work_hours(tod)
            and not self._shift_skipped(i, day)
        ):
            target_act, target_site = ACT_WORK, int(self.work_idx[i])
        elif pop.social_level[i] >= self.needs.social_critical:
            target_act = ACT_REC
            if planned is not None and planned[0] == ACT_REC:
                target_site = planned[1]
            else:
                site = choose_recreation(
                    pop[i], self.world, self.rng, random_site_prob=float(self.eff_random[i])
                )
                target_site = self._site_index[site.id]
        else:
            target_act, target_site = ACT_HOME, int(self.home_idx[i])
        self._execute(i, target_act, target_site, tick, tod, day, awake, workday)

    def _will_eat_now(self, i: int, day: int) -> bool:
        """Lunch propensity gate; only consulted while the agent is at work."""
        if self.schedule.lunch_propensity >= 1.0 or self.pop.activity[i] != ACT_WORK:
            return True
        if self.lunch_day[i] != day:
            self.lunch_day[i] = day
            self.lunch_val[i] = self.rng.random() < self.schedule.lunch_propensity
        return bool(self.lunch_val[i])

    def _shift_skipped(self, i: int, day: int) -> bool:
        if self.skip_day[i] != day:
            self.skip_day[i] = day
            p = self.eff_skip[i]
            self.skip_val[i] = p > 0.0 and self.rng.random() < p
        return bool(self.skip_val[i])

    def _nearest_restaurant(self, i: int) -> int:
        pos = (float(self.pop.pos_x[i]), float(self.pop.pos_y[i]))
        site = nearest_site(self.world, pos, SiteKind.RESTAURANT)
        return self._site_index[site.id]

    def _execute(
        self,
        i: int,
        act: int,
        site: int,
        tick: int,
        tod: int,
        day: int,
        awake: bool,
        workday: bool,
    ) -> None:
        if site == self.cur_site[i]:
            if act != self.pop.activity[i]:
                self._begin_activity(i, act, site, tick)
            return
        self._start_travel(i, site, act, tick, tod, day, awake, workday)

    def _begin_activity(self, i: int, act: int, site: int, tick: int) -> None:
        if self.pop.activity[i] == ACT_REC and act != ACT_REC:
            self._leave_recreation(i)
        self.pop.activity[i] = act
        if act == ACT_EAT:
            self.remaining[i] = self.needs.meal_duration
        elif act == ACT_REC:
            self.remaining[i] = self.needs.recreation_visit_duration
            occupants = self.rec_occupants.setdefault(site, set())
            present = [self.pop[j] for j in sorted(occupants | {i})]
            site_obj = self.world.site(int(self._site_ids[site]))
            self.links.extend(colocation_update(present, site_obj, tick))
            occupants.add(i)
            if self.windows.train_start <= tick < self.windows.test_start:
                self.rec_visit_log.append(int(self._site_ids[site]))
        if (
            self._source_site_idx is not None
            and site == self._source_site_idx
            and self.inf_state[i] == int(InfectionState.SUSCEPTIBLE)
            and self.site_since[i] == tick
        ):
            self._source_arrivals.append(i)

    def _leave_recreation(self, i: int) -> None:
        occupants = self.rec_occupants.get(int(self.cur_site[i]))
        if occupants is not None:
            occupants.discard(i)

    def _start_travel(
        self,
        i: int,
        dest: int,
        purpose: int,
        tick: int,
        tod: int,
        day: int,
        awake: bool,
        workday: bool,
    ) -> None:
        if self.pop.activity[i] == ACT_REC:
            self._leave_recreation(i)
        origin = int(self.cur_site[i])  # replanning agents are always at a site
        if self._site_node[origin] == self._site_node[dest]:
            # same road node: instantaneous move, no travel leg
            self._close_staypoint(i, tick)
            self.cur_site[i] = dest
            self.site_since[i] = tick
            self.pop.pos_x[i], self.pop.pos_y[i] = self._site_xy[dest]
            self.pop.activity[i] = ACT_HOME
            self._begin_activity(i, purpose, dest, tick)
            return
        xy, cum = self.world.route(int(self._site_ids[origin]), int(self._site_ids[dest]))
        self._close_staypoint(i, tick)
        self.paths[i] = (xy, cum)
        self.total[i] = float(cum[-1])
        self.progress[i] = 0.0
        self.travel_dest[i] = dest
        self.travel_purpose[i] = purpose
        self.pop.activity[i] = ACT_TRAVEL

    def _close_staypoint(self, i: int, tick: int) -> None:
        site = int(self.cur_site[i])
        if site >= 0:
            since = int(self.site_since[i])
            if tick > since:
                self.staypoints.append((i, int(self._site_ids[site]), since, tick))
        self.cur_site[i] = -1

    def _close_all_staypoints(self, end_tick: int) -> None:
        for i in range(self.n):
            if self.cur_site[i] >= 0:
                self._close_staypoint(i, end_tick)

    # ------------------------------------------------------------------
    # emission and transmission

    def _emit_positions(self, tick: int) -> None:
        row = tick - self.windows.train_start
        traveling = np.nonzero(self.pop.activity == ACT_TRAVEL)[0]
        for i in traveling:
            xy, cum = self.paths[i]
            p = min(self.progress[i], cum[-1])
            k = int(np.searchsorted(cum, p, side="right")) - 1
            if k >= len(cum) - 1:
                x, y = xy[-1]
            else:
                span = cum[k + 1] - cum[k]
                f = 0.0 if span <= 0 else (p - cum[k]) / span
                x = xy[k, 0] + f * (xy[k + 1, 0] - xy[k, 0])
                y = xy[k, 1] + f * (xy[k + 1, 1] - xy[k, 1])
            self.pop.pos_x[i], self.pop.pos_y[i] = x, y
        self.trajectory[row, :, 0] = self.pop.pos_x
        self.trajectory[row, :, 1] = self.pop.pos_y

    def _transmission(self, tick: int) -> None:
        if isinstance(self.mechanism, InfectiousSpec):
            pairs = self._colocation_pairs()
            if len(pairs):
                records = seir_tick(
                    self.inf_state, pairs, self.mechanism.epidemic, tick, self.rng
                )
                for rec in records:
                    self._register_infection(rec)
        elif isinstance(self.mechanism, LocationSpec) and self._source_arrivals:
            records = location_tick(
                self._source_arrivals,
                int(self._site_ids[self._source_site_idx]),
                self.mechanism.source,
                tick,
                self.rng,
            )
            for rec in records:
                self._register_infection(rec)
            self._source_arrivals.clear()

    def _colocation_pairs(self) -> np.ndarray:
        onsite = self.cur_site >= 0
        if not onsite.any():
            return np.zeros((0, 2), dtype=np.int64)
        site_safe = np.maximum(self.cur_site, 0)
        eligible = onsite & self._transmit_ok[site_safe] & (self.cur_site != self.home_idx)
        inf_ids = np.nonzero(eligible & (self.inf_state == int(InfectionState.INFECTIOUS)))[0]
        if len(inf_ids) == 0:
            return np.zeros((0, 2), dtype=np.int64)
        sus_ids = np.nonzero(eligible & (self.inf_state == int(InfectionState.SUSCEPTIBLE)))[0]
        if len(sus_ids) == 0:
            return np.zeros((0, 2), dtype=np.int64)
        inf_sites = self.cur_site[inf_ids]
        sus_sites = self.cur_site[sus_ids]
        shared = np.intersect1d(np.unique(inf_sites), np.unique(sus_sites))
        chunks = []
        for site in shared:
            ss = sus_ids[sus_sites == site]
            ii = inf_ids[inf_sites == site]
            chunks.append(
                np.stack(
                    [np.repeat(ss, len(ii)), np.tile(ii, len(ss))],
                    axis=1,
                )
            )
        if not chunks:
            return np.zeros((0, 2), dtype=np.int64)
        return np.concatenate(chunks, axis=0)

    def _record_census(self, day: int) -> None:
        s = int(np.sum(self.inf_state == int(InfectionState.SUSCEPTIBLE)))
        e = int(np.sum(self.inf_state == int(InfectionState.EXPOSED)))
        inf = int(np.sum(self.inf_state == int(InfectionState.INFECTIOUS)))
        r = int(np.sum(self.inf_state == int(InfectionState.RECOVERED)))
        self.censuses.append((day, s, e, inf, r))

    # ------------------------------------------------------------------

    def _result(self) -> SimulationResult:
        sp = np.asarray(sorted(self.staypoints, key=lambda t: (t[0], t[2])), dtype=np.int64)
        if sp.size == 0:
            sp = np.zeros((0, 4), dtype=np.int64)
        lk = np.asarray(sorted(self.links, key=lambda t: (t[2], t[0], t[1])), dtype=np.int64)
        if lk.size == 0:
            lk = np.zeros((0, 3), dtype=np.int64)
        census = np.asarray(self.censuses, dtype=np.int64)
        if census.size == 0:
            census = np.zeros((0, 5), dtype=np.int64)
        source = (
            int(self._site_ids[self._source_site_idx])
            if self._source_site_idx is not None
            else None
        )
        return SimulationResult(
            trajectory=self.trajectory,
            emit_start=self.windows.train_start,
            windows=self.windows,
            staypoints=sp,
            links=lk,
            anomalies=self.anomalies,
            infections=self.infections,
            epi_census=census,
            source_site=source,
            population=self.pop,
        )
