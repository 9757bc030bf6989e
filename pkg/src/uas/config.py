"""Scenario configuration: JSON round-trip plus builders for the engine."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .agents import NeedsConfig, Schedule
from .anomalies import AnomalyType, Intensity
from .engine import CentralSpec, InfectiousSpec, LocationSpec, MechanismSpec, Windows
from .errors import ConfigurationError
from .injection import EpidemicConfig, LocationSourceConfig, SourceSelection
from .worldmap import MapSpec, SiteKind, WorldMap, generate_synthetic_map, load_map

MECHANISMS = ("central", "infectious", "location")
ANOMALY_TYPES = ("hunger", "work", "social", "interest", "combined")
DEFAULT_TEST_DAYS = {"central": 28, "infectious": 84, "location": 84}

_TYPE_BY_NAME = {
    "hunger": AnomalyType.HUNGER,
    "work": AnomalyType.WORK,
    "social": AnomalyType.SOCIAL,
    "interest": AnomalyType.INTEREST,
}
_INTENSITY_BY_NAME = {
    "red": Intensity.RED,
    "orange": Intensity.ORANGE,
    "yellow": Intensity.YELLOW,
}


@dataclass
class ScenarioConfig:
    name: str
    mechanism: str
    seed: int = 0
    n_agents: int = 100
    map: dict = field(default_factory=dict)  # {"path": ...} or {"synthetic": {...}, "seed": n}
    warmup_days: int = 28
    train_days: int = 28
    test_days: int | None = None  # defaults to 28 central / 84 otherwise
    anomaly_type: str = "combined"
    intensity_mix: dict = field(
        default_factory=lambda: {"red": 1.0, "orange": 1.0, "yellow": 1.0}
    )
    needs: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    central: dict = field(default_factory=dict)
    epidemic: dict = field(default_factory=dict)
    location: dict = field(default_factory=dict)

    # -- validation and (de)serialization ---------------------------------

    def validate(self) -> None:
        if self.mechanism not in MECHANISMS:
            raise ConfigurationError(
                f"unknown mechanism {self.mechanism!r}; expected one of {MECHANISMS}"
            )
        if self.anomaly_type not in ANOMALY_TYPES:
            raise ConfigurationError(
                f"unknown anomaly type {self.anomaly_type!r}; expected one of {ANOMALY_TYPES}"
            )
        if self.n_agents < 1:
            raise ConfigurationError("n_agents must be at least 1")
        if not self.name:
            raise ConfigurationError("scenario name must be non-empty")
        for key, weight in self.intensity_mix.items():
            if key not in _INTENSITY_BY_NAME:
                raise ConfigurationError(f"unknown intensity {key!r}")
            if weight < 0:
                raise ConfigurationError(f"negative weight for intensity {key!r}")
        self.windows().validate()
        if not ("path" in self.map or "synthetic" in self.map):
            raise ConfigurationError("map must provide either 'path' or 'synthetic'")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"bad scenario config: {exc}") from None
        cfg.validate()
        return cfg

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read scenario config {path}: {exc}") from None
        return cls.from_dict(data)

    # -- builders ----------------------------------------------------------

    def effective_test_days(self) -> int:
        return self.test_days if self.test_days is not None else DEFAULT_TEST_DAYS[self.mechanism]

    def windows(self) -> Windows:
        return Windows(self.warmup_days, self.train_days, self.effective_test_days())

    def build_world(self) -> WorldMap:
        if "path" in self.map:
            return load_map(self.map["path"])
        spec = MapSpec.from_dict(self.map["synthetic"])
        return generate_synthetic_map(spec, int(self.map.get("seed", 0)))

    def build_needs(self) -> NeedsConfig:
        try:
            cfg = NeedsConfig(**self.needs)
        except TypeError as exc:
            raise ConfigurationError(f"bad needs config: {exc}") from None
        cfg.validate()
        return cfg

    def build_schedule(self) -> Schedule:
        fields = dict(self.schedule)
        if "workdays" in fields:
            fields["workdays"] = tuple(fields["workdays"])
        try:
            cfg = Schedule(**fields)
        except TypeError as exc:
            raise ConfigurationError(f"bad schedule config: {exc}") from None
        cfg.validate()
        return cfg

    def type_mix(self) -> dict[AnomalyType, float]:
        if self.anomaly_type == "combined":
            return {t: 1.0 for t in AnomalyType}
        return {_TYPE_BY_NAME[self.anomaly_type]: 1.0}

    def intensity_mix_enum(self) -> dict[Intensity, float]:
        mix = {
            _INTENSITY_BY_NAME[name]: float(w)
            for name, w in self.intensity_mix.items()
            if w > 0
        }
        if not mix:
            raise ConfigurationError("intensity_mix has no positive weights")
        return mix

    def mechanism_spec(self) -> MechanismSpec:
        if self.mechanism == "central":
            return CentralSpec(n_anomalous=int(self.central.get("n_anomalous", 120)))
        if self.mechanism == "infectious":
            fields = dict(self.epidemic)
            for key in ("exposed_days", "infectious_days"):
                if key in fields:
                    fields[key] = tuple(fields[key])
            if "site_kinds" in fields:
                fields["site_kinds"] = tuple(SiteKind(k) for k in fields["site_kinds"])
            try:
                return InfectiousSpec(epidemic=EpidemicConfig(**fields))
            except TypeError as exc:
                raise ConfigurationError(f"bad epidemic config: {exc}") from None
        fields = dict(self.location)
        if "selection" in fields:
            try:
                fields["selection"] = SourceSelection(fields["selection"])
            except ValueError:
                raise ConfigurationError(
                    f"unknown source selection {fields['selection']!r}"
                ) from None
        for key in ("exposed_days", "active_days"):
            if key in fields:
                fields[key] = tuple(fields[key])
        try:
            return LocationSpec(source=LocationSourceConfig(**fields))
        except TypeError as exc:
            raise ConfigurationError(f"bad location config: {exc}") from None

    def info_fields(self) -> dict:
        """Scenario parameters recorded in info.json."""
        out = {
            "mechanism": self.mechanism,
            "anomaly_type": self.anomaly_type,
            "intensity_mix": dict(self.intensity_mix),
            "seed": self.seed,
            "transmission_prob": None,
            "selection": None,
            "n_central": None,
        }
        if self.mechanism == "central":
            out["n_central"] = int(self.central.get("n_anomalous", 120))
        elif self.mechanism == "infectious":
            out["transmission_prob"] = float(
                self.epidemic.get("transmission_prob", EpidemicConfig().transmission_prob)
            )
        else:
            out["transmission_prob"] = float(
                self.location.get(
                    "transmission_prob", LocationSourceConfig().transmission_prob
                )
            )
            out["selection"] = self.location.get(
                "selection", LocationSourceConfig().selection.value
            )
        return out
