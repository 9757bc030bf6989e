"""Anomalous-behavior catalog: four types, three intensities, label codes.

Each (type, intensity) pair maps to a fixed parameter delta; a profile only
touches the parameters its type owns, so activating and deactivating an
anomaly is exactly invertible on the agent's behavior parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .agents import AgentView

NORMAL_LABEL = "0"


class AnomalyType(IntEnum):
    HUNGER = 1
    WORK = 2
    SOCIAL = 3
    INTEREST = 4


class Intensity(IntEnum):
    RED = 1  # severe
    ORANGE = 2  # moderate
    YELLOW = 3  # mild


@dataclass(frozen=True)
class AnomalyProfile:
    """Behavior deltas; neutral values leave the agent unchanged."""

    hunger_time_factor: float = 1.0  # multiplier on time-to-hunger onset
    hunger_rate_factor: float = 1.0  # multiplier on hunger growth rate
    work_skip_prob: float = 0.0  # per planned work departure
    social_random_prob: float = 0.0  # per recreation choice
    interest_change_period: int = 0  # days between group switches; 0 = never


_PROFILES: dict[tuple[AnomalyType, Intensity], AnomalyProfile] = {
    (AnomalyType.HUNGER, Intensity.RED): AnomalyProfile(
        hunger_time_factor=0.0, hunger_rate_factor=3.0
    ),
    (AnomalyType.HUNGER, Intensity.ORANGE): AnomalyProfile(
        hunger_time_factor=0.5, hunger_rate_factor=2.0
    ),
    (AnomalyType.HUNGER, Intensity.YELLOW): AnomalyProfile(
        hunger_time_factor=0.75, hunger_rate_factor=1.5
    ),
    (AnomalyType.WORK, Intensity.RED): AnomalyProfile(work_skip_prob=1.0),
    (AnomalyType.WORK, Intensity.ORANGE): AnomalyProfile(work_skip_prob=0.5),
    (AnomalyType.WORK, Intensity.YELLOW): AnomalyProfile(work_skip_prob=0.2),
    (AnomalyType.SOCIAL, Intensity.RED): AnomalyProfile(social_random_prob=1.0),
    (AnomalyType.SOCIAL, Intensity.ORANGE): AnomalyProfile(social_random_prob=0.5),
    (AnomalyType.SOCIAL, Intensity.YELLOW): AnomalyProfile(social_random_prob=0.2),
    (AnomalyType.INTEREST, Intensity.RED): AnomalyProfile(interest_change_period=1),
    (AnomalyType.INTEREST, Intensity.ORANGE): AnomalyProfile(interest_change_period=2),
    (AnomalyType.INTEREST, Intensity.YELLOW): AnomalyProfile(interest_change_period=7),
}


def profile_for(atype: AnomalyType, intensity: Intensity) -> AnomalyProfile:
    return _PROFILES[(AnomalyType(atype), Intensity(intensity))]


def label_code(atype: AnomalyType, intensity: Intensity) -> str:
    """Concatenated type and intensity codes, e.g. (HUNGER, ORANGE) -> "12"."""
    return f"{int(atype)}{int(intensity)}"


ALL_LABELS = sorted(label_code(t, i) for t in AnomalyType for i in Intensity)


@dataclass
class ActiveAnomaly:
    """One agent's anomalous interval, in ticks, with its ground-truth label."""

    agent_id: int
    type: AnomalyType
    intensity: Intensity
    start: int
    end: int
    label: str = ""

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"anomaly interval empty: [{self.start}, {self.end})")
        if not self.label:
            self.label = label_code(self.type, self.intensity)


@dataclass(frozen=True)
class EffectiveBehavior:
    """An agent's behavior parameters after applying a profile."""

    appetite_time_factor: float
    appetite_rate_factor: float
    work_skip_prob: float
    social_random_prob: float
    interest_change_period: int


def apply_profile(agent: AgentView, profile: AnomalyProfile) -> EffectiveBehavior:
    """Combine the agent's own attributes with a profile's deltas."""
    return EffectiveBehavior(
        appetite_time_factor=float(agent.appetite_time_factor) * profile.hunger_time_factor,
        appetite_rate_factor=float(agent.appetite_rate_factor) * profile.hunger_rate_factor,
        work_skip_prob=profile.work_skip_prob,
        social_random_prob=profile.social_random_prob,
        interest_change_period=profile.interest_change_period,
    )


NEUTRAL_PROFILE = AnomalyProfile()


def deactivate(agent: AgentView, original_group: int) -> EffectiveBehavior:
    """Restore the agent's pre-anomaly behavior parameters and interest group.

    Need levels (hunger, social) are live state and deliberately retained.
    """
    agent.interest_group = original_group
    return apply_profile(agent, NEUTRAL_PROFILE)
