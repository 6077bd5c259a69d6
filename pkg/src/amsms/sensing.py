"""Sensor conversion and detection.

Raw 10-bit ADC codes are turned into millivolts and degrees Celsius with
integer-only arithmetic, run through the three detectors (smoke, overheat,
trespass) and packed into a 3-bit status value.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

ADC_MAX = 1023
FULL_SCALE_MV = 3300
REFERENCE_SPAN_C = 100

SMOKE_BIT = 0x1
OVERHEAT_BIT = 0x2
TRESPASS_BIT = 0x4

# Bit order is also the order warnings are reported in.
CONDITION_NAMES = ("Smoke", "Overheating", "Trespassing")


def _check_raw(raw: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise TypeError(f"raw ADC code must be an int, got {type(raw).__name__}")
    if not 0 <= raw <= ADC_MAX:
        raise ValueError(f"raw ADC code {raw} outside [0, {ADC_MAX}]")
    return raw


def _check_mv(mv: int) -> int:
    if isinstance(mv, bool) or not isinstance(mv, int):
        raise TypeError(f"millivolts must be an int, got {type(mv).__name__}")
    if not 0 <= mv <= FULL_SCALE_MV:
        raise ValueError(f"{mv} mV outside [0, {FULL_SCALE_MV}]")
    return mv


class LightMode(enum.Enum):
    ROOM = "room"
    SUN = "sun"


@dataclass(frozen=True)
class SensingConfig:
    smoke_threshold_mv: int = 1500
    trespass_threshold_room_mv: int = 2000
    trespass_threshold_sun_mv: int = 1500
    light_mode: LightMode = LightMode.ROOM

    def __post_init__(self):
        for name in ("smoke_threshold_mv", "trespass_threshold_room_mv",
                     "trespass_threshold_sun_mv"):
            _check_mv(getattr(self, name))
        if not isinstance(self.light_mode, LightMode):
            object.__setattr__(self, "light_mode", LightMode(self.light_mode))

    @property
    def trespass_threshold_mv(self) -> int:
        if self.light_mode is LightMode.SUN:
            return self.trespass_threshold_sun_mv
        return self.trespass_threshold_room_mv


@dataclass(frozen=True)
class AdcFrame:
    """One measuring round: smoke, temperature, reference and light channels."""

    adc0: int
    adc1: int
    adc2: int
    adc3: int

    def __post_init__(self):
        for value in (self.adc0, self.adc1, self.adc2, self.adc3):
            _check_raw(value)


class DetectionFlags(NamedTuple):
    smoke: bool = False
    overheat: bool = False
    trespass: bool = False


@dataclass(frozen=True)
class SensorSnapshot:
    round: int
    smoke_mv: int
    temp_read_c: int
    temp_ref_c: int
    light_mv: int
    flags: DetectionFlags
    status: int = field(init=False)

    def __post_init__(self):
        if self.round < 0:
            raise ValueError("round must be non-negative")
        object.__setattr__(self, "status", encode_status(self.flags))


def raw_to_millivolts(raw: int) -> int:
    return FULL_SCALE_MV * _check_raw(raw) // ADC_MAX


def millivolts_to_temperature(mv: int) -> int:
    """10 mV per degree, truncated."""
    return _check_mv(mv) // 10


def raw_to_reference_temperature(raw: int) -> int:
    # Scales the raw code (not millivolts) so the result spans 0..100 C.
    return _check_raw(raw) * REFERENCE_SPAN_C // ADC_MAX


def detect_smoke(mv: int, cfg: SensingConfig = SensingConfig()) -> bool:
    return _check_mv(mv) < cfg.smoke_threshold_mv


def detect_overheat(temp_read: int, temp_ref: int) -> bool:
    if temp_read < 0 or temp_ref < 0:
        raise ValueError("temperatures must be non-negative")
    return temp_read > temp_ref


def detect_trespass(mv: int, cfg: SensingConfig = SensingConfig()) -> bool:
    return _check_mv(mv) > cfg.trespass_threshold_mv


def encode_status(flags: DetectionFlags) -> int:
    smoke, overheat, trespass = flags
    return (SMOKE_BIT if smoke else 0) | (OVERHEAT_BIT if overheat else 0) | (
        TRESPASS_BIT if trespass else 0)


def decode_status(status: int) -> DetectionFlags:
    if isinstance(status, bool) or not isinstance(status, int) or not 0 <= status <= 7:
        raise ValueError(f"status {status!r} outside [0, 7]")
    return DetectionFlags(bool(status & SMOKE_BIT), bool(status & OVERHEAT_BIT),
                          bool(status & TRESPASS_BIT))


def status_names(status: int) -> list[str]:
    """Condition names for the set bits, in bit order."""
    return [name for name, on in zip(CONDITION_NAMES, decode_status(status)) if on]


def interpret_frame(frame: AdcFrame, round: int = 0,
                    cfg: SensingConfig = SensingConfig()) -> SensorSnapshot:
    smoke_mv = raw_to_millivolts(frame.adc0)
    temp_read = millivolts_to_temperature(raw_to_millivolts(frame.adc1))
    temp_ref = raw_to_reference_temperature(frame.adc2)
    light_mv = raw_to_millivolts(frame.adc3)
    flags = DetectionFlags(
        smoke=detect_smoke(smoke_mv, cfg),
        overheat=detect_overheat(temp_read, temp_ref),
        trespass=detect_trespass(light_mv, cfg),
    )
    return SensorSnapshot(round, smoke_mv, temp_read, temp_ref, light_mv, flags)
