"""The monitoring loop: read, interpret, log, alert, wait.

Every round is written to the status log. Whether an SMS goes out is decided
by an :class:`AlertPolicy`; by default only rounds that raise a condition
not present in the previous round trigger one.
"""
from __future__ import annotations

import dataclasses
import enum
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol, Union

from . import at_protocol as at
from .modem_client import ModemError
from .transport import LinkError
from .sensing import AdcFrame, SensingConfig, SensorSnapshot, interpret_frame, status_names

logger = logging.getLogger(__name__)

MAX_ALERT_CHARS = at.MAX_SMS_CHARS
DEFAULT_LOG_NAME = "report.txt"


class AlertMode(enum.Enum):
    EDGE = "edge"
    EVERY_ROUND = "every_round"


@dataclass(frozen=True)
class MonitorConfig:
    location: str
    dest_phone: str
    period_ms: int = 0
    digest_every: int = 0
    log_path: Union[str, Path] = DEFAULT_LOG_NAME
    sensing: SensingConfig = field(default_factory=SensingConfig)
    alert_mode: AlertMode = AlertMode.EDGE

    def __post_init__(self):
        if not at.is_valid_phone(self.dest_phone):
            raise ValueError(f"dest_phone {self.dest_phone!r}: digits with optional leading '+'")
        if self.period_ms < 0:
            raise ValueError("period_ms must be >= 0")
        if self.digest_every < 0:
            raise ValueError("digest_every must be >= 0")
        object.__setattr__(self, "alert_mode", AlertMode(self.alert_mode))


@dataclass(frozen=True)
class AlertPolicy:
    mode: AlertMode = AlertMode.EDGE
    previous_status: int = 0


@dataclass(frozen=True)
class AlertMessage:
    location: str
    timestamp: datetime
    temp_read_c: int
    temp_ref_c: int
    status: int
    summary: str

    def render(self) -> str:
        ts = self.timestamp.replace(microsecond=0).isoformat()
        tail = f" {ts} T={self.temp_read_c}C REF={self.temp_ref_c}C STATUS={self.status} {self.summary}"
        room = MAX_ALERT_CHARS - len("AMSMS ") - len(tail)
        text = f"AMSMS {self.location[:max(room, 0)]}{tail}"
        return text[:MAX_ALERT_CHARS]

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class RunSummary:
    rounds: int
    alerts_sent: int
    log_path: Path
    send_failures: int = 0


class SmsSender(Protocol):
    def send_sms(self, number: str, body: str) -> int: ...


def format_log_entry(snapshot: SensorSnapshot) -> str:
    lines = [
        f"Measuring Round : {snapshot.round}",
        f"1.Smoke Voltage = {snapshot.smoke_mv} mV",
        f"2.Temp. Read = {snapshot.temp_read_c} celsius",
        f"3.Temp. Ref. = {snapshot.temp_ref_c} celsius",
        f"4.Light Sensor Voltage = {snapshot.light_mv} mV",
    ]
    lines += [f"Warning! {name} Detected !" for name in status_names(snapshot.status)]
    return "".join(line + "\n" for line in lines)


def _sanitize_location(location: str) -> str:
    # Keep the alert sendable: no control characters, single-byte charset only.
    cleaned = "".join(" " if ord(ch) < 0x20 or ch == "\x7f" else ch for ch in location)
    return cleaned.encode(at.SMS_ENCODING, "replace").decode(at.SMS_ENCODING)


def compose_alert(snapshot: SensorSnapshot, cfg: MonitorConfig, now: datetime) -> AlertMessage:
    summary = ",".join(status_names(snapshot.status)) or "OK"
    return AlertMessage(_sanitize_location(cfg.location), now, snapshot.temp_read_c,
                        snapshot.temp_ref_c, snapshot.status, summary)


def should_send_alert(policy: AlertPolicy, new_status: int, round: int,
                      digest_every: int = 0) -> tuple[bool, AlertPolicy]:
    if policy.mode is AlertMode.EVERY_ROUND:
        fire = new_status != 0
    else:
        rising = new_status & ~policy.previous_status & 0x7
        digest = digest_every > 0 and round % digest_every == 0
        fire = bool(rising) or digest
    return fire, dataclasses.replace(policy, previous_status=new_status)


class LogSink:
    """Append-only status log file; every write is flushed and fsynced."""

    def __init__(self, path: Union[str, Path], truncate: bool = False):
        self.path = Path(path)
        self._fh = open(self.path, "w" if truncate else "a", encoding="ascii", newline="\n")

    def write(self, text: str) -> None:
        self._fh.write(text)
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def append_log(entry: str, sink: LogSink) -> None:
    if not entry.strip():
        raise ValueError("refusing to append an empty log entry")
    if not entry.endswith("\n"):
        entry += "\n"
    # One write call so the entry and its separator land together.
    sink.write(entry + "\n")


def run_monitor(frames: Iterable[AdcFrame], cfg: MonitorConfig, modem: Optional[SmsSender],
                clock: Callable[[], datetime] = datetime.now,
                sleep: Callable[[float], None] = time.sleep,
                append: bool = False) -> RunSummary:
    """Drive the loop over ``frames`` until they run out.

    Failed sends are logged and counted; the loop keeps going. Log file
    errors propagate.
    """
    policy = AlertPolicy(cfg.alert_mode)
    rounds = alerts = failures = 0
    with LogSink(cfg.log_path, truncate=not append) as sink:
        for index, frame in enumerate(frames):
            if index and cfg.period_ms:
                sleep(cfg.period_ms / 1000.0)
            snapshot = interpret_frame(frame, index, cfg.sensing)
            entry = format_log_entry(snapshot)
            append_log(entry, sink)
            logger.info("round %d status %d", index, snapshot.status)
            rounds += 1

            fire, policy = should_send_alert(policy, snapshot.status, index, cfg.digest_every)
            if not fire:
                continue
            text = compose_alert(snapshot, cfg, clock()).render()
            if modem is None:
                logger.warning("no modem attached, alert dropped: %s", text)
                failures += 1
                continue
            try:
                modem.send_sms(cfg.dest_phone, text)
                alerts += 1
            except (ModemError, LinkError, OSError, ValueError) as exc:
                failures += 1
                logger.error("round %d: alert not sent: %s", index, exc)
    return RunSummary(rounds, alerts, Path(cfg.log_path), failures)
