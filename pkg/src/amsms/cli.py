"""Command-line entry point: ``amsms run`` and ``amsms at-console``.

Exit codes: 0 ok, 1 usage, 2 scenario error, 3 runtime fatal.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import at_protocol as at
from .modem_client import ClientSession
from .modem_emulator import EmulatorPort, InputMode, ModemEmulator, format_outbox
from .monitor import DEFAULT_LOG_NAME, AlertMode, MonitorConfig, run_monitor
from .sensing import AdcFrame, LightMode, SensingConfig
from .transport import LinkConfig, create_link

EXIT_OK, EXIT_USAGE, EXIT_SCENARIO, EXIT_RUNTIME = 0, 1, 2, 3

_REPEAT_RE = re.compile(r"repeat\s+(\d+)", re.IGNORECASE)


class ScenarioError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_scenario_text(text: str) -> list[AdcFrame]:
    """Parse ``round,adc0,adc1,adc2,adc3`` rows; ``#`` starts a comment.

    ``repeat <n>`` appends ``n`` copies of the previous row with the following
    round numbers. Rounds must count up from 0 without gaps.
    """
    frames: list[AdcFrame] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _REPEAT_RE.fullmatch(line)
        if m:
            if not frames:
                raise ScenarioError(lineno, "repeat with no previous row")
            frames.extend([frames[-1]] * int(m.group(1)))
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 5:
            raise ScenarioError(lineno, f"expected 5 comma-separated fields, got {len(fields)}")
        try:
            round_no, *adc = (int(f) for f in fields)
        except ValueError:
            raise ScenarioError(lineno, f"non-integer field in {line!r}") from None
        try:
            frame = AdcFrame(*adc)
        except ValueError as exc:
            raise ScenarioError(lineno, str(exc)) from None
        if round_no != len(frames):
            raise ScenarioError(lineno, f"round {round_no} out of sequence, expected {len(frames)}")
        frames.append(frame)
    return frames


def parse_scenario(path) -> list[AdcFrame]:
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"amsms: usage error: {message}\n")


def _phone(value: str) -> str:
    if not at.is_valid_phone(value):
        raise argparse.ArgumentTypeError(f"invalid phone number {value!r}")
    return value


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _timestamp(value: str) -> datetime:
    try:
        return datetime.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO-8601 timestamp: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="amsms", description="Simulated auto-monitoring and SMS alert system.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="replay a sensor scenario through monitor, modem and link")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--dest-phone", required=True, type=_phone)
    run.add_argument("--location", default="site-0")
    run.add_argument("--log", type=Path, default=Path(DEFAULT_LOG_NAME))
    run.add_argument("--period-ms", type=_non_negative, default=0)
    run.add_argument("--light-mode", choices=[m.value for m in LightMode], default="room")
    run.add_argument("--alert-mode", choices=[m.value for m in AlertMode], default="edge")
    run.add_argument("--digest-every", type=_non_negative, default=0)
    run.add_argument("--outbox", type=Path)
    run.add_argument("--fixed-clock", type=_timestamp)
    run.add_argument("--response-timeout-ms", type=_non_negative, default=5000)

    console = sub.add_parser("at-console", help="type AT commands at the emulated modem")
    console.add_argument("--operator", default="TH GSM")
    return parser


def cmd_run(args, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        frames = parse_scenario(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"amsms: scenario error: {args.scenario}: {exc}", file=err)
        return EXIT_SCENARIO

    cfg = MonitorConfig(
        location=args.location,
        dest_phone=args.dest_phone,
        period_ms=args.period_ms,
        digest_every=args.digest_every,
        log_path=args.log,
        sensing=SensingConfig(light_mode=LightMode(args.light_mode)),
        alert_mode=AlertMode(args.alert_mode),
    )
    dte, dce = create_link(LinkConfig())
    emulator = ModemEmulator()
    EmulatorPort(emulator, dce)
    session = ClientSession(dte, response_timeout_ms=args.response_timeout_ms)
    clock = (lambda: args.fixed_clock) if args.fixed_clock else datetime.now

    try:
        summary = run_monitor(frames, cfg, session, clock=clock)
    except OSError as exc:
        print(f"amsms: runtime error: log {args.log}: {exc}", file=err)
        return EXIT_RUNTIME
    if args.outbox:
        try:
            args.outbox.write_text(format_outbox(emulator.outbox()), encoding="latin-1")
        except OSError as exc:
            print(f"amsms: runtime error: outbox {args.outbox}: {exc}", file=err)
            return EXIT_RUNTIME

    print(f"rounds={summary.rounds} alerts={summary.alerts_sent} "
          f"failures={summary.send_failures} outbox={len(emulator.outbox())} "
          f"log={summary.log_path}", file=out)
    return EXIT_OK


def _legible(data: bytes) -> list[str]:
    lines = []
    for resp in at.ResponseParser().feed(data):
        lines.append(">" if resp.kind is at.ResponseKind.SMS_PROMPT else resp.text)
    return lines


def cmd_at_console(args, stdin: Optional[TextIO] = None, out: Optional[TextIO] = None) -> int:
    """Line-oriented AT console against a fresh emulator.

    While the modem waits for an SMS body, end a line with ``^Z`` to send it
    or type ``^[`` to abandon it.
    """
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    emulator = ModemEmulator(operator=args.operator)
    interactive = stdin.isatty()
    if interactive:
        print("AT console: /quit to exit, ^Z ends an SMS body", file=out)
    for raw in stdin:
        line = raw.rstrip("\r\n")
        if line.strip() == "/quit":
            break
        if emulator.state.mode is InputMode.AWAITING_SMS_BODY:
            if line.endswith("^Z"):
                data = line[:-2].encode("latin-1", "replace") + at.CTRL_Z
            elif line.strip() == "^[":
                data = at.ESC
            else:
                data = line.encode("latin-1", "replace") + at.CR
        else:
            data = line.encode("latin-1", "replace") + at.CR
        for text in _legible(emulator.feed(data)):
            print(text, file=out)
        out.flush()
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args)
    return cmd_at_console(args)


if __name__ == "__main__":
    sys.exit(main())
