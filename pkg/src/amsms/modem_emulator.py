"""Deterministic stand-in for a SIM900D GSM module.

The emulator consumes the DTE byte stream, runs the command state machine
and answers in verbose result-code form. Accepted text messages and call
events land in an in-memory "virtual network" instead of a GSM cell.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

from . import at_protocol as at
from .at_protocol import AtCommand, AtResponse, Verb
from .transport import LinkEndpoint, LinkError, WouldBlock

logger = logging.getLogger(__name__)

# Longest command line kept; anything longer is answered with ERROR.
MAX_COMMAND_LINE = 556


class InputMode(enum.Enum):
    COMMAND = "command"
    AWAITING_SMS_BODY = "awaiting_sms_body"


class MessageMode(enum.Enum):
    PDU = 0
    TEXT = 1


class Fault(enum.Enum):
    MUTE = "mute"
    ERROR_ALL = "error_all"
    DROP_PROMPT = "drop_prompt"


@dataclass
class ModemState:
    mode: InputMode = InputMode.COMMAND
    message_mode: MessageMode = MessageMode.PDU
    call: Optional[str] = None  # number of the active call, None when idle
    operator: str = "TH GSM"
    pending_sms_dest: Optional[str] = None
    next_reference: int = 1

    @property
    def call_active(self) -> bool:
        return self.call is not None


@dataclass(frozen=True)
class DeliveredSms:
    destination: str
    body: str
    reference: int
    accepted_at: int


@dataclass(frozen=True)
class CallEvent:
    kind: str  # "dial" or "hangup"
    number: Optional[str]
    tick: int


def _escape_field(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def format_outbox(messages) -> str:
    """One ``<reference>\\t<destination>\\t<body>`` record per line."""
    return "".join(f"{m.reference}\t{m.destination}\t{_escape_field(m.body)}\n"
                   for m in messages)


class ModemEmulator:
    def __init__(self, operator: str = "TH GSM"):
        self.state = ModemState(operator=operator)
        self.fault: Optional[Fault] = None
        self._line = bytearray()
        self._line_overflow = False
        self._body = bytearray()
        self._body_overflow = False
        self._outbox: list[DeliveredSms] = []
        self.calls: list[CallEvent] = []
        self.tick = 0

    # -- inspection --

    def outbox(self) -> tuple[DeliveredSms, ...]:
        return tuple(self._outbox)

    def export_outbox(self) -> str:
        return format_outbox(self._outbox)

    def inject_fault(self, fault: Optional[Fault | str]) -> None:
        """Switch fault injection on; ``None`` restores normal behavior."""
        self.fault = None if fault is None else Fault(fault)
        logger.debug("fault injection: %s", self.fault)

    def clear_fault(self) -> None:
        self.inject_fault(None)

    # -- byte stream --

    def feed(self, data: bytes) -> bytes:
        """Consume DTE bytes and return whatever the modem says back."""
        self.tick += 1
        out: list[AtResponse] = []
        for byte in bytes(data):
            if self.state.mode is InputMode.AWAITING_SMS_BODY:
                out.extend(self._feed_body_byte(byte))
            else:
                out.extend(self._feed_command_byte(byte))
        if self.fault is Fault.MUTE:
            return b""
        return b"".join(at.render_response(r) for r in out)

    def _feed_command_byte(self, byte: int) -> list[AtResponse]:
        if byte != 0x0D:
            if len(self._line) < MAX_COMMAND_LINE:
                self._line.append(byte)
            else:
                self._line_overflow = True
            return []
        line, overflow = bytes(self._line), self._line_overflow
        self._line.clear()
        self._line_overflow = False
        if not line.strip(b" \n\t"):
            return []  # blank line, nothing to answer
        if overflow:
            return [at.ERROR]
        try:
            cmd = at.parse_command_line(line + at.CR)
        except at.FramingError:
            logger.debug("framing error on %r", line)
            return [at.ERROR]
        return self.handle_command(cmd)

    def _feed_body_byte(self, byte: int) -> list[AtResponse]:
        if byte == 0x1B:
            # ESC abandons the message without sending.
            self._reset_body()
            return []
        if byte != 0x1A:
            if len(self._body) <= at.MAX_SMS_CHARS + 1:
                self._body.append(byte)
            else:
                self._body_overflow = True
            return []
        body = bytes(self._body)
        if body.endswith(at.CR):
            body = body[:-1]
        dest, overflow = self.state.pending_sms_dest, self._body_overflow
        self._reset_body()
        if overflow or len(body) > at.MAX_SMS_CHARS:
            return [at.ERROR]
        if self.fault is Fault.ERROR_ALL:
            return [at.ERROR]
        ref = self.state.next_reference
        self.state.next_reference += 1
        self._outbox.append(DeliveredSms(dest, body.decode(at.SMS_ENCODING), ref, self.tick))
        return [AtResponse.send_confirm(ref), at.OK]

    def _reset_body(self) -> None:
        self._body.clear()
        self._body_overflow = False
        self.state.mode = InputMode.COMMAND
        self.state.pending_sms_dest = None

    # -- state machine --

    def handle_command(self, cmd: AtCommand) -> list[AtResponse]:
        st = self.state
        if st.mode is not InputMode.COMMAND:
            raise RuntimeError("handle_command called while awaiting an SMS body")
        if self.fault is Fault.ERROR_ALL:
            return [at.ERROR]
        verb = cmd.verb
        if verb is Verb.PING:
            return [at.OK]
        if verb is Verb.QUERY_OPERATOR:
            return [AtResponse.intermediate(f'+COPS: 0,0,"{st.operator}"'), at.OK]
        if verb is Verb.DIAL:
            st.call = cmd.argument
            self.calls.append(CallEvent("dial", cmd.argument, self.tick))
            return [at.OK]
        if verb is Verb.HANGUP:
            if st.call is not None:
                self.calls.append(CallEvent("hangup", st.call, self.tick))
            st.call = None
            return [at.OK]
        if verb is Verb.SET_MESSAGE_MODE:
            st.message_mode = MessageMode(int(cmd.argument))
            return [at.OK]
        if verb is Verb.BEGIN_SEND_SMS:
            if st.message_mode is not MessageMode.TEXT:
                return [at.ERROR]
            st.mode = InputMode.AWAITING_SMS_BODY
            st.pending_sms_dest = cmd.argument
            if self.fault is Fault.DROP_PROMPT:
                return []
            return [at.SMS_PROMPT]
        return [at.ERROR]


class EmulatorPort:
    """Serves a ModemEmulator on one link endpoint.

    Incoming bytes are fed to the emulator as soon as they arrive, in the
    writer's thread, so a client on the other endpoint gets its answer
    without any scheduling. Replies that do not fit the peer buffer wait
    here until the client reads.
    """

    def __init__(self, emulator: ModemEmulator, endpoint: LinkEndpoint):
        self.emulator = emulator
        self.endpoint = endpoint
        self._pending = bytearray()
        self._busy = False
        self._again = False
        endpoint.on_activity(self.pump)

    def pump(self) -> None:
        if self._busy:
            self._again = True
            return
        self._busy = True
        try:
            while True:
                self._again = False
                self._step()
                if not self._again:
                    break
        finally:
            self._busy = False

    def _step(self) -> None:
        try:
            while True:
                data = self.endpoint.read(4096, timeout=0)
                if not data:
                    break
                self._pending.extend(self.emulator.feed(data))
            while self._pending:
                n = self.endpoint.write(bytes(self._pending), timeout=0)
                del self._pending[:n]
        except WouldBlock:
            pass
        except LinkError:
            self._pending.clear()
