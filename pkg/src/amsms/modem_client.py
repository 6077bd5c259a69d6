"""DTE-side driver for an AT-command GSM modem over a link endpoint."""
from __future__ import annotations

import logging
import time
from typing import Optional, Union

from . import at_protocol as at
from .at_protocol import AtResponse, ResponseKind, Verb
from .transport import LinkEndpoint, LinkError, WouldBlock

logger = logging.getLogger(__name__)


class ModemError(Exception):
    pass


class ModemTimeout(ModemError, TimeoutError):
    pass


class CallRejected(ModemError):
    pass


class SendFailed(ModemError):
    pass


class ClientSession:
    """Strict request/response session: one command in flight at a time.

    Input left over from an earlier exchange (a late reply after a timeout,
    say) is discarded before every new command.
    """

    def __init__(self, endpoint: LinkEndpoint, response_timeout_ms: int = 5000):
        if response_timeout_ms < 0:
            raise ValueError("response_timeout_ms must be >= 0")
        self.endpoint = endpoint
        self.response_timeout_ms = response_timeout_ms
        self.text_mode_set = False
        self._parser = at.ResponseParser()
        self._in_flight = False

    @property
    def _timeout_s(self) -> float:
        return self.response_timeout_ms / 1000.0

    def _drain(self) -> None:
        try:
            while self.endpoint.read(4096, timeout=0):
                pass
        except LinkError:
            pass
        if self._parser.pending:
            logger.debug("discarding stale modem output %r", self._parser.pending)
        self._parser.reset()

    def _send(self, data: bytes, deadline: float) -> None:
        try:
            self.endpoint.write_all(data, timeout=max(deadline - time.monotonic(), 0))
        except WouldBlock as exc:
            raise ModemTimeout(f"modem not clear to send: {exc}") from None

    def _next(self, deadline: float, pending: list[AtResponse]) -> AtResponse:
        while not pending:
            remaining = deadline - time.monotonic()
            data = self.endpoint.read(4096, timeout=max(remaining, 0))
            if data:
                pending.extend(self._parser.feed(data))
            elif remaining <= 0:
                raise ModemTimeout(f"no response within {self.response_timeout_ms} ms")
        return pending.pop(0)

    def _begin(self) -> float:
        if self._in_flight:
            raise ModemError("a command is already in flight")
        self._in_flight = True
        self._drain()
        return time.monotonic() + self._timeout_s

    def _collect_final(self, deadline: float, pending: list[AtResponse]) -> list[AtResponse]:
        got = []
        while True:
            resp = self._next(deadline, pending)
            got.append(resp)
            if resp.is_final:
                return got

    def execute(self, verb: Verb, argument: Union[str, int, None] = None) -> list[AtResponse]:
        """Send one command and return every response line up to the final code."""
        if verb is Verb.BEGIN_SEND_SMS:
            raise ValueError("use send_sms() for AT+CMGS")
        frame = at.frame_command(verb, argument)
        deadline = self._begin()
        try:
            logger.debug(">> %r", frame)
            self._send(frame, deadline)
            got = self._collect_final(deadline, [])
            logger.debug("<< %s", [r.text for r in got])
            return got
        finally:
            self._in_flight = False

    def check_alive(self) -> bool:
        try:
            return self.execute(Verb.PING)[-1].kind is ResponseKind.FINAL_OK
        except (ModemTimeout, LinkError):
            return False

    def query_operator(self) -> Optional[str]:
        for resp in self.execute(Verb.QUERY_OPERATOR):
            if resp.kind is ResponseKind.INTERMEDIATE and resp.text.startswith("+COPS:"):
                return resp.text.split(",", 2)[-1].strip('"')
        return None

    def dial(self, number: str) -> AtResponse:
        final = self.execute(Verb.DIAL, number)[-1]
        if final.kind is not ResponseKind.FINAL_OK:
            raise CallRejected(f"dial {number} refused: {final.text}")
        return final

    def hangup(self) -> AtResponse:
        final = self.execute(Verb.HANGUP)[-1]
        if final.kind is not ResponseKind.FINAL_OK:
            raise CallRejected(f"hangup refused: {final.text}")
        return final

    def send_sms(self, number: str, body: str) -> int:
        """Submit ``body`` to ``number`` in text mode; returns the message reference."""
        if not at.is_valid_phone(number):
            raise ValueError(f"invalid phone number {number!r}")
        if len(body) > at.MAX_SMS_CHARS:
            raise ValueError(f"SMS body is {len(body)} characters, limit {at.MAX_SMS_CHARS}")
        payload = at.terminate_sms_body(body)

        if not self.text_mode_set:
            final = self.execute(Verb.SET_MESSAGE_MODE, 1)[-1]
            if final.kind is not ResponseKind.FINAL_OK:
                raise SendFailed("modem refused text mode")
            self.text_mode_set = True

        deadline = self._begin()
        try:
            self._send(at.frame_command(Verb.BEGIN_SEND_SMS, number), deadline)
            pending: list[AtResponse] = []
            try:
                while True:
                    resp = self._next(deadline, pending)
                    if resp.kind is ResponseKind.SMS_PROMPT:
                        break
                    if resp.is_final:
                        raise SendFailed(f"AT+CMGS refused: {resp.text}")
            except ModemTimeout:
                # Leave the modem in command mode rather than mid-message.
                try:
                    self.endpoint.write(at.ESC, timeout=0)
                except (WouldBlock, LinkError):
                    pass
                raise ModemTimeout(f"no SMS prompt within {self.response_timeout_ms} ms") from None

            deadline = time.monotonic() + self._timeout_s
            self._send(payload, deadline)
            reference = None
            for resp in self._collect_final(deadline, pending):
                if resp.kind is ResponseKind.SEND_CONFIRM:
                    reference = resp.reference
                elif resp.kind is ResponseKind.FINAL_ERROR:
                    raise SendFailed(f"message rejected: {resp.text}")
            if reference is None:
                raise SendFailed("modem sent OK without a +CMGS reference")
            logger.info("sms %d sent to %s", reference, number)
            return reference
        finally:
            self._in_flight = False
