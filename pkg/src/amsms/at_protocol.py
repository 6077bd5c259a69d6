"""AT command grammar shared by the modem client and the emulator.

Commands travel as ``AT...<CR>``. Result codes travel in verbose form,
``<CR><LF>text<CR><LF>``; the SMS prompt is ``<CR><LF>> `` with no line end.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional, Union

CR = b"\r"
LF = b"\n"
CRLF = b"\r\n"
CTRL_Z = b"\x1a"
ESC = b"\x1b"

MAX_SMS_CHARS = 160
SMS_ENCODING = "latin-1"

_PHONE_RE = re.compile(r"\+?[0-9]{1,20}")


class FramingError(ValueError):
    """A command line that lacks the AT prefix or the CR terminator."""


class Verb(enum.Enum):
    PING = "AT"
    QUERY_OPERATOR = "AT+COPS?"
    DIAL = "ATD"
    HANGUP = "ATH"
    SET_MESSAGE_MODE = "AT+CMGF"
    BEGIN_SEND_SMS = "AT+CMGS"
    UNKNOWN = "?"


@dataclass(frozen=True)
class AtCommand:
    verb: Verb
    argument: Optional[str] = None
    raw: bytes = b""


class ResponseKind(enum.Enum):
    FINAL_OK = "OK"
    FINAL_ERROR = "ERROR"
    INTERMEDIATE = "intermediate"
    SMS_PROMPT = ">"
    SEND_CONFIRM = "+CMGS"


@dataclass(frozen=True)
class AtResponse:
    kind: ResponseKind
    text: Optional[str] = None
    reference: Optional[int] = None

    @property
    def is_final(self) -> bool:
        return self.kind in (ResponseKind.FINAL_OK, ResponseKind.FINAL_ERROR)

    @classmethod
    def intermediate(cls, text: str) -> "AtResponse":
        return cls(ResponseKind.INTERMEDIATE, text=text)

    @classmethod
    def send_confirm(cls, reference: int) -> "AtResponse":
        return cls(ResponseKind.SEND_CONFIRM, text=f"+CMGS: {reference}",
                   reference=reference)


OK = AtResponse(ResponseKind.FINAL_OK, "OK")
ERROR = AtResponse(ResponseKind.FINAL_ERROR, "ERROR")
SMS_PROMPT = AtResponse(ResponseKind.SMS_PROMPT, "> ")


def is_valid_phone(number: object) -> bool:
    return isinstance(number, str) and _PHONE_RE.fullmatch(number) is not None


def _require_phone(number: object) -> str:
    if not is_valid_phone(number):
        raise ValueError(f"invalid phone number {number!r}: digits with optional leading '+'")
    return number  # type: ignore[return-value]


def frame_command(verb: Verb, argument: Union[str, int, None] = None) -> bytes:
    """Canonical upper-case bytes for ``verb``, CR-terminated."""
    if verb is Verb.PING:
        text = "AT"
    elif verb is Verb.QUERY_OPERATOR:
        text = "AT+COPS?"
    elif verb is Verb.HANGUP:
        text = "ATH"
    elif verb is Verb.DIAL:
        text = f"ATD{_require_phone(argument)};"
    elif verb is Verb.BEGIN_SEND_SMS:
        text = f'AT+CMGS="{_require_phone(argument)}"'
    elif verb is Verb.SET_MESSAGE_MODE:
        mode = str(argument) if isinstance(argument, (str, int)) else None
        if isinstance(argument, bool) or mode not in ("0", "1"):
            raise ValueError(f"message mode must be 0 or 1, got {argument!r}")
        text = f"AT+CMGF={mode}"
    else:
        raise ValueError(f"cannot frame {verb}")
    if verb not in (Verb.DIAL, Verb.BEGIN_SEND_SMS, Verb.SET_MESSAGE_MODE) and argument is not None:
        raise ValueError(f"{verb.name} takes no argument")
    return text.encode("ascii") + CR


def _compact(text: str) -> str:
    # Spaces outside double quotes carry no meaning on a command line.
    out, quoted = [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == " " and not quoted:
            continue
        out.append(ch)
    return "".join(out)


_DIAL_RE = re.compile(r"D(\+?[0-9]{1,20});")
_CMGF_RE = re.compile(r"\+CMGF=([01])")
_CMGS_RE = re.compile(r'\+CMGS=(?:"(\+?[0-9]{1,20})"|(\+?[0-9]{1,20}))')


def parse_command_line(line: bytes) -> AtCommand:
    """Parse one CR-terminated command line.

    The six known verbs match case-insensitively; anything else after a
    valid ``AT`` prefix comes back as ``Verb.UNKNOWN`` with ``raw`` kept.
    """
    line = bytes(line)
    if not line.endswith(CR):
        raise FramingError("command line not terminated by CR")
    body = line[:-1].decode("latin-1").strip(" \n\t")
    if body[:2].upper() != "AT":
        raise FramingError(f"missing AT prefix in {body!r}")
    rest = _compact(body[2:])
    upper = rest.upper()

    if upper == "":
        return AtCommand(Verb.PING, None, line)
    if upper == "+COPS?":
        return AtCommand(Verb.QUERY_OPERATOR, None, line)
    if upper in ("H", "H0"):
        return AtCommand(Verb.HANGUP, None, line)
    m = _DIAL_RE.fullmatch(upper)
    if m:
        return AtCommand(Verb.DIAL, m.group(1), line)
    m = _CMGF_RE.fullmatch(upper)
    if m:
        return AtCommand(Verb.SET_MESSAGE_MODE, m.group(1), line)
    m = _CMGS_RE.fullmatch(upper)
    if m:
        return AtCommand(Verb.BEGIN_SEND_SMS, m.group(1) or m.group(2), line)
    return AtCommand(Verb.UNKNOWN, None, line)


_CMGS_CONFIRM_RE = re.compile(r"\+CMGS:\s*([0-9]+)")


def classify_response_line(line: bytes) -> AtResponse:
    """Classify one response line; total over all inputs."""
    text = bytes(line).decode("latin-1").strip("\r\n")
    if text == "OK":
        return OK
    if text == "ERROR" or text.startswith(("+CME ERROR", "+CMS ERROR")):
        return AtResponse(ResponseKind.FINAL_ERROR, text)
    if text.rstrip(" ") == ">":
        return SMS_PROMPT
    m = _CMGS_CONFIRM_RE.fullmatch(text)
    if m:
        return AtResponse.send_confirm(int(m.group(1)))
    return AtResponse.intermediate(text)


def render_response(response: AtResponse) -> bytes:
    if response.kind is ResponseKind.SMS_PROMPT:
        return CRLF + b"> "
    if response.kind is ResponseKind.SEND_CONFIRM:
        return CRLF + f"+CMGS: {response.reference}".encode("ascii") + CRLF
    return CRLF + (response.text or "").encode("latin-1") + CRLF


def check_sms_body(body: str) -> bytes:
    """Encode ``body`` for text mode, raising ValueError if it is not sendable."""
    if not isinstance(body, str):
        raise TypeError("SMS body must be str")
    if "\r" in body or "\x1a" in body or "\x1b" in body:
        raise ValueError("SMS body may not contain CR, Ctrl-Z or ESC")
    try:
        return body.encode(SMS_ENCODING)
    except UnicodeEncodeError as exc:
        raise ValueError(f"SMS body not encodable as {SMS_ENCODING}") from exc


def terminate_sms_body(body: str) -> bytes:
    return check_sms_body(body) + CTRL_Z


class ResponseParser:
    """Incremental splitter turning modem output bytes into AtResponse items."""

    def __init__(self):
        self._buf = bytearray()
        self._prompt_space = False

    def reset(self) -> None:
        self._buf.clear()
        self._prompt_space = False

    @property
    def pending(self) -> bytes:
        return bytes(self._buf)

    def feed(self, data: bytes) -> list[AtResponse]:
        self._buf.extend(data)
        out: list[AtResponse] = []
        while True:
            if self._prompt_space and self._buf[:1] == b" ":
                del self._buf[0]
            if self._buf:
                self._prompt_space = False
            while self._buf[:1] in (CR, LF):
                del self._buf[0]
            if not self._buf:
                break
            if self._buf[:1] == b">":
                # The prompt has no line terminator; its space may come later.
                del self._buf[0]
                self._prompt_space = True
                out.append(SMS_PROMPT)
                continue
            end = self._buf.find(CRLF)
            if end < 0:
                break
            line = bytes(self._buf[:end])
            del self._buf[:end + 2]
            out.append(classify_response_line(line))
        return out
