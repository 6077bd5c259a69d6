import pytest
from hypothesis import given, strategies as st

from amsms import at_protocol as at
from amsms.at_protocol import ResponseKind, Verb

phones = st.from_regex(r"\+?[0-9]{1,20}", fullmatch=True)


@pytest.mark.parametrize("verb, arg, expected", [
    (Verb.DIAL, "0895092020", b"ATD0895092020;\r"),
    (Verb.PING, None, b"AT\r"),
    (Verb.SET_MESSAGE_MODE, 1, b"AT+CMGF=1\r"),
    (Verb.SET_MESSAGE_MODE, "0", b"AT+CMGF=0\r"),
    (Verb.QUERY_OPERATOR, None, b"AT+COPS?\r"),
    (Verb.HANGUP, None, b"ATH\r"),
    (Verb.BEGIN_SEND_SMS, "0800453947", b'AT+CMGS="0800453947"\r'),
])
def test_frame_command(verb, arg, expected):
    assert at.frame_command(verb, arg) == expected


@pytest.mark.parametrize("verb, arg", [
    (Verb.DIAL, "08-95"), (Verb.DIAL, ""), (Verb.DIAL, None), (Verb.SET_MESSAGE_MODE, 2),
    (Verb.SET_MESSAGE_MODE, True), (Verb.BEGIN_SEND_SMS, "++1"), (Verb.PING, "x"),
    (Verb.UNKNOWN, None),
])
def test_frame_command_rejects(verb, arg):
    with pytest.raises(ValueError):
        at.frame_command(verb, arg)


@pytest.mark.parametrize("line, verb, arg", [
    (b"ATD+66895092020;\r", Verb.DIAL, "+66895092020"),
    (b"at\r", Verb.PING, None),
    (b"AT+FOO\r", Verb.UNKNOWN, None),
    (b"at+cops?\r", Verb.QUERY_OPERATOR, None),
    (b"AT + CMGF = 1\r", Verb.SET_MESSAGE_MODE, "1"),
    (b"AT+CMGF=2\r", Verb.UNKNOWN, None),
    (b"AT+CMGS=0800453947\r", Verb.BEGIN_SEND_SMS, "0800453947"),
    (b'AT+CMGS="0800453947\r', Verb.UNKNOWN, None),
    (b"ATD0895092020\r", Verb.UNKNOWN, None),
    (b"ATH0\r", Verb.HANGUP, None),
    (b"\nAT\r", Verb.PING, None),
])
def test_parse_command_line(line, verb, arg):
    cmd = at.parse_command_line(line)
    assert (cmd.verb, cmd.argument, cmd.raw) == (verb, arg, line)


@pytest.mark.parametrize("line", [b"XYZ\r", b"AT", b"", b"A\r", b"\r"])
def test_parse_framing_errors(line):
    with pytest.raises(at.FramingError):
        at.parse_command_line(line)


_valid_pairs = st.one_of(
    st.tuples(st.sampled_from([Verb.PING, Verb.QUERY_OPERATOR, Verb.HANGUP]), st.none()),
    st.tuples(st.sampled_from([Verb.DIAL, Verb.BEGIN_SEND_SMS]), phones),
    st.tuples(st.just(Verb.SET_MESSAGE_MODE), st.sampled_from(["0", "1"])),
)


@given(_valid_pairs)
def test_frame_parse_roundtrip(pair):
    verb, arg = pair
    raw = at.frame_command(verb, arg)
    assert raw[:2] == b"AT" and raw[-1:] == b"\r"
    cmd = at.parse_command_line(raw)
    assert (cmd.verb, cmd.argument) == (verb, arg)


@pytest.mark.parametrize("line, kind", [
    (b"OK", ResponseKind.FINAL_OK),
    (b"ERROR", ResponseKind.FINAL_ERROR),
    (b"+CMS ERROR: 304", ResponseKind.FINAL_ERROR),
    (b"> ", ResponseKind.SMS_PROMPT),
    (b'+COPS: 0,0,"TH GSM"', ResponseKind.INTERMEDIATE),
    (b"+CMGS: 12", ResponseKind.SEND_CONFIRM),
    (b"", ResponseKind.INTERMEDIATE),
])
def test_classify_response_line(line, kind):
    assert at.classify_response_line(line).kind is kind


def test_send_confirm_reference():
    assert at.classify_response_line(b"+CMGS: 12").reference == 12


@given(st.binary(max_size=64))
def test_classify_is_total(line):
    assert isinstance(at.classify_response_line(line), at.AtResponse)


def test_render_forms():
    assert at.render_response(at.OK) == b"\r\nOK\r\n"
    assert at.render_response(at.ERROR) == b"\r\nERROR\r\n"
    assert at.render_response(at.SMS_PROMPT) == b"\r\n> "
    assert at.render_response(at.AtResponse.send_confirm(3)) == b"\r\n+CMGS: 3\r\n"


@pytest.mark.parametrize("body, expected", [
    ("Hi", b"Hi\x1a"), ("", b"\x1a"), ("x" * 160, b"x" * 160 + b"\x1a"),
])
def test_terminate_sms_body(body, expected):
    assert at.terminate_sms_body(body) == expected
    assert len(at.terminate_sms_body(body)) == len(body) + 1


@pytest.mark.parametrize("body", ["a\rb", "a\x1a", "\x1b", "snow ☃"])
def test_terminate_sms_body_rejects(body):
    with pytest.raises(ValueError):
        at.terminate_sms_body(body)


def test_response_parser_streams_in_pieces():
    stream = b'\r\n+COPS: 0,0,"TH GSM"\r\n\r\nOK\r\n\r\n> \r\n+CMGS: 1\r\n\r\nOK\r\n'
    parser = at.ResponseParser()
    got = []
    for i in range(len(stream)):
        got += parser.feed(stream[i:i + 1])
    assert [r.kind for r in got] == [
        ResponseKind.INTERMEDIATE, ResponseKind.FINAL_OK, ResponseKind.SMS_PROMPT,
        ResponseKind.SEND_CONFIRM, ResponseKind.FINAL_OK,
    ]
    assert got[0].text == '+COPS: 0,0,"TH GSM"'
    assert parser.pending == b""
