"""Walk the manual GSM module checks (ping, operator, dial, hang up, text SMS)
through the client driver and print every byte exchanged on the link."""
from amsms import at_protocol as at
from amsms.at_protocol import Verb
from amsms.modem_client import ClientSession
from amsms.modem_emulator import EmulatorPort, ModemEmulator
from amsms.transport import create_link


def main():
    dte, dce = create_link()
    modem = ModemEmulator()
    wire = []
    feed = modem.feed

    def traced(data):
        reply = feed(data)
        wire.append((data, reply))
        return reply

    modem.feed = traced
    EmulatorPort(modem, dce)
    session = ClientSession(dte)

    session.execute(Verb.PING)
    print("operator:", session.query_operator())
    session.dial("0895092020")
    print("call state:", modem.state.call)
    session.hangup()
    print("call state:", modem.state.call)
    ref = session.send_sms("0800453947", "AMSMS test message")
    print("message reference:", ref)

    print()
    for sent, reply in wire:
        print(f"DTE -> {sent!r}")
        for resp in at.ResponseParser().feed(reply):
            print(f"     <- {resp.kind.name} {resp.text!r}")


if __name__ == "__main__":
    main()
