"""Replay the trespass round through the full stack and show log + delivered SMS.

    python scripts/replay_logged_round.py [--location Lab-A] [--out DIR]
"""
import argparse
import tempfile
from datetime import datetime
from pathlib import Path

from amsms.modem_client import ClientSession
from amsms.modem_emulator import EmulatorPort, ModemEmulator
from amsms.monitor import MonitorConfig, run_monitor
from amsms.sensing import AdcFrame
from amsms.transport import create_link


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--location", default="Lab-A")
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args()

    out = args.out or Path(tempfile.mkdtemp(prefix="amsms-"))
    out.mkdir(parents=True, exist_ok=True)
    dte, dce = create_link()
    modem = ModemEmulator()
    EmulatorPort(modem, dce)
    cfg = MonitorConfig(location=args.location, dest_phone="0800453947",
                        log_path=out / "report.txt")
    summary = run_monitor([AdcFrame(1023, 93, 1023, 646)], cfg, ClientSession(dte),
                          clock=lambda: datetime(2013, 6, 1, 10, 15))

    print(f"--- {summary.log_path}")
    print(summary.log_path.read_text(), end="")
    print("--- outbox")
    print(modem.export_outbox(), end="")


if __name__ == "__main__":
    main()
