"""Simulated auto-monitoring and SMS alert system over an emulated GSM modem."""
from .sensing import (AdcFrame, DetectionFlags, LightMode, SensingConfig, SensorSnapshot,
                      decode_status, encode_status, interpret_frame)
from .at_protocol import AtCommand, AtResponse, ResponseKind, Verb
from .transport import LinkConfig, LinkEndpoint, LinkError, WouldBlock, create_link
from .modem_emulator import DeliveredSms, EmulatorPort, Fault, ModemEmulator
from .modem_client import CallRejected, ClientSession, ModemError, ModemTimeout, SendFailed
from .monitor import AlertMode, MonitorConfig, run_monitor

__version__ = "0.1.0"
