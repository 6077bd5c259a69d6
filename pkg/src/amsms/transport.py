"""In-memory duplex serial link with RTS/CTS style flow control.

Each endpoint owns a bounded receive buffer. An endpoint's CTS is asserted
while that buffer has room and no manual hold is in force; a peer may only
push bytes while it is asserted. Bytes are never dropped: a blocked writer
waits up to its timeout and reports how much was accepted.

Both endpoints share one condition variable, so buffer transitions are
atomic with respect to the two sides and each side may run in its own thread.
"""
from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional


class LinkError(Exception):
    """The link is closed or otherwise unusable."""


class EndOfLink(LinkError, EOFError):
    """Read on a closed link whose receive buffer is drained."""


class WouldBlock(BlockingIOError):
    """No byte could be accepted before the write timeout expired."""

    def __init__(self, message: str = "peer not clear to send"):
        super().__init__(message)
        self.characters_written = 0


@dataclass(frozen=True)
class LineSettings:
    # Informational only; the link is paced in ticks, not baud.
    speed: int = 115200
    parity: str = "none"
    data_bits: int = 8
    stop_bits: int = 1


@dataclass(frozen=True)
class LinkConfig:
    buffer_capacity_bytes: int = 1024
    latency_ticks: int = 0
    line: LineSettings = field(default_factory=LineSettings)

    def __post_init__(self):
        if self.buffer_capacity_bytes < 1:
            raise ValueError("buffer_capacity_bytes must be >= 1")
        if self.latency_ticks < 0:
            raise ValueError("latency_ticks must be >= 0")


@dataclass(frozen=True)
class LinkStats:
    bytes_written: int
    bytes_read: int
    buffered: int
    cts_asserted: bool


def _deadline(timeout: Optional[float]) -> Optional[float]:
    return None if timeout is None else time.monotonic() + max(timeout, 0.0)


def _remaining(deadline: Optional[float]) -> Optional[float]:
    return None if deadline is None else deadline - time.monotonic()


class Link:
    """Owns the shared state of an endpoint pair. Use :func:`create_link`."""

    def __init__(self, cfg: LinkConfig):
        self.config = cfg
        self.cond = threading.Condition()
        self.closed = False
        self.tick = 0
        self.a = LinkEndpoint(self, "A")
        self.b = LinkEndpoint(self, "B")
        self.a.peer, self.b.peer = self.b, self.a

    def advance(self, ticks: int = 1) -> None:
        """Move simulated time forward, delivering bytes whose latency elapsed."""
        if ticks < 0:
            raise ValueError("ticks must be >= 0")
        arrived = []
        with self.cond:
            self.tick += ticks
            for ep in (self.a, self.b):
                if ep._land(self.tick):
                    arrived.append(ep)
            self.cond.notify_all()
        for ep in arrived:
            ep._notify()

    def close(self) -> None:
        with self.cond:
            self.closed = True
            self.cond.notify_all()
        self.a._notify()
        self.b._notify()


class LinkEndpoint:
    def __init__(self, link: Link, name: str):
        self._link = link
        self.name = name
        self.peer: LinkEndpoint = None  # type: ignore[assignment]
        self._rx = bytearray()
        self._in_flight: deque[tuple[int, bytes]] = deque()
        self._in_flight_bytes = 0
        self._hold = False
        self.bytes_written = 0
        self.bytes_read = 0
        self._listeners: list[Callable[[], None]] = []

    def __repr__(self):
        return f"<LinkEndpoint {self.name} buffered={len(self._rx)}>"

    @property
    def config(self) -> LinkConfig:
        return self._link.config

    @property
    def link(self) -> Link:
        return self._link

    # -- state helpers, caller holds the lock --

    def _occupancy(self) -> int:
        return len(self._rx) + self._in_flight_bytes

    def _space(self) -> int:
        if self._hold:
            return 0
        return max(self._link.config.buffer_capacity_bytes - self._occupancy(), 0)

    def _accept(self, chunk: bytes) -> None:
        latency = self._link.config.latency_ticks
        if latency:
            self._in_flight.append((self._link.tick + latency, chunk))
            self._in_flight_bytes += len(chunk)
        else:
            self._rx.extend(chunk)

    def _land(self, now: int) -> bool:
        landed = False
        while self._in_flight and self._in_flight[0][0] <= now:
            _, chunk = self._in_flight.popleft()
            self._in_flight_bytes -= len(chunk)
            self._rx.extend(chunk)
            landed = True
        return landed

    def _notify(self) -> None:
        for cb in list(self._listeners):
            cb()

    # -- public API --

    @property
    def cts_asserted(self) -> bool:
        """True while this endpoint is ready to receive."""
        with self._link.cond:
            return self._space() > 0

    @property
    def closed(self) -> bool:
        return self._link.closed

    def on_activity(self, callback: Callable[[], None]) -> None:
        """Register ``callback`` for data arriving here or room opening at the peer.

        Callbacks run in the thread that caused the event, outside the lock.
        """
        self._listeners.append(callback)

    def write(self, data: bytes, timeout: Optional[float] = 0.0) -> int:
        """Push ``data`` to the peer, waiting up to ``timeout`` seconds for CTS.

        Returns the number of bytes accepted. Raises WouldBlock if none were.
        ``timeout=None`` waits indefinitely.
        """
        data = bytes(data)
        if not data:
            return 0
        cond = self._link.cond
        deadline = _deadline(timeout)
        accepted = 0
        while accepted < len(data):
            with cond:
                while True:
                    if self._link.closed:
                        raise LinkError("link closed")
                    space = self.peer._space()
                    if space:
                        chunk = data[accepted:accepted + space]
                        self.peer._accept(chunk)
                        accepted += len(chunk)
                        self.bytes_written += len(chunk)
                        cond.notify_all()
                        break
                    remaining = _remaining(deadline)
                    if remaining is not None and remaining <= 0:
                        break
                    cond.wait(remaining)
            if not space:
                break
            # Let a same-thread reader on the peer drain before waiting for room.
            if not self._link.config.latency_ticks:
                self.peer._notify()
        if not accepted:
            raise WouldBlock()
        return accepted

    def write_all(self, data: bytes, timeout: Optional[float] = None) -> None:
        """Write every byte of ``data`` or raise WouldBlock when time runs out."""
        deadline = _deadline(timeout)
        view = memoryview(bytes(data))
        while view:
            remaining = _remaining(deadline)
            try:
                n = self.write(view, None if remaining is None else max(remaining, 0))
            except WouldBlock:
                raise WouldBlock(f"{len(view)} bytes not accepted before timeout") from None
            view = view[n:]

    def read(self, max_bytes: int = 4096, timeout: Optional[float] = 0.0) -> bytes:
        """Return up to ``max_bytes`` in FIFO order, or b"" if none arrive in time."""
        if max_bytes < 1:
            raise ValueError("max_bytes must be >= 1")
        cond = self._link.cond
        deadline = _deadline(timeout)
        with cond:
            while True:
                if self._rx:
                    out = bytes(self._rx[:max_bytes])
                    del self._rx[:max_bytes]
                    self.bytes_read += len(out)
                    cond.notify_all()
                    break
                if self._link.closed and not self._in_flight:
                    raise EndOfLink("link closed")
                remaining = _remaining(deadline)
                if remaining is not None and remaining <= 0:
                    return b""
                cond.wait(remaining)
        # Room opened here, so the peer may be able to send again.
        self.peer._notify()
        return out

    def available(self) -> int:
        with self._link.cond:
            return len(self._rx)

    def set_cts(self, asserted: bool) -> None:
        """Manually hold (False) or release (True) this endpoint's CTS line."""
        with self._link.cond:
            self._hold = not asserted
            self._link.cond.notify_all()
        if asserted:
            self.peer._notify()

    def stats(self) -> LinkStats:
        with self._link.cond:
            return LinkStats(self.bytes_written, self.bytes_read, self._occupancy(),
                             self._space() > 0)

    def close(self) -> None:
        self._link.close()


def create_link(cfg: Optional[LinkConfig] = None) -> tuple[LinkEndpoint, LinkEndpoint]:
    """Return two connected endpoints, both clear to send with empty buffers."""
    link = Link(cfg or LinkConfig())
    return link.a, link.b
