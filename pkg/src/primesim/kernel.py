"""Deterministic discrete-event loop: time-ordered agent wakeups over one book.

Simulation time is integer nanoseconds. Events are totally ordered by
(time, seq) where seq is the schedule-order tie-breaker, so a run is a pure
function of (configuration, master seed). Each agent owns an independent
random stream derived from the master seed and its id.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .book import L1Snapshot, LimitOrder, MarketResult, OrderBook, Side, Trade
from .oracle import PriceSeries, observe

# Stream namespaces under the master seed.
_AGENT_SPACE = 1
_ORACLE_SPACE = 2

# Session-end sorts after same-instant wakeups so a horizon of 10*dt yields 10 wakeups.
_SESSION_END_SEQ = 2**62


class EventKind(Enum):
    WAKEUP = "wakeup"
    SESSION_END = "session_end"


@dataclass(frozen=True, order=True)
class Event:
    time: int
    seq: int
    agent: int = field(compare=False)
    kind: EventKind = field(compare=False)


@dataclass(frozen=True)
class RunStats:
    events_dispatched: int
    n_trades: int
    traded_qty: int
    start: int
    end: int


def agent_stream(master_seed: int, agent_id: int) -> np.random.Generator:
    """Independent per-agent generator, a pure function of (master_seed, agent_id)."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, _AGENT_SPACE, agent_id)))


def oracle_stream(master_seed: int) -> np.random.Generator:
    """Generator for oracle path construction, independent of all agent streams."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, _ORACLE_SPACE)))


def next_poisson_wakeup(rate: float, rng: np.random.Generator) -> int:
    """Exponential inter-arrival gap in ns for a Poisson process at `rate` events/s."""
    if rate <= 0:
        raise ValueError(f"arrival rate must be positive, got {rate}")
    return max(1, round(rng.exponential(1.0 / rate) * 1e9))


class Simulation:
    """Single-threaded event loop owning the book, the tape, and the quote log.

    Agents are duck-typed: they expose agent_id, wakeup(sim), and
    next_wakeup_delay(). During wakeup they act through place_limit /
    place_market / cancel and the read-only views below. After each wakeup the
    kernel reschedules the agent (self-clocking arrivals).
    """

    def __init__(self, book: OrderBook, series: PriceSeries | None = None, start: int = 0):
        self.book = book
        self.series = series
        self.now = start
        self._start = start
        # heap of (time, seq, agent_id); agent -1 marks session end
        self._heap: list[tuple[int, int, int]] = []
        self._next_seq = 0
        self._agents: dict[int, object] = {}
        self.trades: list[Trade] = []
        self.quotes: list[tuple[int, int | None, int | None]] = []  # (ts, bid, ask) changes
        self._mid_times: list[int] = []   # times when a two-sided mid was (re)defined
        self._mid_values: list[int] = []  # mid2x at those times
        self._last_quote: tuple[int | None, int | None] | None = None
        self.events_dispatched = 0
        self.log_quote()

    # ----------------------------------------------------------- scheduling

    def schedule(self, event: Event) -> None:
        if event.time < self.now:
            raise ValueError(f"cannot schedule event at {event.time} before now={self.now}")
        if event.kind is EventKind.WAKEUP and event.agent < 0:
            raise ValueError("wakeup events need a registered agent id >= 0")
        marker = event.agent if event.kind is EventKind.WAKEUP else -1
        heapq.heappush(self._heap, (event.time, event.seq, marker))

    def schedule_wakeup(self, agent_id: int, time: int) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule event at {time} before now={self.now}")
        seq = self._next_seq
        self._next_seq += 1
        assert seq < _SESSION_END_SEQ
        heapq.heappush(self._heap, (time, seq, agent_id))

    def register(self, agent) -> None:
        """Add an agent and schedule its first wakeup one inter-arrival gap out."""
        if agent.agent_id in self._agents:
            raise ValueError(f"duplicate agent id {agent.agent_id}")
        if agent.agent_id < 0:
            raise ValueError("agent ids must be >= 0")
        self._agents[agent.agent_id] = agent
        self.schedule_wakeup(agent.agent_id, self.now + agent.next_wakeup_delay())

    def run_until(self, end: int) -> RunStats:
        """Dispatch events in (time, seq) order through the session horizon."""
        heapq.heappush(self._heap, (end, _SESSION_END_SEQ, -1))
        heap = self._heap
        agents = self._agents
        now = self.now
        dispatched = 0
        while heap:
            time, _, agent_id = heapq.heappop(heap)
            assert time >= now, "event dispatched out of order"
            now = self.now = time
            if agent_id < 0:
                break
            dispatched += 1
            agent = agents[agent_id]
            agent.wakeup(self)
            delay = agent.next_wakeup_delay()
            seq = self._next_seq
            self._next_seq += 1
            heapq.heappush(heap, (time + delay, seq, agent_id))
        self.events_dispatched += dispatched
        self.now = end
        return RunStats(
            events_dispatched=self.events_dispatched,
            n_trades=len(self.trades),
            traded_qty=sum(t.qty for t in self.trades),
            start=self._start,
            end=end,
        )

    # -------------------------------------------------------------- actions

    def place_limit(self, agent_id: int, side: Side, price: int, qty: int) -> int:
        order = LimitOrder(id=self.book.new_order_id(), agent=agent_id,
                           side=side, price=price, qty=qty, ts=self.now)
        trades = self.book.submit_limit(order)
        self._record(trades)
        return order.id

    def place_market(self, agent_id: int, side: Side, qty: int) -> MarketResult:
        result = self.book.submit_market(agent_id, side, qty, ts=self.now)
        self._record(result.trades)
        return result

    def cancel(self, order_id: int) -> LimitOrder | None:
        order = self.book.cancel(order_id)
        if order is not None:
            self.log_quote()
        return order

    # ---------------------------------------------------------------- views

    def l1(self) -> L1Snapshot:
        return self.book.l1(self.now)

    def observe(self, noise_half_width: int, rng: np.random.Generator) -> int:
        if self.series is None:
            raise ValueError("simulation has no oracle series")
        return observe(self.series, self.now, noise_half_width, rng)

    def mid2x_at(self, t: int) -> int | None:
        """Last defined mid (x2) at or before t; None before the first quote."""
        if t < 0 or not self._mid_times:
            return None
        i = bisect_right(self._mid_times, t) - 1
        if i < 0:
            return None
        return self._mid_values[i]

    # ------------------------------------------------------------- recording

    def _record(self, trades: list[Trade]) -> None:
        self.trades.extend(trades)
        self.log_quote()

    def log_quote(self) -> None:
        """Append an L1 row if the top of book moved since the last row."""
        quote = (self.book.best_bid, self.book.best_ask)
        if quote == self._last_quote:
            return
        self._last_quote = quote
        self.quotes.append((self.now, quote[0], quote[1]))
        if quote[0] is not None and quote[1] is not None:
            if self._mid_times and self._mid_times[-1] == self.now:
                self._mid_values[-1] = quote[0] + quote[1]
            else:
                self._mid_times.append(self.now)
                self._mid_values.append(quote[0] + quote[1])
