"""The agent policies wired into the event loop.

Five wakeup behaviours over (book view, oracle, own rng, own state):

* ZiLimitAgent   - zero-intelligence limit orders; valuation drawn either from
                   a fixed price band (santa_fe mode) or around the prevailing
                   mid (prime mode). Buys strictly below the mid, sells at or
                   above it, cancels its own oldest order with probability
                   p_cancel.
* ZiMarketAgent  - unit market orders, side by fair coin.
* DarpMarketAgent- market orders whose signs follow the DAR(p) process.
* PrimeMarketAgent - market orders sided by a noisy oracle observation vs the
                   mid, producing buy/sell arrival asymmetry proportional to
                   mispricing.
* TechnicalAgent - trend-following or mean-reverting market orders off the
                   mid change over a lookback horizon.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .book import Side
from .darp import DarpParams, DarpProcess
from .kernel import next_poisson_wakeup


class Agent:
    """Self-clocking Poisson agent; subclasses implement wakeup(sim)."""

    def __init__(self, agent_id: int, wake_rate: float, rng: np.random.Generator):
        if wake_rate <= 0:
            raise ValueError(f"wake rate must be positive, got {wake_rate}")
        self.agent_id = agent_id
        self.wake_rate = wake_rate
        self.rng = rng

    def next_wakeup_delay(self) -> int:
        return next_poisson_wakeup(self.wake_rate, self.rng)

    def wakeup(self, sim) -> None:
        raise NotImplementedError


@dataclass(frozen=True)
class ZiLimitParams:
    wake_rate: float
    p_cancel: float = 0.5
    mode: str = "santa_fe"   # or "prime"
    band_low: int = 1        # santa_fe valuation band, inclusive
    band_high: int = 100
    half_width: int = 50     # prime: valuation offset band +-W around the mid
    size: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_cancel <= 1.0:
            raise ValueError("p_cancel must be in [0, 1]")
        if self.mode not in ("santa_fe", "prime"):
            raise ValueError(f"unknown zi_limit mode {self.mode!r}")
        if self.band_low < 1 or self.band_low >= self.band_high:
            raise ValueError("valuation band must satisfy 1 <= low < high")
        if self.half_width < 1 or self.size < 1:
            raise ValueError("half_width and size must be >= 1")


class ZiLimitAgent(Agent):
    def __init__(self, agent_id: int, params: ZiLimitParams, rng: np.random.Generator):
        super().__init__(agent_id, params.wake_rate, rng)
        self.params = params
        self._live: deque[int] = deque()  # own order ids, oldest first

    def wakeup(self, sim) -> None:
        if self.rng.random() < self.params.p_cancel:
            self._cancel_oldest(sim)
            return
        mid2x = sim.l1().mid2x
        if mid2x is None:
            return  # side branch is undecidable on a one-sided book
        v = self._valuation(mid2x)
        side = Side.BID if 2 * v < mid2x else Side.ASK
        oid = sim.place_limit(self.agent_id, side, v, self.params.size)
        self._live.append(oid)

    def _valuation(self, mid2x: int) -> int:
        p = self.params
        if p.mode == "santa_fe":
            return int(self.rng.integers(p.band_low, p.band_high + 1))
        # prime: centre on the mid rounded half-to-even (rounding half up would
        # bias the whole book upward); the zero offset is excluded so the
        # buy/sell branch is always strict
        center = mid2x // 2
        if mid2x % 2 and center % 2:
            center += 1
        u = int(self.rng.integers(1, 2 * p.half_width + 1))
        offset = u - p.half_width - 1
        if offset >= 0:
            offset += 1
        return max(1, center + offset)

    def _cancel_oldest(self, sim) -> None:
        # ids of orders that were filled meanwhile are stale; drop until a
        # live one cancels or none remain
        while self._live:
            if sim.cancel(self._live.popleft()) is not None:
                return


@dataclass(frozen=True)
class ZiMarketParams:
    wake_rate: float
    size: int = 1

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("order size must be >= 1")


class ZiMarketAgent(Agent):
    def __init__(self, agent_id: int, params: ZiMarketParams, rng: np.random.Generator):
        super().__init__(agent_id, params.wake_rate, rng)
        self.params = params

    def wakeup(self, sim) -> None:
        side = Side.BID if self.rng.random() <= 0.5 else Side.ASK
        sim.place_market(self.agent_id, side, self.params.size)


class DarpMarketAgent(Agent):
    """Market agent whose order signs carry DAR(p) long memory."""

    def __init__(self, agent_id: int, darp: DarpParams, wake_rate: float,
                 size: int, rng: np.random.Generator):
        super().__init__(agent_id, wake_rate, rng)
        if size < 1:
            raise ValueError("order size must be >= 1")
        self.size = size
        self.process = DarpProcess(darp, rng)

    def wakeup(self, sim) -> None:
        side = Side.BID if self.process.step() > 0 else Side.ASK
        sim.place_market(self.agent_id, side, self.size)


@dataclass(frozen=True)
class PrimeMarketParams:
    wake_rate: float
    noise_half_width: int = 5
    size: int = 1

    def __post_init__(self) -> None:
        if self.noise_half_width < 0:
            raise ValueError("observation noise half-width must be >= 0")
        if self.size < 1:
            raise ValueError("order size must be >= 1")


class PrimeMarketAgent(Agent):
    """Fundamental agent: buys when the observed true price exceeds the mid."""

    def __init__(self, agent_id: int, params: PrimeMarketParams, rng: np.random.Generator):
        super().__init__(agent_id, params.wake_rate, rng)
        self.params = params

    def wakeup(self, sim) -> None:
        observed = sim.observe(self.params.noise_half_width, self.rng)
        mid2x = sim.l1().mid2x
        if mid2x is None:
            buy = self.rng.random() <= 0.5
        elif 2 * observed > mid2x:
            buy = True
        elif 2 * observed < mid2x:
            buy = False
        else:
            buy = self.rng.random() <= 0.5
        sim.place_market(self.agent_id, Side.BID if buy else Side.ASK, self.params.size)


@dataclass(frozen=True)
class TechnicalParams:
    kind: str                # "trend" or "mean_revert"
    lookback_ns: int
    threshold: int = 0       # dead zone in ticks
    wake_rate: float = 0.5
    size: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("trend", "mean_revert"):
            raise ValueError(f"unknown technical kind {self.kind!r}")
        if self.lookback_ns <= 0:
            raise ValueError("lookback must be positive")
        if self.threshold < 0 or self.size < 1:
            raise ValueError("threshold must be >= 0 and size >= 1")


class TechnicalAgent(Agent):
    def __init__(self, agent_id: int, params: TechnicalParams, rng: np.random.Generator):
        super().__init__(agent_id, params.wake_rate, rng)
        self.params = params

    def wakeup(self, sim) -> None:
        now_mid = sim.mid2x_at(sim.now)
        past_mid = sim.mid2x_at(sim.now - self.params.lookback_ns)
        if now_mid is None or past_mid is None:
            return  # not enough mid history to span the lookback
        delta2x = now_mid - past_mid
        threshold2x = 2 * self.params.threshold
        if delta2x > threshold2x:
            momentum_side = Side.BID
        elif delta2x < -threshold2x:
            momentum_side = Side.ASK
        else:
            return
        side = momentum_side if self.params.kind == "trend" else momentum_side.opposite
        sim.place_market(self.agent_id, side, self.params.size)
