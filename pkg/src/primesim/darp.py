"""Discrete autoregressive binary sign process with a power-law parent-lag kernel.

Each step picks a parent lag l in {1..n} with probability proportional to
l**((gamma-3)/2), copies the parent sign with probability p (flips it
otherwise), emits the new sign, and shifts it into the front of the history.
With p > 1/2 the emitted +/-1 stream has slowly decaying positive
autocorrelation, the meta-order signature in trade-sign series.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DarpParams:
    p: float                     # copy probability
    gamma: float                 # parent-lag distribution exponent
    n: int = 50                  # history length
    literal_branch: bool = False # copy with prob 1-p instead (pseudocode-literal variant)

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"copy probability must be in [0, 1], got {self.p}")
        if self.n < 1:
            raise ValueError(f"history length must be >= 1, got {self.n}")


def lag_distribution(gamma: float, n: int) -> np.ndarray:
    """P(parent lag = l) for l = 1..n, proportional to l**((gamma-3)/2)."""
    w = np.arange(1, n + 1, dtype=float) ** ((gamma - 3.0) / 2.0)
    return w / w.sum()


class DarpProcess:
    """Stateful stepper used by the market agent; emits +1 (buy) or -1 (sell)."""

    def __init__(self, params: DarpParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self._cum = np.cumsum(lag_distribution(params.gamma, params.n))
        bits = rng.integers(0, 2, size=params.n)
        self.history: deque[int] = deque((int(b) for b in bits), maxlen=params.n)

    def step(self) -> int:
        lag_index = int(np.searchsorted(self._cum, self.rng.random(), side="right"))
        lag_index = min(lag_index, self.params.n - 1)  # guard the cum[-1] < draw edge
        parent = self.history[lag_index]
        copy = self.rng.random() < self.params.p
        if self.params.literal_branch:
            copy = not copy
        bit = parent if copy else 1 - parent
        self.history.appendleft(bit)
        return 1 if bit else -1


def generate_signs(params: DarpParams, length: int, rng: np.random.Generator) -> np.ndarray:
    """Array form of the process: `length` signs in {-1, +1}.

    All randomness is pre-drawn so the sequential pass is a cheap index chase;
    used by the Monte-Carlo tuner where many long streams are needed.
    """
    n = params.n
    cum = np.cumsum(lag_distribution(params.gamma, n))
    path = np.empty(n + length, dtype=np.int8)
    path[:n] = rng.integers(0, 2, size=n)
    lags = np.searchsorted(cum, rng.random(length), side="right") + 1
    np.clip(lags, 1, n, out=lags)
    if params.literal_branch:
        flips = rng.random(length) < params.p
    else:
        flips = rng.random(length) >= params.p
    for t in range(length):
        path[n + t] = path[n + t - lags[t]] ^ flips[t]
    return (path[n:].astype(np.int8) * 2 - 1).astype(np.int8)
