"""Build configured simulations, run them, and write run directories atomically.

A run directory holds trades.csv, l1.csv, summary.txt, and the resolved
config.yaml used to produce them, so any run can be replayed byte-identically
from its own artifacts.
"""

from __future__ import annotations

import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import tradeio
from .agents import (
    DarpMarketAgent,
    PrimeMarketAgent,
    PrimeMarketParams,
    TechnicalAgent,
    TechnicalParams,
    ZiLimitAgent,
    ZiLimitParams,
    ZiMarketAgent,
    ZiMarketParams,
)
from .book import OrderBook
from .config import RunConfig, dump_config, load_config
from .darp import DarpParams
from .errors import ConfigError, DataError
from .kernel import RunStats, Simulation, agent_stream, oracle_stream
from .oracle import constant_series, random_walk_series, series_from_file
from .rng import BatchedRng

TRADES_FILE = "trades.csv"
L1_FILE = "l1.csv"
SUMMARY_FILE = "summary.txt"
CONFIG_FILE = "config.yaml"


@dataclass(frozen=True)
class RunResult:
    out_dir: Path
    stats: RunStats


def build_simulation(config: RunConfig) -> Simulation:
    """Seeded book, oracle series, and the configured agent census."""
    book = OrderBook()
    if config.book is not None:
        book.seed_linear(config.book.start_price, config.book.half_width, config.book.slope)

    series = None
    if config.oracle is not None:
        o = config.oracle
        if o.kind == "constant":
            series = constant_series(o.price)
        elif o.kind == "random_walk":
            series = random_walk_series(o.start, o.sigma, o.step_ns,
                                        config.session_ns, oracle_stream(config.seed))
        else:
            series = series_from_file(o.path)

    sim = Simulation(book, series=series)
    next_id = 0

    def take_id() -> int:
        nonlocal next_id
        next_id += 1
        return next_id - 1

    if config.zi_limit is not None:
        g = config.zi_limit
        params = ZiLimitParams(wake_rate=g.wake_rate, p_cancel=g.p_cancel, mode=g.mode,
                               band_low=g.band_low, band_high=g.band_high,
                               half_width=g.half_width, size=g.size)
        for _ in range(g.count):
            aid = take_id()
            sim.register(ZiLimitAgent(aid, params, BatchedRng(agent_stream(config.seed, aid))))

    if config.zi_market is not None:
        g = config.zi_market
        for _ in range(g.count):
            aid = take_id()
            rng = BatchedRng(agent_stream(config.seed, aid))
            if g.mode == "santa_fe":
                agent = ZiMarketAgent(aid, ZiMarketParams(wake_rate=g.wake_rate, size=g.size), rng)
            elif g.mode == "darp":
                darp = DarpParams(p=g.darp_p, gamma=g.darp_gamma, n=g.darp_n,
                                  literal_branch=g.darp_literal_branch)
                agent = DarpMarketAgent(aid, darp, g.wake_rate, g.size, rng)
            else:
                agent = PrimeMarketAgent(
                    aid, PrimeMarketParams(wake_rate=g.wake_rate,
                                           noise_half_width=g.noise, size=g.size), rng)
            sim.register(agent)

    for kind, group in (("trend", config.trend), ("mean_revert", config.mean_revert)):
        if group is None:
            continue
        params = TechnicalParams(kind=kind, lookback_ns=group.lookback_ns,
                                 threshold=group.threshold, wake_rate=group.wake_rate,
                                 size=group.size)
        for _ in range(group.count):
            aid = take_id()
            sim.register(TechnicalAgent(aid, params, BatchedRng(agent_stream(config.seed, aid))))

    return sim


def run_simulation(config: RunConfig, out_dir: str | Path) -> RunResult:
    """Execute the configured session and write all artifacts.

    Outputs land in a temporary directory that is renamed onto out_dir on
    success, so a failed run leaves nothing behind.
    """
    out_dir = Path(out_dir)
    if out_dir.exists():
        raise ConfigError(f"output directory {out_dir} already exists")
    sim = build_simulation(config)
    stats = sim.run_until(config.session_ns)

    out_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=out_dir.name + ".tmp-", dir=out_dir.parent))
    try:
        _write_artifacts(tmp, config, sim, stats)
        tmp.rename(out_dir)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return RunResult(out_dir=out_dir, stats=stats)


def _write_artifacts(dest: Path, config: RunConfig, sim: Simulation, stats: RunStats) -> None:
    tradeio.write_trades(dest / TRADES_FILE, sim.trades)
    tradeio.write_l1(dest / L1_FILE, sim.quotes)
    (dest / CONFIG_FILE).write_text(dump_config(config))
    book = sim.book
    l1 = book.l1(stats.end)
    tradeio.write_summary(dest / SUMMARY_FILE, {
        "seed": config.seed,
        "session_ns": config.session_ns,
        "events_dispatched": stats.events_dispatched,
        "trades": stats.n_trades,
        "traded_qty": stats.traded_qty,
        "submitted_qty": book.submitted_qty,
        "cancelled_qty": book.cancelled_qty,
        "discarded_qty": book.discarded_qty,
        "resting_orders": len(book),
        "final_best_bid": "" if l1.best_bid is None else l1.best_bid,
        "final_best_ask": "" if l1.best_ask is None else l1.best_ask,
    })


def load_run(run_dir: str | Path) -> tuple[list[tradeio.TradeRecord], list[tradeio.QuoteRecord]]:
    """Trade and quote records from a run directory (or equivalent layout)."""
    run_dir = Path(run_dir)
    trades_path = run_dir / TRADES_FILE
    l1_path = run_dir / L1_FILE
    if not trades_path.exists() or not l1_path.exists():
        raise DataError(f"{run_dir} does not contain {TRADES_FILE} and {L1_FILE}")
    dump = tradeio.read_trades(trades_path)
    return dump.records, tradeio.read_l1(l1_path)


def replay(run_dir: str | Path) -> bool:
    """Re-run a recorded config and compare artifacts byte for byte."""
    run_dir = Path(run_dir)
    config_path = run_dir / CONFIG_FILE
    if not config_path.exists():
        raise DataError(f"{run_dir} has no {CONFIG_FILE} to replay")
    config = load_config(config_path)
    with tempfile.TemporaryDirectory(prefix="replay-") as scratch:
        fresh = Path(scratch) / "rerun"
        run_simulation(config, fresh)
        identical = True
        for name in (TRADES_FILE, L1_FILE, SUMMARY_FILE):
            if (fresh / name).read_bytes() != (run_dir / name).read_bytes():
                identical = False
    return identical
