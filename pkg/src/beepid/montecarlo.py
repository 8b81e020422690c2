"""Monte-Carlo experiment harness.

Each run drops nodes uniformly in a square with the receiver at the
center, lets the first n_active roster ids re-emit their fixed beep
patterns back to back for the simulated duration, pushes every beep
through the radio model, and scores identification after every period:
an active id identified is a true positive, a silent id identified is a
false positive. Sweeps cover the Cartesian grid of period length, beep
probability, and interference rate, aggregating counts over a fixed
number of independent runs per point.

Seeding: every run's randomness derives from (master_seed, period index,
probability index, run index). The interference-rate coordinate is
deliberately excluded and interference consumes its own substream, so
runs at different interference rates share layouts, shadowing, and fading
draw for draw; raising the rate can then only add observed slots, which
is what makes paired interference comparisons exact.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .channel import (
    ChannelConfig,
    doppler_correlation,
    rayleigh_sequence,
    standard_complex_normal,
)
from .fingerprint import MASK64, derive_seed
from .identify import (
    ChannelTrace,
    FilterWindow,
    _pattern_bits,
    filter_apply,
    filter_push,
    identify,
)

DEFAULT_PERIOD_MS_GRID = (50, 100, 150, 200, 500, 1000)
DEFAULT_P_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_IR_GRID = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2)

# Substream tags hung off each run seed.
_STREAM_CHANNEL = 1
_STREAM_INTERFERENCE = 2


class ConfigError(ValueError):
    """Raised for invalid or inconsistent simulation configuration."""


@dataclass
class SimConfig:
    """Full experiment parameterization.

    Grid fields (period_ms, p, interference_rate) hold one or more values;
    sweeps cover their Cartesian product while single-run entry points
    require singletons.
    """

    runs: int = 50
    sim_length_s: float = 5.0
    slot_s: float = 0.010
    period_ms: tuple[int, ...] = DEFAULT_PERIOD_MS_GRID
    n_nodes: int = 10
    n_active: int = 5
    p: tuple[float, ...] = DEFAULT_P_GRID
    interference_rate: tuple[float, ...] = DEFAULT_IR_GRID
    filter_len: int = 0
    ideal_channel: bool = False
    master_seed: int = 1
    channel: ChannelConfig = field(default_factory=ChannelConfig)

    def __post_init__(self) -> None:
        self.period_ms = tuple(int(v) for v in _as_tuple(self.period_ms))
        self.p = tuple(float(v) for v in _as_tuple(self.p))
        self.interference_rate = tuple(float(v) for v in _as_tuple(self.interference_rate))
        self.channel = replace(self.channel, slot_s=self.slot_s)
        self.validate()

    def validate(self) -> None:
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.n_nodes < 1:
            raise ConfigError("n_nodes must be >= 1")
        if not 0 <= self.n_active <= self.n_nodes:
            raise ConfigError("n_active must be in [0, n_nodes]")
        if self.filter_len < 0:
            raise ConfigError("filter_len must be >= 0")
        if not 0 <= self.master_seed <= MASK64:
            raise ConfigError("master_seed must fit in an unsigned 64-bit integer")
        if self.slot_s <= 0:
            raise ConfigError("slot_s must be positive")
        for grid_name in ("period_ms", "p", "interference_rate"):
            if not getattr(self, grid_name):
                raise ConfigError(f"{grid_name} grid must be non-empty")
        for p in self.p:
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"beep probability {p} outside [0, 1]")
        for rate in self.interference_rate:
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"interference rate {rate} outside [0, 1]")
        for period_ms in self.period_ms:
            self.slots_per_period(period_ms)
            if self.periods_per_run(period_ms) < 1:
                raise ConfigError(
                    f"simulation length {self.sim_length_s}s is shorter than one "
                    f"{period_ms}ms period"
                )

    def slots_per_period(self, period_ms: int) -> int:
        slot_ms = self.slot_s * 1000.0
        slots = int(round(period_ms / slot_ms))
        if slots < 1 or abs(slots * slot_ms - period_ms) > 1e-6:
            raise ConfigError(
                f"period {period_ms}ms is not a whole number of {slot_ms}ms slots"
            )
        return slots

    def periods_per_run(self, period_ms: int) -> int:
        """Complete periods in one run; the trailing partial period is dropped."""
        return int(self.sim_length_s * 1000.0 // period_ms)

    def roster(self) -> tuple[int, ...]:
        """The candidate universe: the receiver knows and tests every id."""
        return tuple(range(1, self.n_nodes + 1))

    def active_ids(self) -> tuple[int, ...]:
        return self.roster()[: self.n_active]

    def to_dict(self) -> dict:
        """Flat JSON-ready form; channel constants inline alongside the rest."""
        return {
            "runs": self.runs,
            "sim_length_s": self.sim_length_s,
            "slot_s": self.slot_s,
            "period_ms": list(self.period_ms),
            "n_nodes": self.n_nodes,
            "n_active": self.n_active,
            "p": list(self.p),
            "interference_rate": list(self.interference_rate),
            "filter_len": self.filter_len,
            "ideal_channel": self.ideal_channel,
            "master_seed": self.master_seed,
            "tx_power_dbm": self.channel.tx_power_dbm,
            "sensitivity_dbm": self.channel.sensitivity_dbm,
            "shadow_std_db": self.channel.shadow_std_db,
            "carrier_hz": self.channel.carrier_hz,
            "pathloss_exponent": self.channel.pathloss_exponent,
            "pathloss_ref_db": self.channel.pathloss_ref_db,
            "area_m": self.channel.area_m,
            "velocity_kmph": self.channel.velocity_kmph,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        """Build a config from the flat dict form, rejecting unknown keys."""
        known_sim = {
            "runs": int,
            "sim_length_s": float,
            "slot_s": float,
            "period_ms": tuple,
            "n_nodes": int,
            "n_active": int,
            "p": tuple,
            "interference_rate": tuple,
            "filter_len": int,
            "ideal_channel": bool,
            "master_seed": int,
        }
        known_channel = {
            "tx_power_dbm": float,
            "sensitivity_dbm": float,
            "shadow_std_db": float,
            "carrier_hz": float,
            "pathloss_exponent": float,
            "pathloss_ref_db": float,
            "area_m": float,
            "velocity_kmph": float,
        }
        unknown = set(raw) - set(known_sim) - set(known_channel)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        sim_kwargs = {}
        for key, value in raw.items():
            if key in known_sim:
                sim_kwargs[key] = _coerce(key, value, known_sim[key])
        channel_kwargs = {}
        for key, value in raw.items():
            if key in known_channel:
                channel_kwargs[key] = _coerce(key, value, known_channel[key])
        try:
            channel = ChannelConfig(**channel_kwargs)
            return cls(channel=channel, **sim_kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def _coerce(key: str, value, kind):
    try:
        if kind is tuple:
            return tuple(value) if isinstance(value, (list, tuple)) else (value,)
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} has invalid value {value!r}") from None


@dataclass(frozen=True)
class MetricsRecord:
    """Identification counts and rates for one parameter point."""

    t_ms: int
    p: float
    interference_rate: float
    filter_len: int
    runs: int
    events: int
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def tp_rate(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else math.nan

    @property
    def tn_rate(self) -> float:
        return self.tn / (self.tn + self.fp) if self.tn + self.fp else math.nan


@dataclass(frozen=True)
class FilterComparison:
    """Paired filtered-vs-unfiltered rates for one parameter point."""

    t_ms: int
    p: float
    interference_rate: float
    filter_len: int
    runs: int
    tp_rate_off: float
    tp_rate_on: float
    tn_rate_off: float
    tn_rate_on: float

    @property
    def tp_gain(self) -> float:
        return self.tp_rate_on - self.tp_rate_off

    @property
    def tn_loss(self) -> float:
        return self.tn_rate_off - self.tn_rate_on

    @property
    def net(self) -> float:
        return self.tp_gain - self.tn_loss


@dataclass(frozen=True)
class RunLayout:
    """One run's geometry: node drop, centered receiver, active roster prefix."""

    positions: tuple[tuple[float, float], ...]
    receiver: tuple[float, float]
    active_ids: tuple[int, ...]


def _draw_layout(cfg: SimConfig, rng: np.random.Generator) -> RunLayout:
    area = cfg.channel.area_m
    points = rng.uniform(0.0, area, size=(cfg.n_nodes, 2))
    return RunLayout(
        positions=tuple((float(x), float(y)) for x, y in points),
        receiver=(area / 2.0, area / 2.0),
        active_ids=cfg.active_ids(),
    )


def _pattern_matrix(cfg: SimConfig, p: float, t_slots: int) -> np.ndarray:
    """Active nodes' per-slot beep flags, shape (n_active, t_slots)."""
    rows = []
    for device_id in cfg.active_ids():
        bits = _pattern_bits(device_id, p, t_slots)
        rows.append([(bits >> t) & 1 for t in range(t_slots)])
    return np.array(rows, dtype=bool).reshape(cfg.n_active, t_slots)


def simulate_run_traces(
    cfg: SimConfig,
    period_ms: int,
    p: float,
    interference_rate: float,
    run_seed: int,
) -> list[ChannelTrace]:
    """Simulate one run and return the receiver's per-period union traces."""
    t_slots = cfg.slots_per_period(period_ms)
    n_periods = cfg.periods_per_run(period_ms)
    n_slots = n_periods * t_slots

    rng_channel = np.random.default_rng(derive_seed(run_seed, _STREAM_CHANNEL))
    rng_intf = np.random.default_rng(derive_seed(run_seed, _STREAM_INTERFERENCE))

    layout = _draw_layout(cfg, rng_channel)
    shadows = rng_channel.normal(0.0, cfg.channel.shadow_std_db, size=cfg.n_nodes)

    beeps = np.tile(_pattern_matrix(cfg, p, t_slots), (1, n_periods))

    if cfg.ideal_channel or cfg.n_active == 0:
        detected = beeps
    else:
        ch = cfg.channel
        rho = doppler_correlation(ch.velocity_kmph, ch.carrier_hz, ch.slot_s)
        g0 = standard_complex_normal(rng_channel, cfg.n_active)
        noise = standard_complex_normal(rng_channel, (cfg.n_active, n_slots))
        gains = rayleigh_sequence(g0, rho, noise)

        rx = np.asarray(layout.receiver)
        positions = np.asarray(layout.positions[: cfg.n_active])
        distances = np.hypot(*(positions - rx).T)
        pl = ch.pathloss_ref_db + 10.0 * ch.pathloss_exponent * np.log10(
            np.maximum(distances, 1.0)
        )
        with np.errstate(divide="ignore"):
            fade_db = 20.0 * np.log10(np.abs(gains))
        rx_dbm = ch.tx_power_dbm - pl[:, None] + shadows[: cfg.n_active, None] + fade_db
        detected = beeps & (rx_dbm >= ch.sensitivity_dbm)

    interference = rng_intf.random(n_slots) < interference_rate
    union = detected.any(axis=0) | interference

    packed = np.packbits(union.reshape(n_periods, t_slots), axis=1, bitorder="little")
    return [
        ChannelTrace(bits=int.from_bytes(row.tobytes(), "little"), period_slots=t_slots)
        for row in packed
    ]


def score_traces(
    traces: Sequence[ChannelTrace],
    roster: Sequence[int],
    active_ids: Sequence[int],
    p: float,
    filter_len: int,
) -> tuple[int, int, int, int]:
    """Identify after every period and tally (tp, fn, tn, fp).

    With filter_len >= 2, each period is scored on the OR of the window
    accumulated so far (partial until filter_len traces arrive), so every
    period yields one identification event and a filtered event always
    dominates its unfiltered counterpart slot-wise.
    """
    roster = tuple(roster)
    active = frozenset(active_ids)
    n_active = len(active)
    n_silent = len(roster) - n_active
    t_slots = traces[0].period_slots if traces else 0

    tp = fn = tn = fp = 0
    window = FilterWindow(window_len=max(filter_len, 1))
    for trace in traces:
        if filter_len >= 2:
            window = filter_push(window, trace)
            observed = filter_apply(window)
        else:
            observed = trace
        result = identify(observed, roster, p, t_slots)
        hits = sum(1 for device_id in result.identified if device_id in active)
        false_hits = len(result.identified) - hits
        tp += hits
        fn += n_active - hits
        fp += false_hits
        tn += n_silent - false_hits
    return tp, fn, tn, fp


def run_once(cfg: SimConfig, run_seed: int) -> MetricsRecord:
    """Simulate and score a single run at a single parameter point.

    Requires every grid field to hold exactly one value.
    """
    for grid_name in ("period_ms", "p", "interference_rate"):
        if len(getattr(cfg, grid_name)) != 1:
            raise ConfigError(
                f"run_once needs a single-point grid, but {grid_name} has "
                f"{len(getattr(cfg, grid_name))} values"
            )
    period_ms = cfg.period_ms[0]
    p = cfg.p[0]
    rate = cfg.interference_rate[0]
    traces = simulate_run_traces(cfg, period_ms, p, rate, run_seed)
    tp, fn, tn, fp = score_traces(traces, cfg.roster(), cfg.active_ids(), p, cfg.filter_len)
    return MetricsRecord(
        t_ms=period_ms,
        p=p,
        interference_rate=rate,
        filter_len=cfg.filter_len,
        runs=1,
        events=len(traces),
        tp=tp,
        fn=fn,
        tn=tn,
        fp=fp,
    )


def _grid_points(cfg: SimConfig) -> list[tuple[int, int, int]]:
    return [
        (ti, pi, ii)
        for ti in range(len(cfg.period_ms))
        for pi in range(len(cfg.p))
        for ii in range(len(cfg.interference_rate))
    ]


def run_seed_for(cfg: SimConfig, t_index: int, p_index: int, run_index: int) -> int:
    """Seed for one run; interference rate intentionally not an input (pairing)."""
    return derive_seed(cfg.master_seed, t_index, p_index, run_index)


def _sweep_point(args: tuple[SimConfig, int, int, int]) -> MetricsRecord:
    cfg, ti, pi, ii = args
    period_ms = cfg.period_ms[ti]
    p = cfg.p[pi]
    rate = cfg.interference_rate[ii]
    roster = cfg.roster()
    active = cfg.active_ids()
    tp = fn = tn = fp = 0
    for run_index in range(cfg.runs):
        seed = run_seed_for(cfg, ti, pi, run_index)
        traces = simulate_run_traces(cfg, period_ms, p, rate, seed)
        dtp, dfn, dtn, dfp = score_traces(traces, roster, active, p, cfg.filter_len)
        tp += dtp
        fn += dfn
        tn += dtn
        fp += dfp
    return MetricsRecord(
        t_ms=period_ms,
        p=p,
        interference_rate=rate,
        filter_len=cfg.filter_len,
        runs=cfg.runs,
        events=cfg.periods_per_run(period_ms) * cfg.runs,
        tp=tp,
        fn=fn,
        tn=tn,
        fp=fp,
    )


def _compare_point(args: tuple[SimConfig, int, int, int]) -> FilterComparison:
    cfg, ti, pi, ii = args
    period_ms = cfg.period_ms[ti]
    p = cfg.p[pi]
    rate = cfg.interference_rate[ii]
    roster = cfg.roster()
    active = cfg.active_ids()
    counts = {0: [0, 0, 0, 0], cfg.filter_len: [0, 0, 0, 0]}
    for run_index in range(cfg.runs):
        seed = run_seed_for(cfg, ti, pi, run_index)
        traces = simulate_run_traces(cfg, period_ms, p, rate, seed)
        for m, bucket in counts.items():
            for i, value in enumerate(score_traces(traces, roster, active, p, m)):
                bucket[i] += value
    (tp0, fn0, tn0, fp0) = counts[0]
    (tp1, fn1, tn1, fp1) = counts[cfg.filter_len]
    return FilterComparison(
        t_ms=period_ms,
        p=p,
        interference_rate=rate,
        filter_len=cfg.filter_len,
        runs=cfg.runs,
        tp_rate_off=tp0 / (tp0 + fn0) if tp0 + fn0 else math.nan,
        tp_rate_on=tp1 / (tp1 + fn1) if tp1 + fn1 else math.nan,
        tn_rate_off=tn0 / (tn0 + fp0) if tn0 + fp0 else math.nan,
        tn_rate_on=tn1 / (tn1 + fp1) if tn1 + fp1 else math.nan,
    )


def _map_points(worker, tasks, threads: int):
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (threads * 4))))
    return [worker(task) for task in tasks]


def sweep(cfg: SimConfig, threads: int = 1) -> list[MetricsRecord]:
    """Metrics for the full (period, p, interference rate) grid.

    Point results are independent of scheduling: seeds derive from grid
    coordinates, and records come back in grid order, so any thread count
    produces identical output.
    """
    tasks = [(cfg, ti, pi, ii) for ti, pi, ii in _grid_points(cfg)]
    return _map_points(_sweep_point, tasks, threads)


def compare_filtering(cfg: SimConfig, threads: int = 1) -> list[FilterComparison]:
    """Filtered vs unfiltered rates over the grid, from the same simulated runs.

    Both scorings consume identical traces (filtering is receiver-side
    post-processing), which realizes the paired-seed comparison exactly.
    """
    if cfg.filter_len < 2:
        raise ConfigError("compare_filtering needs filter_len >= 2")
    tasks = [(cfg, ti, pi, ii) for ti, pi, ii in _grid_points(cfg)]
    return _map_points(_compare_point, tasks, threads)
