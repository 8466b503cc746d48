"""Slotted-time simulation of a packet under source vs intermediate forwarding.

A packet works through route lifecycles.  Each lifecycle l has a waiting
period of w(l) slots (w(1) = 0), a switch slot in which the packet adopts
a route of length a(l), and up to a(l) transmission slots: per slot the
link at the packet's position is up with probability p (advance one hop)
or down (the route breaks).  On a break at position j = a(l) - x(l) > 0
the next route and wait are drawn conditioned on a(l) under source
forwarding (the source discards progress and retries) or on j under
intermediate forwarding (the holding node stores the packet and requests
a partial route).  Delivery happens when position 0 is reached.

Slot accounting is parameterized by a :class:`SlotConvention` because the
time cost of break detection and of the initial switch admit several
readings; the three presets make them explicit.  The slot in which a link
is observed down is reused as the first slot of the break sequence
(detection slots, then wait slots, then the switch slot), so with the
plain presets a break with zero wait costs exactly one slot.

Coupled execution drives a source-policy and an intermediate-policy packet
with one shared link-state stream per period index (common random
numbers), matching the sample-path construction used in the dominance
argument; route-length draws use separate substreams per policy.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._seeds import keyed_seed, substreams
from .distributions import (ConditionalFamily, EmpiricalDistribution,
                            format_family, is_stochastically_monotone,
                            parse_family)

SOURCE = "source"
INTERMEDIATE = "intermediate"
POLICIES = (SOURCE, INTERMEDIATE)

DEFAULT_HORIZON = 1_000_000
DKW_LEVEL = 0.999


@dataclass(frozen=True)
class SlotConvention:
    """Accounting rule for which forwarding events consume time slots.

    count_initial_switch: whether the very first switch slot is counted.
    break_detection_cost: extra slots charged to the slot in which a link
    is observed down, beyond its role as period boundary.
    switch_cost: slots consumed per switch event.
    """

    count_initial_switch: bool
    break_detection_cost: int
    switch_cost: int

    def __post_init__(self):
        if self.break_detection_cost < 0 or self.switch_cost < 0:
            raise ValueError("slot costs must be nonnegative")
        if self.break_detection_cost + self.switch_cost < 1:
            raise ValueError("a break must consume at least one slot")

    def initial_cost(self) -> int:
        return self.switch_cost if self.count_initial_switch else 0

    def break_overhead(self, wait: int) -> int:
        """Slots from the down-observation slot through the switch slot."""
        return self.break_detection_cost + wait + self.switch_cost


TR_A = SlotConvention(count_initial_switch=True, break_detection_cost=0, switch_cost=1)
BARE = SlotConvention(count_initial_switch=False, break_detection_cost=0, switch_cost=1)
DETECT = SlotConvention(count_initial_switch=False, break_detection_cost=1, switch_cost=1)

PRESETS = {"tr-a": TR_A, "bare": BARE, "detect": DETECT}


def preset_name(conv: SlotConvention) -> str:
    for name, preset in PRESETS.items():
        if preset == conv:
            return name
    return "custom"


@dataclass(frozen=True)
class ForwardingModel:
    """Link-up probability, alternate-route family, and optional wait family."""

    p: float
    alt: ConditionalFamily
    h_max: int
    wait: Optional[ConditionalFamily] = None
    convention: SlotConvention = BARE

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError("link-up probability must lie in (0, 1]")
        if self.h_max < 1:
            raise ValueError("h_max must be positive")
        if self.alt.h_max != self.h_max:
            raise ValueError("alt family must be defined for every h in 1..h_max")
        for h, dist in self.alt.items():
            if dist.min_value() < 1 or dist.max_value() > self.h_max:
                raise ValueError(f"alt support for h={h} must lie in [1, h_max]")
        if self.wait is not None:
            if self.wait.h_max != self.h_max:
                raise ValueError("wait family must be defined for every h in 1..h_max")
            for h, dist in self.wait.items():
                if dist.min_value() < 0:
                    raise ValueError(f"wait support for h={h} must be nonnegative")

    def max_wait(self) -> int:
        if self.wait is None:
            return 0
        return max(dist.max_value() for _, dist in self.wait.items())


@dataclass(frozen=True)
class SlottedTrace:
    """One packet's life: per-lifecycle (wait, route length, hops transmitted).

    total_slots counts every wait, switch, transmission, and break-detection
    slot per the trace's convention.  Censored traces were cut at the
    horizon and are never marked delivered.
    """

    periods: tuple[tuple[int, int, int], ...]
    delivered: bool
    censored: bool
    total_slots: int
    a1: int
    policy: str
    convention: SlotConvention
    horizon: int

    def positions(self) -> np.ndarray:
        """Hop distance H(t) at the end of each slot t = 0..total_slots.

        During detection/wait/switch slots the position is the requesting
        node's hop distance; the final switch slot of a break sequence ends
        with the packet at the new route length.
        """
        conv = self.convention
        out = [self.a1]
        out.extend([self.a1] * conv.initial_cost())
        prev_cond = None
        for idx, (w, a, x) in enumerate(self.periods):
            if idx > 0:
                overhead = conv.break_overhead(w)
                out.extend([prev_cond] * (overhead - 1))
                out.append(a)
            out.extend(range(a - 1, a - x - 1, -1))
            prev_cond = a if self.policy == SOURCE else a - x
        if self.censored:
            out.extend([prev_cond] * (self.total_slots + 1 - len(out)))
        return np.asarray(out[: self.total_slots + 1], dtype=np.int64)

    def position_at(self, t: int) -> int:
        return int(self.positions()[t])


def validate_trace(trace: SlottedTrace) -> None:
    """Raise ValueError unless the trace satisfies the structural invariants."""
    periods = trace.periods
    if not periods:
        raise ValueError("trace has no periods")
    if periods[0][0] != 0:
        raise ValueError("first period must have zero wait")
    for k, (w, a, x) in enumerate(periods):
        if not (0 <= x <= a):
            raise ValueError(f"period {k}: need 0 <= x <= a, got x={x}, a={a}")
        if w < 0 or a < 1:
            raise ValueError(f"period {k}: invalid wait/route length")
        if k < len(periods) - 1 and x >= a:
            raise ValueError(f"period {k}: non-final period must end by break (x < a)")
    last_w, last_a, last_x = periods[-1]
    if trace.delivered != (not trace.censored and last_x == last_a):
        raise ValueError("delivered flag inconsistent with final period")
    conv = trace.convention
    full = (conv.initial_cost()
            + sum(w + x for w, _, x in periods)
            + (len(periods) - 1) * (conv.break_detection_cost + conv.switch_cost))
    if trace.delivered:
        if trace.total_slots != full:
            raise ValueError("total_slots does not match slot accounting")
    else:
        if not trace.censored:
            raise ValueError("undelivered trace must be censored")
        if trace.total_slots != trace.horizon:
            raise ValueError("censored trace must stop exactly at the horizon")
    pos = trace.positions()
    if pos.shape[0] != trace.total_slots + 1 or pos[0] != trace.a1:
        raise ValueError("position sequence inconsistent with total_slots")
    if trace.delivered and (pos[-1] != 0 or np.any(pos[:-1] == 0)):
        raise ValueError("delivered trace must first reach position 0 at its last slot")
    if not trace.delivered and np.any(pos == 0):
        raise ValueError("censored trace must never reach position 0")


class _LinkProcess:
    """Per-period up-run lengths, memoized so coupled packets share them."""

    def __init__(self, rng: np.random.Generator, p: float):
        self._rng = rng
        self._p = p
        self._runs: list[float] = []

    def ups_before_down(self, period: int) -> float:
        while len(self._runs) < period:
            if self._p >= 1.0:
                self._runs.append(math.inf)
            else:
                # geometric(q) counts trials to first success; the run of
                # up-slots before the first down is one less
                self._runs.append(int(self._rng.geometric(1.0 - self._p)) - 1)
        return self._runs[period - 1]


class _UniformStream:
    """Per-period uniforms, memoized so coupled packets can share them."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._draws: list[float] = []

    def at(self, period: int) -> float:
        while len(self._draws) < period:
            self._draws.append(float(self._rng.random()))
        return self._draws[period - 1]


def _independent_draw(family: ConditionalFamily, rng: np.random.Generator):
    return lambda period, cond: family.sample(rng, cond)


def _quantile_draw(family: ConditionalFamily, uniforms: _UniformStream):
    return lambda period, cond: family.entry(cond).quantile(uniforms.at(period))


def _drive(model: ForwardingModel, policy: str, a1: int, link: _LinkProcess,
           alt_draw, wait_draw, horizon: int) -> SlottedTrace:
    conv = model.convention
    periods: list[tuple[int, int, int]] = []
    slots = min(conv.initial_cost(), horizon)
    censored = slots < conv.initial_cost()
    delivered = False
    a_cur, w_cur = a1, 0
    period = 1
    while not censored:
        ups = link.ups_before_down(period)
        if a_cur <= ups:
            # link stays up long enough: delivery unless the horizon cuts in
            if slots + a_cur <= horizon:
                slots += a_cur
                periods.append((w_cur, a_cur, a_cur))
                delivered = True
            else:
                periods.append((w_cur, a_cur, horizon - slots))
                slots = horizon
                censored = True
            break
        x = int(ups)
        if slots + x > horizon:
            periods.append((w_cur, a_cur, horizon - slots))
            slots = horizon
            censored = True
            break
        slots += x
        periods.append((w_cur, a_cur, x))
        j = a_cur - x
        cond = a_cur if policy == SOURCE else j
        w_next = wait_draw(period, cond) if wait_draw is not None else 0
        a_next = alt_draw(period, cond)
        overhead = conv.break_overhead(w_next)
        if slots + overhead > horizon:
            slots = horizon
            censored = True
            break
        slots += overhead
        a_cur, w_cur = a_next, w_next
        period += 1
    if not periods:
        # horizon shorter than the initial switch: record the period as begun
        periods.append((0, a1, 0))
    return SlottedTrace(tuple(periods), delivered, censored, slots, a1, policy,
                        conv, horizon)


def _check_start(model: ForwardingModel, policy: str, a1: int, horizon: int) -> None:
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    if not (1 <= a1 <= model.h_max):
        raise ValueError(f"initial route length must lie in 1..{model.h_max}")
    if horizon < 1:
        raise ValueError("horizon must be positive")


def simulate_packet(model: ForwardingModel, policy: str, a1: int, seed,
                    horizon: int = DEFAULT_HORIZON) -> SlottedTrace:
    """Run one packet to delivery or to the horizon (censored)."""
    _check_start(model, policy, a1, horizon)
    link_rng, alt_rng, wait_rng = substreams(seed, 3)
    return _drive(model, policy, a1, _LinkProcess(link_rng, model.p),
                  _independent_draw(model.alt, alt_rng),
                  _independent_draw(model.wait, wait_rng) if model.wait is not None else None,
                  horizon)


def simulate_coupled_pair(model: ForwardingModel, a1: int, seed,
                          horizon: int = DEFAULT_HORIZON,
                          couple_routes: bool = False) -> tuple[SlottedTrace, SlottedTrace]:
    """Source and intermediate packets driven by one link-state stream.

    Period l of both packets sees the same run of up-slots, so their
    transmission counts agree on every period in which neither delivers.
    Route-length (and wait) draws use separate substreams per policy by
    default.  With ``couple_routes`` the draws of period l instead map one
    shared uniform through each policy's conditional quantile function
    (common random numbers); for stochastically monotone families this
    orders the drawn route lengths pathwise, so the intermediate packet is
    never delivered later than the source packet within a coupled run.
    """
    _check_start(model, SOURCE, a1, horizon)
    link_rng, alt_s, wait_s, alt_i, wait_i = substreams(seed, 5)
    link = _LinkProcess(link_rng, model.p)
    if couple_routes:
        alt_u, wait_u = _UniformStream(alt_s), _UniformStream(wait_s)
        draw_alt_s = draw_alt_i = _quantile_draw(model.alt, alt_u)
        draw_wait_s = draw_wait_i = (_quantile_draw(model.wait, wait_u)
                                     if model.wait is not None else None)
    else:
        draw_alt_s = _independent_draw(model.alt, alt_s)
        draw_alt_i = _independent_draw(model.alt, alt_i)
        draw_wait_s = _independent_draw(model.wait, wait_s) if model.wait is not None else None
        draw_wait_i = _independent_draw(model.wait, wait_i) if model.wait is not None else None
    trace_s = _drive(model, SOURCE, a1, link, draw_alt_s, draw_wait_s, horizon)
    trace_i = _drive(model, INTERMEDIATE, a1, link, draw_alt_i, draw_wait_i, horizon)
    return trace_s, trace_i


@dataclass(frozen=True)
class DeliverySample:
    """Empirical delivery times with the number of horizon-censored runs."""

    times: Optional[EmpiricalDistribution]
    censored: int
    runs: int

    def delivered(self) -> int:
        return self.runs - self.censored


def _delivery_batch(args) -> tuple[list[int], int]:
    model, policy, a1, master, horizon, lo, hi = args
    times, censored = [], 0
    for i in range(lo, hi):
        trace = simulate_packet(model, policy, a1, keyed_seed(master, i), horizon)
        if trace.delivered:
            times.append(trace.total_slots)
        else:
            censored += 1
    return times, censored


def _batch_ranges(runs: int, threads: int) -> list[tuple[int, int]]:
    if threads <= 1:
        return [(0, runs)]
    step = max(1, math.ceil(runs / (threads * 4)))
    return [(lo, min(lo + step, runs)) for lo in range(0, runs, step)]


def empirical_delivery_cdf(model: ForwardingModel, policy: str, a1: int, runs: int,
                           seed: int, horizon: int = DEFAULT_HORIZON,
                           threads: int = 1) -> DeliverySample:
    """Delivery-time sample over independent runs; run i is seeded by (seed, i)."""
    if runs < 1:
        raise ValueError("need at least one run")
    _check_start(model, policy, a1, horizon)
    args = [(model, policy, a1, seed, horizon, lo, hi)
            for lo, hi in _batch_ranges(runs, threads)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_delivery_batch, args))
    else:
        parts = [_delivery_batch(a) for a in args]
    times: list[int] = []
    censored = 0
    for t, c in parts:
        times.extend(t)
        censored += c
    emp = EmpiricalDistribution.from_samples(times) if times else None
    return DeliverySample(emp, censored, runs)


def dkw_epsilon(n: int, level: float = DKW_LEVEL) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at the given confidence."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / (1.0 - level)) / (2.0 * n))


@dataclass(frozen=True)
class EmpiricalDominanceReport:
    """Empirical check that source delivery time dominates intermediate.

    max_violation is max_t(F_source(t) - F_intermediate(t)) over delivered
    runs; under the dominance theorems it stays within the sampling band
    whenever the model's families are stochastically monotone.  When the
    monotonicity premise fails the report is informational only.
    """

    max_violation: float
    band: float
    runs: int
    censored_source: int
    censored_intermediate: int
    alt_monotone: bool
    wait_monotone: Optional[bool]

    @property
    def premise_holds(self) -> bool:
        return self.alt_monotone and (self.wait_monotone is not False)

    @property
    def passed(self) -> Optional[bool]:
        if not self.premise_holds:
            return None
        return self.max_violation <= self.band


def _coupled_batch(args) -> tuple[list[int], list[int], int, int]:
    model, a1, master, horizon, lo, hi = args
    ts, ti = [], []
    cs = ci = 0
    for i in range(lo, hi):
        trace_s, trace_i = simulate_coupled_pair(model, a1, keyed_seed(master, i), horizon)
        if trace_s.delivered:
            ts.append(trace_s.total_slots)
        else:
            cs += 1
        if trace_i.delivered:
            ti.append(trace_i.total_slots)
        else:
            ci += 1
    return ts, ti, cs, ci


def coupled_delivery_times(model: ForwardingModel, a1: int, runs: int, seed: int,
                           horizon: int = DEFAULT_HORIZON,
                           threads: int = 1) -> tuple[DeliverySample, DeliverySample]:
    """Delivery samples for both policies from coupled (common-link) runs."""
    if runs < 1:
        raise ValueError("need at least one run")
    _check_start(model, SOURCE, a1, horizon)
    args = [(model, a1, seed, horizon, lo, hi) for lo, hi in _batch_ranges(runs, threads)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_coupled_batch, args))
    else:
        parts = [_coupled_batch(a) for a in args]
    ts: list[int] = []
    ti: list[int] = []
    cs = ci = 0
    for a, b, c, d in parts:
        ts.extend(a)
        ti.extend(b)
        cs += c
        ci += d
    samp_s = DeliverySample(EmpiricalDistribution.from_samples(ts) if ts else None, cs, runs)
    samp_i = DeliverySample(EmpiricalDistribution.from_samples(ti) if ti else None, ci, runs)
    return samp_s, samp_i


def verify_dominance_empirical(model: ForwardingModel, a1: int, runs: int, seed: int,
                               horizon: int = DEFAULT_HORIZON,
                               threads: int = 1) -> EmpiricalDominanceReport:
    """Compare empirical delivery-time CDFs of the two policies.

    Censored runs are excluded from the CDF comparison but reported.
    """
    samp_s, samp_i = coupled_delivery_times(model, a1, runs, seed, horizon, threads)
    if samp_s.times is None or samp_i.times is None:
        raise ValueError("no delivered runs; raise the horizon")
    grid = np.union1d(samp_s.times.values, samp_i.times.values)
    viol = samp_s.times.cdf_at(grid) - samp_i.times.cdf_at(grid)
    band = dkw_epsilon(samp_s.times.count) + dkw_epsilon(samp_i.times.count)
    alt_ok = is_stochastically_monotone(model.alt).monotone
    wait_ok = None if model.wait is None else is_stochastically_monotone(model.wait).monotone
    return EmpiricalDominanceReport(float(viol.max()), band, runs,
                                    samp_s.censored, samp_i.censored,
                                    alt_ok, wait_ok)


# ---------------------------------------------------------------------------
# run-spec files and run CSV
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunSpec:
    """Parsed experiment description driving a simulation run."""

    model: ForwardingModel
    policy: str
    a1: int
    runs: int
    seed: int
    horizon: int


def format_run_spec(spec: RunSpec) -> str:
    conv = spec.model.convention
    lines = [
        f"p {spec.model.p:.17g}",
        f"h_max {spec.model.h_max}",
        f"preset {preset_name(conv)}",
        f"policy {spec.policy}",
        f"a1 {spec.a1}",
        f"runs {spec.runs}",
        f"seed {spec.seed}",
        f"horizon {spec.horizon}",
        "alt:",
        format_family(spec.model.alt).rstrip("\n"),
    ]
    if spec.model.wait is not None:
        lines.append("wait:")
        lines.append(format_family(spec.model.wait).rstrip("\n"))
    return "\n".join(lines) + "\n"


def parse_run_spec(text: str) -> RunSpec:
    scalars: dict[str, str] = {}
    tables: dict[str, list[str]] = {"alt": [], "wait": []}
    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() in ("alt:", "wait:"):
            section = line[:-1].lower()
            continue
        if section is not None:
            tables[section].append(line)
        else:
            key, _, value = line.partition(" ")
            scalars[key.strip().lower()] = value.strip()
    if not tables["alt"]:
        raise ValueError("run spec needs an alt: family table")
    missing = [k for k in ("p", "h_max", "policy", "a1", "runs", "seed", "horizon")
               if k not in scalars]
    if missing:
        raise ValueError(f"run spec missing keys: {', '.join(missing)}")
    preset = scalars.get("preset", "bare").lower()
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    alt = parse_family("\n".join(tables["alt"]))
    wait = parse_family("\n".join(tables["wait"])) if tables["wait"] else None
    model = ForwardingModel(p=float(scalars["p"]), alt=alt, h_max=int(scalars["h_max"]),
                            wait=wait, convention=PRESETS[preset])
    policy = scalars["policy"].lower()
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    return RunSpec(model, policy, int(scalars["a1"]), int(scalars["runs"]),
                   int(scalars["seed"]), int(scalars["horizon"]))


def load_run_spec(path) -> RunSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_run_spec(fh.read())


def runs_to_csv(traces_by_policy: dict[str, list[SlottedTrace]],
                seed: Optional[int] = None) -> str:
    """CSV rows "run,policy,delivered,T,periods" for completed simulations."""
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("run,policy,delivered,T,periods")
    for policy in sorted(traces_by_policy):
        for i, trace in enumerate(traces_by_policy[policy]):
            t = trace.total_slots if trace.delivered else ""
            lines.append(f"{i},{policy},{int(trace.delivered)},{t},{len(trace.periods)}")
    return "\n".join(lines) + "\n"
