"""Exact delivery-time analysis via slot-level absorbing Markov chains.

The chain realizes the slotted forwarding dynamics exactly, one transition
per slot, so mean times to absorption and full delivery-time CDFs come out
of linear algebra instead of simulation.  Source-policy states carry the
current route length (breaks condition on it); intermediate-policy states
only need the current position.

The module also provides the two counterexample models in which positive
correlation (respectively, monotone expected value) of the alternate-route
length fails to make delivery time monotone in the start length, along
with the printed closed forms for their mean-time differences.  The closed
forms come from a different slot-cost convention than any preset here and
are kept as an independent oracle; they are not asserted equal to the
chain results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import (ConditionalFamily, DiscreteDistribution,
                            JointDistribution)
from .forwarding import (DETECT, POLICIES, SOURCE, ForwardingModel,
                         SlotConvention)

CORRELATION = "correlation"
EXPECTATION = "expectation"


class ChainBuildError(ValueError):
    pass


@dataclass(frozen=True)
class AbsorbingChain:
    """Row-stochastic slot chain with a single absorbing destination state."""

    transition: np.ndarray
    report_position: np.ndarray
    start_index: dict[int, int]
    absorbing_index: int
    labels: tuple
    policy: str
    model: ForwardingModel

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]


def _tx_state(policy: str, a: int):
    return ("tx", a, a) if policy == SOURCE else ("tx", a)


def build_chain(model: ForwardingModel, policy: str) -> AbsorbingChain:
    """Enumerate reachable states and assemble the transition matrix.

    State kinds: ("abs",) destination; ("init", h, k) initial switch with k
    slots left; ("tx", a, j) / ("tx", j) transmitting at position j;
    ("ov", cond, a_next, k) break overhead (detection, wait, switch) with k
    slots left before transmitting resumes at a_next.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    conv = model.convention
    p = model.p

    index: dict[tuple, int] = {}
    outgoing: list[Optional[dict[int, float]]] = []

    def idx(state) -> int:
        if state not in index:
            index[state] = len(outgoing)
            outgoing.append(None)
        return index[state]

    absorbing = idx(("abs",))
    outgoing[absorbing] = {absorbing: 1.0}

    starts = {}
    work = []
    for h in range(1, model.h_max + 1):
        state = ("init", h, conv.switch_cost) if conv.count_initial_switch else _tx_state(policy, h)
        starts[h] = idx(state)
        if outgoing[starts[h]] is None and state not in work:
            work.append(state)

    wait_entries = ((lambda cond: model.wait.entry(cond)) if model.wait is not None
                    else (lambda cond: DiscreteDistribution.point_mass(0)))

    while work:
        state = work.pop()
        i = idx(state)
        if outgoing[i] is not None:
            continue
        row: dict[int, float] = {}

        def add(target, prob):
            if prob <= 0.0:
                return
            j = idx(target)
            row[j] = row.get(j, 0.0) + prob
            if outgoing[j] is None and target != state:
                work.append(target)

        kind = state[0]
        if kind == "init":
            _, h, k = state
            add(("init", h, k - 1) if k > 1 else _tx_state(policy, h), 1.0)
        elif kind == "ov":
            _, cond, a_next, k = state
            add(("ov", cond, a_next, k - 1) if k > 1 else _tx_state(policy, a_next), 1.0)
        elif kind == "tx":
            if policy == SOURCE:
                _, a, j = state
            else:
                _, j = state
                a = j
            cond = a if policy == SOURCE else j
            if j == 1:
                add(("abs",), p)
            else:
                add(("tx", a, j - 1) if policy == SOURCE else ("tx", j - 1), p)
            if p < 1.0:
                down = 1.0 - p
                for w, qw in wait_entries(cond).items():
                    overhead = conv.break_overhead(int(w))
                    for a2, ra in model.alt.entry(cond).items():
                        prob = down * qw * ra
                        if overhead == 1:
                            add(_tx_state(policy, int(a2)), prob)
                        else:
                            add(("ov", cond, int(a2), overhead - 1), prob)
        outgoing[i] = row

    n = len(outgoing)
    matrix = np.zeros((n, n))
    for i, row in enumerate(outgoing):
        for j, prob in row.items():
            matrix[i, j] = prob
    sums = matrix.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-12):
        raise ChainBuildError("transition rows must sum to 1")

    # absorbing state must be reachable from every state
    reach = {absorbing}
    changed = True
    while changed:
        changed = False
        for i, row in enumerate(outgoing):
            if i not in reach and any(j in reach for j in row):
                reach.add(i)
                changed = True
    if len(reach) != n:
        raise ChainBuildError("destination unreachable from some states")

    labels = [None] * n
    positions = np.zeros(n, dtype=np.int64)
    for state, i in index.items():
        labels[i] = state
        if state[0] == "abs":
            positions[i] = 0
        elif state[0] in ("init", "ov"):
            positions[i] = state[1]
        else:
            positions[i] = state[2] if policy == SOURCE else state[1]

    return AbsorbingChain(matrix, positions, starts, absorbing, tuple(labels),
                          policy, model)


def mean_absorption_times(chain: AbsorbingChain) -> dict[int, float]:
    """Mean slots to absorption from the canonical start of each length h.

    Solves (I - Q) t = 1 over the transient states.
    """
    n = chain.n_states
    transient = [i for i in range(n) if i != chain.absorbing_index]
    q = chain.transition[np.ix_(transient, transient)]
    t = np.linalg.solve(np.eye(len(transient)) - q, np.ones(len(transient)))
    full = np.zeros(n)
    full[transient] = t
    return {h: float(full[s]) for h, s in chain.start_index.items()}


@dataclass(frozen=True)
class DeliveryTimeCdf:
    """Exact Pr{T <= t} for t = 1..horizon plus censored tail mass."""

    cdf: np.ndarray
    tail_mass: float

    @property
    def horizon(self) -> int:
        return self.cdf.shape[0]

    def at(self, t: int) -> float:
        if t < 1:
            return 0.0
        return float(self.cdf[min(t, self.horizon) - 1])

    def pmf(self) -> np.ndarray:
        return np.diff(self.cdf, prepend=0.0)

    def to_distribution(self) -> DiscreteDistribution:
        """Delivery-slot distribution conditional on delivery by the horizon."""
        pmf = self.pmf()
        total = self.cdf[-1]
        if total <= 0.0:
            raise ValueError("no delivery mass within the horizon")
        slots = np.nonzero(pmf > 0)[0] + 1
        return DiscreteDistribution(slots, pmf[slots - 1] / total)


def absorption_time_cdf(chain: AbsorbingChain, h: int, horizon: int) -> DeliveryTimeCdf:
    """Iterate the transition operator, accumulating absorbed mass per slot."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    v = np.zeros(chain.n_states)
    v[chain.start_index[h]] = 1.0
    out = np.empty(horizon)
    for t in range(horizon):
        v = v @ chain.transition
        out[t] = v[chain.absorbing_index]
    return DeliveryTimeCdf(out, float(1.0 - out[-1]))


def position_marginal(chain: AbsorbingChain, h: int, tau: int) -> DiscreteDistribution:
    """Exact hop-distance distribution at slot tau (absorbed mass sits at 0)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    v = np.zeros(chain.n_states)
    v[chain.start_index[h]] = 1.0
    for _ in range(tau):
        v = v @ chain.transition
    return _position_distribution(chain, v)


def _position_distribution(chain: AbsorbingChain, v: np.ndarray) -> DiscreteDistribution:
    masses = np.zeros(chain.model.h_max + 1)
    np.add.at(masses, chain.report_position, v)
    total = masses.sum()
    if abs(total - 1.0) > 1e-9:
        raise ArithmeticError(f"position masses sum to {total!r}, drifted past 1e-9")
    support = np.nonzero(masses > 0)[0]
    return DiscreteDistribution(support, masses[support] / total)


def position_marginals(chain: AbsorbingChain, h: int, tau_max: int) -> list[DiscreteDistribution]:
    """Marginals for every tau = 0..tau_max in one pass over the chain."""
    v = np.zeros(chain.n_states)
    v[chain.start_index[h]] = 1.0
    out = []
    for tau in range(tau_max + 1):
        if tau > 0:
            v = v @ chain.transition
        out.append(_position_distribution(chain, v))
    return out


# ---------------------------------------------------------------------------
# counterexample models and printed closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CounterexampleSpec:
    """Which counterexample family to build and with what parameters."""

    kind: str
    p: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (CORRELATION, EXPECTATION):
            raise ValueError(f"kind must be {CORRELATION!r} or {EXPECTATION!r}")
        if not (0.0 < self.p < 1.0):
            raise ValueError("p must lie in (0, 1)")
        if self.kind == EXPECTATION:
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ValueError("expectation counterexample needs alpha in (0, 1)")


def correlation_counterexample_family() -> ConditionalFamily:
    """Deterministic alternate lengths 1, 4, 1, 4 for conditions 1..4."""
    return ConditionalFamily({
        1: DiscreteDistribution.point_mass(1),
        2: DiscreteDistribution.point_mass(4),
        3: DiscreteDistribution.point_mass(1),
        4: DiscreteDistribution.point_mass(4),
    })


def expectation_counterexample_family(alpha: float) -> ConditionalFamily:
    """Alternate lengths 1, 2 deterministic; 3 w.p. alpha else 1 at condition 3.

    The expected alternate length (1, 2, 2*alpha + 1) increases in the
    condition whenever alpha > 1/2, yet the family is not stochastically
    monotone: from condition 3 the packet can cut through to length 1.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    return ConditionalFamily({
        1: DiscreteDistribution.point_mass(1),
        2: DiscreteDistribution.point_mass(2),
        3: DiscreteDistribution.from_pairs([(1, 1.0 - alpha), (3, alpha)]),
    })


def counterexample_model(spec: CounterexampleSpec,
                         convention: SlotConvention = DETECT) -> ForwardingModel:
    """Forwarding model for a counterexample spec (no waiting times)."""
    if spec.kind == CORRELATION:
        family, h_max = correlation_counterexample_family(), 4
    else:
        family, h_max = expectation_counterexample_family(spec.alpha), 3
    return ForwardingModel(p=spec.p, alt=family, h_max=h_max, wait=None,
                           convention=convention)


def correlation_counterexample_joint() -> JointDistribution:
    """Joint of (start length, alternate length) with the start uniform on 1..4."""
    family = correlation_counterexample_family()
    atoms = []
    for h in range(1, 5):
        for a, prob in family.entry(h).items():
            atoms.append((h, int(a), 0.25 * prob))
    return JointDistribution.from_atoms(atoms)


def correlation_counterexample_delta(p: float) -> float:
    """Closed-form T_2 - T_3 for the correlated deterministic family.

    Positive exactly on (0, (sqrt(5)-1)/2): starting three hops out is then
    faster in expectation than starting two hops out.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0, 1)")
    return (1.0 + 2.0 * p) / p**2 - (2.0 * p**2 + 2.0) / (p**3 - p**2 + p)


def correlation_counterexample_threshold() -> float:
    """Sign-change point of the correlated-family closed form."""
    return (math.sqrt(5.0) - 1.0) / 2.0


def expectation_counterexample_delta(p: float, alpha: float) -> float:
    """Closed-form T_2 - T_3 for the monotone-expectation family."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0, 1)")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    return 2.0 / p - 3.0 / (1.0 - alpha + alpha * p)


def expectation_counterexample_threshold(alpha: float) -> float:
    """Sign-change point of the monotone-expectation closed form."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    return (2.0 - 2.0 * alpha) / (3.0 - 2.0 * alpha)


def mean_times_csv(times: dict[int, float], seed: Optional[int] = None) -> str:
    """CSV rows "h,T_mean" for a mean-absorption-time vector."""
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("h,T_mean")
    for h in sorted(times):
        lines.append(f"{h},{times[h]:.10g}")
    return "\n".join(lines) + "\n"


def cdf_pair_csv(cdf_source: DeliveryTimeCdf, cdf_intermediate: DeliveryTimeCdf,
                 seed: Optional[int] = None) -> str:
    """CSV rows "t,F_source,F_intermediate" up to the shorter horizon."""
    n = min(cdf_source.horizon, cdf_intermediate.horizon)
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("t,F_source,F_intermediate")
    for t in range(1, n + 1):
        lines.append(f"{t},{cdf_source.at(t):.10g},{cdf_intermediate.at(t):.10g}")
    return "\n".join(lines) + "\n"
