"""Stochastic monotonicity makes intermediate forwarding provably better.

When the alternate-route family is stochastically monotone in the
requesting node's distance (closer nodes get stochastically shorter
routes), the delivery time under source forwarding first-order dominates
the one under intermediate forwarding: F_source(t) <= F_intermediate(t)
for every t.  This demo verifies the claim three ways on one model:

1. exactly, from the absorbing chains of both policies,
2. empirically, from coupled simulations sharing link-state draws,
3. per sample path, with route draws additionally quantile-coupled.

The model: A|h uniform on {h-1, h}, six positions, plus a waiting time of
h-1 slots per break conditioned the same way.
"""

import numpy as np

from partialnet.distributions import ConditionalFamily, DiscreteDistribution
from partialnet.forwarding import (BARE, ForwardingModel, INTERMEDIATE, SOURCE,
                                   simulate_coupled_pair,
                                   verify_dominance_empirical)
from partialnet.markov import absorption_time_cdf, build_chain, mean_absorption_times

H_MAX = 6
P = 0.5
SEED = 7

alt = ConditionalFamily({h: DiscreteDistribution.uniform(range(max(1, h - 1), h + 1))
                         for h in range(1, H_MAX + 1)})
wait = ConditionalFamily({h: DiscreteDistribution.point_mass(h - 1)
                          for h in range(1, H_MAX + 1)})
model = ForwardingModel(p=P, alt=alt, h_max=H_MAX, wait=wait, convention=BARE)

print("1) exact dominance from the chains")
chain_s = build_chain(model, SOURCE)
chain_i = build_chain(model, INTERMEDIATE)
ts = mean_absorption_times(chain_s)
ti = mean_absorption_times(chain_i)
print("   mean delivery times from h = 1..6:")
print("   source      :", ", ".join(f"{ts[h]:6.2f}" for h in sorted(ts)))
print("   intermediate:", ", ".join(f"{ti[h]:6.2f}" for h in sorted(ti)))
cs = absorption_time_cdf(chain_s, H_MAX, 2000)
ci = absorption_time_cdf(chain_i, H_MAX, 2000)
worst = float(np.max(cs.cdf - ci.cdf))
print(f"   max_t [F_source(t) - F_intermediate(t)] = {worst:.2e}  (<= 0 up to rounding)")

print("\n2) empirical dominance from coupled runs")
report = verify_dominance_empirical(model, H_MAX, runs=20_000, seed=SEED)
print(f"   max empirical violation {report.max_violation:+.4f} "
      f"vs sampling band {report.band:.4f} -> "
      f"{'consistent with dominance' if report.passed else 'violated'}")

print("\n3) pathwise ordering under full coupling")
later = both = 0
for i in range(5000):
    tr_s, tr_i = simulate_coupled_pair(model, H_MAX, seed=(SEED, i),
                                       horizon=100_000, couple_routes=True)
    if tr_s.delivered and tr_i.delivered:
        both += 1
        later += tr_i.total_slots > tr_s.total_slots
print(f"   intermediate later than source in {later} of {both} coupled runs")
print("   (with quantile-coupled route draws the ordering holds pathwise)")
