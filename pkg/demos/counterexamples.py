"""Why correlation and monotone means are not enough.

Intermediate forwarding (resume from the break point) beats source
forwarding (restart from the source) whenever the mean delivery time T_h
grows with the start distance h.  Two small models show that plausible
conditions on the alternate-route length fail to guarantee this.

Model A: alternate lengths 1, 4, 1, 4 for conditions 1..4.  Alternate and
primary length are positively correlated (rho = 1/sqrt(5)), yet T_3 < T_2
for every link-up probability below (sqrt(5)-1)/2.

Model B: alternate lengths 1, 2 deterministic, and 3-with-probability-
alpha else 1 at condition 3.  The expected alternate length is strictly
increasing for alpha > 1/2, yet a packet at distance 3 can cut through to
distance 1 after a break, so T_3 < T_2 for small p.

Both facts come out of the exact slot-level absorbing chains; the printed
closed forms (from a different slot-accounting convention) agree on where
the inversion happens qualitatively, but their absolute values use a
different convention, so the two are reported side by side rather than
equated.
"""

from partialnet.distributions import correlation, is_stochastically_monotone
from partialnet.forwarding import INTERMEDIATE, PRESETS
from partialnet.markov import (CounterexampleSpec, build_chain,
                               correlation_counterexample_delta,
                               correlation_counterexample_joint,
                               correlation_counterexample_threshold,
                               counterexample_model,
                               expectation_counterexample_delta,
                               expectation_counterexample_threshold,
                               mean_absorption_times)

print("=== Model A: positive correlation is not enough ===")
joint = correlation_counterexample_joint()
print(f"correlation of (start length, alternate length): {correlation(joint):.6f}")
fam = counterexample_model(CounterexampleSpec('correlation', 0.3)).alt
report = is_stochastically_monotone(fam)
print(f"stochastically monotone: {report.monotone} (witness {report.witness})")
thr = correlation_counterexample_threshold()
print(f"closed form positive on (0, {thr:.6f}): "
      f"delta(0.3) = {correlation_counterexample_delta(0.3):+.3f}, "
      f"delta(0.9) = {correlation_counterexample_delta(0.9):+.3f}")
print("exact chain mean times (bare preset, intermediate forwarding):")
for p in (0.2, 0.4, 0.6):
    chain = build_chain(counterexample_model(CounterexampleSpec('correlation', p),
                                             PRESETS['bare']), INTERMEDIATE)
    times = mean_absorption_times(chain)
    mark = "   <-- T_3 < T_2" if times[3] < times[2] else ""
    print(f"  p={p}: " + ", ".join(f"T_{h}={times[h]:.2f}" for h in sorted(times)) + mark)

print("\n=== Model B: monotone expected length is not enough ===")
alpha = 5 / 8
fam = counterexample_model(CounterexampleSpec('expectation', 0.3, alpha)).alt
print(f"alpha = {alpha}: E[A|h] = "
      + ", ".join(f"{fam.entry(h).mean():.3g}" for h in (1, 2, 3)))
report = is_stochastically_monotone(fam)
print(f"stochastically monotone: {report.monotone} (witness {report.witness})")
thr = expectation_counterexample_threshold(alpha)
print(f"closed form positive on (0, {thr:.6f}): "
      f"delta(1/3) = {expectation_counterexample_delta(1/3, alpha):+.4f}")
print("exact chain mean times per preset at p = 1/3:")
for name in sorted(PRESETS):
    chain = build_chain(counterexample_model(
        CounterexampleSpec('expectation', 1 / 3, alpha), PRESETS[name]), INTERMEDIATE)
    times = mean_absorption_times(chain)
    print(f"  {name:>7}: " + ", ".join(f"T_{h}={times[h]:.4g}" for h in sorted(times)))
print("and at p = 0.15 (inside the inversion window):")
for name in sorted(PRESETS):
    chain = build_chain(counterexample_model(
        CounterexampleSpec('expectation', 0.15, alpha), PRESETS[name]), INTERMEDIATE)
    times = mean_absorption_times(chain)
    mark = "   <-- T_3 < T_2" if times[3] < times[2] else ""
    print(f"  {name:>7}: " + ", ".join(f"T_{h}={times[h]:.4g}" for h in sorted(times)) + mark)
