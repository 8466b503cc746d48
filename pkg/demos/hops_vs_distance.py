"""Does geometry deliver the monotonicity the theory needs?

The dominance results rest on one assumption: nodes farther from the
destination get stochastically longer routes.  On random geometric graphs
this is a statement about shortest-path hop counts versus Euclidean
distance, and it can be measured.

This demo samples disk topologies, tallies (distance, hop count) pairs,
estimates the hop-count law given distance and - via a Bayes inversion
against the two-point distance density of the disk - the distance law
given hop count, then checks both families for stochastic monotonicity
with a tolerance of three pooled binomial standard errors per CDF point.
Cells with fewer than 30 samples are flagged and excluded from the strict
verdict.  Runs at about half the radius of the headline study to stay
quick; the package defaults reproduce the full-size setting.
"""

import json

from partialnet.hopdistance import (bayes_flip, distance_density_disk,
                                    estimate_hop_given_distance,
                                    verify_conjecture)

R0 = 2.0
DENSITY = 1.25
RADIUS = 6.0
SEED = 1

study = estimate_hop_given_distance(r0=R0, density=DENSITY, disk_radius=RADIUS,
                                    trials=120, pairs_per_trial=400, seed=SEED)
print(f"disk radius {RADIUS}, density {DENSITY}, range {R0}: "
      f"{study.counts.sum()} connected pairs tallied")

fam = study.hop_given_distance()
print("\nmean hop count by distance (populated bins):")
edges = study.bin_edges
for b in sorted(fam)[::4]:
    print(f"  d in ({edges[b]:5.2f}, {edges[b+1]:5.2f}]: "
          f"E[hops] = {fam[b].mean():5.2f}  (n={study.bin_totals()[b]})")

f_d = distance_density_disk(RADIUS, study.bin_edges, samples=1_000_000, seed=SEED)
flipped = bayes_flip(study, f_d)
print("\nmean distance bin by hop count (Bayes inversion):")
centers = (edges[:-1] + edges[1:]) / 2
for h in sorted(flipped)[:8]:
    mean_d = sum(p * centers[b] for b, p in flipped[h].items())
    print(f"  {h} hops: E[distance] ~ {mean_d:5.2f}")

report = verify_conjecture(study, f_d)
print("\nmonotonicity verdicts:")
print(json.dumps(report.to_dict(), indent=2))
