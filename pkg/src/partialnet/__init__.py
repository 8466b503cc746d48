"""Simulation and exact analysis of forwarding over partially-connected networks.

Subpackages by concern:

- :mod:`partialnet.distributions` -- finite discrete distributions and
  stochastic-order primitives (dominance, monotonicity, correlation).
- :mod:`partialnet.geometry` -- random geometric graphs on torus, disk,
  and rectangle regions.
- :mod:`partialnet.connectivity` -- Monte Carlo connectivity/reachability
  phase sweeps and regime classification.
- :mod:`partialnet.forwarding` -- slotted-time packet simulation under
  source vs intermediate forwarding, including coupled sample paths.
- :mod:`partialnet.markov` -- exact delivery-time analysis via absorbing
  chains, plus the counterexample models and closed forms.
- :mod:`partialnet.hopdistance` -- hop count vs Euclidean distance studies
  on a disk and the monotonicity conjecture check.
"""

from .distributions import (ConditionalFamily, DiscreteDistribution,
                            EmpiricalDistribution, JointDistribution,
                            MonotonicityReport, TransitivityReport,
                            check_transitivity_instance, correlation,
                            dominates, is_stochastically_monotone)
from .forwarding import (BARE, DETECT, INTERMEDIATE, PRESETS, SOURCE, TR_A,
                         ForwardingModel, SlotConvention, SlottedTrace,
                         empirical_delivery_cdf, simulate_coupled_pair,
                         simulate_packet, verify_dominance_empirical)
from .geometry import (NetworkSnapshot, Region, area_for_degree,
                       connected_components, sample_topology,
                       shortest_path_hops)
from .connectivity import (classify_regime, connectivity_probability,
                           mean_shortest_path, phase_sweep, reachability)
from .markov import (AbsorbingChain, CounterexampleSpec, absorption_time_cdf,
                     build_chain, correlation_counterexample_delta,
                     correlation_counterexample_joint, counterexample_model,
                     expectation_counterexample_delta, mean_absorption_times,
                     position_marginal, position_marginals)
from .hopdistance import (HopDistanceStudy, bayes_flip, distance_density_disk,
                          estimate_hop_given_distance, verify_conjecture)

__version__ = "0.1.0"
