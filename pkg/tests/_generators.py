"""Random instance generators shared by the unit and acceptance suites."""

import numpy as np

from partialnet.distributions import ConditionalFamily, DiscreteDistribution
from partialnet.forwarding import BARE, DETECT, TR_A, ForwardingModel


def random_dist(rng, max_atoms=5, lo=0, hi=12):
    k = int(rng.integers(1, max_atoms + 1))
    values = rng.choice(np.arange(lo, hi), size=k, replace=False)
    probs = rng.dirichlet(np.ones(k))
    return DiscreteDistribution.from_pairs(zip(np.sort(values).tolist(), probs.tolist()))


def push_up(rng, d, max_shift=3):
    """A distribution that dominates d: apply a pointwise map f(v) >= v."""
    shifts = rng.integers(0, max_shift + 1, size=d.values.size)
    return DiscreteDistribution.from_pairs(
        zip((d.values + shifts).tolist(), d.probs.tolist()))


def shift_family(rng, conds, span=3):
    """Conditional family monotone by construction: base shifted by condition."""
    base = random_dist(rng, max_atoms=3, lo=0, hi=span)
    return {c: DiscreteDistribution.from_pairs(
        zip((base.values + c).tolist(), base.probs.tolist())) for c in conds}


def chain_atoms(rng):
    """Random (x, y, z) joint with Z conditionally independent of X given Y,
    and both conditional stages monotone by construction."""
    x_dist = random_dist(rng, max_atoms=3, lo=1, hi=5)
    y_given_x = shift_family(rng, x_dist.values.tolist())
    y_values = sorted({v for d in y_given_x.values() for v in d.values.tolist()})
    z_given_y = shift_family(rng, y_values)
    atoms = []
    for x, px in x_dist.items():
        for y, py in y_given_x[x].items():
            for z, pz in z_given_y[y].items():
                atoms.append((x, y, z, px * py * pz))
    return atoms


def random_forwarding_model(rng, h_max_hi=5, p_lo=0.1):
    """Arbitrary small forwarding model (families need not be monotone)."""
    h_max = int(rng.integers(1, h_max_hi))
    alt = ConditionalFamily({
        h: DiscreteDistribution.uniform(
            rng.choice(np.arange(1, h_max + 1),
                       size=rng.integers(1, h_max + 1), replace=False))
        for h in range(1, h_max + 1)})
    wait = None
    if rng.random() < 0.5:
        wait = ConditionalFamily({
            h: DiscreteDistribution.uniform(
                rng.choice(np.arange(0, 4), size=2, replace=False))
            for h in range(1, h_max + 1)})
    conv = [TR_A, BARE, DETECT][int(rng.integers(3))]
    return ForwardingModel(p=float(rng.uniform(p_lo, 1.0)), alt=alt,
                           h_max=h_max, wait=wait, convention=conv)
