import math

import numpy as np
import pytest

from partialnet.distributions import DiscreteDistribution
from partialnet.hopdistance import (MIN_CELL_SAMPLES, HopDistanceStudy,
                                    bayes_flip, check_family_monotone_ci,
                                    default_bin_edges, distance_density_disk,
                                    estimate_hop_given_distance,
                                    experimental_alternate_family,
                                    nodes_for_density, study_to_csv,
                                    verify_conjecture)


def small_study(**kw):
    args = dict(r0=2.0, density=1.25, disk_radius=5.0, trials=20,
                pairs_per_trial=80, seed=4)
    args.update(kw)
    return estimate_hop_given_distance(**args)


class TestEstimate:
    def test_node_count_rule(self):
        assert nodes_for_density(1.25, 10.0) == round(1.25 * math.pi * 100)

    def test_pairs_within_range_are_one_hop(self):
        study = small_study()
        edges = study.bin_edges
        for b in range(study.nbins):
            if edges[b + 1] <= study.r0 and study.bin_totals()[b] > 0:
                # within transmission range the direct link always exists
                assert study.counts[b, 1] == study.bin_totals()[b]

    def test_hops_respect_geometric_lower_bound(self):
        study = small_study()
        for b in range(study.nbins):
            lower = math.ceil(study.bin_edges[b] / study.r0 - 1e-9)
            recorded = np.nonzero(study.counts[b] > 0)[0]
            if recorded.size:
                assert recorded.min() >= max(lower, 1)

    def test_determinism(self):
        a = small_study()
        b = small_study()
        assert np.array_equal(a.counts, b.counts)

    def test_parallel_matches_serial(self):
        a = small_study(trials=8, threads=1)
        b = small_study(trials=8, threads=2)
        assert np.array_equal(a.counts, b.counts)

    def test_conditionals_normalized(self):
        study = small_study()
        for dist in study.hop_given_distance().values():
            assert dist.probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_low_confidence_flags(self):
        study = small_study(trials=2, pairs_per_trial=10)
        bins = study.low_confidence_bins()
        totals = study.bin_totals()
        assert all(0 < totals[b] < MIN_CELL_SAMPLES for b in bins)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            small_study(r0=-1.0)
        with pytest.raises(ValueError):
            small_study(trials=0)


class TestDistanceDensity:
    def test_support_and_total(self):
        edges = default_bin_edges(3.0, 20)
        dist = distance_density_disk(3.0, edges, samples=200_000, seed=1)
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert dist.min_value() >= 0 and dist.max_value() < 20

    def test_mode_location(self):
        # high-sample Monte Carlo: density near 0.85 R exceeds the extremes
        R = 4.0
        edges = default_bin_edges(R, 40)
        dist = distance_density_disk(R, edges, samples=2_000_000, seed=2)
        centers = (edges[:-1] + edges[1:]) / 2
        peak_bin = int(np.argmin(np.abs(centers - 0.85 * R)))
        assert dist.prob_of(peak_bin) > dist.prob_of(0)
        assert dist.prob_of(peak_bin) > dist.prob_of(39)

    def test_cdf_reaches_one_at_diameter(self):
        edges = default_bin_edges(2.0, 10)
        dist = distance_density_disk(2.0, edges, samples=50_000, seed=3)
        assert dist.cdf(9) == pytest.approx(1.0, abs=1e-12)


class TestBayesFlip:
    def test_flat_likelihood_returns_prior(self):
        # two bins, hop count independent of bin: flip must reproduce f_D
        counts = np.array([[0, 50, 50], [0, 50, 50]])
        study = HopDistanceStudy(1.0, 1.0, 1.0, np.array([0.0, 1.0, 2.0]),
                                 counts, 1, 200, 0)
        f_d = DiscreteDistribution.from_pairs([(0, 0.3), (1, 0.7)])
        flipped = bayes_flip(study, f_d)
        for h in (1, 2):
            assert flipped[h].values.tolist() == [0, 1]
            assert flipped[h].probs == pytest.approx([0.3, 0.7], abs=1e-12)

    def test_one_hop_mass_within_range(self):
        study = small_study(trials=40)
        f_d = distance_density_disk(study.disk_radius, study.bin_edges,
                                    samples=500_000, seed=9)
        flipped = bayes_flip(study, f_d)
        one_hop = flipped[1]
        # nearly all 1-hop pairs sit within (1 + slack) of the range
        limit = study.r0 * 1.05
        mass_inside = sum(p for b, p in one_hop.items()
                          if study.bin_edges[b] < limit)
        assert mass_inside > 0.999

    def test_empty_hop_omitted_with_warning(self):
        counts = np.array([[0, 10, 0], [0, 0, 7]])
        study = HopDistanceStudy(1.0, 1.0, 1.0, np.array([0.0, 1.0, 2.0]),
                                 counts, 1, 17, 0)
        f_d = DiscreteDistribution.from_pairs([(0, 1.0)])  # no mass in bin 1
        with pytest.warns(UserWarning, match="omitted"):
            flipped = bayes_flip(study, f_d)
        assert 2 not in flipped
        assert 1 in flipped


class TestMonotoneCheck:
    def test_degenerate_single_condition(self):
        passed, worst, witness = check_family_monotone_ci(
            {0: np.array([0.5, 1.0])}, {0: 100.0})
        assert passed and witness is None

    def test_adversarial_shuffle_fails_with_witness(self):
        study = small_study(trials=40)
        totals = study.bin_totals()
        good = {b: np.cumsum(study.counts[b] / totals[b])
                for b in range(study.nbins) if totals[b] >= MIN_CELL_SAMPLES}
        counts = {b: float(totals[b]) for b in good}
        keys = sorted(good)
        # swap the CDFs of the nearest and farthest well-sampled bins
        shuffled = dict(good)
        shuffled[keys[0]], shuffled[keys[-1]] = good[keys[-1]], good[keys[0]]
        passed, worst, witness = check_family_monotone_ci(shuffled, counts)
        assert not passed
        assert witness is not None and worst > 0

    def test_verify_conjecture_small_scale(self):
        study = small_study(trials=60, pairs_per_trial=150)
        f_d = distance_density_disk(study.disk_radius, study.bin_edges,
                                    samples=1_000_000, seed=10)
        report = verify_conjecture(study, f_d)
        assert report.hop_given_distance.passed
        assert report.distance_given_hop.passed
        assert report.min_cell == MIN_CELL_SAMPLES
        d = report.to_dict()
        assert d["passed"] is True

    def test_verify_requires_distance_family(self):
        study = small_study(trials=5, pairs_per_trial=20)
        with pytest.raises(ValueError, match="f_d"):
            verify_conjecture(study)


class TestCsvAndHooks:
    def test_csv_shape(self):
        study = small_study(trials=5, pairs_per_trial=30)
        lines = study_to_csv(study, seed=4).strip().splitlines()
        assert lines[0] == "# seed=4"
        assert lines[1] == "d_bin_low,d_bin_high,h,count,prob"
        total = sum(int(ln.split(",")[3]) for ln in lines[2:])
        assert total == study.counts.sum()

    def test_experimental_alternate_family_smoke(self):
        study = experimental_alternate_family(2.0, 1.0, 4.0, trials=3,
                                              pairs_per_trial=10, seed=6)
        assert study.counts.sum() > 0
        # alternates observe the same geometric lower bound
        for b in range(study.nbins):
            lower = math.ceil(study.bin_edges[b] / study.r0 - 1e-9)
            recorded = np.nonzero(study.counts[b] > 0)[0]
            if recorded.size:
                assert recorded.min() >= max(lower, 1)
