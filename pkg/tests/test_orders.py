import numpy as np
import pytest

import quantcalc as qc
from quantcalc.errors import MissingDensity, NotStochasticallyOrdered
from quantcalc.orders import Status

from conftest import class_d_catalog, scaled_sibling


def brute_force_nonincreasing(values):
    return bool(np.all(np.diff(np.asarray(values)) <= 1e-12))


class TestCheckOrder:
    def test_st_exponential_pair(self):
        assert qc.check_order(qc.exponential(2), qc.exponential(1), "st").holds

    def test_st_reversed_fails_with_witness(self):
        v = qc.check_order(qc.exponential(1), qc.exponential(2), "st")
        assert v.status is Status.FAILS
        assert v.witness is not None and 0.0 < v.witness.location < 1.0

    @pytest.mark.parametrize("rel", ["st", "hr", "rh", "lr", "star", "ps", "rps"])
    def test_exponential_pair_all_relations(self, rel):
        assert qc.check_order(qc.exponential(2), qc.exponential(1), rel).holds

    def test_rps_constant_ratio(self):
        v = qc.check_order(qc.power_scale(1, 2), qc.power_scale(3, 2), "rps")
        assert v.holds

    def test_ps_constant_ratio(self):
        assert qc.check_order(qc.power_scale(1, 2), qc.power_scale(3, 2), "ps").holds

    def test_lr_needs_densities(self):
        flat = qc.tabulated([0.1, 0.4, 0.6, 0.9], [0.0, 0.0, 0.0, 0.0])
        with pytest.raises(MissingDensity):
            qc.check_order(flat, qc.exponential(1), "lr")

    def test_hierarchy_net(self):
        # lr implies hr and rh, each implying st, across ordered catalog pairs
        pairs = [(m, scaled_sibling(m)) for m in class_d_catalog()]
        pairs.append((qc.uniform(1), qc.exponential(1)))
        pairs.append((qc.exponential(2), qc.lomax(2, 1)))
        for x, y in pairs:
            verdicts = {
                rel: qc.check_order(x, y, rel, grid_size=256)
                for rel in ("lr", "hr", "rh", "st")
            }
            if verdicts["lr"].holds:
                assert verdicts["hr"].holds, (x.name, y.name)
                assert verdicts["rh"].holds, (x.name, y.name)
            if verdicts["hr"].holds or verdicts["rh"].holds:
                assert verdicts["st"].holds, (x.name, y.name)

    def test_refinement_stability(self):
        # no holds-at-256 -> fails-at-1024 flips across the catalog checks
        pairs = [(m, scaled_sibling(m)) for m in class_d_catalog()]
        for x, y in pairs:
            for rel in ("st", "star", "hr", "rh", "ps", "rps"):
                coarse = qc.check_order(x, y, rel, grid_size=256)
                fine = qc.check_order(x, y, rel, grid_size=1024)
                if coarse.holds:
                    assert fine.status is not Status.FAILS, (x.name, y.name, rel)


class TestAgingClasses:
    def test_nbu_exponential_equality(self):
        assert qc.check_nbu(qc.exponential(1.3), grid_size=128).holds
        # boundary case: survival(Q(p)+Q(r)) equals (1-p)(1-r) identically
        m = qc.exponential(1.3)
        ps = np.linspace(0.05, 0.95, 19)
        qs = np.asarray(m.quantile(ps))
        surv = 1.0 - np.asarray(m.cdf(np.add.outer(qs, qs)))
        slack = np.abs(surv - np.multiply.outer(1 - ps, 1 - ps))
        assert np.max(slack) <= 1e-9

    def test_nbu_rayleigh(self):
        assert qc.check_nbu(qc.rayleigh(1), grid_size=128).holds

    def test_nbu_pareto_fails(self):
        v = qc.check_nbu(qc.pareto1(1, 2), grid_size=128)
        assert v.status is Status.FAILS
        # brute-force witness search confirms a genuine violation
        m = qc.pareto1(1, 2)
        ps = np.linspace(0.01, 0.99, 100)
        qs = np.asarray(m.quantile(ps))
        surv = 1.0 - np.asarray(m.cdf(np.add.outer(qs, qs)))
        assert np.max(surv - np.multiply.outer(1 - ps, 1 - ps)) > 1e-3

    def test_ifr_exponential_equality(self):
        assert qc.check_ifr(qc.exponential(1), grid_size=48).holds

    def test_ifr_geo_max_exp(self):
        assert qc.check_ifr(qc.geo_max_exp(1, 0.5), grid_size=64).holds

    def test_ifr_rayleigh(self):
        assert qc.check_ifr(qc.rayleigh(1), grid_size=48).holds

    def test_ifr_lomax_fails(self):
        v = qc.check_ifr(qc.lomax(2, 1), grid_size=64)
        assert v.status is Status.FAILS
        assert v.witness is not None

    def test_ifr_matches_hazard_monotonicity_oracle(self):
        # oracle route: hazard f/(1-F) monotone on a dense grid
        for model, expect in [
            (qc.geo_max_exp(1, 0.5), True),
            (qc.lomax(2, 1), False),
            (qc.rayleigh(1), True),
        ]:
            xs = np.asarray(model.quantile(np.linspace(0.001, 0.999, 4000)))
            hazard = np.asarray(model.pdf(xs)) / (1 - np.asarray(model.cdf(xs)))
            nondecreasing = bool(np.all(np.diff(hazard) >= -1e-10))
            assert nondecreasing == expect, model.name


class TestXTau:
    def test_frechet_holds(self):
        assert qc.check_xtau_decreasing(qc.frechet_type(1, 2)).holds

    def test_frechet_parameter_grid(self):
        for c in (0.5, 1.0, 2.0, 3.0, 5.0):
            for gamma in (0.5, 1.0, 1.5, 2.0, 3.0):
                assert qc.check_xtau_decreasing(qc.frechet_type(c, gamma)).holds

    def test_block_fails_inside_middle_piece(self):
        v = qc.check_xtau_decreasing(qc.block_piecewise())
        assert v.status is Status.FAILS
        assert 1.0 < v.witness.location < 2.0

    def test_exponential_holds_with_oracle(self):
        assert qc.check_xtau_decreasing(qc.exponential(1)).holds
        # oracle: x*tau = x/(e^x - 1) on 10^4 points is decreasing
        xs = np.linspace(1e-4, 20, 10**4)
        vals = xs / np.expm1(xs)
        assert brute_force_nonincreasing(vals)

    def test_missing_density(self):
        flat = qc.tabulated([0.1, 0.4, 0.6, 0.9], [0.0, 0.0, 0.0, 0.0])
        with pytest.raises(MissingDensity):
            qc.check_xtau_decreasing(flat)


class TestUnitOrder:
    def test_st_between_lifts(self):
        lift_uniform = qc.lorenz_lift(qc.uniform(1))
        lift_exp = qc.lorenz_lift(qc.exponential(1))
        # uniform lift cdf p^2 dominates the exp lift cdf p + (1-p)log(1-p)
        assert qc.check_unit_order(lift_uniform, lift_exp, "st", grid_size=128).holds
        v = qc.check_unit_order(lift_exp, lift_uniform, "st", grid_size=128)
        assert v.status is Status.FAILS

    def test_identical_lifts_equal(self):
        a = qc.lorenz_lift(qc.power_scale(1, 2))
        b = qc.lorenz_lift(qc.power_scale(3, 2))
        for rel in ("st", "lr", "hr", "rh"):
            assert qc.check_unit_order(a, b, rel, grid_size=128).holds


class TestImplicationSuite:
    def test_exponential_pair_clean(self):
        rep = qc.implication_suite(qc.exponential(2), qc.exponential(1))
        assert rep.clean
        assert rep.antecedents["star"].holds  # constant quantile ratio

    def test_uniform_pair_equivalences(self):
        rep = qc.implication_suite(qc.uniform(1), qc.uniform(2))
        assert rep.clean
        # identical lifts: every st comparison holds with equality
        assert all(v.holds for v in rep.st_equivalence.values())

    def test_nonproportional_ordered_pair_reports(self):
        rep = qc.implication_suite(qc.uniform(1), qc.exponential(1))
        assert rep.violations == []
        assert set(rep.antecedents) == {"star", "ps", "rps"}

    def test_unordered_pair_raises(self):
        with pytest.raises(NotStochasticallyOrdered):
            qc.implication_suite(qc.exponential(1), qc.rayleigh(0.25))
