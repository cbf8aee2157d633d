import pytest
from hypothesis import given
from hypothesis import strategies as st

from aoa_lab import engine
from aoa_lab.analytic import (_AOA_DEN, _AOA_NUM, _AOAI_DEN, _AOAI_NUM,
                              _aoa_factored, _aoai_factored, _poly2,
                              aoa_seed_probs, aoai_seed_probs, averages,
                              avg_aoa, avg_aoai, avg_aoi, limiting_averages)
from aoa_lab.core import make_params
from aoa_lab.errors import DomainError

valid_prob = st.floats(min_value=0.01, max_value=1.0, allow_nan=False)

# Expected values below were frozen from exact rational evaluation of the
# closed forms (independent of the floating-point implementation under test)
# and cross-checked against long simulations.


class TestAvgAoi:
    @pytest.mark.parametrize("l1,expect", [(1.0, 1.0), (0.5, 2.0), (0.1, 10.0)])
    def test_reciprocal_rate(self, l1, expect):
        assert avg_aoi(make_params(l1, 0.5)) == pytest.approx(expect, rel=1e-15)


class TestAvgAoa:
    @pytest.mark.parametrize("l1,l2,expect", [
        (0.5, 0.5, 34 / 15),
        (0.2, 0.1, 4985 / 511),
        (0.9, 0.1, 60385690 / 6045039),
        (0.1, 0.1, 6410 / 551),
        (1.0, 0.5, 2.0),
        (0.5, 1.0, 2.0),
        (1.0, 1.0, 1.0),
    ])
    def test_frozen_values(self, l1, l2, expect):
        assert avg_aoa(make_params(l1, l2)) == pytest.approx(expect, rel=1e-12)

    def test_result_at_least_one(self):
        for l1 in (0.01, 0.3, 0.99, 1.0):
            for l2 in (0.01, 0.4, 1.0):
                assert avg_aoa(make_params(l1, l2)) >= 1.0 - 1e-12


class TestAvgAoai:
    @pytest.mark.parametrize("l1,l2,expect", [
        (0.5, 0.5, 22 / 9),
        (0.1, 0.1, 144470 / 10469),
        (0.2, 0.1, 41375 / 3577),
        (1.0, 0.5, 2.0),
        (0.5, 1.0, 2.0),
        (1.0, 1.0, 1.0),
    ])
    def test_frozen_values(self, l1, l2, expect):
        assert avg_aoai(make_params(l1, l2)) == pytest.approx(expect, rel=1e-12)


class TestTranscriptionCrossCheck:
    @given(valid_prob, valid_prob)
    def test_factored_equals_expanded(self, l1, l2):
        if l1 > 0.99 and l2 > 0.99:
            return  # ill-conditioned approach to the 0/0 double corner
        nf, df = _aoa_factored(l1, l2)
        ref = _poly2(_AOA_NUM, l1, l2) / _poly2(_AOA_DEN, l1, l2)
        assert nf / df == pytest.approx(ref, rel=1e-9)
        nf, df = _aoai_factored(l1, l2)
        ref = _poly2(_AOAI_NUM, l1, l2) / _poly2(_AOAI_DEN, l1, l2)
        assert nf / df == pytest.approx(ref, rel=1e-9)


class TestFormulaVsSimulation:
    # The closed forms and the simulator are independent routes; they must
    # land on the same numbers.
    @pytest.mark.parametrize("l1,l2", [(0.5, 0.5), (0.8, 0.2)])
    def test_agreement_at_monte_carlo_scale(self, l1, l2):
        p = make_params(l1, l2)
        s = engine.run(p, 1_000_000, seed=2024, warmup=1000)
        assert s.mean_aoa == pytest.approx(avg_aoa(p), rel=0.01)
        assert s.mean_aoai == pytest.approx(avg_aoai(p), rel=0.01)


class TestOrderingFacts:
    def test_aoai_dominates_both_on_wide_grid(self):
        grid = [k / 20 for k in range(1, 21)]
        for l1 in grid:
            for l2 in grid:
                m = averages(make_params(l1, l2))
                assert m.aoai_bar >= m.aoa_bar - 1e-12
                assert m.aoai_bar >= m.aoi_bar - 1e-12

    def test_aoi_aoa_ordering_fails_in_energy_rich_region(self):
        # Characterization of the model: with scarce data and plentiful
        # energy the battery regularizes inter-actuation gaps and the mean
        # actuation age drops below the mean information age.  Confirmed by
        # simulation at many sigma; see the 0.1/0.3 value 9.8183 < 10.
        m = averages(make_params(0.1, 0.3))
        assert m.aoa_bar < m.aoi_bar
        assert m.aoa_bar == pytest.approx(9.818302868, rel=1e-9)

    def test_aoi_aoa_ordering_holds_on_diagonal(self):
        for l in (0.1, 0.3, 0.5, 0.7, 0.9):
            m = averages(make_params(l, l))
            assert m.aoi_bar <= m.aoa_bar <= m.aoai_bar


class TestLimits:
    @pytest.mark.parametrize("l2", [0.25, 0.5, 0.9])
    def test_certain_data_edge(self, l2):
        a = avg_aoa(make_params(1.0 - 1e-6, l2))
        assert abs(a - 1.0 / l2) / (1.0 / l2) < 1e-4
        ai = avg_aoai(make_params(1.0 - 1e-6, l2))
        assert abs(ai - 1.0 / l2) / (1.0 / l2) < 1e-4

    @pytest.mark.parametrize("l1", [0.25, 0.5, 0.9])
    def test_certain_energy_edge(self, l1):
        for f in (avg_aoa, avg_aoai):
            v = f(make_params(l1, 1.0 - 1e-6))
            assert abs(v - 1.0 / l1) / (1.0 / l1) < 1e-4

    def test_edge_values_by_direct_substitution(self):
        assert avg_aoa(make_params(1.0, 0.25)) == pytest.approx(4.0, rel=1e-12)
        assert avg_aoai(make_params(0.25, 1.0)) == pytest.approx(4.0, rel=1e-12)


class TestSeedProbs:
    def test_hand_substituted_point(self):
        s = aoa_seed_probs(make_params(0.5, 0.5))
        assert s.v100 == pytest.approx(0.3, abs=1e-15)
        assert s.v101 == pytest.approx(0.1, abs=1e-15)
        t = aoai_seed_probs(make_params(0.5, 0.5))
        assert t.v110 == pytest.approx(0.25, abs=1e-15)
        assert t.v111 == pytest.approx(0.1, abs=1e-15)

    def test_second_hand_substituted_point(self):
        s = aoa_seed_probs(make_params(0.2, 0.1))
        assert s.v100 == pytest.approx(63 / 730, rel=1e-12)
        assert s.v101 == pytest.approx(1 / 365, rel=1e-12)
        t = aoai_seed_probs(make_params(0.2, 0.1))
        assert t.v110 == pytest.approx(153 / 3650, rel=1e-12)
        assert t.v111 == pytest.approx(1 / 365, rel=1e-12)

    def test_certain_data_kills_battery_full_state(self):
        assert aoa_seed_probs(make_params(1.0, 0.5)).v101 == 0.0
        assert aoai_seed_probs(make_params(1.0, 0.7)).v111 == 0.0

    def test_certain_energy_by_direct_substitution(self):
        s = aoa_seed_probs(make_params(0.4, 1.0))
        assert s.v100 == 0.0
        assert s.v101 == pytest.approx(0.4, rel=1e-12)

    def test_double_corner_limit(self):
        s = aoa_seed_probs(make_params(1.0, 1.0))
        assert (s.v100, s.v101) == (1.0, 0.0)
        t = aoai_seed_probs(make_params(1.0, 1.0))
        assert (t.v110, t.v111) == (1.0, 0.0)

    @given(valid_prob, st.floats(min_value=0.01, max_value=0.99))
    def test_both_structural_relations_hold(self, l1, l2):
        # The two independent linear relations between the level-1 masses
        # must both be satisfied by the closed forms.
        p = make_params(l1, l2)
        s = aoa_seed_probs(p)
        q1, q2 = 1 - l1, 1 - l2
        lhs1 = (l1 * l2 + q1 * l2 ** 2 + l1 ** 2 * q2) / (q1 * l2 * q2 - l2) * s.v100 + l1
        assert s.v101 == pytest.approx(lhs1, abs=1e-12)
        lhs2 = (q1 * l2 ** 2 / q2) * (1.0 / (1.0 - q1 * q2)) * s.v100
        assert s.v101 == pytest.approx(lhs2, abs=1e-12)

    @given(valid_prob, valid_prob)
    def test_masses_are_probabilities(self, l1, l2):
        p = make_params(l1, l2)
        s = aoa_seed_probs(p)
        assert 0.0 <= s.v100 <= 1.0 and 0.0 <= s.v101 <= 1.0
        assert s.v100 + s.v101 <= 1.0 + 1e-12
        t = aoai_seed_probs(p)
        assert 0.0 <= t.v110 <= 1.0 and 0.0 <= t.v111 <= 1.0
        assert t.v110 + t.v111 <= 1.0 + 1e-12

    @given(valid_prob, valid_prob)
    def test_age_one_mass_identity(self, l1, l2):
        # ai1 == v110 + v111 expressed through the battery marginal.  The
        # shared denominator cancels catastrophically near (1, 1), so the
        # bound is relative.
        t = aoai_seed_probs(make_params(l1, l2))
        assert t.v110 + t.v111 == pytest.approx(t.ai1, rel=1e-9, abs=1e-12)
        assert t.i1 == l1


class TestLimitingAverages:
    def test_certain_data(self):
        m = limiting_averages(make_params(1.0, 0.25))
        assert (m.aoi_bar, m.aoa_bar, m.aoai_bar) == (1.0, 4.0, 4.0)

    def test_certain_energy(self):
        m = limiting_averages(make_params(0.25, 1.0))
        assert (m.aoi_bar, m.aoa_bar, m.aoai_bar) == (4.0, 4.0, 4.0)

    def test_double_corner(self):
        m = limiting_averages(make_params(1.0, 1.0))
        assert (m.aoi_bar, m.aoa_bar, m.aoai_bar) == (1.0, 1.0, 1.0)

    def test_interior_rejected(self):
        with pytest.raises(DomainError):
            limiting_averages(make_params(0.5, 0.5))
