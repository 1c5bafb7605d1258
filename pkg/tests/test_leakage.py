import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import EXAMPLE1_EPS, EXAMPLE1_MATRIX, EXAMPLE1_PRIOR, MANY, UNIFORM4_MATRIX, prior_and_mechanism, priors
from pmlopt.core import Mechanism, identity_mechanism, make_prior, output_distribution
from pmlopt.errors import NegativeEpsilon, ZeroProbabilityOutcome
from pmlopt.leakage import (epsilon_m, max_zeros_per_column, pml_of_outcome, pml_per_outcome, region_of,
                            region_table, satisfies, zeros_per_column)

EX1 = Mechanism(EXAMPLE1_MATRIX)
EX1_PRIOR = make_prior(EXAMPLE1_PRIOR)
UNI4 = make_prior([0.25] * 4)


def _column_pml(v, pi):
    # direct evaluation: log max_i v_i / (pi . v)
    return math.log(max(v) / float(np.dot(pi, v)))


class TestPmlOfOutcome:
    @pytest.mark.parametrize("j", range(4))
    def test_example_columns(self, j):
        assert pml_of_outcome(EX1, EX1_PRIOR, j) == pytest.approx(math.log(9 / 8), abs=1e-12)

    def test_constant_column(self):
        m = Mechanism(np.tile([0.3, 0.7], (3, 1)))
        assert pml_of_outcome(m, make_prior([0.2, 0.3, 0.5]), 1) == 0.0

    def test_identity_uniform(self):
        for j in range(4):
            assert pml_of_outcome(identity_mechanism(4), UNI4, j) == pytest.approx(math.log(4))

    def test_zero_probability_outcome(self):
        m = Mechanism(np.array([[1.0, 0.0], [1.0, 0.0]]))
        with pytest.raises(ZeroProbabilityOutcome):
            pml_of_outcome(m, make_prior([0.5, 0.5]), 1)
        assert math.isnan(pml_per_outcome(m, make_prior([0.5, 0.5]))[1])
        assert epsilon_m(m, make_prior([0.5, 0.5])) == 0.0

    @given(prior_and_mechanism(), st.floats(1e-3, 1e3))
    @settings(max_examples=MANY)
    def test_scaling_invariance(self, pm, c):
        p, m = pm
        for j in range(m.n_outputs):
            v = m.matrix[:, j]
            if v.max() < 1e-300:
                # the direct oracle underflows on subnormal columns
                continue
            assert _column_pml(c * v, p.probs) == pytest.approx(_column_pml(v, p.probs), abs=1e-10)
            assert pml_of_outcome(m, p, j) == pytest.approx(max(0.0, _column_pml(v, p.probs)), abs=1e-10)


class TestEpsilonM:
    def test_example1(self):
        assert epsilon_m(EX1, EX1_PRIOR) == pytest.approx(EXAMPLE1_EPS, abs=1e-12)

    def test_uniform_example(self):
        # P_Y uniform by double stochasticity, max entry 0.75
        assert epsilon_m(Mechanism(UNIFORM4_MATRIX), UNI4) == pytest.approx(math.log(3), abs=1e-12)

    @given(prior_and_mechanism())
    @settings(max_examples=MANY)
    def test_bounds(self, pm):
        p, m = pm
        per = pml_per_outcome(m, p)
        assert np.nanmin(per) >= -1e-12
        assert epsilon_m(m, p) <= p.eps_max + 1e-12


class TestSatisfies:
    def test_example(self):
        assert satisfies(EX1, EX1_PRIOR, math.log(9 / 8))
        assert not satisfies(EX1, EX1_PRIOR, 0.1 * math.log(9 / 8))

    def test_identity_at_eps_max(self):
        p = make_prior([0.5, 0.3, 0.2])
        assert satisfies(identity_mechanism(3), p, p.eps_max)
        assert not satisfies(identity_mechanism(3), p, p.eps_max - 1e-6)

    def test_negative_eps(self):
        with pytest.raises(NegativeEpsilon):
            satisfies(EX1, EX1_PRIOR, -0.1)


class TestRegions:
    def test_uniform4_table(self):
        t = region_table(UNI4)
        np.testing.assert_allclose(t.boundaries, [math.log(4 / 3), math.log(2), math.log(4)], atol=1e-15)
        assert t.eps_max == pytest.approx(math.log(4))

    def test_example_region(self):
        assert region_of(UNI4, math.log(3)) == 3
        assert max_zeros_per_column(UNI4, math.log(3)) == 2

    def test_half_open_boundary(self):
        assert max_zeros_per_column(UNI4, math.log(2)) == 2
        assert region_of(UNI4, math.log(2) - 1e-9) == 2
        # within snapping distance counts as the boundary itself
        assert region_of(UNI4, math.log(2) - 1e-13) == 3

    def test_zero_is_region_one(self):
        assert region_of(make_prior([0.7, 0.2, 0.1]), 0.0) == 1
        assert max_zeros_per_column(make_prior([0.7, 0.2, 0.1]), 0.0) == 0

    def test_last_boundary_is_top_symbol(self):
        p = make_prior([0.2, 0.5, 0.3])
        t = region_table(p)
        assert t.boundaries[-1] == pytest.approx(-math.log(0.5))
        # beyond eps_{N-1} a column may hold N-1 zeros
        assert region_of(p, 1.0) == 3
        assert t.upper(3) == p.eps_max and t.lower(3) == t.boundaries[-1]

    @given(priors())
    @settings(max_examples=MANY)
    def test_monotone_boundaries(self, p):
        t = region_table(p)
        b = np.array((0.0,) + t.boundaries + (t.eps_max,))
        assert np.all(np.diff(b) >= -1e-15)
        assert b[-2] == pytest.approx(-math.log(p.sorted_probs[0]))


class TestPlantedZeros:
    @given(priors(max_n=5), st.data())
    @settings(max_examples=MANY)
    def test_zeros_force_leakage(self, p, data):
        # a positive-mass column with exactly z zeros leaks at least eps_z
        n = p.n
        z = data.draw(st.integers(1, n - 1))
        m = data.draw(st.integers(1, 4))
        rows = np.asarray(data.draw(st.lists(st.lists(st.floats(0.01, 1.0), min_size=m + 1, max_size=m + 1),
                                             min_size=n, max_size=n)))
        zero_rows = data.draw(st.permutations(range(n)))[:z]
        rows[list(zero_rows), 0] = 0.0
        mech = Mechanism(rows / rows.sum(axis=1, keepdims=True))
        assert zeros_per_column(mech)[0] == z
        assume(output_distribution(mech, p).probs[0] > 0)
        t = region_table(p)
        assert pml_of_outcome(mech, p, 0) >= t.boundaries[z - 1] - 1e-9
