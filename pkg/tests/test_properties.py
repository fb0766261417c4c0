#!/usr/bin/env python3
"""
Property-based test suite (hypothesis)

Tests:
- Certificates on random rainbow instances: coverage, weak duality, bound
- Sparsity of fractional basic solutions
- Greedy colorful matchings against the exact optimum
- LP duality and the hypergraph cast on random instances
- Exact simplex against vertex enumeration on random small LPs
- Sherali-Adams projection, monotonicity in level and under ψ -> ψ+1
- Closed-form and explicit checkers on random sparse vectors and across ε

Usage:
    pytest tests/test_properties.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from colorlab.dualcert import (
    SupportHypergraph,
    build_certificate,
    hyperedge_values,
    low_degree_vertex,
    mu_oracle,
    verify_certificate,
)
from colorlab.generators import gen_hypercube
from colorlab.model import to_hypergraph
from colorlab.oracle import greedy_colorful_matching, max_colorful_matching, random_instance
from colorlab.ratlp import RationalLP, build_dual, build_hm, build_mc, solve, solve_by_enumeration
from colorlab.sa import MomentVector, candidate_vector, check_closed_form, check_explicit, sa_lift

seeds = st.integers(min_value=0, max_value=10 ** 6)
SLOW = [HealthCheck.too_slow]


# ==============================================================================
# CERTIFICATES
# ==============================================================================

class TestCertificateProperties:
    """Random certificates always verify"""

    @settings(max_examples=300, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds, bipartite=st.booleans())
    def test_random_certificates_verify(self, seed, bipartite):
        """Test certificates verify on random instances"""
        inst = random_instance(seed, bipartite=bipartite)
        h = to_hypergraph(inst)
        primal = solve(build_hm(h))
        cert = build_certificate(h, primal, inst.is_bipartite())
        report = verify_certificate(h, cert, primal.objective_value)
        assert report["valid"], (inst, report["failures"])
        assert cert.mu == max_colorful_matching(inst)[0]
        for step in cert.trace:
            assert not step.get("bound_exceeded") and not step.get("base_bound_exceeded"), step
            if step.get("restricted_basic") is False:
                assert step["resolved"] is True

    @settings(max_examples=100, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds)
    def test_fractional_support_has_low_degree_vertex(self, seed):
        """Test fractional supports always have a low-degree vertex"""
        h = to_hypergraph(random_instance(seed))
        values = hyperedge_values(h, solve(build_hm(h)))
        if any(v == 1 for v in values.values()):
            return
        support = tuple(he for he in h.hyperedges if values[he] > 0)
        if support:
            vertex, incident = low_degree_vertex(SupportHypergraph(support, {he: values[he] for he in support}))
            assert 1 <= len(incident) <= 2


# ==============================================================================
# MATCHINGS AND DUALITY
# ==============================================================================

class TestMatchingProperties:
    """Relations between the exact values on random instances"""

    @settings(max_examples=100, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds)
    def test_greedy_is_a_third_of_optimum(self, seed):
        """Test greedy reaches a third of the optimum"""
        inst = random_instance(seed)
        greedy, _ = greedy_colorful_matching(inst)
        optimum, _ = max_colorful_matching(inst)
        assert 3 * greedy >= optimum
        assert greedy <= optimum

    @settings(max_examples=100, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds)
    def test_cast_preserves_values(self, seed):
        """Test M_c and HM_c agree on random instances"""
        inst = random_instance(seed)
        h = to_hypergraph(inst)
        lp = solve(build_mc(inst)).objective_value
        assert solve(build_hm(h)).objective_value == lp
        assert solve(build_dual(h)).objective_value == lp
        assert mu_oracle(h) == max_colorful_matching(inst)[0] <= lp


# ==============================================================================
# EXACT LP
# ==============================================================================

@st.composite
def small_lps(draw) -> RationalLP:
    """Bounded LPs over at most three [0,1] variables with mixed row senses"""
    names = [f"x{j}" for j in range(draw(st.integers(min_value=1, max_value=3)))]
    lp = RationalLP(
        variables=names,
        objective={v: Fraction(draw(st.integers(min_value=-3, max_value=3))) for v in names},
        sense=draw(st.sampled_from(["maximize", "minimize"])),
        upper={v: Fraction(1) for v in names},
        name="random",
    )
    for i in range(draw(st.integers(min_value=0, max_value=3))):
        coeffs = {v: draw(st.integers(min_value=-2, max_value=3)) for v in names}
        rhs = Fraction(draw(st.integers(min_value=-2, max_value=4)), draw(st.integers(min_value=1, max_value=3)))
        lp.add(f"r{i}", coeffs, draw(st.sampled_from(["<=", ">="])), rhs)
    return lp


class TestSolverProperties:
    """The simplex front end against vertex enumeration"""

    @settings(max_examples=80, deadline=None, suppress_health_check=SLOW)
    @given(lp=small_lps())
    def test_solver_matches_enumeration(self, lp):
        """Test solve() finds the enumerated optimum or reports infeasibility"""
        expected = solve_by_enumeration(lp)
        solution = solve(lp)
        if expected is None:
            assert solution.status == "infeasible"
        else:
            assert solution.status == "optimal"
            assert solution.objective_value == expected
            assert all(row.holds(solution.values) for row in lp.constraints)


# ==============================================================================
# SHERALI-ADAMS
# ==============================================================================

@st.composite
def sparse_points(draw, max_level: int = 3):
    """(random instance, moment vector zero on |I| >= 2, level)"""
    inst = random_instance(draw(seeds), max_edges=6)
    n = inst.num_edges
    numerators = draw(st.lists(st.integers(min_value=0, max_value=6), min_size=n, max_size=n))
    psi = draw(st.integers(min_value=1, max_value=max_level))
    mv = MomentVector({(j,): Fraction(a, 12) for j, a in enumerate(numerators)}, level=psi)
    return inst, mv, psi


class TestLiftProperties:
    """Lifted optima and candidate checkers"""

    @settings(max_examples=30, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds)
    def test_level_one_is_between_ilp_and_lp(self, seed):
        """Test the level-1 optimum lies between ILP and LP"""
        inst = random_instance(seed, max_edges=6)
        lp = build_mc(inst)
        relaxed = solve(lp).objective_value
        lifted = solve(sa_lift(lp, 1)).objective_value
        optimum, _ = max_colorful_matching(inst)
        assert optimum <= lifted <= relaxed

    @settings(max_examples=15, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds, psi=st.sampled_from([1, 2]), data=st.data())
    def test_projection_is_feasible(self, seed, psi, data):
        """Test lifted optima under random objectives project onto points of M_c"""
        inst = random_instance(seed, max_edges=5)
        lp = build_mc(inst)
        lifted = sa_lift(lp, psi)
        n = len(lp.variables)
        weights = data.draw(st.lists(st.integers(min_value=-2, max_value=3), min_size=n, max_size=n))
        lifted.objective = {var: Fraction(w) for var, w in zip(lp.variables, weights)}
        solution = solve(lifted)
        assert solution.status == "optimal"
        point = {var: solution.values[var] for var in lp.variables}
        assert all(0 <= value <= 1 for value in point.values())
        assert all(row.holds(point) for row in lp.constraints)

    @settings(max_examples=10, deadline=None, suppress_health_check=SLOW)
    @given(seed=seeds)
    def test_lifted_values_do_not_increase(self, seed):
        """Test the level-2 optimum never exceeds the level-1 optimum"""
        lp = build_mc(random_instance(seed, max_edges=5))
        level_one = solve(sa_lift(lp, 1)).objective_value
        level_two = solve(sa_lift(lp, 2)).objective_value
        assert level_two <= level_one <= solve(lp).objective_value

    @settings(max_examples=100, deadline=None, suppress_health_check=SLOW)
    @given(point=sparse_points())
    def test_checkers_agree_on_sparse_vectors(self, point):
        """Test both checkers give the same verdict and witness row on random sparse vectors"""
        inst, mv, psi = point
        closed = check_closed_form(inst, mv, psi)
        explicit = check_explicit(inst, mv, psi)
        assert closed.status == explicit.status
        if not closed.feasible:
            assert closed.witness["row"] == explicit.witness["row"]

    @settings(max_examples=60, deadline=None, suppress_health_check=SLOW)
    @given(point=sparse_points(max_level=2))
    def test_violation_persists_one_level_up(self, point):
        """Test a vector violating level ψ also violates level ψ+1"""
        inst, mv, psi = point
        if check_closed_form(inst, mv, psi).feasible:
            return
        assert check_closed_form(inst, mv, psi + 1).status == "violated"
        assert check_explicit(inst, mv, psi + 1).status == "violated"

    @settings(max_examples=40, deadline=None)
    @given(denominator=st.integers(min_value=3, max_value=100), psi=st.sampled_from([1, 2]))
    def test_checkers_agree_across_eps(self, denominator, psi):
        """Test closed-form and explicit checks agree for several ε"""
        eps = Fraction(1, denominator)
        inst = gen_hypercube(3, eps)
        mv = candidate_vector(inst, psi, eps)
        closed = check_closed_form(inst, mv, psi)
        explicit = check_explicit(inst, mv, psi)
        assert closed.status == explicit.status
        if not closed.feasible:
            assert closed.witness["row"] == explicit.witness["row"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
