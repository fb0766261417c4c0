#!/usr/bin/env python3
"""
Dual certificate test suite

Tests:
- Bounds, support hypergraphs and low-degree vertices
- BC_H recognition and the μ / q oracles
- Certificates on the base cases and the gap families
- Restricted-solution and base-optimum records in the trace
- Independent verification, including tampered certificates

Usage:
    pytest tests/test_dualcert.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from colorlab.dualcert import (
    CertificateBuilder,
    DualCertificate,
    SupportHypergraph,
    build_certificate,
    delta,
    is_bc,
    low_degree_vertex,
    mu_oracle,
    q_oracle,
    support_of,
    theorem_bound,
    verify_certificate,
)
from colorlab.generators import gen_c4_chain, gen_cyclic_latin, gen_cyclic_square, gen_exemplar, gen_rainbow_c4
from colorlab.model import ColoredInstance, Edge, to_hypergraph
from colorlab.ratlp import BasicSolution, build_hm, solve
from colorlab.validators import CertificateError

HALF = Fraction(1, 2)


def certify(inst, bipartite=False):
    """Cast, solve HM_c and certify; returns (hypergraph, lp optimum, certificate)"""
    h = to_hypergraph(inst)
    solution = solve(build_hm(h))
    return h, solution.objective_value, build_certificate(h, solution, bipartite=bipartite)


# ==============================================================================
# BUILDING BLOCKS
# ==============================================================================

class TestBuildingBlocks:
    """Test bounds, supports and degree searches"""

    def test_theorem_bound(self):
        """Test the general and bipartite bounds"""
        assert theorem_bound(3, 2) == Fraction(17, 3)
        assert theorem_bound(3, 2, bipartite=True) == Fraction(11, 2)
        assert theorem_bound(1, 1) == 2

    def test_rainbow_support_is_half_integral(self):
        """Test the rainbow C4 support is all halves"""
        h = to_hypergraph(gen_rainbow_c4())
        support = support_of(h, solve(build_hm(h)))
        assert len(support.edges) == 4
        assert set(support.values.values()) == {HALF}
        assert support.fractional

    def test_low_degree_vertex_prefers_least_id(self):
        """Test ties go to the smallest vertex id"""
        h = to_hypergraph(gen_rainbow_c4())
        vertex, incident = low_degree_vertex(support_of(h, solve(build_hm(h))))
        assert vertex == "c:c0"
        assert sorted(he.edge_index for he in incident) == [0, 2]

    def test_low_degree_vertex_on_dense_support(self):
        """Test a dense support has no low-degree vertex"""
        h = to_hypergraph(gen_cyclic_latin(2))
        dense = SupportHypergraph(h.hyperedges, {he: Fraction(1, 4) for he in h.hyperedges})
        with pytest.raises(CertificateError) as excinfo:
            low_degree_vertex(dense)
        assert len(excinfo.value.details["support"]) == 16

    def test_empty_support(self):
        """Test an empty support is refused"""
        with pytest.raises(CertificateError):
            low_degree_vertex(SupportHypergraph(()))

    def test_delta_counts_neighbors(self):
        """Test neighbor counts around a color vertex"""
        h = to_hypergraph(gen_rainbow_c4())
        incident = [he for he in h.hyperedges if "c:c0" in he.vertices]
        assert delta("c:c0", incident) == {"v:v0": 1, "v:u0": 1, "v:v1": 1, "v:u1": 1}


# ==============================================================================
# ORACLES
# ==============================================================================

class TestOracles:
    """Test BC_H recognition, μ and q"""

    def test_is_bc(self):
        """Test bi-chromatic 4-cycle detection on hyperedges"""
        assert is_bc(to_hypergraph(gen_rainbow_c4()).hyperedges)
        assert not is_bc(to_hypergraph(gen_exemplar("left")).hyperedges)
        assert not is_bc(to_hypergraph(gen_rainbow_c4()).hyperedges[:3])

    def test_mu(self):
        """Test μ on the chain and the right exemplar"""
        assert mu_oracle(to_hypergraph(gen_c4_chain(2))) == 3
        assert mu_oracle(to_hypergraph(gen_exemplar("right"))) == 1

    def test_q(self):
        """Test q counts disjoint bi-chromatic cycles"""
        assert q_oracle(gen_rainbow_c4()) == 1
        assert q_oracle(gen_c4_chain(2)) == 2
        assert q_oracle(gen_exemplar("left")) == 0


# ==============================================================================
# CERTIFICATES
# ==============================================================================

class TestCertificates:
    """Test certificate construction on known instances"""

    def test_single_edge_is_peeled(self):
        """Test a single edge is certified by its color vertex"""
        inst = ColoredInstance(("a", "b"), (Edge("a", "b", "c0"),), {"c0": Fraction(1)}, name="single")
        h, lp_opt, cert = certify(inst)
        assert cert.weights == {"c:c0": 1}
        assert cert.trace[0]["case"] == "peel"
        assert verify_certificate(h, cert, lp_opt)["valid"]

    def test_rainbow_c4_meets_bound(self):
        """Test the rainbow C4 certificate meets 5μ/3 + q/3"""
        h, lp_opt, cert = certify(gen_rainbow_c4())
        assert lp_opt == 2
        assert (cert.mu, cert.q) == (1, 1)
        assert cert.value == cert.bound == 2
        assert cert.trace[0]["case"] == "base-bc"
        assert cert.weights == {"v:u0": HALF, "v:u1": HALF, "v:v0": HALF, "v:v1": HALF}

    @pytest.mark.parametrize("which,bipartite,value", [("left", True, Fraction(3, 2)), ("right", False, Fraction(5, 3))])
    def test_exemplars_are_tight(self, which, bipartite, value):
        """Test the exemplars attain the bound"""
        h, lp_opt, cert = certify(gen_exemplar(which), bipartite=bipartite)
        assert lp_opt == value
        assert cert.mu == 1 and cert.q == 0
        assert cert.value == cert.bound == value
        assert verify_certificate(h, cert, lp_opt)["valid"]

    @pytest.mark.parametrize("k", [2, 3])
    def test_chain(self, k):
        """Test chain certificates verify"""
        h, lp_opt, cert = certify(gen_c4_chain(k), bipartite=True)
        report = verify_certificate(h, cert, lp_opt)
        assert report["valid"], report["failures"]
        assert lp_opt <= cert.value <= cert.bound
        assert all("value" in step or step["case"] == "memo" for step in cert.trace)

    @pytest.mark.parametrize("inst,lp_value", [
        (gen_cyclic_square(2), Fraction(2)),
        (gen_cyclic_latin(2), Fraction(4)),
    ])
    def test_cyclic_families(self, inst, lp_value):
        """Test certificates on the cyclic K_{k,k} families meet the bipartite bound"""
        h, lp_opt, cert = certify(inst, bipartite=True)
        assert lp_opt == lp_value
        report = verify_certificate(h, cert, lp_opt)
        assert report["valid"], report["failures"]
        assert lp_opt <= cert.value <= theorem_bound(cert.mu, cert.q, bipartite=True)

    @pytest.mark.parametrize("inst", [gen_c4_chain(2), gen_c4_chain(3), gen_cyclic_latin(2)])
    def test_restricted_solutions_are_basic_or_resolved(self, inst):
        """Test every recursion step either keeps a basic restriction or re-solves its own LP"""
        _, _, cert = certify(inst, bipartite=True)
        steps = [step for step in cert.trace if step["case"] != "memo"]
        assert steps[0]["restricted_basic"] is True
        for step in steps:
            if step.get("restricted_basic") is False:
                assert step["resolved"] is True
            if "resolved" in step:
                assert step.get("restricted_basic") is not True

    def test_base_duals_checked_against_bound(self):
        """Test base sub-instance duals are recorded with their own bound"""
        h = to_hypergraph(gen_exemplar("right"))
        entry = {}
        duals = CertificateBuilder(h).base_duals([h.hyperedges, h.hyperedges[:1]], entry)
        assert [sum(d.values()) for d in duals] == [Fraction(5, 3), 1]
        assert entry["base"][0] == {"edges": 4, "mu": 1, "q": 0, "value": "5/3", "bound": "5/3"}
        assert "base_bound_exceeded" not in entry

    def test_base_duals_flag_exceeded_bound(self):
        """Test a base optimum above the bipartite bound is flagged"""
        h = to_hypergraph(gen_exemplar("right"))
        entry = {}
        CertificateBuilder(h, bipartite=True).base_duals([h.hyperedges], entry)
        assert entry["base"][0]["bound"] == "3/2"
        assert entry["base"][0]["bound_exceeded"] is True
        assert entry["base_bound_exceeded"] is True

    def test_document(self):
        """Test the certificate document"""
        _, _, cert = certify(gen_rainbow_c4())
        data = cert.to_dict()
        assert data["bound"] == "2/1"
        assert data["q_disjointness"] == "graph-and-color"
        assert data["weights"]["v:u0"] == "1/2"

    def test_needs_optimal_solution(self):
        """Test a non-optimal solution is refused"""
        h = to_hypergraph(gen_rainbow_c4())
        with pytest.raises(CertificateError):
            build_certificate(h, BasicSolution("infeasible", {}, None, ()))


# ==============================================================================
# VERIFICATION
# ==============================================================================

class TestVerification:
    """Test that the verifier catches broken certificates"""

    def test_uncovered_hyperedge(self):
        """Test a missing weight leaves a hyperedge uncovered"""
        h, lp_opt, cert = certify(gen_rainbow_c4())
        broken = dict(cert.weights)
        broken.pop("v:v0")
        tampered = DualCertificate(broken, sum(broken.values()), cert.mu, cert.q)
        report = verify_certificate(h, tampered, lp_opt)
        assert not report["valid"]
        assert "coverage" in report["failures"]
        assert "weak_duality" in report["failures"]
        assert "v:v0" in report["checks"]["coverage"]["witness"]["hyperedge"]

    def test_negative_weight(self):
        """Test negative weights are flagged"""
        h, lp_opt, cert = certify(gen_rainbow_c4())
        weights = dict(cert.weights, **{"c:c1": Fraction(-1)})
        report = verify_certificate(h, DualCertificate(weights, sum(weights.values()), 1, 1), lp_opt)
        assert "nonnegativity" in report["failures"]

    def test_over_bound(self):
        """Test weights above the bound are flagged"""
        h, lp_opt, cert = certify(gen_rainbow_c4())
        weights = {v: Fraction(1) for v in h.vertices}
        report = verify_certificate(h, DualCertificate(weights, Fraction(len(weights)), 1, 0), lp_opt)
        assert report["checks"]["coverage"]["passed"]
        assert report["failures"] == ["bound"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
