#!/usr/bin/env python3
"""
Bi-chromatic cycle test suite

Tests:
- Alternating 4-cycle enumeration (canonical form, parallel edges)
- Enhanced LP values against M_c and the ILP
- Level-2 lift implies the cycle cuts under unit bounds

Usage:
    pytest tests/test_bichrom.py -v
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from colorlab.bichrom import (
    BiChromaticCycle,
    EdgeRecord,
    enhanced_lp,
    enumerate_bc,
    find_alternating_cycles,
    sa2_implies_bc,
    zero_forcing_rows,
)
from colorlab.generators import gen_c4_chain, gen_cyclic_latin, gen_exemplar, gen_hypercube, gen_rainbow_c4
from colorlab.oracle import max_colorful_matching
from colorlab.ratlp import build_mc, solve
from colorlab.validators import InstanceError

EPS = Fraction(1, 100)


# ==============================================================================
# ENUMERATION
# ==============================================================================

class TestEnumeration:
    """Test alternating 4-cycle discovery"""

    def test_rainbow_c4_has_one_cycle(self):
        """Test the rainbow C4 is one bi-chromatic cycle"""
        cycles = enumerate_bc(gen_rainbow_c4())
        assert len(cycles) == 1
        cycle = cycles[0]
        assert cycle.vertices == ("u0", "v0", "u1", "v1")
        assert cycle.edges == (0, 1, 2, 3)
        assert cycle.colors == ("c0", "c1")
        assert cycle.label == "u0-v0-u1-v1"

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_chain_has_one_cycle_per_copy(self, k):
        """Test a chain of k copies has exactly the k copy cycles"""
        cycles = enumerate_bc(gen_c4_chain(k))
        assert len(cycles) == k
        assert {frozenset(c.colors) for c in cycles} == {frozenset((f"r{i}", f"b{i}")) for i in range(1, k + 1)}

    def test_hypercube_faces(self):
        """Test every face of Q3 is bi-chromatic"""
        assert len(enumerate_bc(gen_hypercube(3))) == 6

    def test_cyclic_latin(self):
        """Test cycle count on the even cyclic Latin family"""
        assert len(enumerate_bc(gen_cyclic_latin(2))) == 4

    def test_paths_have_none(self):
        """Test the exemplars have no 4-cycles"""
        assert enumerate_bc(gen_exemplar("left")) == []
        assert enumerate_bc(gen_exemplar("right")) == []

    def test_parallel_edges(self):
        """Test parallel edges of different colors give separate cycles"""
        records = [
            EdgeRecord("a", "b", "x", "ab"),
            EdgeRecord("b", "c", "y", "bc-y"),
            EdgeRecord("b", "c", "z", "bc-z"),
            EdgeRecord("c", "d", "x", "cd"),
            EdgeRecord("d", "a", "y", "da"),
        ]
        cycles = find_alternating_cycles(records)
        assert [c.edges for c in cycles] == [("ab", "bc-y", "cd", "da")]

    def test_cycle_pairs(self):
        """Test same-color and adjacent edge pairs of a cycle"""
        cycle = enumerate_bc(gen_rainbow_c4())[0]
        assert cycle.same_color_pairs() == [(0, 2), (1, 3)]
        assert cycle.adjacent_pairs()[0] == (0, 1, "v0")


# ==============================================================================
# ENHANCED LP
# ==============================================================================

class TestEnhancedLP:
    """Test M_c plus one cut per cycle"""

    def test_rainbow_closes_gap(self):
        """Test the bi-chromatic row brings the rainbow C4 down to 1"""
        lp = enhanced_lp(gen_rainbow_c4())
        assert "bc:u0-v0-u1-v1" in [row.id for row in lp.constraints]
        assert solve(lp).objective_value == 1

    def test_chain_closes_gap(self):
        """Test the enhanced LP reaches the chain ILP value"""
        assert solve(enhanced_lp(gen_c4_chain(2))).objective_value == 3

    def test_no_cycles_no_change(self):
        """Test the enhanced LP equals M_c without cycles"""
        assert solve(enhanced_lp(gen_exemplar("right"))).objective_value == Fraction(5, 3)

    @pytest.mark.parametrize("inst", [
        gen_rainbow_c4(),
        gen_c4_chain(2),
        gen_hypercube(3, EPS),
        gen_cyclic_latin(2),
        gen_exemplar("left"),
        gen_exemplar("right"),
    ])
    def test_cuts_only_tighten(self, inst):
        """Test the enhanced optimum stays below M_c and within 5/3 (3/2 bipartite) of the ILP"""
        enhanced = solve(enhanced_lp(inst)).objective_value
        assert enhanced <= solve(build_mc(inst)).objective_value
        ilp, _ = max_colorful_matching(inst)
        limit = Fraction(3, 2) if inst.is_bipartite() else Fraction(5, 3)
        assert enhanced / ilp <= limit + Fraction(1, 100)


# ==============================================================================
# LEVEL-2 CHECK
# ==============================================================================

class TestLevelTwo:
    """Test that level-2 lifts imply the cycle cuts"""

    def test_unit_bounds_implied(self):
        """Test unit bounds make the cycle inequality implied at level 2"""
        inst = gen_rainbow_c4()
        verdict = sa2_implies_bc(inst, enumerate_bc(inst)[0])
        assert verdict.verdict == "implied"
        assert verdict.max_value == 1
        assert all(entry["forced"] for entry in verdict.forcing)

    @pytest.mark.slow
    def test_chain_cycles_implied(self):
        """Test both copy cycles of the two-copy chain have level-2 maximum exactly 1"""
        inst = gen_c4_chain(2)
        verdicts = [sa2_implies_bc(inst, cycle) for cycle in enumerate_bc(inst)]
        assert len(verdicts) == 2
        assert [v.max_value for v in verdicts] == [1, 1]
        assert {v.verdict for v in verdicts} == {"implied"}

    def test_forcing_rows(self):
        """Test the zero-forcing rows for each same-color pair"""
        inst = gen_rainbow_c4()
        rows = zero_forcing_rows(inst, enumerate_bc(inst)[0])
        assert len(rows) == 6
        assert rows[0] == {"pair": [0, 2], "row": "color:c0", "multiplier": [0], "forced": True}

    def test_fractional_bounds_are_value_only(self):
        """Test fractional bounds only give a value verdict"""
        inst = gen_rainbow_c4()
        loose = inst.with_bounds({c: Fraction(99, 50) for c in inst.bounds})
        verdict = sa2_implies_bc(loose, enumerate_bc(loose)[0])
        assert verdict.verdict == "value-only"
        assert 1 <= verdict.max_value < Fraction(99, 50)
        assert not any(entry["forced"] for entry in verdict.forcing if entry["row"].startswith("color:"))

    def test_foreign_cycle_rejected(self):
        """Test a cycle from another instance is refused"""
        fake = BiChromaticCycle(edges=(0, 1, 2, 3), colors=("c0", "c1"), vertices=("a", "b", "c", "d"))
        with pytest.raises(InstanceError):
            sa2_implies_bc(gen_rainbow_c4(), fake)

    def test_verdict_document(self):
        """Test the verdict serializes to exact JSON"""
        inst = gen_rainbow_c4()
        data = sa2_implies_bc(inst, enumerate_bc(inst)[0]).to_dict()
        assert data["max_value"] == "1/1"
        assert data["cycle"]["vertices"] == ["u0", "v0", "u1", "v1"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
