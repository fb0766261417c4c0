#!/usr/bin/env python3
"""
Instance family test suite

Tests:
- Hypercube family (sizes, coloring, bounds, parameter checks)
- C4 chains
- Cyclic K_{k,k} and the cyclic Latin family
- Exemplars, rainbow C4 and the dispatchers

Usage:
    pytest tests/test_generators.py -v
"""

import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import pytest

from colorlab.generators import (
    FamilyParams,
    gen_by_name,
    gen_c4_chain,
    gen_cyclic_latin,
    gen_cyclic_square,
    gen_exemplar,
    gen_family,
    gen_hypercube,
    gen_rainbow_c4,
)
from colorlab.oracle import color_matrix, cyclic_latin_square
from colorlab.validators import InstanceError, validate


# ==============================================================================
# HYPERCUBE
# ==============================================================================

class TestHypercube:
    """Test the hypercube family"""

    @pytest.mark.parametrize("ell", [2, 3, 4])
    def test_sizes(self, ell):
        """Test vertex and edge counts of Q_ℓ"""
        inst = gen_hypercube(ell)
        assert len(inst.vertices) == 2 ** ell
        assert inst.num_edges == ell * 2 ** (ell - 1)
        assert validate(inst) == []

    def test_color_classes_are_perfect_matchings(self):
        """Test every coordinate class is a perfect matching"""
        inst = gen_hypercube(3)
        for color, members in inst.color_classes().items():
            assert len(members) == 4
            ends = Counter(v for i in members for v in (inst.edges[i].u, inst.edges[i].v))
            assert set(ends.values()) == {1}

    def test_bound_is_two_minus_two_eps(self):
        """Test bounds are 2(1−ε)"""
        inst = gen_hypercube(3, Fraction(1, 100))
        assert set(inst.bounds.values()) == {Fraction(99, 50)}
        assert inst.name == "hypercube-l3-eps1_100"

    def test_edges_sorted_by_dimension(self):
        """Test edges are ordered by dimension"""
        inst = gen_hypercube(3)
        assert [e.color for e in inst.edges] == ["d0"] * 4 + ["d1"] * 4 + ["d2"] * 4
        assert inst.edges[0].u == "000"

    @pytest.mark.parametrize("ell,eps", [(1, Fraction(1, 100)), (3, Fraction(0)), (3, Fraction(1, 2))])
    def test_rejects_bad_parameters(self, ell, eps):
        """Test out-of-range ℓ and ε are refused"""
        with pytest.raises(InstanceError):
            gen_hypercube(ell, eps)

    def test_bipartite(self):
        """Test Q3 carries a bipartition"""
        assert gen_hypercube(3).is_bipartite()

    @pytest.mark.parametrize("ell", [2, 3, 4, 5, 6])
    def test_coloring_is_proper(self, ell):
        """Test the coordinate coloring is proper for small ℓ"""
        inst = gen_hypercube(ell)
        for vertex, incident in inst.incidence().items():
            colors = [inst.edges[i].color for i in incident]
            assert len(colors) == len(set(colors)) == ell
        assert all(len(members) == 2 ** (ell - 1) for members in inst.color_classes().values())


# ==============================================================================
# C4 CHAIN
# ==============================================================================

class TestC4Chain:
    """Test the chain of bi-chromatic C4 copies"""

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_sizes(self, k):
        """Test vertex and edge counts of the chain"""
        inst = gen_c4_chain(k)
        assert len(inst.vertices) == 4 * k
        assert inst.num_edges == 6 * k
        assert len(inst.bounds) == 2 * k + 1
        assert inst.all_unit_bounds()
        assert validate(inst) == []

    def test_connectors_wrap(self):
        """Test the last copy connects back to the first"""
        inst = gen_c4_chain(3)
        connectors = [(e.u, e.v) for e in inst.edges if e.color == "cw"]
        assert ("a3_2", "a1_1") in connectors
        assert ("a3_3", "a1_4") in connectors

    def test_rejects_single_copy(self):
        """Test k = 1 is refused"""
        with pytest.raises(InstanceError):
            gen_c4_chain(1)


# ==============================================================================
# CYCLIC LATIN
# ==============================================================================

class TestCyclic:
    """Test the cyclic K_{k,k} constructions"""

    @pytest.mark.parametrize("k", [1, 2, 3, 5])
    def test_proper_coloring(self, k):
        """Test the cyclic square is properly colored"""
        inst = gen_cyclic_square(k)
        assert inst.num_edges == k * k
        for vertex, incident in inst.incidence().items():
            colors = [inst.edges[i].color for i in incident]
            assert len(colors) == len(set(colors)) == k
        assert validate(inst) == []

    @pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
    def test_latin_family_color_matrix(self, ell):
        """Test the color table is the cyclic Latin square"""
        k = 2 * ell
        table = color_matrix(gen_cyclic_latin(ell))
        assert table == [[f"c{x}" for x in row] for row in cyclic_latin_square(k)]
        for i in range(1, k):
            assert table[i] == table[i - 1][-1:] + table[i - 1][:-1]
        assert all(len(set(column)) == k for column in zip(*table))

    def test_latin_family_is_even_order(self):
        """Test the Latin family has order 2ℓ"""
        inst = gen_cyclic_latin(2)
        assert len(inst.bipartition[0]) == 4
        assert inst.name == "cyclic-latin-l2"

    def test_rainbow_c4_is_order_two(self):
        """Test the rainbow C4 has two colors"""
        inst = gen_rainbow_c4()
        assert inst.num_edges == 4
        assert inst.colors == ["c0", "c1"]
        assert inst.name == "rainbow-c4"


# ==============================================================================
# EXEMPLARS AND DISPATCH
# ==============================================================================

class TestExemplarsAndDispatch:
    """Test the μ = 1 exemplars and the family dispatchers"""

    def test_left_is_bipartite_path(self):
        """Test the left exemplar is a bipartite path"""
        inst = gen_exemplar("left")
        assert inst.num_edges == 3
        assert inst.is_bipartite()

    def test_right_has_triangle(self):
        """Test the right exemplar is not bipartite"""
        inst = gen_exemplar("right")
        assert inst.num_edges == 4
        assert not inst.is_bipartite()

    def test_unknown_exemplar(self):
        """Test unknown exemplar names are refused"""
        with pytest.raises(InstanceError):
            gen_exemplar("middle")

    def test_family_params(self):
        """Test generation from family parameters"""
        assert gen_family(FamilyParams("B", 2)) == gen_c4_chain(2)
        assert gen_family(FamilyParams("Fprime", 1)) == gen_cyclic_latin(1)
        assert gen_family(FamilyParams("exemplar", side="right")) == gen_exemplar("right")
        with pytest.raises(InstanceError):
            FamilyParams("F", 3, eps=Fraction(1, 2))

    def test_gen_by_name(self):
        """Test generation by CLI family name"""
        assert gen_by_name("hypercube", "3", Fraction(1, 10)) == gen_hypercube(3, Fraction(1, 10))
        assert gen_by_name("rainbow_c4") == gen_rainbow_c4()
        with pytest.raises(InstanceError):
            gen_by_name("petersen", 1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
