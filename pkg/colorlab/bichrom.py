# colorlab/bichrom.py
"""
Bi-chromatic alternating 4-cycles
Includes: cycle enumeration, the enhanced LP with one cut per cycle and
the level-2 Sherali-Adams check that the cycle cuts are implied
"""
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

from loguru import logger

from colorlab.model import ColoredInstance, format_rational
from colorlab.ratlp import RationalLP, build_mc, edge_var, solve
from colorlab.sa import linearize, sa_lift
from colorlab.validators import InstanceError

ONE = Fraction(1)


@dataclass(frozen=True)
class EdgeRecord:
    """Edge as seen by the cycle finder; tag identifies it to the caller"""
    u: str
    v: str
    color: str
    tag: Hashable


@dataclass(frozen=True)
class BiChromaticCycle:
    """
    Alternating 4-cycle a-b-c-d-a

    edges[i] joins vertices[i] and vertices[i+1 mod 4]; edges 0 and 2 carry
    colors[0], edges 1 and 3 carry colors[1].
    """
    edges: Tuple[Hashable, Hashable, Hashable, Hashable]
    colors: Tuple[str, str]
    vertices: Tuple[str, str, str, str]

    @property
    def label(self) -> str:
        return "-".join(self.vertices)

    def same_color_pairs(self) -> List[Tuple[Hashable, Hashable]]:
        return [(self.edges[0], self.edges[2]), (self.edges[1], self.edges[3])]

    def adjacent_pairs(self) -> List[Tuple[Hashable, Hashable, str]]:
        """(edge, edge, shared vertex) for the four consecutive pairs"""
        return [
            (self.edges[i], self.edges[(i + 1) % 4], self.vertices[(i + 1) % 4])
            for i in range(4)
        ]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": list(self.edges), "colors": list(self.colors)}


def find_alternating_cycles(records: Iterable[EdgeRecord]) -> List[BiChromaticCycle]:
    """
    All alternating two-colored 4-cycles, each reported once

    Canonical form: least vertex first, then its lesser cycle neighbor.
    """
    between: Dict[frozenset, List[EdgeRecord]] = defaultdict(list)
    neighbors: Dict[str, set] = defaultdict(set)
    for record in records:
        between[frozenset((record.u, record.v))].append(record)
        neighbors[record.u].add(record.v)
        neighbors[record.v].add(record.u)

    cycles = []
    for a in sorted(neighbors):
        around = sorted(w for w in neighbors[a] if w > a)
        for i, b in enumerate(around):
            for d in around[i + 1:]:
                for c in sorted((neighbors[b] & neighbors[d]) - {a}):
                    if c < a:
                        continue
                    sides = [
                        between[frozenset((a, b))], between[frozenset((b, c))],
                        between[frozenset((c, d))], between[frozenset((d, a))],
                    ]
                    for ab, bc, cd, da in product(*sides):
                        if ab.color == cd.color and bc.color == da.color and ab.color != bc.color:
                            cycles.append(BiChromaticCycle(
                                edges=(ab.tag, bc.tag, cd.tag, da.tag),
                                colors=(ab.color, bc.color),
                                vertices=(a, b, c, d),
                            ))
    return cycles


def enumerate_bc(inst: ColoredInstance) -> List[BiChromaticCycle]:
    """Alternating bi-chromatic 4-cycles of inst; edges are edge indices"""
    records = [EdgeRecord(e.u, e.v, e.color, index) for index, e in enumerate(inst.edges)]
    cycles = find_alternating_cycles(records)
    logger.debug(f"{inst.name or 'instance'}: {len(cycles)} bi-chromatic 4-cycle(s)")
    return cycles


def enhanced_lp(inst: ColoredInstance) -> RationalLP:
    """M_c plus Σ_{e∈BC} x_e <= 1 for every bi-chromatic 4-cycle"""
    lp = build_mc(inst)
    lp.name = f"enhanced:{inst.name}"
    for cycle in enumerate_bc(inst):
        lp.add(f"bc:{cycle.label}", {edge_var(i): ONE for i in cycle.edges}, "<=", ONE)
    return lp


# ==============================================================================
# LEVEL-2 CHECK
# ==============================================================================

@dataclass
class Sa2Verdict:
    """
    verdict is "implied" / "not-implied" when every bound is 1, and
    "value-only" otherwise (the zero-forcing algebra needs unit color rows)
    """
    cycle: BiChromaticCycle
    max_value: Fraction
    verdict: str
    forcing: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cycle": self.cycle.to_dict(),
            "max_value": format_rational(self.max_value),
            "verdict": self.verdict,
            "forcing": self.forcing,
        }


def zero_forcing_rows(inst: ColoredInstance, bc: BiChromaticCycle) -> List[dict]:
    """
    For each edge pair of bc that cannot both be matched, find the level-2
    product row that forces y_pair = 0

    A unit row x_a + x_b + ... <= 1 multiplied by x_a linearizes to
    -Σ_{j≠a} y_{aj} >= 0, which pins every y_{aj} at 0.
    """
    lp = build_mc(inst)
    index = {v: j for j, v in enumerate(lp.variables)}
    pairs = [(a, b, f"color:{inst.edges[a].color}") for a, b in bc.same_color_pairs()]
    pairs += [(a, b, f"deg:{shared}") for a, b, shared in bc.adjacent_pairs()]

    results = []
    for a, b, row_id in pairs:
        row = lp.constraint(row_id)
        coeffs = {index[v]: c for v, c in row.coeffs.items()}
        unit = row.rhs == 1 and coeffs.get(a) == 1 and coeffs.get(b) == 1
        terms, const = linearize(coeffs, row.rhs, (a,), ())
        pair = tuple(sorted((a, b)))
        forced = unit and const == 0 and all(c <= 0 for c in terms.values()) and terms.get(pair, 0) < 0
        results.append({
            "pair": list(pair),
            "row": row_id,
            "multiplier": [a],
            "forced": forced,
        })
    return results


def sa2_implies_bc(inst: ColoredInstance, bc: BiChromaticCycle, budget: Optional[int] = None) -> Sa2Verdict:
    """
    Maximize Σ_{e∈bc} x_e over the level-2 lift of M_c

    Raises:
        InstanceError: If bc is not a cycle of inst
        BudgetError: If the level-2 lift exceeds the budget
    """
    if bc not in enumerate_bc(inst):
        raise InstanceError("Cycle is not a bi-chromatic 4-cycle of the instance", {"cycle": bc.to_dict()})
    lifted = sa_lift(build_mc(inst), 2, budget)
    lifted.objective = {edge_var(i): ONE for i in bc.edges}
    lifted.sense = "maximize"
    solution = solve(lifted)
    if solution.status != "optimal":
        raise InstanceError(f"Level-2 lift is {solution.status}", {"cycle": bc.to_dict()})

    forcing = zero_forcing_rows(inst, bc)
    if inst.all_unit_bounds():
        verdict = "implied" if solution.objective_value <= 1 else "not-implied"
    else:
        verdict = "value-only"
    logger.info(f"✅ Level-2 max over {bc.label}: {solution.objective_value} ({verdict})")
    return Sa2Verdict(bc, solution.objective_value, verdict, forcing)
