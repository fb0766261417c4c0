# colorlab/oracle.py
"""
Brute-force ground truth for BCM experiments
Includes: exact colorful matching DFS, greedy lower bound, exact set
packing, Latin square transversals, the cyclic Ryser matching, gap
reports and a seeded random instance harness
"""
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from loguru import logger

from colorlab.config import ILP_EDGE_LIMIT, MU_EXHAUSTIVE_LIMIT
from colorlab.model import ColoredInstance, Edge, fingerprint, format_rational, is_colorful_matching
from colorlab.ratlp import build_mc, chvatal_round_ones, color_row_ids, solve
from colorlab.validators import BudgetError, InstanceError, require_valid, validate_latin_square

ZERO = Fraction(0)
ONE = Fraction(1)


# ==============================================================================
# COLORFUL MATCHING
# ==============================================================================

def max_colorful_matching(inst: ColoredInstance, limit: Optional[int] = None) -> Tuple[Fraction, List[int]]:
    """
    Exact maximum-profit matching with |M ∩ E_j| <= w_j

    DFS over vertices in order: each vertex is matched to a later free
    vertex or left unmatched for good. Two admissible bounds prune: half
    the best incident profit over undecided vertices, and (unit profits)
    the total remaining color slack.

    Args:
        inst: Valid instance
        limit: Edge-count limit (default ILP_EDGE_LIMIT)

    Returns:
        (optimum, witness edge indices); the optimum is the cardinality
        when all profits are 1

    Raises:
        BudgetError: If inst has more edges than the limit
    """
    require_valid(inst)
    limit = ILP_EDGE_LIMIT if limit is None else limit
    if inst.num_edges > limit:
        raise BudgetError(
            f"Colorful matching search limited to {limit} edges, instance has {inst.num_edges}",
            {"edges": inst.num_edges, "limit": limit},
        )

    order = [v for v in inst.vertices if inst.incidence().get(v)]
    position = {v: i for i, v in enumerate(order)}
    incidence = inst.incidence()
    forward: Dict[str, List[int]] = {
        v: sorted(
            (i for i in incidence[v] if position[_other(inst.edges[i], v)] > position[v]),
            key=lambda i: (-inst.edges[i].profit, i),
        )
        for v in order
    }
    best_incident = {v: max((inst.edges[i].profit for i in incidence[v]), default=ZERO) for v in order}
    unit = all(e.profit == 1 for e in inst.edges)
    slack = {c: int(w) for c, w in inst.bounds.items()}  # floor: matchings pick whole edges

    best = {"value": ZERO, "edges": []}
    matched = set()
    chosen: List[int] = []

    def upper_bound(start: int, value: Fraction) -> Fraction:
        free = [v for v in order[start:] if v not in matched]
        bound = value + sum((best_incident[v] for v in free), ZERO) / 2
        if unit:
            bound = min(bound, value + min(len(free) // 2, sum(max(s, 0) for s in slack.values())))
        return bound

    def search(start: int, value: Fraction) -> None:
        while start < len(order) and order[start] in matched:
            start += 1
        if value > best["value"]:
            best["value"], best["edges"] = value, list(chosen)
        if start >= len(order) or upper_bound(start, value) <= best["value"]:
            return
        v = order[start]
        for i in forward[v]:
            edge = inst.edges[i]
            w = _other(edge, v)
            if w in matched or slack[edge.color] < 1:
                continue
            matched.update((v, w))
            slack[edge.color] -= 1
            chosen.append(i)
            search(start + 1, value + edge.profit)
            chosen.pop()
            slack[edge.color] += 1
            matched.difference_update((v, w))
        matched.add(v)
        search(start + 1, value)
        matched.discard(v)

    search(0, ZERO)
    logger.debug(f"Colorful matching optimum for {inst.name or 'instance'}: {best['value']}")
    return best["value"], sorted(best["edges"])


def _other(edge: Edge, vertex: str) -> str:
    return edge.v if edge.u == vertex else edge.u


def greedy_colorful_matching(inst: ColoredInstance) -> Tuple[Fraction, List[int]]:
    """Take edges in order whenever they keep the matching colorful"""
    chosen: List[int] = []
    for index in range(inst.num_edges):
        if is_colorful_matching(inst, chosen + [index]):
            chosen.append(index)
    return sum((inst.edges[i].profit for i in chosen), ZERO), chosen


# ==============================================================================
# SET PACKING
# ==============================================================================

def max_set_packing(sets: Sequence[FrozenSet], limit: Optional[int] = None) -> Tuple[int, List[int]]:
    """
    Exact maximum number of pairwise disjoint sets

    Include/exclude branching in index order, pruned by the count of sets
    still compatible with the current choice.

    Raises:
        BudgetError: If more sets than the limit are given
    """
    limit = MU_EXHAUSTIVE_LIMIT if limit is None else limit
    if len(sets) > limit:
        raise BudgetError(
            f"Exhaustive packing limited to {limit} sets, got {len(sets)}",
            {"sets": len(sets), "limit": limit},
        )
    sets = [frozenset(s) for s in sets]
    best: List[int] = []
    chosen: List[int] = []

    def search(index: int, used: frozenset) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        remaining = [i for i in range(index, len(sets)) if used.isdisjoint(sets[i])]
        if not remaining or len(chosen) + len(remaining) <= len(best):
            return
        first = remaining[0]
        chosen.append(first)
        search(first + 1, used | sets[first])
        chosen.pop()
        search(first + 1, used)

    search(0, frozenset())
    return len(best), best


# ==============================================================================
# LATIN SQUARES
# ==============================================================================

def cyclic_latin_square(k: int) -> List[List[int]]:
    """Color matrix of the cyclic K_{k,k}: entry (i, j) is (j − i) mod k"""
    if k < 1:
        raise InstanceError("Latin square order must be >= 1", {"k": k})
    return [[(j - i) % k for j in range(k)] for i in range(k)]


def color_matrix(inst: ColoredInstance) -> List[List[str]]:
    """A[i][j] = color of (v_i, u_j) for a cyclic K_{k,k} instance"""
    if inst.bipartition is None:
        raise InstanceError("Color matrix needs a declared bipartition")
    left, right = inst.bipartition
    colors = {frozenset((e.u, e.v)): e.color for e in inst.edges}
    return [[colors[frozenset((v, u))] for u in right] for v in left]


def latin_transversal(table: Sequence[Sequence]) -> Optional[List[Tuple[int, int]]]:
    """
    Exact search for k cells, one per row, column and symbol

    Returns:
        Cells (row, column) of the first transversal found, or None

    Raises:
        InstanceError: If table is not a Latin square
    """
    validate_latin_square(table)
    order = len(table)
    used_columns = set()
    used_symbols = set()
    cells: List[Tuple[int, int]] = []

    def search(row: int) -> bool:
        if row == order:
            return True
        for column in range(order):
            symbol = table[row][column]
            if column in used_columns or symbol in used_symbols:
                continue
            used_columns.add(column)
            used_symbols.add(symbol)
            cells.append((row, column))
            if search(row + 1):
                return True
            cells.pop()
            used_columns.discard(column)
            used_symbols.discard(symbol)
        return False

    return list(cells) if search(0) else None


def ryser_matching(k: int) -> List[Edge]:
    """
    Perfect colorful matching v_j ↔ u_{2j mod k} of the odd cyclic K_{k,k}

    Edge (v_j, u_{2j}) has shift Δ = j, so it carries color c_j.

    Raises:
        InstanceError: If k is even or < 1 (2j mod k is then not injective)
    """
    if k < 1 or k % 2 == 0:
        raise InstanceError("Ryser construction needs an odd order k >= 1", {"k": k})
    return [Edge(f"v{j}", f"u{(2 * j) % k}", f"c{j}") for j in range(k)]


# ==============================================================================
# GAP REPORTS
# ==============================================================================

@dataclass
class GapReport:
    name: str
    fingerprint: str
    lp_value: Fraction
    ilp_value: Fraction
    gap: Fraction
    greedy_value: Fraction
    sa_values: Dict[int, Fraction] = field(default_factory=dict)
    enhanced_value: Optional[Fraction] = None
    chvatal_value: Optional[Fraction] = None

    def to_dict(self) -> dict:
        data = {
            "instance": self.name,
            "fingerprint": self.fingerprint,
            "lp": format_rational(self.lp_value),
            "ilp": format_rational(self.ilp_value),
            "gap": format_rational(self.gap),
            "greedy": format_rational(self.greedy_value),
            "sa": {str(level): format_rational(v) for level, v in sorted(self.sa_values.items())},
        }
        if self.enhanced_value is not None:
            data["enhanced"] = format_rational(self.enhanced_value)
        if self.chvatal_value is not None:
            data["chvatal"] = format_rational(self.chvatal_value)
        return data

    def to_row(self) -> dict:
        """Flat CSV row: instance, lp, ilp, gap, sa_<k>..."""
        row = {
            "instance": self.name,
            "lp": format_rational(self.lp_value),
            "ilp": format_rational(self.ilp_value),
            "gap": format_rational(self.gap),
        }
        for level, value in sorted(self.sa_values.items()):
            row[f"sa_{level}"] = format_rational(value)
        return row


def gap_report(
    inst: ColoredInstance,
    sa_levels: Sequence[int] = (),
    budget: Optional[int] = None,
    ilp_limit: Optional[int] = None,
    with_cuts: bool = False,
) -> GapReport:
    """
    Exact LP value, ILP value, gap and lifted optimum per SA level

    Args:
        inst: Valid instance
        sa_levels: SA levels to solve
        budget: SA lifted-variable budget
        ilp_limit: Edge limit for the colorful matching search
        with_cuts: Also solve the enhanced LP and the per-color Chvátal LP
    """
    from colorlab.bichrom import enhanced_lp
    from colorlab.sa import sa_lift

    lp = build_mc(inst)
    relaxed = solve(lp)
    ilp, _ = max_colorful_matching(inst, ilp_limit)
    greedy, _ = greedy_colorful_matching(inst)
    gap = relaxed.objective_value / ilp if ilp else ONE

    sa_values = {}
    for level in sorted(set(sa_levels)):
        lifted = solve(sa_lift(lp, level, budget))
        sa_values[level] = lifted.objective_value

    report = GapReport(
        name=inst.name,
        fingerprint=fingerprint(inst),
        lp_value=relaxed.objective_value,
        ilp_value=ilp,
        gap=gap,
        greedy_value=greedy,
        sa_values=sa_values,
    )
    if with_cuts:
        report.enhanced_value = solve(enhanced_lp(inst)).objective_value
        report.chvatal_value = solve(chvatal_round_ones(lp, color_row_ids(lp))).objective_value
    logger.info(f"✅ Gap report {inst.name}: lp={report.lp_value} ilp={report.ilp_value} gap={report.gap}")
    return report


# ==============================================================================
# RANDOM HARNESS
# ==============================================================================

def random_instance(
    seed: int,
    max_vertices: int = 7,
    max_edges: int = 10,
    max_colors: int = 4,
    bipartite: bool = False,
) -> ColoredInstance:
    """
    Seeded random rainbow instance (all bounds 1)

    Colors that end up unused are dropped so the instance always validates.
    """
    rng = random.Random(seed)
    count = rng.randint(2, max_vertices)
    vertices = tuple(f"n{i}" for i in range(count))
    if bipartite:
        split = max(1, count // 2)
        pairs = [(a, b) for a in vertices[:split] for b in vertices[split:]]
    else:
        pairs = [(vertices[i], vertices[j]) for i in range(count) for j in range(i + 1, count)]
    rng.shuffle(pairs)
    size = rng.randint(1, min(max_edges, len(pairs)))
    palette = [f"k{c}" for c in range(rng.randint(1, max_colors))]
    edges = tuple(Edge(u, v, rng.choice(palette)) for u, v in sorted(pairs[:size]))
    used = sorted({e.color for e in edges})
    bipartition = (vertices[:split], vertices[split:]) if bipartite else None
    return ColoredInstance(
        vertices=vertices,
        edges=edges,
        bounds={c: ONE for c in used},
        bipartition=bipartition,
        name=f"random-{seed}",
    )
