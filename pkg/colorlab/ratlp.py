# colorlab/ratlp.py
"""
Exact rational LPs for BCM
Includes: M_c, the hypergraph matching LP HM_c and its covering dual,
Chvátal rounding, the exact solver front end, vertex certificates,
brute-force vertex enumeration and a plain-text exporter
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple

import sympy
from loguru import logger

from colorlab.config import CERTIFY_MAX_VARS
from colorlab.model import ColoredInstance, Hypergraph3, format_rational
from colorlab.simplex import ActiveSetSimplex, Row
from colorlab.validators import InstanceError, require_valid

Relation = Literal["<=", ">=", "="]
Sense = Literal["maximize", "minimize"]
Status = Literal["optimal", "infeasible", "unbounded", "iteration_limit"]

ZERO = Fraction(0)
ONE = Fraction(1)
REVERSED = "~"


# ==============================================================================
# TYPES
# ==============================================================================

@dataclass(frozen=True)
class Constraint:
    id: str
    coeffs: Dict[str, Fraction]
    relation: Relation
    rhs: Fraction

    def lhs(self, values: Dict[str, Fraction]) -> Fraction:
        return sum((a * values.get(var, ZERO) for var, a in self.coeffs.items()), ZERO)

    def holds(self, values: Dict[str, Fraction]) -> bool:
        lhs = self.lhs(values)
        if self.relation == "<=":
            return lhs <= self.rhs
        if self.relation == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class RationalLP:
    """
    Exact LP over nonnegative variables

    upper[var] is 1 for [0,1] variables and None for [0,∞).
    """
    variables: List[str]
    constraints: List[Constraint] = field(default_factory=list)
    objective: Dict[str, Fraction] = field(default_factory=dict)
    sense: Sense = "maximize"
    upper: Dict[str, Optional[Fraction]] = field(default_factory=dict)
    name: str = ""

    def add(self, id: str, coeffs: Dict[str, Fraction], relation: Relation, rhs) -> Constraint:
        row = Constraint(id, {v: Fraction(a) for v, a in coeffs.items() if a}, relation, Fraction(rhs))
        self.constraints.append(row)
        return row

    def constraint(self, id: str) -> Constraint:
        for row in self.constraints:
            if row.id == id:
                return row
        raise KeyError(id)

    def check(self) -> None:
        """Every constraint and objective term must reference declared variables"""
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise InstanceError(f"LP {self.name!r} declares a variable twice")
        for row in self.constraints:
            unknown = set(row.coeffs) - declared
            if unknown:
                raise InstanceError(
                    f"Constraint {row.id} references undeclared variables",
                    {"constraint": row.id, "unknown": sorted(unknown)},
                )
        unknown = set(self.objective) - declared
        if unknown:
            raise InstanceError("Objective references undeclared variables", {"unknown": sorted(unknown)})

    def copy(self, name: str = None) -> "RationalLP":
        return RationalLP(
            variables=list(self.variables),
            constraints=list(self.constraints),
            objective=dict(self.objective),
            sense=self.sense,
            upper=dict(self.upper),
            name=self.name if name is None else name,
        )

    def objective_value(self, values: Dict[str, Fraction]) -> Fraction:
        return sum((c * values.get(var, ZERO) for var, c in self.objective.items()), ZERO)


@dataclass
class BasicSolution:
    """
    Vertex solution plus its basis record

    basis holds the ids of n tight rows: constraint ids, "lb:<var>" for
    x_var >= 0 and "ub:<var>" for x_var <= upper.
    """
    status: Status
    values: Dict[str, Fraction] = field(default_factory=dict)
    objective_value: Optional[Fraction] = None
    basis: Tuple[str, ...] = ()
    iterations: int = 0
    certified: bool = False

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "objective": None if self.objective_value is None else format_rational(self.objective_value),
            "values": {var: format_rational(val) for var, val in self.values.items()},
            "basis": list(self.basis),
            "iterations": self.iterations,
            "certified": self.certified,
        }


@dataclass
class VertexReport:
    feasible: bool
    tight: bool
    rank: int
    full_rank: bool
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.feasible and self.tight and self.full_rank


# ==============================================================================
# BUILDERS
# ==============================================================================

def edge_var(index: int) -> str:
    return f"e{index}"


def build_mc(inst: ColoredInstance) -> RationalLP:
    """
    Natural relaxation M_c

    One [0,1] variable per edge, a degree row per vertex, a color row per
    color with rhs w_j, objective maximize Σ p_e x_e.
    """
    require_valid(inst)
    variables = [edge_var(i) for i in range(inst.num_edges)]
    lp = RationalLP(
        variables=variables,
        objective={edge_var(i): e.profit for i, e in enumerate(inst.edges)},
        upper={var: ONE for var in variables},
        name=f"mc:{inst.name}",
    )
    for vertex, incident in inst.incidence().items():
        if incident:
            lp.add(f"deg:{vertex}", {edge_var(i): ONE for i in incident}, "<=", ONE)
    for color, members in inst.color_classes().items():
        lp.add(f"color:{color}", {edge_var(i): ONE for i in members}, "<=", inst.bounds[color])
    return lp


def hyper_var(index: int) -> str:
    return f"h{index}"


def vertex_var(vertex: str) -> str:
    return f"y:{vertex}"


def build_hm(h: Hypergraph3) -> RationalLP:
    """Hypergraph matching LP: variable per hyperedge, ≤ 1 row per vertex"""
    variables = [hyper_var(i) for i in range(len(h.hyperedges))]
    lp = RationalLP(
        variables=variables,
        objective={var: ONE for var in variables},
        upper={var: None for var in variables},
        name="hm",
    )
    for vertex in h.vertices:
        members = [i for i, he in enumerate(h.hyperedges) if vertex in he.vertices]
        if members:
            lp.add(f"vtx:{vertex}", {hyper_var(i): ONE for i in members}, "<=", ONE)
    return lp


def build_dual(h: Hypergraph3) -> RationalLP:
    """Fractional covering dual: minimize Σ y_v with Σ_{v∈e} y_v ≥ 1 per hyperedge"""
    variables = [vertex_var(v) for v in h.vertices]
    lp = RationalLP(
        variables=variables,
        objective={var: ONE for var in variables},
        sense="minimize",
        upper={var: None for var in variables},
        name="hm-dual",
    )
    for i, he in enumerate(h.hyperedges):
        lp.add(f"cover:{hyper_var(i)}", {vertex_var(v): ONE for v in sorted(he.vertices)}, ">=", ONE)
    return lp


def color_row_ids(lp: RationalLP) -> List[str]:
    return [row.id for row in lp.constraints if row.id.startswith("color:")]


def chvatal_round_ones(lp: RationalLP, rows: Sequence[str]) -> RationalLP:
    """
    First-round Chvátal cuts for two multiplier choices

    For every selected ≤ row the cut ⌊a⌋x ≤ ⌊b⌋ (indicator multiplier), and
    when two or more rows are selected, the cut from the all-ones
    multiplier over them. Valid because every variable is nonnegative.
    """
    cut_lp = lp.copy(name=f"{lp.name}+chvatal")
    selected = []
    for row_id in rows:
        row = lp.constraint(row_id)
        if row.relation != "<=":
            raise InstanceError(f"Chvátal rounding needs a <= row, {row_id} is {row.relation}")
        selected.append(row)
        cut_lp.add(
            f"chvatal:{row_id}",
            {var: Fraction(math.floor(a)) for var, a in row.coeffs.items()},
            "<=",
            math.floor(row.rhs),
        )
    if len(selected) >= 2:
        summed: Dict[str, Fraction] = {}
        for row in selected:
            for var, a in row.coeffs.items():
                summed[var] = summed.get(var, ZERO) + a
        cut_lp.add(
            "chvatal:sum",
            {var: Fraction(math.floor(a)) for var, a in summed.items()},
            "<=",
            math.floor(sum((row.rhs for row in selected), ZERO)),
        )
    logger.debug(f"Chvátal round added {len(cut_lp.constraints) - len(lp.constraints)} cut(s)")
    return cut_lp


# ==============================================================================
# SOLVER FRONT END
# ==============================================================================

def _le_rows(lp: RationalLP) -> List[Tuple[str, Dict[str, Fraction], Fraction]]:
    """All constraints and finite upper bounds as a·x <= b rows"""
    rows = []
    for row in lp.constraints:
        if row.relation in ("<=", "="):
            rows.append((row.id, dict(row.coeffs), row.rhs))
        if row.relation == ">=":
            rows.append((row.id, {v: -a for v, a in row.coeffs.items()}, -row.rhs))
        if row.relation == "=":
            rows.append((row.id + REVERSED, {v: -a for v, a in row.coeffs.items()}, -row.rhs))
    for var in lp.variables:
        bound = lp.upper.get(var)
        if bound is not None:
            rows.append((f"ub:{var}", {var: ONE}, Fraction(bound)))
    return rows


def _presolve(rows):
    """
    Fix variables forced to zero and drop redundant rows

    Uses only x >= 0: a row Σ a_j x_j <= 0 with every a_j > 0 fixes its
    variables at 0. Rows left with nonpositive coefficients and b >= 0
    always hold, and exact duplicates are kept once.

    Returns:
        (fixed variables, reduced rows) or None when a row is infeasible
    """
    fixed = set()
    changed = True
    while changed:
        changed = False
        for _, coeffs, rhs in rows:
            live = [(v, a) for v, a in coeffs.items() if v not in fixed]
            if rhs < 0 and all(a >= 0 for _, a in live):
                return None
            if rhs == 0 and live and all(a > 0 for _, a in live):
                fixed.update(v for v, _ in live)
                changed = True

    reduced = []
    seen = set()
    for row_id, coeffs, rhs in rows:
        live = {v: a for v, a in coeffs.items() if v not in fixed}
        if not live:
            continue
        if rhs >= 0 and all(a <= 0 for a in live.values()):
            continue
        key = (frozenset(live.items()), rhs)
        if key in seen:
            continue
        seen.add(key)
        reduced.append((row_id, live, rhs))
    return fixed, reduced


def solve(
    lp: RationalLP,
    presolve: bool = True,
    certify: Optional[bool] = None,
    max_iterations: Optional[int] = None,
) -> BasicSolution:
    """
    Solve lp exactly and return a vertex with its basis certificate

    Args:
        lp: Well-formed RationalLP
        presolve: Fix forced-zero variables and drop redundant rows first
        certify: Re-verify tightness and rank with sympy (default: when the
            LP has at most CERTIFY_MAX_VARS variables)
        max_iterations: Optional pivot cap

    Returns:
        BasicSolution; infeasible and unbounded LPs are reported by status
    """
    lp.check()
    sign = ONE if lp.sense == "maximize" else -ONE
    rows = _le_rows(lp)

    fixed = set()
    if presolve:
        result = _presolve(rows)
        if result is None:
            logger.debug(f"Presolve found {lp.name} infeasible")
            return BasicSolution("infeasible")
        fixed, rows = result

    live = [v for v in lp.variables if v not in fixed]
    column = {v: k for k, v in enumerate(live)}
    engine_rows = [Row(f"lb:{v}", ((k, -ONE),), ZERO) for k, v in enumerate(live)]
    for row_id, coeffs, rhs in rows:
        engine_rows.append(Row(row_id, tuple(sorted((column[v], a) for v, a in coeffs.items())), rhs))
    objective = [sign * lp.objective.get(v, ZERO) for v in live]

    engine = ActiveSetSimplex(engine_rows, len(live), objective, list(range(len(live))), max_iterations)
    outcome = engine.run()
    if outcome.status != "optimal":
        logger.debug(f"LP {lp.name}: {outcome.status}")
        return BasicSolution(outcome.status, iterations=outcome.iterations)

    values = {v: ZERO for v in lp.variables}
    for v, k in column.items():
        values[v] = outcome.x[k]
    basis = [engine_rows[i].id.removesuffix(REVERSED) for i in outcome.basis]
    basis.extend(f"lb:{v}" for v in lp.variables if v in fixed)

    solution = BasicSolution(
        status="optimal",
        values=values,
        objective_value=lp.objective_value(values),
        basis=tuple(basis),
        iterations=outcome.iterations,
    )
    if certify is None:
        certify = len(lp.variables) <= CERTIFY_MAX_VARS
    if certify:
        report = verify_vertex(lp, solution)
        solution.certified = report.ok
        if not report.ok:
            logger.error(f"❌ Vertex certificate failed for {lp.name}: {report.problems}")
    logger.debug(
        f"LP {lp.name}: optimum {solution.objective_value} "
        f"({len(live)} live vars, {len(fixed)} fixed, {outcome.iterations} pivots)"
    )
    return solution


def _sym(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _basis_row(lp: RationalLP, row_id: str) -> Tuple[Dict[str, Fraction], Fraction, str]:
    if row_id.startswith("lb:"):
        return {row_id[3:]: ONE}, ZERO, "lb"
    if row_id.startswith("ub:"):
        var = row_id[3:]
        return {var: ONE}, Fraction(lp.upper[var]), "ub"
    row = lp.constraint(row_id)
    return row.coeffs, row.rhs, "row"


def verify_vertex(lp: RationalLP, sol: BasicSolution) -> VertexReport:
    """
    Post-hoc vertex certificate: feasibility, tight basis rows, full rank

    The rank of the basis rows is computed exactly with sympy.
    """
    problems = []
    values = sol.values
    for var in lp.variables:
        value = values.get(var, ZERO)
        bound = lp.upper.get(var)
        if value < 0 or (bound is not None and value > bound):
            problems.append(f"bound violated: {var} = {value}")
    for row in lp.constraints:
        if not row.holds(values):
            problems.append(f"constraint violated: {row.id}")
    feasible = not problems

    tight = True
    matrix = []
    for row_id in sol.basis:
        coeffs, rhs, _ = _basis_row(lp, row_id)
        lhs = sum((a * values.get(v, ZERO) for v, a in coeffs.items()), ZERO)
        if lhs != rhs:
            tight = False
            problems.append(f"basis row not tight: {row_id}")
        matrix.append([_sym(coeffs.get(v, ZERO)) for v in lp.variables])

    n = len(lp.variables)
    rank = sympy.Matrix(matrix).rank() if matrix and n else 0
    full_rank = rank == n and len(sol.basis) == n
    if not full_rank:
        problems.append(f"basis rank {rank} with {len(sol.basis)} rows, need {n}")
    return VertexReport(feasible, tight, rank, full_rank, problems)


def tight_rank(lp: RationalLP, values: Dict[str, Fraction]) -> int:
    """Rank of every row (constraints and bounds) tight at values"""
    matrix = []
    for row in lp.constraints:
        if row.lhs(values) == row.rhs:
            matrix.append([row.coeffs.get(v, ZERO) for v in lp.variables])
    for j, var in enumerate(lp.variables):
        value = values.get(var, ZERO)
        bound = lp.upper.get(var)
        if value == 0 or (bound is not None and value == bound):
            matrix.append([ONE if k == j else ZERO for k in range(len(lp.variables))])
    if not matrix or not lp.variables:
        return 0
    return sympy.Matrix([[_sym(a) for a in row] for row in matrix]).rank()


def solve_by_enumeration(lp: RationalLP) -> Optional[Fraction]:
    """
    Brute-force optimum by enumerating every n-subset of rows

    Test oracle for small LPs (≤ 6 variables); returns None when no
    vertex is feasible.
    """
    rows = [(coeffs, rhs) for _, coeffs, rhs in _le_rows(lp)]
    rows.extend(({var: -ONE}, ZERO) for var in lp.variables)
    n = len(lp.variables)
    if n == 0:
        return ZERO if all(rhs >= 0 for _, rhs in rows) else None

    best = None
    for subset in combinations(rows, n):
        a = sympy.Matrix([[_sym(c.get(v, ZERO)) for v in lp.variables] for c, _ in subset])
        if a.rank() < n:
            continue
        b = sympy.Matrix([_sym(rhs) for _, rhs in subset])
        point = a.LUsolve(b)
        values = {v: Fraction(int(point[k].p), int(point[k].q)) for k, v in enumerate(lp.variables)}
        if any(sum((a_ * values[v] for v, a_ in c.items()), ZERO) > rhs for c, rhs in rows):
            continue
        value = lp.objective_value(values)
        if best is None or (value > best if lp.sense == "maximize" else value < best):
            best = value
    return best


# ==============================================================================
# EXPORT
# ==============================================================================

def _linear(coeffs: Dict[str, Fraction], order: Iterable[str]) -> str:
    terms = [f"{format_rational(coeffs[v])} {v}" for v in order if v in coeffs]
    return " + ".join(terms) if terms else "0"


def export_lp(lp: RationalLP) -> str:
    """Plain-text exact dump: one constraint per line, coefficients as p/q"""
    lines = [f"# {lp.name or 'lp'}: {len(lp.variables)} variables, {len(lp.constraints)} constraints"]
    lines.append(f"{lp.sense}: {_linear(lp.objective, lp.variables)}")
    for row in lp.constraints:
        lines.append(f"{row.id}: {_linear(row.coeffs, lp.variables)} {row.relation} {format_rational(row.rhs)}")
    for var in lp.variables:
        bound = lp.upper.get(var)
        upper = "inf" if bound is None else format_rational(bound)
        lines.append(f"bound {var}: 0/1 <= {var} <= {upper}")
    return "\n".join(lines) + "\n"
