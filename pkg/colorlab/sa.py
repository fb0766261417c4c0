# colorlab/sa.py
"""
Sherali-Adams lifting of M_c
Includes: explicit level-ψ lift, sparse candidate moment vectors for the
hypercube family, a closed-form feasibility checker and the explicit
enumeration checker it is cross-validated against
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from loguru import logger

from colorlab.config import get_sa_budget
from colorlab.generators import gen_hypercube
from colorlab.model import ColoredInstance, format_rational
from colorlab.ratlp import RationalLP, build_mc
from colorlab.validators import BudgetError, InstanceError

Subset = Tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)
EMPTY: Subset = ()


# ==============================================================================
# TYPES
# ==============================================================================

@dataclass
class MomentVector:
    """
    Sparse map from sorted index subsets to rationals

    Absent subsets read as 0 and y_∅ is 1.
    """
    entries: Dict[Subset, Fraction]
    level: int

    def __post_init__(self):
        self.entries = {tuple(sorted(k)): Fraction(v) for k, v in self.entries.items()}
        self.entries.setdefault(EMPTY, ONE)
        if self.entries[EMPTY] != 1:
            raise InstanceError("Moment vector must have y_∅ = 1")
        for subset, value in self.entries.items():
            if len(subset) > self.level + 1 and value:
                raise InstanceError(
                    f"Subset {subset} exceeds level {self.level}",
                    {"subset": list(subset), "level": self.level},
                )
            if not ZERO <= value <= ONE:
                raise InstanceError(f"Moment y{subset} = {value} outside [0,1]", {"subset": list(subset)})

    def __getitem__(self, subset: Subset) -> Fraction:
        return self.entries.get(subset, ZERO)

    def is_sparse(self) -> bool:
        return all(not value for subset, value in self.entries.items() if len(subset) >= 2)

    def singletons(self, n: int) -> List[Fraction]:
        return [self[(j,)] for j in range(n)]


@dataclass(frozen=True)
class LiftedRow:
    """One linearized product row: Σ coeffs[S]·y_S + const >= 0"""
    base: str
    gamma: Subset
    delta: Subset
    coeffs: Dict[Subset, Fraction]
    const: Fraction

    @property
    def id(self) -> str:
        return f"{self.base}|G{list(self.gamma)}|D{list(self.delta)}"

    def evaluate(self, mv: MomentVector) -> Fraction:
        return self.const + sum((a * mv[s] for s, a in self.coeffs.items()), ZERO)


@dataclass
class CheckResult:
    """feasible, or violated with the first witness row"""
    status: str
    level: int
    witness: Optional[dict] = None
    rows_checked: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_dict(self) -> dict:
        data = {"level": self.level, "status": self.status}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


# ==============================================================================
# LIFT
# ==============================================================================

def lifted_size(n: int, psi: int) -> int:
    """Number of subset variables y_I with |I| <= ψ+1 (∅ included)"""
    return sum(math.comb(n, i) for i in range(min(n, psi + 1) + 1))


def _check_budget(n: int, psi: int, budget: Optional[int]) -> None:
    limit = get_sa_budget(budget)
    size = lifted_size(n, psi)
    if size > limit:
        raise BudgetError(
            f"SA level {psi} over {n} variables needs {size} lifted variables, budget is {limit}",
            {"lifted_variables": size, "budget": limit, "level": psi, "variables": n},
        )


def base_rows(lp: RationalLP) -> List[Tuple[str, Dict[int, Fraction], Fraction]]:
    """
    Constraints of lp in b - a·x >= 0 form over variable indices

    Box rows x_j >= 0 and 1 - x_j >= 0 follow the LP's own constraints.
    """
    index = {v: j for j, v in enumerate(lp.variables)}
    for var in lp.variables:
        if lp.upper.get(var) != 1:
            raise InstanceError(f"SA lifting needs [0,1] variables; {var} has upper {lp.upper.get(var)}")
    rows = []
    for row in lp.constraints:
        coeffs = {index[v]: a for v, a in row.coeffs.items()}
        if row.relation in ("<=", "="):
            rows.append((row.id, coeffs, row.rhs))
        if row.relation in (">=", "="):
            suffix = "~" if row.relation == "=" else ""
            rows.append((row.id + suffix, {j: -a for j, a in coeffs.items()}, -row.rhs))
    for j, var in enumerate(lp.variables):
        rows.append((f"box:lo:{var}", {j: -ONE}, ZERO))
        rows.append((f"box:hi:{var}", {j: ONE}, ONE))
    return rows


def multiplier_pairs(n: int, psi: int) -> Iterator[Tuple[Subset, Subset]]:
    """Every disjoint (Γ, Δ) with |Γ| + |Δ| <= ψ, in a fixed order"""
    for size in range(0, min(n, psi) + 1):
        for support in combinations(range(n), size):
            for sides in product((0, 1), repeat=size):
                gamma = tuple(i for i, side in zip(support, sides) if side == 0)
                delta = tuple(i for i, side in zip(support, sides) if side == 1)
                yield gamma, delta


def linearize(coeffs: Dict[int, Fraction], rhs: Fraction, gamma: Subset, delta: Subset) -> Tuple[Dict[Subset, Fraction], Fraction]:
    """
    Expand (b - a·x)·∏_Γ x·∏_Δ (1 - x) with x² = x into subset variables

    Returns:
        (coefficients by subset, constant from y_∅)
    """
    terms: Dict[Subset, Fraction] = {}
    const = ZERO
    base = set(gamma)
    for size in range(len(delta) + 1):
        for h in combinations(delta, size):
            sign = -ONE if size % 2 else ONE
            core = base.union(h)
            key = tuple(sorted(core))
            if key == EMPTY:
                const += sign * rhs
            else:
                terms[key] = terms.get(key, ZERO) + sign * rhs
            for j, a in coeffs.items():
                key = tuple(sorted(core | {j}))
                terms[key] = terms.get(key, ZERO) - sign * a
    return {k: v for k, v in terms.items() if v}, const


def iter_lifted_rows(lp: RationalLP, psi: int) -> Iterator[LiftedRow]:
    """Every lifted row, base rows outermost so the first violation is reproducible"""
    n = len(lp.variables)
    pairs = list(multiplier_pairs(n, psi))
    for base_id, coeffs, rhs in base_rows(lp):
        for gamma, delta in pairs:
            lifted, const = linearize(coeffs, rhs, gamma, delta)
            yield LiftedRow(base_id, gamma, delta, lifted, const)


def subset_var(lp: RationalLP, subset: Subset) -> str:
    """Singletons keep the original variable name, so y_{i} = x_i holds by construction"""
    if len(subset) == 1:
        return lp.variables[subset[0]]
    return "y[" + ",".join(lp.variables[j] for j in subset) + "]"


def sa_lift(lp: RationalLP, psi: int, budget: Optional[int] = None) -> RationalLP:
    """
    Level-ψ Sherali-Adams lift of a [0,1] LP

    Args:
        lp: LP whose variables all lie in [0,1]
        psi: Level ψ >= 1
        budget: Lifted-variable budget (default: COLORLAB_BUDGET)

    Returns:
        RationalLP over y_I, |I| <= ψ+1, with the original objective on the
        singletons

    Raises:
        BudgetError: If the lifted variable count exceeds the budget
    """
    if psi < 1:
        raise InstanceError("SA level must be >= 1", {"level": psi})
    n = len(lp.variables)
    _check_budget(n, psi, budget)

    subsets = [s for size in range(1, min(n, psi + 1) + 1) for s in combinations(range(n), size)]
    names = {s: subset_var(lp, s) for s in subsets}
    lifted = RationalLP(
        variables=[names[s] for s in subsets],
        objective=dict(lp.objective),
        sense=lp.sense,
        upper={names[s]: ONE for s in subsets},
        name=f"sa{psi}:{lp.name}",
    )
    trivial = 0
    for row in iter_lifted_rows(lp, psi):
        if not row.coeffs:
            if row.const < 0:
                lifted.add(row.id, {}, ">=", -row.const)
            else:
                trivial += 1
            continue
        lifted.add(row.id, {names[s]: a for s, a in row.coeffs.items()}, ">=", -row.const)
    logger.info(
        f"✅ SA level {psi}: {len(lifted.variables)} variables, "
        f"{len(lifted.constraints)} rows ({trivial} trivial rows skipped)"
    )
    return lifted


# ==============================================================================
# CANDIDATE VECTORS
# ==============================================================================

def rho(ell: int, psi: int, eps: Fraction) -> Fraction:
    """ρ = (1−ε)/(2^{ℓ−2} + ψ(1−ε))"""
    eps = Fraction(eps)
    return (1 - eps) / (2 ** (ell - 2) + psi * (1 - eps))


def hypercube_dimension(inst: ColoredInstance, eps: Fraction) -> int:
    """ℓ for an instance equal to gen_hypercube(ℓ, ε); InstanceError otherwise"""
    count = len(inst.vertices)
    ell = count.bit_length() - 1
    if count < 4 or 2 ** ell != count:
        raise InstanceError("Candidate vectors exist only for the hypercube family", {"vertices": count})
    reference = gen_hypercube(ell, eps)
    if (inst.vertices, inst.edges, inst.bounds) != (reference.vertices, reference.edges, reference.bounds):
        raise InstanceError(
            "Instance is not gen_hypercube(ℓ, ε)",
            {"l": ell, "eps": format_rational(Fraction(eps))},
        )
    return ell


def candidate_vector(inst: ColoredInstance, psi: int, eps: Fraction) -> MomentVector:
    """y_∅ = 1, y_{e} = ρ on every edge, zero on larger subsets"""
    if psi < 0:
        raise InstanceError("Level must be >= 0", {"level": psi})
    ell = hypercube_dimension(inst, eps)
    value = rho(ell, psi, eps)
    return MomentVector({(j,): value for j in range(inst.num_edges)}, level=psi)


def moment_value(inst: ColoredInstance, mv: MomentVector) -> Fraction:
    """Objective Σ p_e y_{e} of a moment vector"""
    return sum((e.profit * mv[(j,)] for j, e in enumerate(inst.edges)), ZERO)


def candidate_limit_value(ell: int, psi: int) -> Fraction:
    """
    lim_{ε→0} of the candidate objective ℓ·2^{ℓ−1}·ρ, computed symbolically
    """
    eps = sympy.Symbol("epsilon", positive=True)
    expr = ell * 2 ** (ell - 1) * (1 - eps) / (2 ** (ell - 2) + psi * (1 - eps))
    limit = sympy.nsimplify(sympy.limit(expr, eps, 0))
    return Fraction(int(limit.p), int(limit.q))


def matching_moment_vector(inst: ColoredInstance, edges: Sequence[int], psi: int) -> MomentVector:
    """Integral point of a matching: y_I = 1 iff I ⊆ matching, |I| <= ψ+1"""
    chosen = sorted(set(edges))
    entries = {}
    for size in range(1, min(len(chosen), psi + 1) + 1):
        for subset in combinations(chosen, size):
            entries[subset] = ONE
    return MomentVector(entries, level=psi)


# ==============================================================================
# CHECKERS
# ==============================================================================

def check_explicit(inst: ColoredInstance, mv: MomentVector, psi: int, budget: Optional[int] = None) -> CheckResult:
    """
    Substitute mv into every explicitly generated level-ψ row

    Raises:
        BudgetError: Same budget rule as sa_lift
    """
    lp = build_mc(inst)
    _check_budget(len(lp.variables), psi, budget)
    checked = 0
    for row in iter_lifted_rows(lp, psi):
        checked += 1
        value = row.evaluate(mv)
        if value < 0:
            witness = {
                "row": row.base,
                "gamma": list(row.gamma),
                "delta": list(row.delta),
                "value": format_rational(value),
            }
            logger.debug(f"Explicit check: level {psi} violated at {row.id} ({value})")
            return CheckResult("violated", psi, witness, checked)
    return CheckResult("feasible", psi, None, checked)


def check_closed_form(inst: ColoredInstance, mv: MomentVector, psi: int) -> CheckResult:
    """
    Evaluate all level-ψ rows of a sparse vector without enumerating subsets

    With y zero on |I| >= 2, a row (b, a) multiplied by (Γ, Δ) reduces to:
      |Γ| >= 2  ->  0
      Γ = {g}   ->  r_g (b − a_g)
      Γ = ∅     ->  b − a·r − Σ_{h∈Δ} r_h (b − a_h)
    so the worst Δ takes the min(ψ, n) largest positive r_h (b − a_h).
    Δ ranges over any indices, so the worst case is always realizable.

    Raises:
        InstanceError: If mv carries a nonzero entry on |I| >= 2
    """
    if not mv.is_sparse():
        raise InstanceError("Closed-form check needs a moment vector that is zero on |I| >= 2")
    lp = build_mc(inst)
    n = len(lp.variables)
    r = mv.singletons(n)
    checked = 0
    for base_id, coeffs, rhs in base_rows(lp):
        checked += 1
        slack_terms = [(r[h] * (rhs - coeffs.get(h, ZERO)), h) for h in range(n)]
        if psi >= 1:
            for g in range(n):
                value = slack_terms[g][0]
                if value < 0:
                    witness = {"row": base_id, "gamma": [g], "delta": [], "value": format_rational(value)}
                    return CheckResult("violated", psi, witness, checked)
        positive = sorted((t for t in slack_terms if t[0] > 0), key=lambda t: (-t[0], t[1]))[:psi]
        value = rhs - sum((coeffs[j] * r[j] for j in coeffs), ZERO) - sum((t for t, _ in positive), ZERO)
        if value < 0:
            witness = {
                "row": base_id,
                "gamma": [],
                "delta": sorted(h for _, h in positive),
                "value": format_rational(value),
            }
            logger.debug(f"Closed-form check: level {psi} violated at {base_id} ({value})")
            return CheckResult("violated", psi, witness, checked)
    return CheckResult("feasible", psi, None, checked)


def eps_sweep(ell: int, psi: int, eps_values: Sequence[Fraction]) -> List[dict]:
    """Candidate ρ, value and closed-form verdict per ε"""
    results = []
    for eps in eps_values:
        inst = gen_hypercube(ell, eps)
        mv = candidate_vector(inst, psi, eps)
        verdict = check_closed_form(inst, mv, psi)
        results.append({
            "eps": format_rational(eps),
            "rho": format_rational(mv[(0,)]),
            "value": format_rational(moment_value(inst, mv)),
            "status": verdict.status,
            "witness": verdict.witness,
        })
    return results
