# colorlab/validators.py
"""
Instance validation and the shared exception types
Includes: simple-graph checks, color partition checks, bound checks,
bipartition checks and Latin square checks
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from loguru import logger


class ColorLabError(Exception):
    """Base error carrying a machine-readable details dict"""
    def __init__(self, reason: str, details: dict = None):
        self.reason = reason
        self.details = details or {}
        super().__init__(reason)


class InstanceError(ColorLabError):
    """Raised when an instance is malformed or unsupported by an operation"""


class BudgetError(ColorLabError):
    """Raised when a lift or an exhaustive search exceeds its size limit"""


class CertificateError(ColorLabError):
    """Raised when the dual-certificate recursion hits an impossible case"""


class ConfigError(ColorLabError):
    """Raised for missing or malformed experiment configuration"""


@dataclass(frozen=True)
class Violation:
    """One broken instance invariant, naming the offending element"""
    kind: str
    element: str
    message: str

    def to_dict(self) -> Dict[str, str]:
        return {"kind": self.kind, "element": self.element, "message": self.message}


def validate(inst) -> List[Violation]:
    """
    Check every ColoredInstance invariant

    Violations are data: the list is empty iff the instance is valid.

    Args:
        inst: ColoredInstance to check

    Returns:
        List of Violation records, in a deterministic order
    """
    violations: List[Violation] = []

    vertex_counts = Counter(inst.vertices)
    for vertex, count in sorted(vertex_counts.items()):
        if count > 1:
            violations.append(Violation("duplicate-vertex", vertex, f"vertex {vertex} declared {count} times"))
    known = set(inst.vertices)

    seen_pairs: Dict[frozenset, int] = {}
    used_colors = set()
    for index, edge in enumerate(inst.edges):
        label = f"edge[{index}]={edge.u}-{edge.v}"
        if edge.u == edge.v:
            violations.append(Violation("self-loop", label, f"self-loop at {edge.u}"))
        for end in (edge.u, edge.v):
            if end not in known:
                violations.append(Violation("unknown-vertex", label, f"endpoint {end} is not a declared vertex"))
        pair = frozenset((edge.u, edge.v))
        if pair in seen_pairs:
            violations.append(Violation(
                "multi-edge", label, f"duplicates edge[{seen_pairs[pair]}] on {{{edge.u},{edge.v}}}"
            ))
        else:
            seen_pairs[pair] = index
        if edge.color not in inst.bounds:
            violations.append(Violation("unknown-color", label, f"color {edge.color} has no bound"))
        used_colors.add(edge.color)

    for color in sorted(inst.bounds):
        bound = inst.bounds[color]
        if color not in used_colors:
            violations.append(Violation("unused-color", color, f"color {color} has no edges"))
        if bound < 1:
            violations.append(Violation("bound-below-one", color, f"bound {bound} < 1"))

    if inst.bipartition is not None:
        left, right = set(inst.bipartition[0]), set(inst.bipartition[1])
        if left & right:
            violations.append(Violation(
                "bipartition-overlap", ",".join(sorted(left & right)), "vertices on both sides"
            ))
        for index, edge in enumerate(inst.edges):
            crosses = (edge.u in left and edge.v in right) or (edge.u in right and edge.v in left)
            if not crosses:
                violations.append(Violation(
                    "bipartition-crossing", f"edge[{index}]={edge.u}-{edge.v}", "edge does not cross the bipartition"
                ))

    if violations:
        logger.debug(f"Instance has {len(violations)} violation(s): {[v.kind for v in violations]}")
    return violations


def require_valid(inst) -> None:
    """Raise InstanceError listing all violations when inst is invalid"""
    violations = validate(inst)
    if violations:
        raise InstanceError(
            f"Instance is invalid ({len(violations)} violation(s))",
            {"violations": [v.to_dict() for v in violations]},
        )


def validate_latin_square(table: Sequence[Sequence]) -> None:
    """
    Check that table is a Latin square of order len(table)

    Raises:
        InstanceError: If a row has the wrong length or a symbol repeats
            in a row or column, or the symbol set differs between rows
    """
    order = len(table)
    if order == 0:
        raise InstanceError("Latin square must have order >= 1")
    symbols = set(table[0])
    if len(symbols) != order:
        raise InstanceError("Row 0 repeats a symbol", {"row": 0})
    for i, row in enumerate(table):
        if len(row) != order:
            raise InstanceError(f"Row {i} has length {len(row)}, expected {order}", {"row": i})
        if set(row) != symbols:
            raise InstanceError(f"Row {i} does not use each symbol exactly once", {"row": i})
    for j in range(order):
        column = {table[i][j] for i in range(order)}
        if column != symbols:
            raise InstanceError(f"Column {j} does not use each symbol exactly once", {"column": j})


def bound_is_integral(bound: Fraction) -> bool:
    return bound.denominator == 1
