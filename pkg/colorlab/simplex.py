# colorlab/simplex.py
"""
Exact active-set primal simplex over Fractions

Solves   maximize c·x   subject to   a_i·x <= b_i   for explicit rows.
Variables are free; callers pass nonnegativity as rows (-x_j <= 0) and
name them in `lower_rows` so x = 0 can serve as the starting vertex.
The basis is a set of n tight rows with A_B^{-1} kept exactly; pivots use
Bland's rule on row indices, so the run is deterministic and never cycles.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from loguru import logger

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Row:
    id: str
    coeffs: Tuple[Tuple[int, Fraction], ...]
    rhs: Fraction

    def dot(self, vector: Sequence[Fraction]) -> Fraction:
        total = ZERO
        for k, a in self.coeffs:
            value = vector[k]
            if value:
                total += a * value
        return total


@dataclass
class EngineResult:
    status: str
    x: List[Fraction] = field(default_factory=list)
    basis: List[int] = field(default_factory=list)
    iterations: int = 0


class ActiveSetSimplex:
    """
    Row-basis simplex with an exact basis inverse

    Args:
        rows: Constraint rows a_i·x <= b_i
        n: Number of variables
        objective: Dense objective vector c (maximized)
        lower_rows: lower_rows[j] is the index of the row -x_j <= 0
        max_iterations: Optional safety cap; None means unlimited
    """

    def __init__(
        self,
        rows: List[Row],
        n: int,
        objective: Sequence[Fraction],
        lower_rows: Sequence[int],
        max_iterations: Optional[int] = None,
    ):
        if len(lower_rows) != n:
            raise ValueError("every variable needs a nonnegativity row")
        self.rows = rows
        self.n = n
        self.objective = [Fraction(c) for c in objective]
        self.lower_rows = list(lower_rows)
        self.max_iterations = max_iterations
        self.iterations = 0

    # ------------------------------------------------------------------
    # public entry
    # ------------------------------------------------------------------

    def run(self) -> EngineResult:
        if self.n == 0:
            if all(row.rhs >= 0 for row in self.rows):
                return EngineResult("optimal", [], [], 0)
            return EngineResult("infeasible")

        if all(row.rhs >= 0 for row in self.rows):
            basis = list(self.lower_rows)
            inverse = [[-ONE if k == p else ZERO for p in range(self.n)] for k in range(self.n)]
            x = [ZERO] * self.n
        else:
            start = self._phase_one()
            if start is None:
                return EngineResult("infeasible", iterations=self.iterations)
            basis, inverse, x = start

        slack = [row.rhs - row.dot(x) for row in self.rows]
        status = self._optimize(self.rows, self.objective, basis, inverse, x, slack)
        logger.debug(f"Simplex finished: {status} after {self.iterations} pivots")
        if status != "optimal":
            return EngineResult(status, iterations=self.iterations)
        return EngineResult("optimal", x, basis, self.iterations)

    # ------------------------------------------------------------------
    # phase 1: one artificial variable t, maximize -t
    # ------------------------------------------------------------------

    def _phase_one(self):
        n = self.n
        t = n
        negative = [i for i, row in enumerate(self.rows) if row.rhs < 0]
        rows = []
        for i, row in enumerate(self.rows):
            if row.rhs < 0:
                rows.append(Row(row.id, row.coeffs + ((t, -ONE),), row.rhs))
            else:
                rows.append(row)
        t_row = len(rows)
        rows.append(Row("__artificial__", ((t, -ONE),), ZERO))

        t0 = max(-self.rows[i].rhs for i in negative)
        start_row = min(i for i in negative if -self.rows[i].rhs == t0)

        size = n + 1
        inverse = [[ZERO] * size for _ in range(size)]
        for k in range(n):
            inverse[k][k] = -ONE
        for k, a in self.rows[start_row].coeffs:
            inverse[t][k] = -a
        inverse[t][t] = -ONE
        basis = list(self.lower_rows) + [start_row]
        x = [ZERO] * n + [t0]
        slack = [row.rhs - row.dot(x) for row in rows]

        objective = [ZERO] * n + [-ONE]
        status = self._optimize(rows, objective, basis, inverse, x, slack)
        if status != "optimal" or x[t] > 0:
            logger.debug(f"Phase 1 ended with t = {x[t]}: infeasible")
            return None

        if t_row not in basis:
            position = min(p for p in range(size) if inverse[t][p] != 0)
            self._pivot(rows, inverse, basis, position, t_row)

        drop = basis.index(t_row)
        reduced_basis = [r for p, r in enumerate(basis) if p != drop]
        reduced_inverse = [[inverse[k][j] for j in range(size) if j != drop] for k in range(n)]
        return reduced_basis, reduced_inverse, x[:n]

    # ------------------------------------------------------------------
    # core loop
    # ------------------------------------------------------------------

    def _optimize(self, rows, objective, basis, inverse, x, slack) -> str:
        n = len(x)
        in_basis = set(basis)
        active = [(j, c) for j, c in enumerate(objective) if c]

        while True:
            if self.max_iterations is not None and self.iterations >= self.max_iterations:
                logger.warning(f"⚠️ Simplex iteration cap {self.max_iterations} reached")
                return "iteration_limit"

            # multipliers lambda = c^T A_B^{-1}; leave the smallest row id with lambda < 0
            position = None
            for p in range(n):
                multiplier = ZERO
                for j, c in active:
                    entry = inverse[j][p]
                    if entry:
                        multiplier += c * entry
                if multiplier < 0 and (position is None or basis[p] < basis[position]):
                    position = p
            if position is None:
                return "optimal"

            direction = [-inverse[k][position] for k in range(n)]

            entering = None
            best_ratio = None
            rates = {}
            for i, row in enumerate(rows):
                if i in in_basis:
                    continue
                rate = row.dot(direction)
                if rate:
                    rates[i] = rate
                if rate > 0:
                    ratio = slack[i] / rate
                    if best_ratio is None or ratio < best_ratio:
                        best_ratio, entering = ratio, i
            if entering is None:
                return "unbounded"

            step = best_ratio
            if step:
                for k in range(n):
                    if direction[k]:
                        x[k] += step * direction[k]
                for i, rate in rates.items():
                    slack[i] -= step * rate
                slack[basis[position]] += step
            slack[entering] = ZERO

            self._pivot(rows, inverse, basis, position, entering)
            in_basis = set(basis)

    def _pivot(self, rows, inverse, basis, position, entering) -> None:
        """Replace basis[position] by row `entering`, updating A_B^{-1} in place"""
        n = len(inverse)
        row = rows[entering]
        alpha = []
        for j in range(n):
            total = ZERO
            for k, a in row.coeffs:
                entry = inverse[k][j]
                if entry:
                    total += a * entry
            alpha.append(total)
        pivot = alpha[position]
        column = [inverse[k][position] / pivot for k in range(n)]
        for j in range(n):
            factor = alpha[j]
            if j == position or not factor:
                continue
            for k in range(n):
                if column[k]:
                    inverse[k][j] -= column[k] * factor
        for k in range(n):
            inverse[k][position] = column[k]
        basis[position] = entering
        self.iterations += 1
