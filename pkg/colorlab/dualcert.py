# colorlab/dualcert.py
"""
Dual certificates for the hypergraph matching LP
Includes: support hypergraphs, the low-degree vertex search, BC_H
recognition, exact μ and q oracles, the recursive certificate builder and
an independent verifier.

A certificate is a fractional vertex cover y of the 3-uniform cast whose
value is at most 5μ/3 + q/3 (3μ/2 + q/2 for bipartite graphs).
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from loguru import logger

from colorlab.bichrom import EdgeRecord, enumerate_bc, find_alternating_cycles
from colorlab.model import ColoredInstance, HyperEdge, Hypergraph3, color_vertex, format_rational, graph_vertex
from colorlab.oracle import max_set_packing
from colorlab.ratlp import BasicSolution, build_dual, build_hm, hyper_var, solve, tight_rank
from colorlab.validators import CertificateError

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

Weights = Dict[str, Fraction]


# ==============================================================================
# TYPES
# ==============================================================================

@dataclass(frozen=True)
class SupportHypergraph:
    """Hyperedges with x_e > 0 and their values"""
    edges: Tuple[HyperEdge, ...]
    values: Dict[HyperEdge, Fraction] = field(default_factory=dict, compare=False, hash=False)

    def incident(self, vertex: str) -> List[HyperEdge]:
        return [e for e in self.edges if vertex in e.vertices]

    @property
    def fractional(self) -> bool:
        return all(0 < self.values[e] < 1 for e in self.edges)


@dataclass
class DualCertificate:
    """
    weights cover every hyperedge; value = Σ weights

    full_disjointness records how q was counted: copies of BC_H must
    share neither graph vertices nor color vertices.
    """
    weights: Weights
    value: Fraction
    mu: int
    q: int
    bipartite: bool = False
    trace: List[dict] = field(default_factory=list)
    full_disjointness: bool = True

    @property
    def bound(self) -> Fraction:
        return theorem_bound(self.mu, self.q, self.bipartite)

    def to_dict(self) -> dict:
        return {
            "value": format_rational(self.value),
            "mu": self.mu,
            "q": self.q,
            "bound": format_rational(self.bound),
            "bipartite": self.bipartite,
            "q_disjointness": "graph-and-color" if self.full_disjointness else "graph-only",
            "weights": {v: format_rational(w) for v, w in sorted(self.weights.items())},
            "trace": self.trace,
        }


def theorem_bound(mu: int, q: int, bipartite: bool = False) -> Fraction:
    if bipartite:
        return Fraction(3 * mu, 2) + Fraction(q, 2)
    return Fraction(5 * mu, 3) + Fraction(q, 3)


# ==============================================================================
# SUPPORT AND LOW-DEGREE VERTICES
# ==============================================================================

def hyperedge_values(h: Hypergraph3, sol: BasicSolution) -> Dict[HyperEdge, Fraction]:
    """Map the build_hm(h) solution onto the hyperedges"""
    return {he: sol.values.get(hyper_var(i), ZERO) for i, he in enumerate(h.hyperedges)}


def support_of(h: Hypergraph3, sol: BasicSolution) -> SupportHypergraph:
    """L_H: hyperedges of h with x_e > 0"""
    values = hyperedge_values(h, sol)
    edges = tuple(he for he in h.hyperedges if values[he] > 0)
    return SupportHypergraph(edges, {he: values[he] for he in edges})


def low_degree_vertex(s: SupportHypergraph) -> Tuple[str, List[HyperEdge]]:
    """
    A vertex of degree 1, else of degree 2, in the support; least id first

    Raises:
        CertificateError: If the support is empty or every vertex has
            degree >= 3 (x is then not a basic solution)
    """
    if not s.edges:
        raise CertificateError("Empty support has no low-degree vertex")
    degree = Counter(v for e in s.edges for v in e.vertices)
    for wanted in (1, 2):
        candidates = sorted(v for v, d in degree.items() if d == wanted)
        if candidates:
            vertex = candidates[0]
            return vertex, s.incident(vertex)
    raise CertificateError(
        "No support vertex of degree <= 2: solution is not basic",
        {
            "support": [sorted(e.vertices) for e in s.edges],
            "values": {"|".join(e.key): format_rational(s.values[e]) for e in s.edges},
        },
    )


def delta(vertex: str, incident: Sequence[HyperEdge]) -> Weights:
    """δ_v(u): number of edges of E(v) containing u, for u ≠ v"""
    counts = Counter(u for e in incident for u in e.vertices if u != vertex)
    return {u: Fraction(c) for u, c in counts.items()}


# ==============================================================================
# BC_H AND ORACLES
# ==============================================================================

def _records(edges: Sequence[HyperEdge]) -> List[EdgeRecord]:
    records = []
    for he in edges:
        u, v = he.graph_vertices
        records.append(EdgeRecord(u, v, he.color_vertex, he))
    return records


def is_bc(edges: Sequence[HyperEdge]) -> bool:
    """True iff edges are the cast of one alternating bi-chromatic 4-cycle"""
    edges = list(edges)
    if len(edges) != 4 or len(set(edges)) != 4:
        return False
    graph = {v for e in edges for v in e.graph_vertices}
    colors = {e.color_vertex for e in edges}
    if len(graph) != 4 or len(colors) != 2:
        return False
    return len(find_alternating_cycles(_records(edges))) == 1


def mu_oracle(h: Hypergraph3, limit: Optional[int] = None) -> int:
    """Exact maximum hypergraph matching size"""
    size, _ = max_set_packing([he.vertices for he in h.hyperedges], limit)
    return size


def q_of_hypergraph(h: Hypergraph3, limit: Optional[int] = None) -> int:
    """Maximum number of fully vertex-disjoint BC_H copies inside h"""
    cycles = find_alternating_cycles(_records(h.hyperedges))
    sets = [frozenset().union(*(he.vertices for he in cycle.edges)) for cycle in cycles]
    size, _ = max_set_packing(sets, limit)
    return size


def q_oracle(inst: ColoredInstance, limit: Optional[int] = None) -> int:
    """
    Maximum number of bi-chromatic 4-cycles sharing no vertex and no color

    Raises:
        BudgetError: If there are more cycles than the packing limit
    """
    sets = []
    for cycle in enumerate_bc(inst):
        sets.append(frozenset(graph_vertex(v) for v in cycle.vertices)
                    | frozenset(color_vertex(c) for c in cycle.colors))
    size, _ = max_set_packing(sets, limit)
    return size


# ==============================================================================
# CERTIFICATE RECURSION
# ==============================================================================

def _add(*parts: Weights, scale: Fraction = ONE) -> Weights:
    total: Weights = {}
    for part in parts:
        for vertex, weight in part.items():
            total[vertex] = total.get(vertex, ZERO) + weight
    return {v: w * scale for v, w in total.items() if w}


def _covers(weights: Weights, edges: Sequence[HyperEdge]) -> Optional[HyperEdge]:
    """First edge left uncovered, or None"""
    for he in edges:
        if sum((weights.get(v, ZERO) for v in he.vertices), ZERO) < 1:
            return he
    return None


class CertificateBuilder:
    """
    Recursive certificate construction on one hypergraph

    Every node covers all of its own hyperedges. When a node's case
    formula fails to cover them or exceeds the node's bound, the node
    switches to the exact optimal dual of its sub-hypergraph and the
    trace records the fallback.
    """

    def __init__(self, h: Hypergraph3, bipartite: bool = False, mu_limit: Optional[int] = None):
        self.h = h
        self.bipartite = bipartite
        self.mu_limit = mu_limit
        self.trace: List[dict] = []
        self._memo: Dict[FrozenSet[HyperEdge], Weights] = {}
        self._mu: Dict[FrozenSet[HyperEdge], int] = {}

    # ------------------------------------------------------------------
    # helpers
    # ------------------------------------------------------------------

    def _sub(self, edges: Sequence[HyperEdge]) -> Hypergraph3:
        return self.h.restrict(edges)

    def mu(self, edges: Sequence[HyperEdge]) -> int:
        key = frozenset(edges)
        if key not in self._mu:
            self._mu[key] = mu_oracle(self._sub(edges), self.mu_limit)
        return self._mu[key]

    def exact_dual(self, edges: Sequence[HyperEdge]) -> Weights:
        solution = solve(build_dual(self._sub(edges)))
        if solution.status != "optimal":
            raise CertificateError(f"Covering dual is {solution.status}", {"edges": len(edges)})
        return {var[2:]: value for var, value in solution.values.items() if value}

    def _solve_node(self, edges: Sequence[HyperEdge]) -> Dict[HyperEdge, Fraction]:
        sub = self._sub(edges)
        solution = solve(build_hm(sub))
        return hyperedge_values(sub, solution)

    def _is_basic(self, edges: Sequence[HyperEdge], x: Dict[HyperEdge, Fraction]) -> bool:
        sub = self._sub(edges)
        values = {hyper_var(i): x[he] for i, he in enumerate(sub.hyperedges)}
        return tight_rank(build_hm(sub), values) == len(edges)

    # ------------------------------------------------------------------
    # recursion
    # ------------------------------------------------------------------

    def certify(
        self,
        edges: Sequence[HyperEdge],
        x: Optional[Dict[HyperEdge, Fraction]] = None,
        depth: int = 0,
    ) -> Weights:
        """Cover of `edges` built from the basic solution x (re-solved if not basic)"""
        edges = tuple(edges)
        if not edges:
            return {}
        if depth > len(self.h.hyperedges):
            raise CertificateError("Recursion deeper than the hyperedge count", {"depth": depth})
        key = frozenset(edges)
        if key in self._memo:
            self.trace.append({"depth": depth, "edges": len(edges), "case": "memo"})
            return self._memo[key]

        entry = {"depth": depth, "edges": len(edges)}
        self.trace.append(entry)
        if x is not None:
            x = {he: x[he] for he in edges}
            entry["restricted_basic"] = self._is_basic(edges, x)
            if not entry["restricted_basic"]:
                x = None
        if x is None:
            x = self._solve_node(edges)
            entry["resolved"] = True

        mu = self.mu(edges)
        q = q_of_hypergraph(self._sub(edges), self.mu_limit)
        bound = theorem_bound(mu, q, self.bipartite)
        entry.update({"mu": mu, "q": q, "bound": format_rational(bound)})

        weights = self._candidate(edges, x, mu, depth, entry)
        value = sum(weights.values(), ZERO)
        uncovered = _covers(weights, edges)
        if uncovered is not None or value > bound:
            entry["fallback"] = "uncovered" if uncovered is not None else "over-bound"
            entry["case_value"] = format_rational(value)
            weights = self.exact_dual(edges)
            value = sum(weights.values(), ZERO)
        if value > bound:
            entry["bound_exceeded"] = True
            logger.error(f"❌ Node optimum {value} exceeds bound {bound} (μ={mu}, q={q})")
        entry["value"] = format_rational(value)
        logger.debug(f"Certificate node depth={depth} case={entry.get('case')} value={value}")

        self._memo[key] = weights
        return weights

    def _candidate(self, edges, x, mu, depth, entry) -> Weights:
        ones = [he for he in edges if x[he] == 1]
        if ones:
            return self._peel(edges, ones[0], x, depth, entry)

        support = SupportHypergraph(
            tuple(he for he in edges if x[he] > 0),
            {he: x[he] for he in edges if x[he] > 0},
        )
        if mu == 1:
            if is_bc(edges):
                vertex = sorted(v for v in self._sub(edges).color_vertices)[0]
                entry.update({"case": "base-bc", "vertex": vertex})
                incident = [he for he in edges if vertex in he.vertices]
                return _add(delta(vertex, incident), scale=HALF)
            entry["case"] = "base-exact"
            return self.exact_dual(edges)

        vertex, incident = low_degree_vertex(support)
        entry["vertex"] = vertex
        near = delta(vertex, incident)

        if len(incident) == 1:
            entry["case"] = "degree-1"
            y1 = self._recurse(edges, incident[0], x, depth)
            return _add(near, y1)

        e1, e2 = incident
        one_sided = any(
            e1.meets(f) != e2.meets(f) for f in support.edges if f not in (e1, e2)
        )
        y1 = self._recurse(edges, e1, x, depth)
        y2 = self._recurse(edges, e2, x, depth)
        if one_sided:
            entry["case"] = "degree-2-split"
            return _add(near, y1, y2, scale=HALF)

        r1 = [f for f in support.edges if f.meets(e1)]
        r2 = [f for f in support.edges if f.meets(e2)]
        bc1, bc2 = is_bc(r1), is_bc(r2)
        if bc1 != bc2:
            raise CertificateError(
                "Exactly one of R(e1), R(e2) is a bi-chromatic 4-cycle",
                {
                    "vertex": vertex,
                    "e1": sorted(e1.vertices),
                    "e2": sorted(e2.vertices),
                    "R1": [sorted(f.vertices) for f in r1],
                    "R2": [sorted(f.vertices) for f in r2],
                },
            )
        if bc1:
            entry["case"] = "degree-2-bc"
            return _add(near, y1, y2, scale=HALF)
        entry["case"] = "degree-2-base"
        y_r1, y_r2 = self.base_duals((r1, r2), entry)
        return _add(y_r1, y_r2, y1, y2, scale=HALF)

    def base_duals(self, parts: Sequence[Sequence[HyperEdge]], entry: dict) -> List[Weights]:
        """
        Exact duals of the base sub-instances R(e1), R(e2)

        Each optimum is checked against 5μ/3 + q/3 (3μ/2 + q/2 bipartite)
        of its own part and recorded under entry["base"].
        """
        duals, records = [], []
        for part in parts:
            weights = self.exact_dual(part)
            value = sum(weights.values(), ZERO)
            sub = self._sub(part)
            mu = self.mu(part)
            q = q_of_hypergraph(sub, self.mu_limit)
            bound = theorem_bound(mu, q, self.bipartite)
            record = {
                "edges": len(part),
                "mu": mu,
                "q": q,
                "value": format_rational(value),
                "bound": format_rational(bound),
            }
            if value > bound:
                record["bound_exceeded"] = True
                entry["base_bound_exceeded"] = True
                logger.error(f"❌ Base optimum {value} exceeds {bound} (μ={mu}, q={q})")
            records.append(record)
            duals.append(weights)
        entry["base"] = records
        return duals

    def _recurse(self, edges, removed: HyperEdge, x, depth) -> Weights:
        """Certificate for H(e): the edges disjoint from `removed`"""
        rest = [he for he in edges if not he.meets(removed)]
        return self.certify(rest, x, depth + 1)

    def _peel(self, edges, edge: HyperEdge, x, depth, entry) -> Weights:
        """x_e = 1: cover the edges meeting e, recurse on the rest"""
        touching = [he for he in edges if he.meets(edge)]
        entry["case"] = "peel"
        vertex = next((v for v in sorted(edge.vertices) if all(v in he.vertices for he in touching)), None)
        if vertex is not None:
            entry["vertex"] = vertex
            cover = {vertex: ONE}
        else:
            cover = self.exact_dual(touching)
        rest = self._recurse(edges, edge, x, depth)
        return _add(cover, rest)


def build_certificate(
    h: Hypergraph3,
    sol: BasicSolution,
    bipartite: bool = False,
    mu_limit: Optional[int] = None,
) -> DualCertificate:
    """
    Certificate from an optimal basic solution of build_hm(h)

    Args:
        h: Hypergraph cast of a unit-bound instance
        sol: Optimal BasicSolution of build_hm(h)
        bipartite: Use the bipartite bound 3μ/2 + q/2
        mu_limit: Packing limit for the μ and q oracles

    Raises:
        CertificateError: If sol is not optimal or a recursion step finds
            a configuration the case analysis excludes
        BudgetError: If μ or q exceed the exhaustive limit
    """
    if sol.status != "optimal":
        raise CertificateError(f"Certificate needs an optimal solution, got {sol.status}")
    builder = CertificateBuilder(h, bipartite, mu_limit)
    weights = builder.certify(h.hyperedges, hyperedge_values(h, sol))
    value = sum(weights.values(), ZERO)
    mu = builder.mu(h.hyperedges) if h.hyperedges else 0
    q = q_of_hypergraph(h, mu_limit)
    certificate = DualCertificate(weights, value, mu, q, bipartite, builder.trace)

    fallbacks = sum(1 for step in builder.trace if "fallback" in step)
    logger.info(
        f"✅ Certificate value {value} (μ={mu}, q={q}, bound {certificate.bound}, "
        f"{len(builder.trace)} node(s), {fallbacks} exact fallback(s))"
    )
    return certificate


# ==============================================================================
# VERIFICATION
# ==============================================================================

def verify_certificate(h: Hypergraph3, cert: DualCertificate, lp_opt: Fraction) -> dict:
    """
    Independent check of a certificate

    Returns:
        {"valid": bool, "checks": {...}, "failures": [...]} where each
        check carries "passed" and, on failure, a "witness"
    """
    checks = {}

    uncovered = _covers(cert.weights, h.hyperedges)
    checks["coverage"] = {"passed": uncovered is None}
    if uncovered is not None:
        checks["coverage"]["witness"] = {
            "hyperedge": sorted(uncovered.vertices),
            "load": format_rational(sum((cert.weights.get(v, ZERO) for v in uncovered.vertices), ZERO)),
        }

    negative = sorted(v for v, w in cert.weights.items() if w < 0)
    checks["nonnegativity"] = {"passed": not negative}
    if negative:
        checks["nonnegativity"]["witness"] = {"vertex": negative[0]}

    value = sum(cert.weights.values(), ZERO)
    checks["weak_duality"] = {"passed": value >= lp_opt and value == cert.value}
    if not checks["weak_duality"]["passed"]:
        checks["weak_duality"]["witness"] = {
            "value": format_rational(value),
            "declared": format_rational(cert.value),
            "lp_opt": format_rational(lp_opt),
        }

    bound = cert.bound
    checks["bound"] = {"passed": value <= bound, "bound": format_rational(bound)}
    if value > bound:
        checks["bound"]["witness"] = {"value": format_rational(value), "mu": cert.mu, "q": cert.q}

    failures = [name for name, check in checks.items() if not check["passed"]]
    if failures:
        logger.warning(f"⚠️ Certificate checks failed: {failures}")
    return {"valid": not failures, "checks": checks, "failures": failures}
