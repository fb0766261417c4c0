# colorlab/model.py
"""
Core BCM instance representation
Includes: exact rationals, ColoredInstance, the 3-uniform hypergraph cast
and the JSON instance format
"""
import hashlib
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from loguru import logger

from colorlab.validators import InstanceError, bound_is_integral, require_valid

ONE = Fraction(1)

GRAPH_PREFIX = "v:"
COLOR_PREFIX = "c:"


# ==============================================================================
# RATIONALS
# ==============================================================================

def parse_rational(value) -> Fraction:
    """
    Parse an exact rational from "p/q" text or an integer

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InstanceError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InstanceError(f"Not a rational: {value!r}", {"error": str(e)})
    raise InstanceError(f"Rationals must be 'p/q' strings or integers, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Canonical "num/den" form, always with a denominator"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# ==============================================================================
# COLORED INSTANCE
# ==============================================================================

@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    color: str
    profit: Fraction = ONE

    @property
    def ends(self) -> Tuple[str, str]:
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass(frozen=True)
class ColoredInstance:
    """
    Edge-colored simple graph with a rational bound per color class

    Edges are addressed by their position in `edges`; every derived
    structure (LP variables, SA subsets, matchings) uses that index.
    """
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    bounds: Dict[str, Fraction]
    bipartition: Optional[Tuple[Tuple[str, ...], Tuple[str, ...]]] = None
    name: str = field(default="", compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def colors(self) -> List[str]:
        return sorted(self.bounds)

    def color_classes(self) -> Dict[str, List[int]]:
        classes: Dict[str, List[int]] = {color: [] for color in self.colors}
        for index, edge in enumerate(self.edges):
            classes.setdefault(edge.color, []).append(index)
        return classes

    def incidence(self) -> Dict[str, List[int]]:
        """Edge indices incident to each vertex (δ(v))"""
        incident: Dict[str, List[int]] = {vertex: [] for vertex in self.vertices}
        for index, edge in enumerate(self.edges):
            incident.setdefault(edge.u, []).append(index)
            incident.setdefault(edge.v, []).append(index)
        return incident

    def all_unit_bounds(self) -> bool:
        return all(bound == 1 for bound in self.bounds.values())

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        for index, edge in enumerate(self.edges):
            graph.add_edge(edge.u, edge.v, index=index, color=edge.color)
        return graph

    def is_bipartite(self) -> bool:
        """Declared bipartition if present, otherwise a 2-coloring check"""
        if self.bipartition is not None:
            return True
        return nx.is_bipartite(self.to_networkx())

    def with_bounds(self, bounds: Dict[str, Fraction], name: str = None) -> "ColoredInstance":
        return ColoredInstance(
            vertices=self.vertices,
            edges=self.edges,
            bounds=dict(bounds),
            bipartition=self.bipartition,
            name=self.name if name is None else name,
        )


def is_colorful_matching(inst: ColoredInstance, edge_indices: Iterable[int]) -> bool:
    """True iff the edges form a matching with |M ∩ E_j| ≤ w_j for every color"""
    covered = set()
    per_color: Dict[str, int] = defaultdict(int)
    for index in edge_indices:
        edge = inst.edges[index]
        if edge.u in covered or edge.v in covered:
            return False
        covered.update((edge.u, edge.v))
        per_color[edge.color] += 1
        if per_color[edge.color] > inst.bounds[edge.color]:
            return False
    return True


# ==============================================================================
# HYPERGRAPH CAST
# ==============================================================================

def graph_vertex(vertex: str) -> str:
    return f"{GRAPH_PREFIX}{vertex}"


def color_vertex(color: str, copy: int = 1, copies: int = 1) -> str:
    if copies == 1:
        return f"{COLOR_PREFIX}{color}"
    return f"{COLOR_PREFIX}{color}#{copy}"


@dataclass(frozen=True)
class HyperEdge:
    """Hyperedge {u, v, c} tagged with its originating edge and color"""
    vertices: FrozenSet[str]
    edge_index: int
    color: str
    copy: int = 1

    @property
    def color_vertex(self) -> str:
        return next(v for v in self.vertices if v.startswith(COLOR_PREFIX))

    @property
    def graph_vertices(self) -> Tuple[str, str]:
        return tuple(sorted(v for v in self.vertices if v.startswith(GRAPH_PREFIX)))

    @property
    def key(self) -> Tuple[str, ...]:
        return tuple(sorted(self.vertices))

    def meets(self, other: "HyperEdge") -> bool:
        return not self.vertices.isdisjoint(other.vertices)


@dataclass(frozen=True)
class Hypergraph3:
    """3-uniform hypergraph over graph vertices plus color vertices"""
    graph_vertices: Tuple[str, ...]
    color_vertices: Tuple[str, ...]
    hyperedges: Tuple[HyperEdge, ...]

    def __post_init__(self):
        seen = set()
        for hyperedge in self.hyperedges:
            graph_part = [v for v in hyperedge.vertices if v.startswith(GRAPH_PREFIX)]
            color_part = [v for v in hyperedge.vertices if v.startswith(COLOR_PREFIX)]
            if len(hyperedge.vertices) != 3 or len(graph_part) != 2 or len(color_part) != 1:
                raise InstanceError(
                    "Hyperedge must hold exactly 2 graph vertices and 1 color vertex",
                    {"hyperedge": sorted(hyperedge.vertices)},
                )
            if hyperedge.vertices in seen:
                raise InstanceError("Duplicate hyperedge", {"hyperedge": sorted(hyperedge.vertices)})
            seen.add(hyperedge.vertices)

    @property
    def vertices(self) -> List[str]:
        return sorted(set(self.graph_vertices) | set(self.color_vertices))

    def __len__(self) -> int:
        return len(self.hyperedges)

    def restrict(self, hyperedges: Iterable[HyperEdge]) -> "Hypergraph3":
        """Sub-hypergraph on the given hyperedges, vertices reduced to those they touch"""
        kept = tuple(hyperedges)
        touched = set().union(*(h.vertices for h in kept)) if kept else set()
        return Hypergraph3(
            graph_vertices=tuple(sorted(v for v in touched if v.startswith(GRAPH_PREFIX))),
            color_vertices=tuple(sorted(v for v in touched if v.startswith(COLOR_PREFIX))),
            hyperedges=kept,
        )

    def degree(self, vertex: str) -> int:
        return sum(1 for h in self.hyperedges if vertex in h.vertices)


def to_hypergraph(inst: ColoredInstance) -> Hypergraph3:
    """
    Cast a BCM instance to a 3-uniform hypergraph matching instance

    Each edge {u, v} of color j becomes the hyperedge {u, v, c_j}. An
    integral bound w_j = k > 1 is expanded into k color vertices, and each
    edge of color j yields one hyperedge per copy.

    Raises:
        InstanceError: If inst is invalid or has a fractional bound above 1
    """
    require_valid(inst)
    fractional = {c: w for c, w in inst.bounds.items() if w != 1 and not bound_is_integral(w)}
    if fractional:
        raise InstanceError(
            "Hypergraph cast needs integral color bounds",
            {"fractional_bounds": {c: format_rational(w) for c, w in sorted(fractional.items())}},
        )

    copies = {color: int(bound) for color, bound in inst.bounds.items()}
    color_vertices = sorted(
        color_vertex(color, copy, copies[color])
        for color in inst.bounds
        for copy in range(1, copies[color] + 1)
    )
    hyperedges = []
    for index, edge in enumerate(inst.edges):
        count = copies[edge.color]
        for copy in range(1, count + 1):
            hyperedges.append(HyperEdge(
                vertices=frozenset((graph_vertex(edge.u), graph_vertex(edge.v), color_vertex(edge.color, copy, count))),
                edge_index=index,
                color=edge.color,
                copy=copy,
            ))
    h = Hypergraph3(
        graph_vertices=tuple(sorted(graph_vertex(v) for v in inst.vertices)),
        color_vertices=tuple(color_vertices),
        hyperedges=tuple(hyperedges),
    )
    logger.debug(f"Hypergraph cast: {len(h.vertices)} vertices, {len(h.hyperedges)} hyperedges")
    return h


# ==============================================================================
# JSON INSTANCE FORMAT
# ==============================================================================

def instance_to_dict(inst: ColoredInstance) -> dict:
    data = {
        "vertices": list(inst.vertices),
        "edges": [
            {"u": e.u, "v": e.v, "color": e.color, "profit": format_rational(e.profit)}
            for e in inst.edges
        ],
        "bounds": {color: format_rational(inst.bounds[color]) for color in inst.colors},
    }
    if inst.bipartition is not None:
        data["bipartition"] = [list(inst.bipartition[0]), list(inst.bipartition[1])]
    if inst.name:
        data["name"] = inst.name
    return data


def instance_from_dict(data: dict) -> ColoredInstance:
    """
    Build a ColoredInstance from the JSON document form

    The document shape is checked by the pydantic schema; graph invariants
    are left to validate() so callers can report them as data.
    """
    from pydantic import ValidationError as SchemaError

    from colorlab.schemas import InstanceDocument

    try:
        doc = InstanceDocument.model_validate(data)
    except SchemaError as e:
        raise InstanceError("Instance document does not match the schema", {"errors": e.errors()})

    bipartition = None
    if doc.bipartition is not None:
        bipartition = (tuple(doc.bipartition[0]), tuple(doc.bipartition[1]))
    return ColoredInstance(
        vertices=tuple(doc.vertices),
        edges=tuple(
            Edge(u=e.u, v=e.v, color=e.color, profit=parse_rational(e.profit))
            for e in doc.edges
        ),
        bounds={color: parse_rational(w) for color, w in doc.bounds.items()},
        bipartition=bipartition,
        name=doc.name or "",
    )


def load_instance(path) -> ColoredInstance:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    inst = instance_from_dict(data)
    if not inst.name:
        inst = ColoredInstance(inst.vertices, inst.edges, inst.bounds, inst.bipartition, name=path.stem)
    logger.info(f"✅ Loaded instance {inst.name}: {len(inst.vertices)} vertices, {inst.num_edges} edges")
    return inst


def save_instance(inst: ColoredInstance, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def fingerprint(inst: ColoredInstance) -> str:
    """sha256 of the canonical JSON form (name excluded)"""
    data = instance_to_dict(inst)
    data.pop("name", None)
    payload = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
