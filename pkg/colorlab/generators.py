# colorlab/generators.py
"""
Deterministic constructors for the integrality-gap families
Includes: hypercube family (F), C4 chain (B), cyclic Latin K_{k,k} (F′),
the two μ = 1 exemplar graphs and the standalone rainbow C4
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional

import networkx as nx
from loguru import logger

from colorlab.config import DEFAULT_EPS
from colorlab.model import ColoredInstance, Edge, format_rational
from colorlab.validators import InstanceError

FamilyTag = Literal["F", "B", "Fprime", "exemplar"]

CONNECTOR_COLOR = "cw"


@dataclass(frozen=True)
class FamilyParams:
    """Family tag plus its size parameter (ℓ or k) and ε"""
    family: FamilyTag
    size: int = 2
    eps: Fraction = DEFAULT_EPS
    side: str = "left"

    def __post_init__(self):
        if self.family == "F" and self.size < 2:
            raise InstanceError("Family F requires ℓ >= 2", {"l": self.size})
        if self.family == "B" and self.size < 2:
            raise InstanceError("Family B requires k >= 2", {"k": self.size})
        if self.family == "Fprime" and self.size < 1:
            raise InstanceError("Family F′ requires ℓ >= 1", {"l": self.size})
        if not Fraction(0) < self.eps < Fraction(1, 2):
            raise InstanceError("ε must lie in (0, 1/2)", {"eps": format_rational(self.eps)})


def _check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not Fraction(0) < eps < Fraction(1, 2):
        raise InstanceError("ε must lie in (0, 1/2)", {"eps": format_rational(eps)})
    return eps


def bitstring(bits) -> str:
    return "".join(str(b) for b in bits)


def gen_hypercube(ell: int, eps: Fraction = DEFAULT_EPS) -> ColoredInstance:
    """
    Hypercube Q_ℓ colored by the coordinate in which the endpoints differ

    Every color class holds 2^{ℓ−1} edges and carries bound 2(1−ε).

    Args:
        ell: Dimension ℓ >= 2
        eps: Exact ε in (0, 1/2)

    Returns:
        ColoredInstance on ℓ-bit string vertices
    """
    if ell < 2:
        raise InstanceError("Hypercube family needs ℓ >= 2", {"l": ell})
    eps = _check_eps(eps)

    cube = nx.hypercube_graph(ell)
    edges = []
    for a, b in cube.edges():
        dim = next(i for i in range(ell) if a[i] != b[i])
        u, v = sorted((bitstring(a), bitstring(b)))
        edges.append((dim, u, v))
    edges.sort()

    bound = 2 * (1 - eps)
    inst = ColoredInstance(
        vertices=tuple(sorted(bitstring(node) for node in cube.nodes())),
        edges=tuple(Edge(u, v, f"d{dim}") for dim, u, v in edges),
        bounds={f"d{dim}": bound for dim in range(ell)},
        name=f"hypercube-l{ell}-eps{eps.numerator}_{eps.denominator}",
    )
    logger.debug(f"Generated Q_{ell}: {len(inst.vertices)} vertices, {inst.num_edges} edges, w={bound}")
    return inst


def gen_c4_chain(k: int) -> ColoredInstance:
    """
    k copies of a bi-chromatic C4 joined cyclically by connector edges

    Copy i has vertices a{i}_1..a{i}_4, edges a1a2, a3a4 in color r{i} and
    a1a4, a2a3 in color b{i}. Connectors {a{i}_2, a{i+1}_1} and
    {a{i}_3, a{i+1}_4} all take the connector color; copy k wraps to copy 1.
    """
    if k < 2:
        raise InstanceError("C4 chain needs k >= 2 (k = 1 would connect a copy to itself)", {"k": k})

    def alpha(i: int, j: int) -> str:
        return f"a{i}_{j}"

    vertices = []
    edges = []
    for i in range(1, k + 1):
        vertices.extend(alpha(i, j) for j in range(1, 5))
        edges.append(Edge(alpha(i, 1), alpha(i, 2), f"r{i}"))
        edges.append(Edge(alpha(i, 3), alpha(i, 4), f"r{i}"))
        edges.append(Edge(alpha(i, 1), alpha(i, 4), f"b{i}"))
        edges.append(Edge(alpha(i, 2), alpha(i, 3), f"b{i}"))
    for i in range(1, k + 1):
        nxt = i % k + 1
        edges.append(Edge(alpha(i, 2), alpha(nxt, 1), CONNECTOR_COLOR))
        edges.append(Edge(alpha(i, 3), alpha(nxt, 4), CONNECTOR_COLOR))

    bounds = {CONNECTOR_COLOR: Fraction(1)}
    for i in range(1, k + 1):
        bounds[f"r{i}"] = Fraction(1)
        bounds[f"b{i}"] = Fraction(1)
    return ColoredInstance(
        vertices=tuple(vertices),
        edges=tuple(edges),
        bounds=bounds,
        name=f"c4chain-k{k}",
    )


def gen_cyclic_square(k: int) -> ColoredInstance:
    """
    K_{k,k} with the cyclic proper coloring: (v_j, u_{(j+Δ) mod k}) gets c_Δ

    Its color matrix is the Cayley table of Z_k.
    """
    if k < 1:
        raise InstanceError("Cyclic K_{k,k} needs k >= 1", {"k": k})
    left = tuple(f"v{j}" for j in range(k))
    right = tuple(f"u{t}" for t in range(k))
    edges = [
        Edge(f"v{j}", f"u{(j + delta) % k}", f"c{delta}")
        for j in range(k)
        for delta in range(k)
    ]
    return ColoredInstance(
        vertices=left + right,
        edges=tuple(edges),
        bounds={f"c{delta}": Fraction(1) for delta in range(k)},
        bipartition=(left, right),
        name=f"cyclic-k{k}",
    )


def gen_cyclic_latin(ell: int) -> ColoredInstance:
    """Family F′: the cyclic K_{k,k} for even order k = 2ℓ"""
    if ell < 1:
        raise InstanceError("Family F′ needs ℓ >= 1", {"l": ell})
    inst = gen_cyclic_square(2 * ell)
    return ColoredInstance(inst.vertices, inst.edges, inst.bounds, inst.bipartition, name=f"cyclic-latin-l{ell}")


def gen_rainbow_c4() -> ColoredInstance:
    """Standalone bi-chromatic C4 with unit bounds"""
    inst = gen_cyclic_square(2)
    return ColoredInstance(inst.vertices, inst.edges, inst.bounds, inst.bipartition, name="rainbow-c4")


def gen_exemplar(which: str) -> ColoredInstance:
    """
    The two μ = 1 base-case graphs

    left: bipartite path v1-v2-v3-v4 with outer edges blue, middle red.
    right: non-bipartite graph with {u1,u2},{u3,u4} green, {u1,u3} blue, {u2,u3} red.
    """
    one = Fraction(1)
    if which == "left":
        return ColoredInstance(
            vertices=("v1", "v2", "v3", "v4"),
            edges=(Edge("v1", "v2", "blue"), Edge("v3", "v4", "blue"), Edge("v2", "v3", "red")),
            bounds={"blue": one, "red": one},
            name="exemplar-left",
        )
    if which == "right":
        return ColoredInstance(
            vertices=("u1", "u2", "u3", "u4"),
            edges=(
                Edge("u1", "u2", "green"), Edge("u3", "u4", "green"),
                Edge("u1", "u3", "blue"), Edge("u2", "u3", "red"),
            ),
            bounds={"green": one, "blue": one, "red": one},
            name="exemplar-right",
        )
    raise InstanceError(f"Unknown exemplar {which!r}; expected 'left' or 'right'")


def gen_family(params: FamilyParams) -> ColoredInstance:
    """Dispatch on the family tag"""
    if params.family == "F":
        return gen_hypercube(params.size, params.eps)
    if params.family == "B":
        return gen_c4_chain(params.size)
    if params.family == "Fprime":
        return gen_cyclic_latin(params.size)
    return gen_exemplar(params.side)


def gen_by_name(family: str, param=None, eps: Optional[Fraction] = None) -> ColoredInstance:
    """CLI/config front door using the command-line family names"""
    eps = DEFAULT_EPS if eps is None else eps
    if family in ("hypercube", "c4chain", "cyclic", "cyclic_square"):
        param = _size_param(family, param)
    if family == "hypercube":
        return gen_hypercube(param, eps)
    if family == "c4chain":
        return gen_c4_chain(param)
    if family == "cyclic":
        return gen_cyclic_latin(param)
    if family == "cyclic_square":
        return gen_cyclic_square(param)
    if family == "exemplar":
        return gen_exemplar(str(param or "left"))
    if family == "rainbow_c4":
        return gen_rainbow_c4()
    raise InstanceError(f"Unknown family {family!r}")


def _size_param(family: str, param) -> int:
    try:
        return int(param)
    except (TypeError, ValueError):
        raise InstanceError(f"Family {family} needs an integer parameter", {"param": param})
