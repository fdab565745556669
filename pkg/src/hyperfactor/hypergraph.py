"""Hinge-based hypergraph model.

A hypergraph is a quintuple (V, E, H, psi, phi): disjoint finite sets of
vertices, hyperedges and hinges, a map psi sending each hinge to the vertex
it is attached to, and a surjection phi sending each hinge to its hyperedge.
A hinge attaches its hyperedge to its vertex, so one edge may meet one
vertex several times; this is what makes amalgamation and detachment exact
inverse operations at the hinge level.

Vertices, edges and hinges are dense 0-based integer ids.  Values are
immutable after construction (derived indexes are built lazily and cached);
instances are safe to share across threads for reading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb


def triple_key(x: int, y: int, z: int) -> tuple[int, int, int]:
    """Canonical key of the vertex multiset {x, y, z}: a sorted 3-tuple.

    Supports all three edge shapes: x=y=z (triple loop), x=y!=z, all
    distinct.
    """
    if x > y:
        x, y = y, x
    if y > z:
        y, z = z, y
        if x > y:
            x, y = y, x
    return (x, y, z)


class Hypergraph:
    """Immutable hypergraph given by flat hinge->vertex and hinge->edge maps.

    ``hinge_vertex[h]`` is psi(h), ``hinge_edge[h]`` is phi(h).  Hinge ids
    are implicit (0..len-1).  Every edge id below ``edge_count`` must have
    at least one hinge (phi surjective).
    """

    __slots__ = (
        "vertex_count",
        "edge_count",
        "hinge_vertex",
        "hinge_edge",
        "_vertex_hinges",
        "_edge_hinges",
        "_triple_index",
    )

    def __init__(
        self,
        vertex_count: int,
        hinge_vertex: list[int],
        hinge_edge: list[int],
        edge_count: int | None = None,
    ):
        if vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        if len(hinge_vertex) != len(hinge_edge):
            raise ValueError("hinge_vertex and hinge_edge must have equal length")
        if edge_count is None:
            edge_count = max(hinge_edge, default=-1) + 1
        seen_edge = bytearray(edge_count)
        for h, (v, e) in enumerate(zip(hinge_vertex, hinge_edge)):
            if not 0 <= v < vertex_count:
                raise ValueError(f"hinge {h}: vertex {v} out of range")
            if not 0 <= e < edge_count:
                raise ValueError(f"hinge {h}: edge {e} out of range")
            seen_edge[e] = 1
        if edge_count and not all(seen_edge):
            missing = seen_edge.index(0)
            raise ValueError(f"edge {missing} has no hinges (phi must be onto)")
        self.vertex_count = vertex_count
        self.edge_count = edge_count
        self.hinge_vertex = list(hinge_vertex)
        self.hinge_edge = list(hinge_edge)
        self._vertex_hinges: list[list[int]] | None = None
        self._edge_hinges: list[list[int]] | None = None
        self._triple_index: dict[tuple[int, int, int], list[int]] | None = None

    # -- derived incidence indexes -------------------------------------

    @property
    def hinge_count(self) -> int:
        return len(self.hinge_vertex)

    @property
    def vertex_hinges(self) -> list[list[int]]:
        """Reverse index: psi^{-1}(v) as a list per vertex."""
        if self._vertex_hinges is None:
            idx: list[list[int]] = [[] for _ in range(self.vertex_count)]
            for h, v in enumerate(self.hinge_vertex):
                idx[v].append(h)
            self._vertex_hinges = idx
        return self._vertex_hinges

    @property
    def edge_hinges(self) -> list[list[int]]:
        """Reverse index: phi^{-1}(e) as a list per edge."""
        if self._edge_hinges is None:
            idx = [[] for _ in range(self.edge_count)]
            for h, e in enumerate(self.hinge_edge):
                idx[e].append(h)
            self._edge_hinges = idx
        return self._edge_hinges

    # -- queries ---------------------------------------------------------

    def degree(self, v: int) -> int:
        """Number of hinges incident with v."""
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex {v} out of range (0..{self.vertex_count - 1})")
        return len(self.vertex_hinges[v])

    def edge_vertices(self, e: int) -> tuple[int, ...]:
        """Vertex multiset of edge e, sorted (one entry per hinge)."""
        if not 0 <= e < self.edge_count:
            raise ValueError(f"edge {e} out of range (0..{self.edge_count - 1})")
        return tuple(sorted(self.hinge_vertex[h] for h in self.edge_hinges[e]))

    def edge_size(self, e: int) -> int:
        """Number of distinct vertices incident with edge e."""
        return len(set(self.edge_vertices(e)))

    def require_three_hinges(self) -> None:
        """Check that every edge has exactly 3 hinges.

        All detachment-facing operations require this; the general model
        (arbitrary hinge counts) exists only as an I/O container.
        """
        for e, hs in enumerate(self.edge_hinges):
            if len(hs) != 3:
                raise ValueError(f"edge {e} has {len(hs)} hinges, expected 3")

    @property
    def triple_index(self) -> dict[tuple[int, int, int], list[int]]:
        """Edges grouped by vertex-multiset key; requires 3 hinges per edge."""
        if self._triple_index is None:
            self.require_three_hinges()
            hv = self.hinge_vertex
            idx: dict[tuple[int, int, int], list[int]] = {}
            for e, hs in enumerate(self.edge_hinges):
                key = triple_key(hv[hs[0]], hv[hs[1]], hv[hs[2]])
                idx.setdefault(key, []).append(e)
            self._triple_index = idx
        return self._triple_index

    def multiplicity(self, x: int, y: int, z: int) -> int:
        """m(x, y, z): number of edges whose hinge multiset is {x, y, z}."""
        for v in (x, y, z):
            if not 0 <= v < self.vertex_count:
                raise ValueError(f"vertex {v} out of range")
        return len(self.triple_index.get(triple_key(x, y, z), ()))

    def edges_with_key(self, x: int, y: int, z: int) -> list[int]:
        """The edge set nabla(x, y, z)."""
        return list(self.triple_index.get(triple_key(x, y, z), ()))


@dataclass(frozen=True)
class Coloring:
    """Total k-hyperedge-coloring: edge_color[e] in {1..k}."""

    k: int
    edge_color: list[int]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for e, j in enumerate(self.edge_color):
            if not 1 <= j <= self.k:
                raise ValueError(f"edge {e}: color {j} outside 1..{self.k}")

    @staticmethod
    def single(edge_count: int) -> "Coloring":
        return Coloring(1, [1] * edge_count)

    def class_size(self, j: int) -> int:
        return sum(1 for c in self.edge_color if c == j)


@dataclass(frozen=True)
class AmalgamationMap:
    """Surjection psi from a detached vertex set onto an amalgamated one.

    ``psi[u]`` is the amalgamated image of detached vertex u;
    ``target_count`` is the size of the amalgamated vertex set.  The number
    function g(w) = |psi^{-1}(w)| is derived.
    """

    psi: list[int]
    target_count: int
    g: list[int] = field(init=False)

    def __post_init__(self):
        g = [0] * self.target_count
        for u, w in enumerate(self.psi):
            if not 0 <= w < self.target_count:
                raise ValueError(f"vertex {u}: image {w} out of range")
            g[w] += 1
        if self.target_count and min(g) == 0:
            raise ValueError(f"psi is not onto: vertex {g.index(0)} has empty fiber")
        object.__setattr__(self, "g", g)

    def fiber(self, w: int) -> list[int]:
        return [u for u, x in enumerate(self.psi) if x == w]

    @staticmethod
    def identity(n: int) -> "AmalgamationMap":
        return AmalgamationMap(list(range(n)), n)


def color_class(h: Hypergraph, coloring: Coloring, j: int) -> tuple[Hypergraph, list[int]]:
    """Sub-hypergraph induced by color class j, on the same vertex set.

    Edge and hinge ids are re-densified; the returned list maps new edge id
    -> original edge id.
    """
    if not 1 <= j <= coloring.k:
        raise ValueError(f"color {j} outside 1..{coloring.k}")
    if len(coloring.edge_color) != h.edge_count:
        raise ValueError("coloring does not match edge count")
    edge_ids = [e for e in range(h.edge_count) if coloring.edge_color[e] == j]
    back = {e: i for i, e in enumerate(edge_ids)}
    hv: list[int] = []
    he: list[int] = []
    for e in edge_ids:
        for hg in h.edge_hinges[e]:
            hv.append(h.hinge_vertex[hg])
            he.append(back[h.hinge_edge[hg]])
    return Hypergraph(h.vertex_count, hv, he, len(edge_ids)), edge_ids


def amalgamate(h: Hypergraph, amap: AmalgamationMap) -> Hypergraph:
    """The psi-amalgamation of h: compose hinge->vertex with psi.

    Edges and hinges are unchanged, so any coloring of h colors the result.
    """
    if len(amap.psi) != h.vertex_count:
        raise ValueError(
            f"psi defined on {len(amap.psi)} vertices, hypergraph has {h.vertex_count}"
        )
    psi = amap.psi
    return Hypergraph(
        amap.target_count,
        [psi[v] for v in h.hinge_vertex],
        h.hinge_edge,
        h.edge_count,
    )


# -- constructors for the seed families --------------------------------


def complete_3uniform(lam: int, n: int) -> Hypergraph:
    """lambda*K_n^3: every distinct triple carries exactly lambda edges.

    Triples in lexicographic order, the lambda parallel copies consecutive,
    so construction order is reproducible.
    """
    if n < 3:
        raise ValueError("complete 3-uniform hypergraph needs n >= 3")
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    hv: list[int] = []
    he: list[int] = []
    e = 0
    for a, b, c in combinations(range(n), 3):
        for _ in range(lam):
            hv.extend((a, b, c))
            he.extend((e, e, e))
            e += 1
    return Hypergraph(n, hv, he, e)


def amalgamated_seed_single(lam: int, n: int) -> tuple[Hypergraph, list[int]]:
    """Single-vertex amalgamation of lambda*K_n^3: lambda*C(n,3) triple
    loops at one vertex x, with number function g(x) = n."""
    if n < 3:
        raise ValueError("seed needs n >= 3")
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    loops = lam * comb(n, 3)
    hv = [0] * (3 * loops)
    he = [e for e in range(loops) for _ in range(3)]
    return Hypergraph(1, hv, he, loops), [n]


def amalgamated_seed_multipartite(lam: int, n: int, m: int) -> tuple[Hypergraph, list[int]]:
    """lambda*m^3*K_n^3 on vertices x_1..x_n with g(x_i) = m.

    Detaching it with this g yields lambda*K^3_{m,...,m}.
    """
    if n < 3:
        raise ValueError("seed needs n >= 3")
    if lam < 1 or m < 1:
        raise ValueError("lambda and m must be >= 1")
    return complete_3uniform(lam * m**3, n), [m] * n


# -- JSON form ----------------------------------------------------------


def hypergraph_to_dict(h: Hypergraph, coloring: Coloring | None = None) -> dict:
    """JSON form: {"vertices": N, "edges": [{"id", "hinges", "color"?}]}.

    "hinges" lists the vertex of each hinge in hinge-id order; repeats
    encode degenerate (loop / doubly-attached) edges.
    """
    edges = []
    for e in range(h.edge_count):
        entry: dict = {
            "id": e,
            "hinges": [h.hinge_vertex[hg] for hg in h.edge_hinges[e]],
        }
        if coloring is not None:
            entry["color"] = coloring.edge_color[e]
        edges.append(entry)
    return {"vertices": h.vertex_count, "edges": edges}


def hypergraph_from_dict(d: dict) -> tuple[Hypergraph, Coloring | None]:
    """Inverse of hypergraph_to_dict.  Hinge ids are assigned in edge-id
    order, hinges within an edge in listed order."""
    n = d["vertices"]
    entries = sorted(d["edges"], key=lambda item: item["id"])
    ids = [item["id"] for item in entries]
    if ids != list(range(len(ids))):
        raise ValueError("edge ids must be dense 0-based")
    hv: list[int] = []
    he: list[int] = []
    colors: list[int] = []
    any_color = False
    for item in entries:
        for v in item["hinges"]:
            hv.append(v)
            he.append(item["id"])
        if "color" in item:
            any_color = True
            colors.append(item["color"])
        else:
            colors.append(1)
    h = Hypergraph(n, hv, he, len(entries))
    if any_color:
        return h, Coloring(max(colors, default=1), colors)
    return h, None
