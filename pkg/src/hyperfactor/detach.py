"""Iterative vertex splitting of colored amalgamated hypergraphs.

One step detaches a new vertex w from a chosen vertex alpha with number
g(alpha) >= 2: the hinges at alpha form the ground set, two laminar
families over it encode every quantity that must stay balanced (the full
hinge set, the per-color hinge sets, the hinge sets of individual
degenerate edges, and the hinge sets of each edge class nabla(alpha,u,v),
total and per color), an equitable subset Z is selected, and the hinges of
Z move to w.  Then g(alpha) decreases by one and g(w) = 1.  After
sum(g(x) - 1) steps every vertex has number 1 and the result is a
3-uniform detachment whose degrees and multiplicities are within one of
the proportional share of their amalgamated source, per color class.

Inputs must satisfy the standing assumption: g(x) <= 2 forces m(x^3) = 0
and g(x) = 1 forces m(x^2, y) = 0 for every y; the steps preserve it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .hypergraph import AmalgamationMap, Coloring, Hypergraph, triple_key
from .laminar import LaminarFamily, equitable_subset, validate_laminar


class StandingAssumptionError(ValueError):
    """The amalgam cannot be split without leaving degenerate edges."""

    def __init__(self, vertex: int, message: str):
        self.vertex = vertex
        super().__init__(message)


class StepInvariantError(RuntimeError):
    """A per-step balance relation failed under debug checks."""


def _debug_env() -> bool:
    return os.environ.get("HYPERFACTOR_DEBUG_CHECKS", "") not in ("", "0")


@dataclass
class DetachmentState:
    """Mutable snapshot of the splitting process.

    ``psi_orig[v]`` maps each current vertex to its original vertex;
    ``edge_hinges`` never changes because edges and hinges are shared by
    every hypergraph in the sequence.
    """

    orig_count: int
    vertex_count: int
    hinge_vertex: list[int]
    hinge_edge: list[int]
    edge_hinges: tuple[tuple[int, ...], ...]
    edge_color: list[int]
    k: int
    g: list[int]
    psi_orig: list[int]
    step: int = 0

    def copy(self) -> "DetachmentState":
        return DetachmentState(
            self.orig_count,
            self.vertex_count,
            list(self.hinge_vertex),
            self.hinge_edge,
            self.edge_hinges,
            self.edge_color,
            self.k,
            list(self.g),
            list(self.psi_orig),
            self.step,
        )

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(
            self.vertex_count, self.hinge_vertex, self.hinge_edge, len(self.edge_hinges)
        )

    def coloring(self) -> Coloring:
        return Coloring(self.k, list(self.edge_color))

    def amalgamation_map(self) -> AmalgamationMap:
        return AmalgamationMap(list(self.psi_orig), self.orig_count)

    def hinges_at(self, v: int) -> list[int]:
        return [h for h, x in enumerate(self.hinge_vertex) if x == v]

    @property
    def done(self) -> bool:
        return all(x == 1 for x in self.g)


def check_standing_assumption(h: Hypergraph, g: list[int]) -> None:
    """Raise StandingAssumptionError naming the first offending vertex."""
    h.require_three_hinges()
    loops = [0] * h.vertex_count
    doubles: list[dict[int, int]] = [dict() for _ in range(h.vertex_count)]
    for key, edges in h.triple_index.items():
        a, b, c = key
        if a == b == c:
            loops[a] += len(edges)
        elif a == b:
            doubles[a][c] = doubles[a].get(c, 0) + len(edges)
        elif b == c:
            doubles[b][a] = doubles[b].get(a, 0) + len(edges)
    for x in range(h.vertex_count):
        if g[x] <= 2 and loops[x]:
            raise StandingAssumptionError(
                x, f"vertex {x}: g = {g[x]} <= 2 requires m(x^3) = 0, found {loops[x]}"
            )
        if g[x] == 1 and doubles[x]:
            y, m = next(iter(doubles[x].items()))
            raise StandingAssumptionError(
                x,
                f"vertex {x}: g = 1 requires m(x^2, y) = 0 for every y, "
                f"found {m} at y = {y}",
            )


def initial_state(f: Hypergraph, coloring: Coloring | None, g) -> DetachmentState:
    g = list(g)
    if len(g) != f.vertex_count:
        raise ValueError("g must assign a number to every vertex")
    if any(x < 1 for x in g):
        raise ValueError("g values must be positive")
    if coloring is None:
        coloring = Coloring.single(f.edge_count)
    if len(coloring.edge_color) != f.edge_count:
        raise ValueError("coloring does not match edge count")
    check_standing_assumption(f, g)
    return DetachmentState(
        orig_count=f.vertex_count,
        vertex_count=f.vertex_count,
        hinge_vertex=list(f.hinge_vertex),
        hinge_edge=list(f.hinge_edge),
        edge_hinges=tuple(tuple(hs) for hs in f.edge_hinges),
        edge_color=list(coloring.edge_color),
        k=coloring.k,
        g=g,
        psi_orig=list(range(f.vertex_count)),
    )


def choose_alpha(state: DetachmentState) -> int | None:
    """Deterministic splitting order: lowest original vertex id first,
    ties broken by lowest current id.  None when every g(v) = 1."""
    best = None
    for v in range(state.vertex_count):
        if state.g[v] >= 2:
            cand = (state.psi_orig[v], v)
            if best is None or cand < best:
                best = cand
    return None if best is None else best[1]


# -- step families ------------------------------------------------------


@dataclass
class StepFamilies:
    """The two labeled laminar families over the hinges at alpha.

    Ground elements are positions into ``ground`` (ascending hinge ids).
    Labels: ("S",) the full hinge set; ("color", j); ("edge", e, j) the
    hinges of a degenerate edge e colored j; ("pair", u, v) the hinges on
    edges of nabla(alpha, u, v); ("pair_color", u, v, j).
    """

    ground: list[int]
    a: LaminarFamily
    b: LaminarFamily
    a_labels: list[tuple]
    b_labels: list[tuple]
    profile: list[tuple[int, list[int], tuple[int, ...], int]] = field(repr=False)

    def a_hinge_sets(self) -> list[frozenset[int]]:
        return [frozenset(self.ground[i] for i in s) for s in self.a.sets]

    def b_hinge_sets(self) -> list[frozenset[int]]:
        return [frozenset(self.ground[i] for i in s) for s in self.b.sets]


def _edge_profile(state: DetachmentState, alpha: int, s_hinges: list[int]):
    """Per edge incident with alpha: (edge, positions into s_hinges,
    other-endpoint multiset, color)."""
    hv = state.hinge_vertex
    he = state.hinge_edge
    ec = state.edge_color
    by_edge: dict[int, list[int]] = {}
    for i, h in enumerate(s_hinges):
        by_edge.setdefault(he[h], []).append(i)
    profile = []
    for e, positions in by_edge.items():
        others = tuple(sorted(hv[h] for h in state.edge_hinges[e] if hv[h] != alpha))
        profile.append((e, positions, others, ec[e]))
    return profile


def build_step_families(state: DetachmentState, alpha: int) -> StepFamilies:
    """Construct the step's two laminar families (with labels).

    Empty member sets are omitted and duplicates within a family are
    merged, keeping the outermost label.
    """
    if not 0 <= alpha < state.vertex_count:
        raise ValueError(f"vertex {alpha} out of range")
    if state.g[alpha] < 2:
        raise ValueError(f"vertex {alpha} has g = {state.g[alpha]}, need >= 2")
    s_hinges = state.hinges_at(alpha)
    return _build_families(state, alpha, s_hinges)


def _build_families(
    state: DetachmentState, alpha: int, s_hinges: list[int]
) -> StepFamilies:
    size = len(s_hinges)
    profile = _edge_profile(state, alpha, s_hinges)

    # A: root = all hinges at alpha; children = per-color hinge sets;
    # grandchildren = hinge sets of individual degenerate edges.
    color_members: dict[int, list[int]] = {}
    for _, positions, _, j in profile:
        color_members.setdefault(j, []).extend(positions)
    a_sets: list[tuple[int, ...]] = [tuple(range(size))]
    a_parents: list[int] = [-1]
    a_labels: list[tuple] = [("S",)]
    a_min = [0] * size
    color_node: dict[int, int] = {}
    for j in sorted(color_members):
        members = tuple(sorted(color_members[j]))
        if len(members) == size:
            color_node[j] = 0  # single color: duplicate of the root
            continue
        a_sets.append(members)
        a_parents.append(0)
        a_labels.append(("color", j))
        color_node[j] = len(a_sets) - 1
        for i in members:
            a_min[i] = color_node[j]
    for e, positions, _, j in profile:
        if len(positions) >= 2:
            parent = color_node[j]
            members = tuple(positions)
            if len(members) == len(a_sets[parent]):
                node = parent  # whole class is this one edge
            else:
                a_sets.append(members)
                a_parents.append(parent)
                a_labels.append(("edge", e, j))
                node = len(a_sets) - 1
            for i in positions:
                a_min[i] = node

    # B: roots = hinge sets per edge class nabla(alpha, u, v); children =
    # their per-color subsets.  The class of an edge is its vertex multiset
    # with one alpha removed.
    pair_members: dict[tuple[int, int], list[int]] = {}
    pair_color_members: dict[tuple[int, int], dict[int, list[int]]] = {}
    for _, positions, others, j in profile:
        pair = tuple(sorted((alpha,) * (len(positions) - 1) + others))
        pair_members.setdefault(pair, []).extend(positions)
        pair_color_members.setdefault(pair, {}).setdefault(j, []).extend(positions)
    b_sets: list[tuple[int, ...]] = []
    b_parents: list[int] = []
    b_labels: list[tuple] = []
    b_min = [0] * size
    for pair in sorted(pair_members):
        members = tuple(sorted(pair_members[pair]))
        b_sets.append(members)
        b_parents.append(-1)
        b_labels.append(("pair",) + pair)
        root = len(b_sets) - 1
        for i in members:
            b_min[i] = root
        by_color = pair_color_members[pair]
        for j in sorted(by_color):
            sub = tuple(sorted(by_color[j]))
            if len(sub) == len(members):
                continue  # single color in this class
            b_sets.append(sub)
            b_parents.append(root)
            b_labels.append(("pair_color",) + pair + (j,))
            for i in sub:
                b_min[i] = len(b_sets) - 1

    fam_a = LaminarFamily(tuple(a_sets), tuple(a_parents), tuple(a_min))
    fam_b = LaminarFamily(tuple(b_sets), tuple(b_parents), tuple(b_min))
    return StepFamilies(s_hinges, fam_a, fam_b, a_labels, b_labels, profile)


# -- splitting ----------------------------------------------------------


def _split(
    state: DetachmentState,
    alpha: int,
    s_hinges: list[int],
    *,
    check: bool = True,
    oracle_limit: int = 0,
) -> tuple[int, StepFamilies, list[int]]:
    fam = _build_families(state, alpha, s_hinges)
    ell = state.g[alpha]
    z_pos = equitable_subset(
        len(s_hinges), fam.a, fam.b, ell, check=check, oracle_limit=oracle_limit
    )
    w = state.vertex_count
    for i in z_pos:
        state.hinge_vertex[s_hinges[i]] = w
    state.vertex_count += 1
    state.g[alpha] -= 1
    state.g.append(1)
    state.psi_orig.append(state.psi_orig[alpha])
    state.step += 1
    return w, fam, z_pos


def detach_one(
    state: DetachmentState, alpha: int, *, debug_checks: bool | None = None
) -> DetachmentState:
    """One splitting step, functionally: returns the successor state."""
    if state.g[alpha] < 2:
        raise ValueError(f"vertex {alpha} has g = {state.g[alpha]}, need >= 2")
    if debug_checks is None:
        debug_checks = _debug_env()
    new = state.copy()
    s_hinges = new.hinges_at(alpha)
    ell = new.g[alpha]
    w, fam, z_pos = _split(
        new, alpha, s_hinges, oracle_limit=12 if debug_checks else 0
    )
    if debug_checks:
        _debug_step(fam, alpha, w, ell, z_pos)
    return new


@dataclass
class DetachmentResult:
    hypergraph: Hypergraph
    coloring: Coloring
    amalgamation_map: AmalgamationMap
    trace: list[dict] | None = None
    checks: int = 0


def detach_all(
    f: Hypergraph,
    coloring: Coloring | None,
    g,
    *,
    debug_checks: bool | None = None,
    oracle_limit: int = 0,
    want_trace: bool = False,
) -> DetachmentResult:
    """Split every vertex x into g(x) vertices, equitably at every step.

    Returns the 3-uniform detachment, the (shared-edge) coloring, and the
    amalgamation map sending each result vertex to its source vertex.
    With ``debug_checks`` every step is re-validated: the families are
    checked laminar and all per-step balance relations (total and per
    color) are asserted; violations raise StepInvariantError.
    ``oracle_limit`` additionally cross-checks each equitable-subset call
    with ground set at most that size against exhaustive enumeration.
    """
    if debug_checks is None:
        debug_checks = _debug_env()
    state = initial_state(f, coloring, g)
    used_coloring = state.coloring() if coloring is None else coloring

    hinges_at: dict[int, list[int]] = {}
    for x in range(state.orig_count):
        if state.g[x] >= 2:
            hinges_at[x] = []
    for h, v in enumerate(state.hinge_vertex):
        if v in hinges_at:
            hinges_at[v].append(h)

    trace: list[dict] | None = [] if want_trace else None
    checks = 0
    for alpha in range(state.orig_count):
        while state.g[alpha] >= 2:
            s_hinges = hinges_at[alpha]
            ell = state.g[alpha]
            w, fam, z_pos = _split(
                state, alpha, s_hinges, oracle_limit=oracle_limit
            )
            selected = bytearray(len(s_hinges))
            for i in z_pos:
                selected[i] = 1
            hinges_at[alpha] = [h for i, h in enumerate(s_hinges) if not selected[i]]
            if trace is not None:
                trace.append(
                    {
                        "step": state.step - 1,
                        "alpha": alpha,
                        "g_alpha": ell,
                        "A": len(fam.a),
                        "B": len(fam.b),
                        "Z": len(z_pos),
                    }
                )
            if debug_checks:
                checks += _debug_step(fam, alpha, w, ell, z_pos)

    return DetachmentResult(
        state.hypergraph(), used_coloring, state.amalgamation_map(), trace, checks
    )


# -- per-step debug checks ----------------------------------------------


def _debug_step(fam: StepFamilies, alpha: int, w: int, ell: int, z_pos) -> int:
    for family in (fam.a, fam.b):
        rebuilt = validate_laminar([set(s) for s in family.sets], len(fam.ground))
        if set(rebuilt.sets) != set(family.sets):
            raise StepInvariantError("trusted family differs from validated forest")
    count, violations = check_step_relations(fam, alpha, w, ell, z_pos)
    if violations:
        msg = "; ".join(violations[:5])
        raise StepInvariantError(f"{len(violations)} step relations failed: {msg}")
    return count


def check_step_relations(
    fam: StepFamilies, alpha: int, w: int, ell: int, z_pos
) -> tuple[int, list[str]]:
    """Assert every per-step balance relation, total and per color.

    Returns (number of interval assertions evaluated, violations).  Works
    from the raw edge profile and the selected positions, independently of
    the family/network construction.
    """
    from .verify import ApproxInterval

    zset = set(z_pos)
    g1 = ell - 1
    pre: dict[tuple, int] = {}
    post: dict[tuple, int] = {}
    pre_deg: dict[int, int] = {}
    post_deg_a: dict[int, int] = {}
    post_deg_w: dict[int, int] = {}
    size = 0
    moved = 0
    colors: set[int] = set()
    double_vs: set[int] = set()
    loops = False
    vv_vs: set[int] = set()
    uv_pairs: set[tuple[int, int]] = set()

    for _, positions, others, j in fam.profile:
        a_e = len(positions)
        z_e = sum(1 for i in positions if i in zset)
        size += a_e
        moved += z_e
        colors.add(j)
        pre_deg[j] = pre_deg.get(j, 0) + a_e
        post_deg_a[j] = post_deg_a.get(j, 0) + (a_e - z_e)
        post_deg_w[j] = post_deg_w.get(j, 0) + z_e
        pre_key = triple_key(*((alpha,) * a_e + others))
        post_key = triple_key(*((alpha,) * (a_e - z_e) + (w,) * z_e + others))
        for key_map, key in ((pre, pre_key), (post, post_key)):
            key_map[(0, key)] = key_map.get((0, key), 0) + 1
            key_map[(j, key)] = key_map.get((j, key), 0) + 1
        if a_e == 3:
            loops = True
        elif a_e == 2:
            double_vs.add(others[0])
        elif others[0] == others[1]:
            vv_vs.add(others[0])
        else:
            uv_pairs.add(others)

    checks = 0
    violations: list[str] = []

    def expect(name: str, j: int, observed: int, num: int, den: int):
        nonlocal checks
        checks += 1
        iv = ApproxInterval(num, den)
        if not iv.contains(observed):
            tag = "total" if j == 0 else f"color {j}"
            violations.append(f"{name}[{tag}]: {observed} not in {iv}")

    expect("B1", 0, size - moved, size * g1, ell)
    expect("B2", 0, moved, size, ell)
    for j in sorted(colors):
        expect("B1", j, post_deg_a.get(j, 0), pre_deg.get(j, 0) * g1, ell)
        expect("B2", j, post_deg_w.get(j, 0), pre_deg.get(j, 0), ell)

    slices = [0] + sorted(colors)
    for j in slices:
        for v in sorted(vv_vs):
            m0 = pre.get((j, triple_key(alpha, v, v)), 0)
            expect("B3", j, post.get((j, triple_key(alpha, v, v)), 0), m0 * g1, ell)
            expect("B4", j, post.get((j, triple_key(w, v, v)), 0), m0, ell)
        for u, v in sorted(uv_pairs):
            m0 = pre.get((j, triple_key(alpha, u, v)), 0)
            expect("B5", j, post.get((j, triple_key(alpha, u, v)), 0), m0 * g1, ell)
            expect("B6", j, post.get((j, triple_key(w, u, v)), 0), m0, ell)
        for v in sorted(double_vs):
            m0 = pre.get((j, triple_key(alpha, alpha, v)), 0)
            expect("B8", j, post.get((j, triple_key(alpha, w, v)), 0), 2 * m0, ell)
            expect("B9", j, post.get((j, triple_key(alpha, alpha, v)), 0), m0 * (g1 - 1), ell)
        if loops or j == 0:
            m0 = pre.get((j, triple_key(alpha, alpha, alpha)), 0)
            expect("B11", j, post.get((j, triple_key(alpha, alpha, alpha)), 0), m0 * (g1 - 2), ell)
            expect("B12", j, post.get((j, triple_key(alpha, alpha, w)), 0), 3 * m0, ell)

    # B7 / B10: no result key may meet the new vertex twice.
    for (j, key), count in post.items():
        if j == 0:
            checks += 1
            if key.count(w) >= 2 and count:
                violations.append(f"B7/B10: m{key} = {count} involves {w} twice")
    return checks, violations
