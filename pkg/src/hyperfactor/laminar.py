"""Laminar families and the equitable-subset solver.

A family of sets is laminar when every pair is nested or disjoint, so it
forms a forest under inclusion.  Given two laminar families A, B over a
ground set S and a positive integer ell, there is a subset Z of S with
floor(|P|/ell) <= |Z cap P| <= ceil(|P|/ell) for every P in A union B.

The solver realizes this as a feasible integer circulation: one arc per
ground element from its minimal containing set in forest A (or A's
artificial root) to its minimal containing set in forest B, capacity [0,1];
each forest set is a split node whose internal arc carries throughput
bounds [floor(|P|/ell), ceil(|P|/ell)]; a return arc closes the roots.
The all-1/ell fractional assignment is feasible, and the two-forest
constraint matrix is a network matrix, so an integral feasible flow exists;
it is found by max-flow after the standard lower-bound transformation.

Elements that share both minimal sets are constraint-equivalent and are
grouped onto a single arc; within a group the lowest element ids are
selected first, which makes the output deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow


class CrossingSetsError(ValueError):
    """Two sets of a would-be laminar family properly cross."""

    def __init__(self, first: tuple[int, ...], second: tuple[int, ...]):
        self.first = first
        self.second = second
        super().__init__(f"sets cross: {set(first)} and {set(second)}")


class EquitabilityError(RuntimeError):
    """Internal error: the circulation was infeasible or the chosen subset
    failed verification.  Cannot happen on valid laminar input."""


@dataclass(frozen=True)
class LaminarFamily:
    """Laminar family in forest form.

    ``sets[i]`` is a sorted member tuple; ``parents[i]`` is the index of the
    smallest strict superset in the family, or -1 for roots.  Sets are
    deduplicated and nonempty.  ``element_min`` optionally caches, per
    ground element, the index of its minimal containing set (-1 if none);
    trusted constructors provide it, ``validate_laminar`` computes it.
    """

    sets: tuple[tuple[int, ...], ...]
    parents: tuple[int, ...]
    element_min: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.sets)

    @staticmethod
    def empty() -> "LaminarFamily":
        return LaminarFamily((), ())


def validate_laminar(subsets, ground_size: int | None = None) -> LaminarFamily:
    """Check pairwise nested-or-disjoint and return forest form.

    Raises CrossingSetsError naming the offending pair.  Empty sets impose
    nothing and are dropped; duplicates are merged.
    """
    cleaned: dict[tuple[int, ...], None] = {}
    top = -1
    for s in subsets:
        t = tuple(sorted(set(s)))
        if not t:
            continue
        if t[0] < 0:
            raise ValueError(f"negative element {t[0]}")
        top = max(top, t[-1])
        cleaned.setdefault(t, None)
    if ground_size is not None and top >= ground_size:
        raise ValueError(f"element {top} outside ground set of size {ground_size}")
    size = top + 1 if ground_size is None else ground_size

    # Decreasing size; cur_min[e] tracks the smallest processed set holding e.
    # Laminarity forces all members of a new set to share that owner; a
    # mismatch pins down a processed set the new one properly crosses.
    order = sorted(cleaned, key=lambda t: (-len(t), t))
    cur_min = [-1] * size
    parents: list[int] = []
    for i, t in enumerate(order):
        owner = cur_min[t[0]]
        for e in t[1:]:
            if cur_min[e] != owner:
                c = cur_min[e]
                if owner >= 0 and not set(t) <= set(order[owner]):
                    raise CrossingSetsError(t, order[owner])
                raise CrossingSetsError(t, order[c if c >= 0 else owner])
        parents.append(owner)
        for e in t:
            cur_min[e] = i
    return LaminarFamily(tuple(order), tuple(parents), tuple(cur_min))


def _minimal_sets(fam: LaminarFamily, size: int) -> list[int]:
    """Per element, the index of its minimal containing set (-1 if none)."""
    if fam.element_min is not None:
        out = list(fam.element_min)
        out.extend([-1] * (size - len(out)))
        return out[:size] if len(out) > size else out
    out = [-1] * size
    for i in sorted(range(len(fam.sets)), key=lambda i: -len(fam.sets[i])):
        for e in fam.sets[i]:
            out[e] = i
    return out


def _bounds(count: int, ell: int) -> tuple[int, int]:
    return count // ell, -(-count // ell)


def _build_network(size: int, a: LaminarFamily, b: LaminarFamily, ell: int):
    """Arc lists of the circulation network plus the element groups.

    Node numbering: 0=super-source, 1=super-sink, 2=A-root, 3=B-root, then
    split pairs (in, out) for every set of A then of B.  Returns
    (arc rows, cols, caps after lower-bound shift, node excess, groups)
    where groups maps (A_out, B_in) -> ascending element ids.
    """
    n_nodes = 4 + 2 * (len(a.sets) + len(b.sets))
    a_in = lambda i: 4 + 2 * i
    a_out = lambda i: 5 + 2 * i
    off = 4 + 2 * len(a.sets)
    b_in = lambda i: off + 2 * i
    b_out = lambda i: off + 2 * i + 1

    rows: list[int] = []
    cols: list[int] = []
    caps: list[int] = []
    excess = [0] * n_nodes

    def arc(u: int, v: int, lo: int, hi: int):
        rows.append(u)
        cols.append(v)
        caps.append(hi - lo)
        if lo:
            excess[u] -= lo
            excess[v] += lo

    for i, p in enumerate(a.sets):
        lo, hi = _bounds(len(p), ell)
        arc(a_in(i), a_out(i), lo, hi)
        parent_out = a_out(a.parents[i]) if a.parents[i] >= 0 else 2
        arc(parent_out, a_in(i), 0, hi)
    for i, p in enumerate(b.sets):
        lo, hi = _bounds(len(p), ell)
        arc(b_in(i), b_out(i), lo, hi)
        parent_in = b_in(b.parents[i]) if b.parents[i] >= 0 else 3
        arc(b_out(i), parent_in, 0, hi)
    arc(3, 2, 0, size)  # return arc closes the circulation

    min_a = _minimal_sets(a, size)
    min_b = _minimal_sets(b, size)
    groups: dict[tuple[int, int], list[int]] = {}
    for e in range(size):
        u = a_out(min_a[e]) if min_a[e] >= 0 else 2
        v = b_in(min_b[e]) if min_b[e] >= 0 else 3
        groups.setdefault((u, v), []).append(e)
    for (u, v), elems in groups.items():
        arc(u, v, 0, len(elems))

    return rows, cols, caps, excess, groups, n_nodes


def equitable_subset(
    size: int,
    a: LaminarFamily,
    b: LaminarFamily,
    ell: int,
    *,
    check: bool = True,
    oracle_limit: int = 0,
) -> list[int]:
    """Subset Z of {0..size-1} with |Z cap P| within one of |P|/ell for
    every P in either family.

    Existence is guaranteed for laminar input; infeasibility therefore
    raises EquitabilityError (an internal error, not a caller mistake).
    Output is deterministic.  With ``check`` the result is re-verified
    against every set before returning; if ``oracle_limit`` >= size the
    result is additionally cross-checked against exhaustive enumeration.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if size == 0:
        return []
    rows, cols, caps, excess, groups, n_nodes = _build_network(size, a, b, ell)

    need = 0
    for v, x in enumerate(excess):
        if x > 0:
            rows.append(0)
            cols.append(v)
            caps.append(x)
            need += x
        elif x < 0:
            rows.append(v)
            cols.append(1)
            caps.append(-x)

    graph = csr_matrix(
        (np.asarray(caps, dtype=np.int32), (np.asarray(rows), np.asarray(cols))),
        shape=(n_nodes, n_nodes),
    )
    result = maximum_flow(graph, 0, 1)
    if result.flow_value != need:
        raise EquitabilityError(
            f"circulation infeasible: pushed {result.flow_value} of {need}"
        )

    flow = result.flow
    z: list[int] = []
    for (u, v), elems in groups.items():
        c = int(flow[u, v])
        z.extend(elems[:c])
    z.sort()

    if check:
        bad = equitable_violations(size, a, b, ell, z)
        if bad:
            raise EquitabilityError(f"solver output violates {len(bad)} constraints")
    if oracle_limit and size <= oracle_limit:
        from .verify import oracle_equitable

        if frozenset(z) not in {frozenset(s) for s in oracle_equitable(size, a, b, ell)}:
            raise EquitabilityError("solver output not in enumerated solution set")
    return z


def equitable_violations(
    size: int, a: LaminarFamily, b: LaminarFamily, ell: int, z
) -> list[tuple[tuple[int, ...], int, int, int]]:
    """Constraint violations of z: (set, |Z cap P|, lo, hi) per failure."""
    zset = set(z)
    out = []
    for fam in (a, b):
        for p in fam.sets:
            got = sum(1 for e in p if e in zset)
            lo, hi = _bounds(len(p), ell)
            if not lo <= got <= hi:
                out.append((p, got, lo, hi))
    return out


def verify_equitable(size, a, b, ell, z):
    """Violation report for a candidate subset; empty list means pass."""
    return equitable_violations(size, a, b, ell, z)


def network_dot(size: int, a: LaminarFamily, b: LaminarFamily, ell: int) -> str:
    """DOT rendering of the circulation network, for debugging."""
    rows, cols, caps, excess, groups, n_nodes = _build_network(size, a, b, ell)
    names = {0: "SS", 1: "TT", 2: "A_root", 3: "B_root"}
    for i in range(len(a.sets)):
        names[4 + 2 * i] = f"A{i}_in"
        names[5 + 2 * i] = f"A{i}_out"
    off = 4 + 2 * len(a.sets)
    for i in range(len(b.sets)):
        names[off + 2 * i] = f"B{i}_in"
        names[off + 2 * i + 1] = f"B{i}_out"
    lines = ["digraph circulation {"]
    for i, p in enumerate(a.sets):
        lines.append(f'  A{i}_in [label="A{i} {set(p)}"];')
    for i, p in enumerate(b.sets):
        lines.append(f'  B{i}_in [label="B{i} {set(p)}"];')
    for u, v, c in zip(rows, cols, caps):
        label = f"cap {c}"
        if (u, v) in groups:
            label += f" elems {groups[(u, v)]}"
        lines.append(f'  {names[u]} -> {names[v]} [label="{label}"];')
    for v, x in enumerate(excess):
        if x:
            lines.append(f'  // excess {names[v]}: {x:+d}')
    lines.append("}")
    return "\n".join(lines)
