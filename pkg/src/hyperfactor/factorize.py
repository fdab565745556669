"""Factorizations of complete and complete-multipartite 3-uniform
hypergraphs via amalgamated seeds.

The complete hypergraph (every distinct triple lambda times) admits a
factorization with one r_i-regular spanning class per i exactly when
3 | r_i * n for each i and the r_i sum to the regular degree
lambda * C(n-1, 2).  Its n-partite analogue with equal parts of size m
requires 3 | r_i * m * n and degree sum lambda * C(n-1, 2) * m^2, and
unequal part sizes are infeasible outright.

Construction: color the one-vertex amalgamation (all loops) so class j
has exactly r_j * n / 3 loops, then detach with g = n.  The multipartite
case first factorizes the seed lambda * m^3 * K_n^3 with classes
(m * r_1, ..., m * r_k) the same way, transfers that coloring, and
detaches with g identically m.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .detach import DetachmentResult, detach_all
from .hypergraph import (
    AmalgamationMap,
    Coloring,
    Hypergraph,
    amalgamated_seed_multipartite,
    amalgamated_seed_single,
)


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str

    def __str__(self) -> str:
        return f"{self.condition}: {self.detail}"


class InfeasibleError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class FactorizationSpec:
    """A requested factorization: lambda, n, optional part size(s), and the
    class degrees r.  ``m`` is None (or 0) for the complete case, a single
    part size, or a full part-size list of length n (unequal lists are
    representable so their infeasibility can be reported)."""

    lam: int
    n: int
    m: int | tuple[int, ...] | None
    r: tuple[int, ...]

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if not self.r or any(x < 1 for x in self.r):
            raise ValueError("r must be a nonempty list of positive integers")
        object.__setattr__(self, "r", tuple(self.r))
        m = self.m
        if m == 0:
            m = None
        if m is not None and not isinstance(m, int):
            m = tuple(m)
            if len(m) != self.n:
                raise ValueError(f"expected {self.n} part sizes, got {len(m)}")
            if any(x < 1 for x in m):
                raise ValueError("part sizes must be >= 1")
            if len(set(m)) == 1:
                m = m[0]
        if isinstance(m, int) and m < 1:
            raise ValueError("m must be >= 1")
        object.__setattr__(self, "m", m)

    @property
    def multipartite(self) -> bool:
        return self.m is not None

    @property
    def m_value(self) -> int | None:
        """Common part size; None for the complete case.  Raises for
        unequal part-size lists (those never reach construction)."""
        if self.m is None:
            return None
        if isinstance(self.m, tuple):
            raise ValueError("unequal part sizes have no common m")
        return self.m

    def to_dict(self) -> dict:
        m = list(self.m) if isinstance(self.m, tuple) else self.m
        return {"lambda": self.lam, "n": self.n, "m": m, "r": list(self.r)}

    @staticmethod
    def from_dict(d: dict) -> "FactorizationSpec":
        m = d.get("m")
        return FactorizationSpec(
            d["lambda"], d["n"], tuple(m) if isinstance(m, list) else m, tuple(d["r"])
        )


COND_DIV = "3 | r_i n"
COND_SUM = "sum r_i = lambda C(n-1,2)"
COND_PARTS = "equal part sizes (m_i = m_j)"
COND_DIV_M = "3 | r_i m n"
COND_SUM_M = "sum r_i = lambda C(n-1,2) m^2"


def check_feasible(spec: FactorizationSpec) -> list[Violation]:
    """Theorem conditions as data; an empty list means constructible."""
    out: list[Violation] = []
    if not spec.multipartite:
        for i, ri in enumerate(spec.r, start=1):
            if (ri * spec.n) % 3:
                out.append(
                    Violation(COND_DIV, f"r_{i} n = {ri} * {spec.n} = {ri * spec.n}")
                )
        want = spec.lam * comb(spec.n - 1, 2)
        got = sum(spec.r)
        if got != want:
            out.append(Violation(COND_SUM, f"sum r_i = {got}, need {want}"))
        return out
    if isinstance(spec.m, tuple):
        out.append(Violation(COND_PARTS, f"part sizes {list(spec.m)} are not all equal"))
        return out
    m = spec.m
    for i, ri in enumerate(spec.r, start=1):
        if (ri * m * spec.n) % 3:
            out.append(
                Violation(
                    COND_DIV_M, f"r_{i} m n = {ri} * {m} * {spec.n} = {ri * m * spec.n}"
                )
            )
    want = spec.lam * comb(spec.n - 1, 2) * m * m
    got = sum(spec.r)
    if got != want:
        out.append(Violation(COND_SUM_M, f"sum r_i = {got}, need {want}"))
    return out


@dataclass
class Factorization:
    """A verified-on-demand factorization: the 3-uniform hypergraph, its
    coloring into k classes, and the amalgamation map back to the seed
    (whose fibers are the parts in the multipartite case)."""

    spec: FactorizationSpec
    hypergraph: Hypergraph
    coloring: Coloring
    amalgamation_map: AmalgamationMap
    trace: list[dict] | None = None

    @property
    def parts(self) -> list[int]:
        """Part index per vertex (the fiber of the seed vertex)."""
        return self.amalgamation_map.psi

    @property
    def vertex_labels(self) -> list[tuple[int, int]]:
        """(seed vertex, copy index) per vertex."""
        seen: dict[int, int] = {}
        labels = []
        for x in self.amalgamation_map.psi:
            c = seen.get(x, 0)
            labels.append((x, c))
            seen[x] = c + 1
        return labels

    def factor_edges(self, j: int) -> list[tuple[int, int, int]]:
        h = self.hypergraph
        return [
            tuple(sorted(h.hinge_vertex[hg] for hg in h.edge_hinges[e]))
            for e in range(h.edge_count)
            if self.coloring.edge_color[e] == j
        ]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "vertices": [list(t) for t in self.vertex_labels],
            "factors": [
                {"r": rj, "edges": [list(t) for t in self.factor_edges(j)]}
                for j, rj in enumerate(self.spec.r, start=1)
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "Factorization":
        spec = FactorizationSpec.from_dict(d["spec"])
        origs = [v[0] for v in d["vertices"]]
        nv = len(origs)
        hv: list[int] = []
        he: list[int] = []
        colors: list[int] = []
        e = 0
        for j, factor in enumerate(d["factors"], start=1):
            for triple in factor["edges"]:
                if len(triple) != 3:
                    raise ValueError(f"edge {triple} is not a triple")
                hv.extend(triple)
                he.extend((e, e, e))
                colors.append(j)
                e += 1
        h = Hypergraph(nv, hv, he, e)
        k = len(d["factors"])
        coloring = Coloring(k, colors)
        amap = AmalgamationMap(origs, max(origs) + 1 if origs else 0)
        return Factorization(spec, h, coloring, amap)


def factorize_complete(
    lam: int,
    n: int,
    r,
    *,
    debug_checks: bool | None = None,
    oracle_limit: int = 0,
    want_trace: bool = False,
) -> Factorization:
    """(r_1, ..., r_k)-factorization of lambda K_n^3."""
    spec = FactorizationSpec(lam, n, None, tuple(r))
    violations = check_feasible(spec)
    if violations:
        raise InfeasibleError(violations)
    seed, g = amalgamated_seed_single(lam, n)
    colors: list[int] = []
    for j, rj in enumerate(spec.r, start=1):
        colors.extend([j] * (rj * n // 3))
    assert len(colors) == seed.edge_count
    coloring = Coloring(len(spec.r), colors)
    res = detach_all(
        seed,
        coloring,
        g,
        debug_checks=debug_checks,
        oracle_limit=oracle_limit,
        want_trace=want_trace,
    )
    return Factorization(spec, res.hypergraph, res.coloring, res.amalgamation_map, res.trace)


def factorize_multipartite(
    lam: int,
    n: int,
    m,
    r,
    *,
    debug_checks: bool | None = None,
    oracle_limit: int = 0,
    want_trace: bool = False,
) -> Factorization:
    """(r_1, ..., r_k)-factorization of lambda K^3_{m,...,m} (n parts)."""
    spec = FactorizationSpec(lam, n, m, tuple(r))
    violations = check_feasible(spec)
    if violations:
        raise InfeasibleError(violations)
    mv = spec.m_value
    inner = factorize_complete(
        lam * mv**3,
        n,
        tuple(mv * rj for rj in spec.r),
        debug_checks=debug_checks,
        oracle_limit=oracle_limit,
    )
    seed, g = amalgamated_seed_multipartite(lam, n, mv)

    # Transfer the seed coloring: both hypergraphs carry lambda m^3 edges
    # per lex-ordered triple; the seed's copies are consecutive blocks.
    colors = [0] * seed.edge_count
    base = 0
    block = lam * mv**3
    inner_index = inner.hypergraph.triple_index
    inner_colors = inner.coloring.edge_color
    for key in sorted(inner_index):
        for offset, e in enumerate(inner_index[key]):
            colors[base + offset] = inner_colors[e]
        base += block
    coloring = Coloring(len(spec.r), colors)

    res = detach_all(
        seed,
        coloring,
        g,
        debug_checks=debug_checks,
        oracle_limit=oracle_limit,
        want_trace=want_trace,
    )
    return Factorization(spec, res.hypergraph, res.coloring, res.amalgamation_map, res.trace)


def factorize(spec: FactorizationSpec, **kwargs) -> Factorization:
    if spec.multipartite:
        return factorize_multipartite(spec.lam, spec.n, spec.m, spec.r, **kwargs)
    return factorize_complete(spec.lam, spec.n, spec.r, **kwargs)
