"""Independent checkers for detachments and factorizations.

All equitability comparisons use the integer-interval relation: an observed
integer count x is accepted for a rational target p/q when
floor(p/q) <= x <= ceil(p/q).  Arithmetic is exact (integer floor/ceil
division); no floating point is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .hypergraph import AmalgamationMap, Coloring, Hypergraph, triple_key
from .laminar import LaminarFamily


@dataclass(frozen=True)
class ApproxInterval:
    """Admitted integer interval [floor(num/den), ceil(num/den)]."""

    num: int
    den: int

    @property
    def lo(self) -> int:
        return self.num // self.den

    @property
    def hi(self) -> int:
        return -((-self.num) // self.den)

    def contains(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}] (target {self.num}/{self.den})"


@dataclass
class ReportLine:
    check: str
    subject: str
    observed: int
    interval: ApproxInterval
    ok: bool


@dataclass
class VerificationReport:
    lines: list[ReportLine] = field(default_factory=list)

    def expect(self, check: str, subject: str, observed: int, num: int, den: int = 1):
        iv = ApproxInterval(num, den)
        self.lines.append(ReportLine(check, subject, observed, iv, iv.contains(observed)))

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    @property
    def failures(self) -> list[ReportLine]:
        return [line for line in self.lines if not line.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked": len(self.lines),
            "failures": [
                {
                    "check": f.check,
                    "subject": f.subject,
                    "observed": f.observed,
                    "admitted": [f.interval.lo, f.interval.hi],
                }
                for f in self.failures
            ],
        }

    def render(self, max_rows: int = 40) -> str:
        """Human-readable table: all failures plus a per-check summary."""
        out = []
        by_check: dict[str, list[ReportLine]] = {}
        for line in self.lines:
            by_check.setdefault(line.check, []).append(line)
        out.append(f"{'check':<18} {'pass':>6} {'fail':>6}")
        for name, rows in by_check.items():
            bad = sum(1 for r in rows if not r.ok)
            out.append(f"{name:<18} {len(rows) - bad:>6} {bad:>6}")
        fails = self.failures
        if fails:
            out.append("")
            out.append("failures:")
            for f in fails[:max_rows]:
                out.append(
                    f"  {f.check} {f.subject}: observed {f.observed}, admitted {f.interval}"
                )
            if len(fails) > max_rows:
                out.append(f"  ... and {len(fails) - max_rows} more")
        out.append("overall: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(out)


def _per_color_triples(h: Hypergraph, coloring: Coloring) -> dict:
    """(color, triple key) -> multiplicity."""
    counts: dict[tuple[int, tuple[int, int, int]], int] = {}
    hv = h.hinge_vertex
    for e, hs in enumerate(h.edge_hinges):
        key = (coloring.edge_color[e], triple_key(hv[hs[0]], hv[hs[1]], hv[hs[2]]))
        counts[key] = counts.get(key, 0) + 1
    return counts


def _per_color_degrees(h: Hypergraph, coloring: Coloring) -> list[dict[int, int]]:
    """Per vertex: {color: degree in that color class}."""
    out: list[dict[int, int]] = [dict() for _ in range(h.vertex_count)]
    ec = coloring.edge_color
    for v, e in zip(h.hinge_vertex, h.hinge_edge):
        d = out[v]
        j = ec[e]
        d[j] = d.get(j, 0) + 1
    return out


def gtilde(g: list[int], x: int, y: int, z: int) -> int:
    """Number of detached representative triples of the amalgamated triple
    {x,y,z}: C(g(x),3), C(g(x),2)*g(y), or g(x)g(y)g(z) by shape."""
    a, b, c = triple_key(x, y, z)
    if a == b == c:
        return comb(g[a], 3)
    if a == b:
        return comb(g[a], 2) * g[c]
    if b == c:
        return comb(g[b], 2) * g[a]
    return g[a] * g[b] * g[c]


def verify_detachment(
    f: Hypergraph,
    c_f: Coloring,
    g: list[int],
    det: Hypergraph,
    c_det: Coloring,
    amap: AmalgamationMap,
) -> VerificationReport:
    """Full conformance report of a claimed detachment.

    Checks 3-uniformity of the detachment, per-vertex degree equitability
    (total and per color), and per-triple multiplicity equitability (total
    and per color) against the amalgamated source, quantified over every
    representative triple.  For source triples whose shape is excluded by
    the g thresholds (a triple loop at x with g(x) <= 2, a doubly-attached
    edge at x with g(x) = 1) the source multiplicity itself must be zero.
    """
    if len(amap.psi) != det.vertex_count or amap.target_count != f.vertex_count:
        raise ValueError("amalgamation map does not match the two vertex sets")
    if list(g) != amap.g:
        raise ValueError("fiber sizes of psi do not match g")
    if c_f.k != c_det.k:
        raise ValueError("colorings use different palettes")

    rep = VerificationReport()
    rep.expect("edges", "count", det.edge_count, f.edge_count)
    rep.expect("hinges", "count", det.hinge_count, f.hinge_count)
    for j in range(1, c_f.k + 1):
        rep.expect(
            "class-size", f"color {j}", c_det.class_size(j), c_f.class_size(j)
        )

    for e, hs in enumerate(det.edge_hinges):
        distinct = len({det.hinge_vertex[h] for h in hs})
        if len(hs) != 3 or distinct != 3:
            rep.expect("3-uniform", f"edge {e}", distinct, 3)
    if not rep.ok:
        return rep

    fibers: list[list[int]] = [[] for _ in range(f.vertex_count)]
    for u, x in enumerate(amap.psi):
        fibers[x].append(u)

    deg_f = [f.degree(x) for x in range(f.vertex_count)]
    cdeg_f = _per_color_degrees(f, c_f)
    cdeg_det = _per_color_degrees(det, c_det)
    for x in range(f.vertex_count):
        gx = g[x]
        for u in fibers[x]:
            rep.expect("A1", f"d(u{u}) for x{x}", det.degree(u), deg_f[x], gx)
            colors = set(cdeg_f[x]) | set(cdeg_det[u])
            for j in sorted(colors):
                rep.expect(
                    "A2",
                    f"d_j(u{u}) for x{x} color {j}",
                    cdeg_det[u].get(j, 0),
                    cdeg_f[x].get(j, 0),
                    gx,
                )

    mult_det = {k: len(v) for k, v in det.triple_index.items()}
    mult_f = {k: len(v) for k, v in f.triple_index.items()}
    cmult_det = _per_color_triples(det, c_det)
    cmult_f = _per_color_triples(f, c_f)
    colors_at: dict[tuple[int, int, int], set[int]] = {}
    for (j, key) in cmult_f:
        colors_at.setdefault(key, set()).add(j)
    for (j, key_det) in cmult_det:
        hv = amap.psi
        key = triple_key(hv[key_det[0]], hv[key_det[1]], hv[key_det[2]])
        colors_at.setdefault(key, set()).add(j)

    def check_reps(key, reps, denom):
        m = mult_f.get(key, 0)
        for r in reps:
            rep.expect("A3", f"m{r} for {key}", mult_det.get(r, 0), m, denom)
        for j in sorted(colors_at.get(key, ())):
            mj = cmult_f.get((j, key), 0)
            for r in reps:
                rep.expect(
                    "A4", f"m{r} for {key} color {j}", cmult_det.get((j, r), 0), mj, denom
                )

    from itertools import combinations, product

    nf = f.vertex_count
    for x in range(nf):
        key = (x, x, x)
        if g[x] >= 3:
            reps = [triple_key(*t) for t in combinations(fibers[x], 3)]
            check_reps(key, reps, comb(g[x], 3))
        else:
            rep.expect("standing", f"m(x{x}^3) with g={g[x]}", mult_f.get(key, 0), 0)
    for x in range(nf):
        for y in range(nf):
            if x == y:
                continue
            key = triple_key(x, x, y)
            if g[x] >= 2:
                reps = [
                    triple_key(u, v, w)
                    for u, v in combinations(fibers[x], 2)
                    for w in fibers[y]
                ]
                check_reps(key, reps, comb(g[x], 2) * g[y])
            else:
                rep.expect(
                    "standing", f"m(x{x}^2,y{y}) with g={g[x]}", mult_f.get(key, 0), 0
                )
    for x, y, z in combinations(range(nf), 3):
        key = (x, y, z)
        reps = [
            triple_key(u, v, w)
            for u, v, w in product(fibers[x], fibers[y], fibers[z])
        ]
        check_reps(key, reps, g[x] * g[y] * g[z])
    return rep


def verify_factorization(fz) -> VerificationReport:
    """Structural validity of a factorization.

    Each color class must be a spanning r_j-regular sub-hypergraph, the
    classes must partition the edge set, and the multiplicity profile must
    match the complete target exactly: lambda on every admissible triple
    (all distinct triples; or transversal triples in the equal-parts
    multipartite case) and zero elsewhere.
    """
    spec = fz.spec
    h: Hypergraph = fz.hypergraph
    coloring: Coloring = fz.coloring
    rep = VerificationReport()

    nv = spec.n if spec.m_value is None else spec.n * spec.m_value
    rep.expect("vertices", "count", h.vertex_count, nv)
    rep.expect("factors", "count", coloring.k, len(spec.r))
    if not rep.ok:
        return rep

    for e, hs in enumerate(h.edge_hinges):
        distinct = len({h.hinge_vertex[hg] for hg in hs})
        if len(hs) != 3 or distinct != 3:
            rep.expect("3-uniform", f"edge {e}", distinct, 3)

    cdeg = _per_color_degrees(h, coloring)
    for j, rj in enumerate(spec.r, start=1):
        for v in range(h.vertex_count):
            rep.expect("regular", f"class {j} at v{v}", cdeg[v].get(j, 0), rj)
        rep.expect(
            "class-size", f"class {j}", coloring.class_size(j), rj * h.vertex_count, 3
        )
    rep.expect(
        "partition", "edges", sum(coloring.class_size(j) for j in range(1, coloring.k + 1)),
        h.edge_count,
    )

    from itertools import combinations

    # Every key of a 3-uniform hypergraph is a distinct-vertex triple, so
    # iterating all triples covers the whole profile (missing keys read 0).
    index = h.triple_index
    if spec.m_value is None:
        for t in combinations(range(h.vertex_count), 3):
            rep.expect("profile", f"m{t}", len(index.get(t, ())), spec.lam)
    else:
        part = fz.parts
        for t in combinations(range(h.vertex_count), 3):
            transversal = len({part[t[0]], part[t[1]], part[t[2]]}) == 3
            rep.expect(
                "profile", f"m{t}", len(index.get(t, ())), spec.lam if transversal else 0
            )
    return rep


def oracle_equitable(
    size: int, a: LaminarFamily, b: LaminarFamily, ell: int, *, limit: int = 20
) -> list[tuple[int, ...]]:
    """All subsets satisfying the equitability constraints, by exhaustive
    enumeration.  Independent of the circulation solver; exponential, so
    ground sets above ``limit`` are refused."""
    if size > limit:
        raise ValueError(f"ground set of size {size} too large to enumerate")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    constraints = []
    for fam in (a, b):
        for p in fam.sets:
            mask = 0
            for e in p:
                mask |= 1 << e
            lo = len(p) // ell
            hi = -(-len(p) // ell)
            constraints.append((mask, lo, hi))
    out = []
    for m in range(1 << size):
        for mask, lo, hi in constraints:
            if not lo <= (m & mask).bit_count() <= hi:
                break
        else:
            out.append(tuple(i for i in range(size) if m >> i & 1))
    return out
