"""Jacobian algebra bases by degree-bounded noncommutative rewriting.

Relations are the cyclic derivatives of the potential: rational linear
combinations of parallel paths.  Paths are ordered by degree and then
lexicographically on arrow indices; each relation is oriented into a rule
rewriting its leading path into strictly smaller terms.  Overlap pairs are
completed until stable (up to a degree cap), after which the order-irreducible
paths form a basis of the quotient.  Finite-dimensionality is detected when
some degree carries no irreducible path at all: every longer path then
contains a reducible window.

On top of the basis: Cartan matrices, Coxeter polynomials, Hom-space
dimensions, and tilting tests for the two-term complexes that realize the
negative and positive algebra mutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    DimensionNotResolvedError,
    InfiniteDimensionalError,
    NotReducedError,
    SingularCartanError,
)
from .gentle import int_det
from .potential import QP, cyclic_derivative
from .quiver import Quiver

Path = tuple[int, ...]  # arrow indices into RewriteSystem.arrows
Combo = dict[Path, Fraction]


@dataclass(frozen=True)
class RewriteSystem:
    """Jacobian ideal generators over a fixed arrow indexing."""

    quiver: Quiver
    arrows: tuple[str, ...]  # arrow ids, sorted; index = position
    relations: tuple[tuple[tuple[Path, Fraction], ...], ...]

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {aid: i for i, aid in enumerate(self.arrows)}

    def sources(self) -> list[int]:
        return [self.quiver.source(aid) for aid in self.arrows]

    def targets(self) -> list[int]:
        return [self.quiver.target(aid) for aid in self.arrows]


def jacobian_relations(qp: QP) -> RewriteSystem:
    """One relation per arrow with nonzero cyclic derivative."""
    if not qp.reduced:
        raise NotReducedError("Jacobian relations need a reduced QP")
    arrows = tuple(sorted(a.id for a in qp.quiver.arrows))
    index = {aid: i for i, aid in enumerate(arrows)}
    terms = qp.potential.as_dict()
    rels = []
    for aid in arrows:
        deriv = cyclic_derivative(terms, aid)
        if not deriv:
            continue
        combo = tuple(
            sorted(
                ((tuple(index[x] for x in word), coeff) for word, coeff in deriv.items()),
                key=lambda pc: (len(pc[0]), pc[0]),
            )
        )
        rels.append(combo)
    return RewriteSystem(qp.quiver, arrows, tuple(rels))


@dataclass
class AlgebraBasis:
    """Normal-form paths of the quotient, grouped by endpoints."""

    quiver: Quiver
    arrows: tuple[str, ...]
    rules: dict[Path, Combo]
    paths: dict[tuple[int, int], list[Path]]  # (source, target) -> paths
    dimension: int

    @cached_property
    def _src(self) -> list[int]:
        return [self.quiver.source(a) for a in self.arrows]

    @cached_property
    def _tgt(self) -> list[int]:
        return [self.quiver.target(a) for a in self.arrows]

    def path_source(self, p: Path, default: int) -> int:
        return self._src[p[0]] if p else default

    def path_target(self, p: Path, default: int) -> int:
        return self._tgt[p[-1]] if p else default

    def normal_form(self, combo: Combo) -> Combo:
        return _reduce_combo(combo, self.rules)

    def multiply(self, p: Path, q: Path) -> Combo:
        """Normal form of the concatenation; caller guarantees endpoints."""
        return self.normal_form({p + q: Fraction(1)})

    def hom_paths(self, i: int, j: int) -> list[Path]:
        return self.paths.get((i, j), [])


def _reduce_combo(combo: Combo, rules: dict[Path, Combo]) -> Combo:
    if not rules:
        return {p: c for p, c in combo.items() if c}
    by_first: dict[int, list[Path]] = {}
    for lead in rules:
        by_first.setdefault(lead[0], []).append(lead)
    work = {p: c for p, c in combo.items() if c}
    out: Combo = {}
    while work:
        p = max(work, key=lambda q: (len(q), q))
        c = work.pop(p)
        hit = None
        for start in range(len(p)):
            for lead in by_first.get(p[start], ()):
                if p[start : start + len(lead)] == lead:
                    hit = (start, lead)
                    break
            if hit:
                break
        if hit is None:
            out[p] = out.get(p, Fraction(0)) + c
            if not out[p]:
                del out[p]
            continue
        start, lead = hit
        head, tail = p[:start], p[start + len(lead) :]
        for rpath, rc in rules[lead].items():
            q = head + rpath + tail
            nc = work.get(q, Fraction(0)) + c * rc
            if nc:
                work[q] = nc
            else:
                work.pop(q, None)
    return out


def _orient(combo: Combo) -> tuple[Path, Combo] | None:
    """Split a combination into (leading path, rewrite target)."""
    combo = {p: c for p, c in combo.items() if c}
    if not combo:
        return None
    lead = max(combo, key=lambda q: (len(q), q))
    lc = combo[lead]
    return lead, {p: -c / lc for p, c in combo.items() if p != lead}


def _overlaps(u: Path, v: Path):
    """Common multiples of two leading paths: suffix of u = prefix of v,
    and full containment of v inside u."""
    for t in range(1, min(len(u), len(v))):
        if u[len(u) - t :] == v[:t]:
            # u . v[t:] = u[:len-t] . v
            yield ("glue", u[: len(u) - t], v[t:])
    if len(v) < len(u):
        for start in range(len(u) - len(v) + 1):
            if u[start : start + len(v)] == v:
                yield ("contain", u[:start], u[start + len(v) :])


def groebner_basis(rs: RewriteSystem, cap: int = 24, max_cap: int = 96) -> AlgebraBasis:
    """Complete the relations into a confluent rewriting system and collect
    the irreducible paths.  Doubles the cap on failure up to max_cap."""
    while True:
        try:
            return _complete(rs, cap)
        except DimensionNotResolvedError:
            if cap >= max_cap:
                raise
            cap = min(2 * cap, max_cap)


def _complete(rs: RewriteSystem, cap: int) -> AlgebraBasis:
    maxdeg = max((len(p) for rel in rs.relations for p, _ in rel), default=0)
    if cap < maxdeg:
        raise DimensionNotResolvedError(f"cap {cap} below relation degree {maxdeg}")
    rules: dict[Path, Combo] = {}
    pending: list[Combo] = [dict(rel) for rel in rs.relations]

    def lead_key(combo: Combo):
        return max((len(p), p) for p in combo)

    while pending:
        at = min(range(len(pending)), key=lambda i: lead_key(pending[i]))
        combo = pending.pop(at)
        oriented = _orient(_reduce_combo(combo, rules))
        if oriented is None:
            continue
        lead, target = oriented
        # retire rules whose lead contains the new lead; their content is
        # requeued so nothing is lost
        stale = [
            u
            for u in rules
            if len(u) >= len(lead)
            and any(u[s : s + len(lead)] == lead for s in range(len(u) - len(lead) + 1))
        ]
        for u in stale:
            tgt = rules.pop(u)
            requeue = {p: -c for p, c in tgt.items()}
            requeue[u] = requeue.get(u, Fraction(0)) + 1
            requeue = {p: c for p, c in requeue.items() if c}
            if requeue:
                pending.append(requeue)
        rules[lead] = target
        for other in list(rules):
            for u, v in ((lead, other), (other, lead)):
                for kind, left, right in _overlaps(u, v):
                    if len(left) + len(v) + len(right) > cap:
                        continue
                    s_poly: Combo = {}
                    if kind == "glue":
                        # common multiple u.right == left.v
                        for p, c in rules[u].items():
                            q = p + right
                            s_poly[q] = s_poly.get(q, Fraction(0)) + c
                    else:
                        # v sits inside u = left.v.right
                        for p, c in rules[u].items():
                            s_poly[p] = s_poly.get(p, Fraction(0)) + c
                    for p, c in rules[v].items():
                        q = left + p + (right if kind == "contain" else ())
                        s_poly[q] = s_poly.get(q, Fraction(0)) - c
                    s_poly = {p: c for p, c in s_poly.items() if c}
                    if s_poly:
                        pending.append(s_poly)

    return _collect_basis(rs, rules, cap)


def _collect_basis(rs: RewriteSystem, rules: dict[Path, Combo], cap: int) -> AlgebraBasis:
    q = rs.quiver
    src = rs.sources()
    tgt = rs.targets()
    out_of: dict[int, list[int]] = {v: [] for v in range(q.n)}
    for i, aid in enumerate(rs.arrows):
        out_of[src[i]].append(i)
    leads_by_len: dict[int, set[Path]] = {}
    for lead in rules:
        leads_by_len.setdefault(len(lead), set()).add(lead)

    paths: dict[tuple[int, int], list[Path]] = {}
    for v in range(q.n):
        paths.setdefault((v, v), []).append(())
    # grow irreducible paths degree by degree; only suffixes ending at the
    # new arrow can newly match a rule lead
    frontier_paths: list[tuple[int, Path]] = [(v, ()) for v in range(q.n)]
    degree = 0
    total = q.n
    while frontier_paths:
        degree += 1
        if degree > cap:
            raise DimensionNotResolvedError(
                f"irreducible paths of degree {cap} remain; dimension not resolved at cap"
            )
        nxt: list[tuple[int, Path]] = []
        for end, p in frontier_paths:
            for a in out_of[end]:
                cand = p + (a,)
                reducible = False
                for ln, leads in leads_by_len.items():
                    if ln <= len(cand) and cand[len(cand) - ln :] in leads:
                        reducible = True
                        break
                if reducible:
                    continue
                s = src[cand[0]]
                t = tgt[a]
                paths.setdefault((s, t), []).append(cand)
                nxt.append((t, cand))
                total += 1
        frontier_paths = nxt

    for key in paths:
        paths[key].sort(key=lambda p: (len(p), p))
    return AlgebraBasis(q, rs.arrows, rules, paths, total)


# ---------------------------------------------------------------------------
# Cartan data
# ---------------------------------------------------------------------------

def cartan(basis: AlgebraBasis) -> tuple[tuple[int, ...], ...]:
    n = basis.quiver.n
    return tuple(
        tuple(len(basis.hom_paths(i, j)) for j in range(n)) for i in range(n)
    )


def hom_dim(basis: AlgebraBasis, i: int, j: int) -> int:
    """dim Hom(P_i, P_j): maps act by left multiplication, so this is the
    number of basis paths j -> i (the (j, i) Cartan entry)."""
    return len(basis.hom_paths(j, i))


def _fraction_matrix_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise SingularCartanError("Cartan matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def coxeter_matrix(c) -> list[list[Fraction]]:
    """Phi = -C^{-T} . C, exact rational."""
    n = len(c)
    cf = [[Fraction(c[j][i]) for j in range(n)] for i in range(n)]  # transpose
    inv_t = _fraction_matrix_inverse(cf)
    return [
        [-sum(inv_t[i][l] * c[l][j] for l in range(n)) for j in range(n)]
        for i in range(n)
    ]


def coxeter_polynomial(c) -> tuple[int, ...]:
    """Characteristic polynomial of the Coxeter matrix, coefficients from
    constant to leading; always integral, which is verified."""
    phi = coxeter_matrix(c)
    n = len(phi)
    # Faddeev-LeVerrier: M_0 = I; c_{n-k} accumulate traces
    coeffs = [Fraction(1)]  # leading first while building
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = [
            [sum(phi[i][l] * m[l][j] for l in range(n)) for j in range(n)]
            for i in range(n)
        ]
        ck = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(ck)
        m = [
            [am[i][j] + (ck if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
    ints = []
    for c_ in coeffs:
        if c_.denominator != 1:
            raise SingularCartanError(f"non-integral Coxeter coefficient {c_}")
        ints.append(int(c_))
    return tuple(reversed(ints))  # low degree first


# ---------------------------------------------------------------------------
# Two-term tilting complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoTermComplex:
    """Two-term complex (M --d--> N) of sums of projectives.

    minus side at k: M = P_k in degree -1, N = the sum of P_j over arrows
    j -> k together with every bystander P_i (i != k) in degree 0.  plus
    side at k: M = the sum of P_j over arrows k -> j together with the
    bystanders in degree 0, N = P_k in degree +1.  In both cases P_k sits
    alone in its degree and the differential is given by the arrows at k;
    tilting-ness only sees the (M, N, d) data.
    """

    side: str
    vertex: int
    m_summands: tuple[int, ...]
    n_summands: tuple[int, ...]
    differential: tuple[tuple[Path | None, ...], ...]  # rows: N, cols: M


def two_term_complex(basis: AlgebraBasis, side: str, k: int) -> TwoTermComplex:
    q = basis.quiver
    others = tuple(i for i in range(q.n) if i != k)
    idx = basis.arrows
    if side == "minus":
        into = [i for i, aid in enumerate(idx) if q.target(aid) == k]
        m_summands = (k,)
        n_summands = tuple(q.source(idx[i]) for i in into) + others
        diff = [[(i,)] for i in into] + [[None] for _ in others]
    elif side == "plus":
        outof = [i for i, aid in enumerate(idx) if q.source(aid) == k]
        m_summands = tuple(q.target(idx[i]) for i in outof) + others
        n_summands = (k,)
        diff = [[(i,) for i in outof] + [None] * len(others)]
    else:
        raise ValueError(f"unknown side {side!r}")
    return TwoTermComplex(side, k, m_summands, tuple(n_summands), tuple(tuple(r) for r in diff))


def _hom_basis(basis: AlgebraBasis, srcs, tgts):
    """Basis of Hom(⊕P_srcs, ⊕P_tgts): triples (row, col, path tgt->src)."""
    out = []
    for r, t in enumerate(tgts):
        for c, s in enumerate(srcs):
            for p in basis.hom_paths(t, s):
                out.append((r, c, p))
    return out


def is_tilting(basis: AlgebraBasis, t: TwoTermComplex) -> bool:
    """Hom-vanishing into both shifts of the complex.

    Degenerate cases need no special treatment: at a sink the plus complex
    has a zero differential and the bystander maps into P_k survive, so the
    check fails exactly as the thread criterion predicts (dually for minus
    at a source); at an isolated vertex both sides are trivially tilting.
    """
    return _hom_t_t1_vanishes(basis, t) and _hom_t_tminus1_vanishes(basis, t)


def _compose(basis: AlgebraBasis, p: Path, q: Path) -> Combo:
    return basis.multiply(p, q)


def _hom_t_tminus1_vanishes(basis: AlgebraBasis, t: TwoTermComplex) -> bool:
    """No nonzero phi: N -> M with phi.d = 0 and d.phi = 0."""
    m_s, n_s = t.m_summands, t.n_summands
    phis = _hom_basis(basis, n_s, m_s)  # maps N -> M
    if not phis:
        return True
    rows = []  # one row per linear condition, columns indexed by phis
    # phi . d : M -> M must vanish; entry (mr, mc) collects phi[mr][nr] * d[nr][mc]
    cond_index: dict = {}

    def cond_row(tag):
        row = cond_index.get(tag)
        if row is None:
            row = [Fraction(0)] * len(phis)
            cond_index[tag] = row
            rows.append(row)
        return row

    for col, (mr, nr, p) in enumerate(phis):
        # phi entry: M_mr <- N_nr along path p (path: src at M? p is tgt->src)
        # compose with d entries N_nr <- M_mc: product p.d gives M_mr <- M_mc
        for mc in range(len(m_s)):
            d_entry = t.differential[nr][mc]
            if d_entry is None:
                continue
            prod = _compose(basis, p, d_entry)
            for pp, cc in prod.items():
                cond_row(("phid", mr, mc, pp))[col] += cc
        # d . phi gives N -> N: entries d[nr2][mr] . phi[mr][nr]
        for nr2 in range(len(n_s)):
            d_entry = t.differential[nr2][mr]
            if d_entry is None:
                continue
            prod = _compose(basis, d_entry, p)
            for pp, cc in prod.items():
                cond_row(("dphi", nr2, nr, pp))[col] += cc
    rank = _rank(rows, len(phis))
    return rank == len(phis)


def _hom_t_t1_vanishes(basis: AlgebraBasis, t: TwoTermComplex) -> bool:
    """Every map M -> N is a homotopy combination h.d + d.h'."""
    m_s, n_s = t.m_summands, t.n_summands
    target = _hom_basis(basis, m_s, n_s)  # maps M -> N
    if not target:
        return True
    target_pos = {
        (r, c, p): i for i, (r, c, p) in enumerate(target)
    }
    h1 = _hom_basis(basis, m_s, m_s)  # M -> M
    h2 = _hom_basis(basis, n_s, n_s)  # N -> N
    cols = []
    # column for each generator: image in Hom(M, N) coordinates
    for (mr, mc, p) in h1:
        vec = [Fraction(0)] * len(target)
        # d . h1 : M -> N, entries d[nr][mr] . h1[mr][mc]
        for nr in range(len(n_s)):
            d_entry = t.differential[nr][mr]
            if d_entry is None:
                continue
            for pp, cc in _compose(basis, d_entry, p).items():
                pos = target_pos.get((nr, mc, pp))
                if pos is None:
                    raise AssertionError("composition left the hom basis")
                vec[pos] += cc
        cols.append(vec)
    for (nr, nc, p) in h2:
        vec = [Fraction(0)] * len(target)
        # h2 . d : M -> N, entries h2[nr][nc] . d[nc][mc]
        for mc in range(len(m_s)):
            d_entry = t.differential[nc][mc]
            if d_entry is None:
                continue
            for pp, cc in _compose(basis, p, d_entry).items():
                pos = target_pos.get((nr, mc, pp))
                if pos is None:
                    raise AssertionError("composition left the hom basis")
                vec[pos] += cc
        cols.append(vec)
    rank = _rank(cols, len(target))
    return rank == len(target)


def _rank(rows: list[list[Fraction]], width: int) -> int:
    mat = [row[:] for row in rows if any(row)]
    rank = 0
    col = 0
    while mat and col < width:
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [x / pv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def tilting_flags(qp: QP, basis: AlgebraBasis | None = None) -> tuple[list[bool], list[bool]]:
    """(minus, plus) definedness of the algebra mutation at every vertex."""
    if basis is None:
        basis = groebner_basis(jacobian_relations(qp))
    minus = []
    plus = []
    for k in range(qp.quiver.n):
        minus.append(is_tilting(basis, two_term_complex(basis, "minus", k)))
        plus.append(is_tilting(basis, two_term_complex(basis, "plus", k)))
    return minus, plus
