"""Gentle presentations, threads, and the thread-pairing derived invariant.

A surface QP (all potential terms of length 3, coefficients +-1) presents a
gentle algebra: each triangle term contributes its three consecutive pairs
as zero-relations.  The derived invariant is computed by completing every
vertex to two in-slots and two out-slots (virtual slots fill the gaps) and
equipping it with two complementary perfect matchings: the nonzero-composition
matching and the relation matching.  Maximal chains through the first are
the permitted threads, through the second the forbidden threads; closed
relation chains are counted separately.  Walking exit-slot to exit-slot and
entry-slot to entry-slot decomposes the threads into cycles, and each cycle
records (number of permitted threads, total arrows of forbidden threads).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import InfiniteDimensionalError, NotGentleError
from .potential import QP
from .quiver import Quiver

Relation = tuple[str, str]


@dataclass(frozen=True)
class GentlePresentation:
    quiver: Quiver
    relations: frozenset[Relation]  # (a, b) means the path a.b is zero

    @cached_property
    def _slots(self) -> "_SlotStructure":
        return _SlotStructure(self)


@dataclass(frozen=True)
class Thread:
    """Maximal nonzero path (permitted) or maximal zero path (forbidden).

    Trivial threads carry no arrows and sit at a single vertex; ``slot``
    distinguishes the two trivial threads a bare vertex can host per kind.
    """

    kind: str  # "permitted" | "forbidden"
    arrows: tuple[str, ...]
    vertex: int | None = None
    slot: int | None = None

    def __len__(self):
        return len(self.arrows)


@dataclass(frozen=True)
class AAGInvariant:
    """Finite multiset of pairs of naturals, written as a sum c*(n, m)."""

    pairs: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def from_list(items: list[tuple[int, int]]) -> "AAGInvariant":
        counts: dict[tuple[int, int], int] = {}
        for nm in items:
            counts[nm] = counts.get(nm, 0) + 1
        return AAGInvariant(tuple(sorted(counts.items())))

    def __str__(self):
        if not self.pairs:
            return "0"
        return " + ".join(f"{c}({n},{m})" for (n, m), c in self.pairs)

    def as_obj(self) -> list[list[int]]:
        return [[n, m, c] for (n, m), c in self.pairs]


def check_gentle(q: Quiver, relations: frozenset[Relation]) -> None:
    for v in range(q.n):
        if len(q.outs[v]) > 2:
            raise NotGentleError(f"vertex {v} has {len(q.outs[v])} outgoing arrows")
        if len(q.ins[v]) > 2:
            raise NotGentleError(f"vertex {v} has {len(q.ins[v])} incoming arrows")
    for a, b in relations:
        if q.target(a) != q.source(b):
            raise NotGentleError(f"relation ({a}, {b}) is not a composable pair")
    for a in q.arrows:
        rel_succ = [b.id for b in q.outs[a.target] if (a.id, b.id) in relations]
        free_succ = [b.id for b in q.outs[a.target] if (a.id, b.id) not in relations]
        if len(rel_succ) > 1:
            raise NotGentleError(f"arrow {a.id} has two relation successors {rel_succ}")
        if len(free_succ) > 1:
            raise NotGentleError(f"arrow {a.id} has two nonzero successors {free_succ}")
        rel_pred = [b.id for b in q.ins[a.source] if (b.id, a.id) in relations]
        free_pred = [b.id for b in q.ins[a.source] if (b.id, a.id) not in relations]
        if len(rel_pred) > 1:
            raise NotGentleError(f"arrow {a.id} has two relation predecessors {rel_pred}")
        if len(free_pred) > 1:
            raise NotGentleError(f"arrow {a.id} has two nonzero predecessors {free_pred}")


def gentle_from_qp(qp: QP) -> GentlePresentation:
    """Relations are the cyclically-consecutive pairs of each triangle term."""
    relations: set[Relation] = set()
    for word, coeff in qp.potential.terms:
        if len(word) != 3:
            raise NotGentleError(
                f"potential term of length {len(word)} is not a triangle"
            )
        if coeff not in (1, -1):
            raise NotGentleError(f"triangle coefficient {coeff} is not a unit sign")
        for t in range(3):
            relations.add((word[t], word[(t + 1) % 3]))
    pres = GentlePresentation(qp.quiver, frozenset(relations))
    check_gentle(qp.quiver, pres.relations)
    return pres


# ---------------------------------------------------------------------------
# Slot structure
# ---------------------------------------------------------------------------

# slot tokens: real slots are arrow ids; virtual slots are ("v", vertex, side, i)
Slot = object


class _SlotStructure:
    """Two-in two-out completion of a gentle presentation with the pair of
    complementary matchings at every vertex."""

    def __init__(self, pres: GentlePresentation):
        q = pres.quiver
        rel = pres.relations
        self.pres = pres
        self.perm_next: dict = {}  # in-slot -> out-slot along nonzero composition
        self.forb_next: dict = {}  # in-slot -> out-slot along relations

        for v in range(q.n):
            ins: list = sorted(a.id for a in q.ins[v])
            outs: list = sorted(a.id for a in q.outs[v])
            while len(ins) < 2:
                ins.append(("v", v, "in", len(ins)))
            while len(outs) < 2:
                outs.append(("v", v, "out", len(outs)))
            identity = {ins[0]: outs[0], ins[1]: outs[1]}
            swap = {ins[0]: outs[1], ins[1]: outs[0]}
            choice = None
            for bi in ins:
                for bo in outs:
                    if isinstance(bi, str) and isinstance(bo, str):
                        matched_by_identity = identity[bi] == bo
                        if (bi, bo) in rel:
                            choice = swap if matched_by_identity else identity
                        else:
                            choice = identity if matched_by_identity else swap
            if choice is None:
                choice = identity
            other = swap if choice is identity else identity
            # consistency of all pinned pairs with the chosen matchings
            for bi in ins:
                for bo in outs:
                    if isinstance(bi, str) and isinstance(bo, str):
                        if ((bi, bo) in rel) != (other[bi] == bo):
                            raise NotGentleError(
                                f"relations at vertex {v} do not split into matchings"
                            )
            self.perm_next.update(choice)
            self.forb_next.update(other)

    def chains(self, kind: str):
        """Decompose one matching into linear chains and closed cycles over
        real arrows.  Returns (threads, cycles); each thread records its
        virtual entry and exit slots."""
        q = self.pres.quiver
        nxt = self.perm_next if kind == "permitted" else self.forb_next
        succ: dict[str, str | None] = {}
        entry_arrow: dict[str, bool] = {a.id: True for a in q.arrows}
        for a in q.arrows:
            out = nxt[a.id]
            if isinstance(out, str):
                succ[a.id] = out
                entry_arrow[out] = False
            else:
                succ[a.id] = None
        threads = []
        seen = set()
        for aid in sorted(entry_arrow):
            if not entry_arrow[aid]:
                continue
            chain = [aid]
            seen.add(aid)
            while succ[chain[-1]] is not None:
                chain.append(succ[chain[-1]])
                seen.add(chain[-1])
            entry = self._entry_slot(nxt, chain[0])
            exit_ = nxt[chain[-1]]
            threads.append((Thread(kind, tuple(chain)), entry, exit_))
        cycles = []
        for aid in sorted(succ):
            if aid in seen:
                continue
            cyc = [aid]
            seen.add(aid)
            while True:
                n = succ[cyc[-1]]
                if n == cyc[0]:
                    break
                cyc.append(n)
                seen.add(n)
            cycles.append(tuple(cyc))
        # trivial threads: virtual in-slot matched to a virtual out-slot
        for slot_in, slot_out in sorted(
            ((i, o) for i, o in nxt.items() if not isinstance(i, str) and not isinstance(o, str)),
            key=repr,
        ):
            v = slot_in[1]
            threads.append(
                (Thread(kind, (), vertex=v, slot=slot_in[3]), slot_in, slot_out)
            )
        return threads, cycles

    def _entry_slot(self, nxt, first_arrow: str):
        for slot, out in nxt.items():
            if out == first_arrow:
                return slot
        raise AssertionError(f"no entry slot feeds arrow {first_arrow}")


def threads(pres: GentlePresentation) -> list[Thread]:
    """All permitted and forbidden threads, trivial ones included.

    Raises when a relation-free oriented cycle exists: path growth along it
    never terminates, so the presented algebra is infinite-dimensional.
    """
    slots = pres._slots
    perm, perm_cycles = slots.chains("permitted")
    if perm_cycles:
        raise InfiniteDimensionalError(
            f"relation-free oriented cycle {perm_cycles[0]}"
        )
    forb, _ = slots.chains("forbidden")
    return [t for t, _, _ in perm] + [t for t, _, _ in forb]


def critical_cycles(pres: GentlePresentation) -> list[tuple[str, ...]]:
    """Oriented cycles all of whose consecutive pairs are relations."""
    _, cycles = pres._slots.chains("forbidden")
    return cycles


def aag(pres: GentlePresentation) -> AAGInvariant:
    """Pair permitted and forbidden threads into cycles and record, per
    cycle, the permitted count and the total forbidden length; every closed
    relation cycle of length m adds one (0, m)."""
    slots = pres._slots
    perm, perm_cycles = slots.chains("permitted")
    if perm_cycles:
        raise InfiniteDimensionalError(
            f"relation-free oriented cycle {perm_cycles[0]}"
        )
    forb, forb_cycles = slots.chains("forbidden")
    by_exit = {exit_: (t, entry) for t, entry, exit_ in forb}
    by_entry = {entry: (t, exit_) for t, entry, exit_ in perm}
    pairs: list[tuple[int, int]] = []
    unused = {entry: t for t, entry, exit_ in perm}
    order = [entry for _, entry, _ in perm]
    consumed_forb = 0
    for start in order:
        if start not in unused:
            continue
        n = m = 0
        entry = start
        while True:
            if entry not in unused:
                raise AssertionError("thread pairing failed to close")
            del unused[entry]
            n += 1
            _, exit_ = by_entry[entry]
            f, f_entry = by_exit[exit_]
            m += len(f.arrows)
            consumed_forb += 1
            entry = f_entry
            if entry == start:
                break
        pairs.append((n, m))
    if unused or consumed_forb != len(forb):
        raise AssertionError("thread pairing left threads unconsumed")
    for cyc in forb_cycles:
        pairs.append((0, len(cyc)))
    return AAGInvariant.from_list(pairs)


# ---------------------------------------------------------------------------
# Cartan data
# ---------------------------------------------------------------------------

def gentle_cartan(pres: GentlePresentation) -> tuple[tuple[int, ...], ...]:
    """C[i][j] = number of relation-free paths i -> j, trivial paths included.

    Every nonzero path is a consecutive window of exactly one permitted
    thread, so the count is finite once threads are."""
    q = pres.quiver
    c = [[0] * q.n for _ in range(q.n)]
    for v in range(q.n):
        c[v][v] = 1
    for t in threads(pres):
        if t.kind != "permitted" or not t.arrows:
            continue
        m = len(t.arrows)
        for i in range(m):
            src = q.source(t.arrows[i])
            for j in range(i, m):
                c[src][q.target(t.arrows[j])] += 1
    return tuple(tuple(row) for row in c)


def int_det(matrix) -> int:
    """Exact integer determinant by fraction-free elimination."""
    m = [list(row) for row in matrix]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Mutation criteria
# ---------------------------------------------------------------------------

def mu_minus_defined(pres: GentlePresentation, k: int) -> bool:
    """True when no maximal nonzero path starts at k."""
    q = pres.quiver
    return not any(
        t.arrows and q.source(t.arrows[0]) == k
        for t in threads(pres)
        if t.kind == "permitted"
    )


def mu_plus_defined(pres: GentlePresentation, k: int) -> bool:
    """True when no maximal nonzero path ends at k."""
    q = pres.quiver
    return not any(
        t.arrows and q.target(t.arrows[-1]) == k
        for t in threads(pres)
        if t.kind == "permitted"
    )


def _good_pattern(q: Quiver, k: int) -> bool:
    ins = q.ins[k]
    outs = q.outs[k]
    if len(ins) != 1 or len(outs) != 1:
        return True
    i = ins[0].source
    j = outs[0].target
    if i == j:
        return True
    m = q.multiplicity
    fwd = m[i][j]  # direct arrows alongside the path through k
    back = m[j][i]  # arrows closing a cycle through k
    # (fwd, back): (0,0) bare path; (0,1) oriented 3-cycle; (1,0) path with
    # a shortcut; (0,2) 3-cycle through a double arrow
    return (fwd, back) not in {(0, 0), (0, 1), (1, 0), (0, 2)}


def is_good_vertex(qp: QP, k: int) -> bool:
    """Mutation at k preserves derived equivalence unless the neighborhood
    of k is one of four small obstructions:

      (N1) i -> k -> j with nothing else at k and no arrow between i and j;
      (N2) k on an oriented 3-cycle with no other arrows at k (whether or
           not the cycle is a potential triangle: either way the triangle
           count changes under mutation, so the Cartan determinant moves);
      (N3) as N1 but with a direct arrow i -> j;
      (N4) k -> j, a double arrow j => i, and i -> k.

    Good vertices keep the arrow and triangle counts fixed; at a bad vertex
    the two sides of the mutation differ in Cartan determinant by a factor
    of 2.  Only meaningful for surface QPs, so non-gentle input is rejected.
    """
    gentle_from_qp(qp)  # raises unless qp presents a gentle algebra
    return _good_pattern(qp.quiver, k)


def good_vertices(qp: QP) -> list[bool]:
    """is_good_vertex at every vertex, validating gentleness once."""
    gentle_from_qp(qp)
    return [_good_pattern(qp.quiver, k) for k in range(qp.quiver.n)]
