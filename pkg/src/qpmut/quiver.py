"""Finite multidigraphs with named arrows.

Vertices are dense integers 0..n-1.  Arrows are kept individually (parallel
arrows are never collapsed to weights) because potentials refer to individual
arrows.  All values are immutable; operations return new quivers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidQuiverError

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Arrow:
    id: str
    source: int
    target: int


@dataclass(frozen=True)
class Quiver:
    """A loop-free multidigraph on vertices 0..n-1 with uniquely named arrows."""

    n: int
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        seen = set()
        for a in self.arrows:
            if not (0 <= a.source < self.n and 0 <= a.target < self.n):
                raise InvalidQuiverError(f"arrow {a.id}: endpoint out of range")
            if a.source == a.target:
                raise InvalidQuiverError(f"arrow {a.id}: loop at vertex {a.source}")
            if a.id in seen:
                raise InvalidQuiverError(f"duplicate arrow id {a.id!r}")
            seen.add(a.id)

    @cached_property
    def by_id(self) -> dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def outs(self) -> tuple[tuple[Arrow, ...], ...]:
        buckets: list[list[Arrow]] = [[] for _ in range(self.n)]
        for a in self.arrows:
            buckets[a.source].append(a)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def ins(self) -> tuple[tuple[Arrow, ...], ...]:
        buckets: list[list[Arrow]] = [[] for _ in range(self.n)]
        for a in self.arrows:
            buckets[a.target].append(a)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def multiplicity(self) -> Matrix:
        """m[i][j] = number of arrows i -> j."""
        m = [[0] * self.n for _ in range(self.n)]
        for a in self.arrows:
            m[a.source][a.target] += 1
        return tuple(tuple(row) for row in m)

    def has_two_cycle(self) -> bool:
        m = self.multiplicity
        return any(
            m[i][j] and m[j][i] for i in range(self.n) for j in range(i + 1, self.n)
        )

    def source(self, arrow_id: str) -> int:
        return self.by_id[arrow_id].source

    def target(self, arrow_id: str) -> int:
        return self.by_id[arrow_id].target


def relabel(q: Quiver, perm: dict[int, int] | list[int]) -> Quiver:
    """Apply a vertex permutation (old index -> new index)."""
    if isinstance(perm, list):
        perm = {i: p for i, p in enumerate(perm)}
    return Quiver(q.n, tuple(Arrow(a.id, perm[a.source], perm[a.target]) for a in q.arrows))


# ---------------------------------------------------------------------------
# Exchange matrices and the mutation rule
# ---------------------------------------------------------------------------

def exchange_matrix(q: Quiver) -> Matrix:
    """Skew-symmetric matrix b[i][j] = #(i->j) - #(j->i)."""
    m = q.multiplicity
    return tuple(
        tuple(m[i][j] - m[j][i] for j in range(q.n)) for i in range(q.n)
    )


def mutate_matrix(b: Matrix, k: int) -> Matrix:
    """Mutate a skew-symmetric integer matrix at vertex k.

    b'[i][j] = -b[i][j] when k is i or j, and otherwise
    b[i][j] + sgn(b[i][k]) * max(b[i][k]*b[k][j], 0).
    """
    n = len(b)
    if not 0 <= k < n:
        raise IndexError(f"vertex {k} out of range for size {n}")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == k or j == k:
                row.append(-b[i][j])
            else:
                prod = b[i][k] * b[k][j]
                if prod > 0:
                    sign = 1 if b[i][k] > 0 else -1
                    row.append(b[i][j] + sign * prod)
                else:
                    row.append(b[i][j])
        out.append(tuple(row))
    return tuple(out)


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalKey:
    """Serialized canonical form of a quiver plus one relabeling achieving it.

    Two quivers have equal ``bytes`` exactly when they are isomorphic as
    multidigraphs.  ``perm[v]`` is the canonical position of vertex v.
    """

    bytes: bytes
    perm: tuple[int, ...]


def _refine(m: Matrix, n: int, colors: list[int]) -> list[int]:
    # Iterated degree-profile refinement: a vertex signature collects, per
    # current color class, the multiset of arrow multiplicities both ways.
    while True:
        sigs = []
        for v in range(n):
            prof = sorted((colors[u], m[v][u], m[u][v]) for u in range(n) if u != v)
            sigs.append((colors[v], tuple(prof)))
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _cells(colors: list[int]) -> list[list[int]]:
    buckets: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        buckets.setdefault(c, []).append(v)
    return [buckets[c] for c in sorted(buckets)]


def _canonical_search(q: Quiver) -> tuple[bytes, list[tuple[int, ...]]]:
    """Minimal serialized multiplicity matrix over all refinement-compatible
    vertex orders, together with every permutation achieving it."""
    n = q.n
    m = q.multiplicity
    best: list[bytes | None] = [None]
    best_perms: list[tuple[int, ...]] = []

    def serialize(order: list[int]) -> tuple[bytes, tuple[int, ...]]:
        pos = [0] * n
        for idx, v in enumerate(order):
            pos[v] = idx
        flat = bytearray([n])
        for i in order:
            row = m[i]
            for j in order:
                flat.append(row[j])
        return bytes(flat), tuple(pos)

    def descend(colors: list[int]):
        cells = _cells(colors)
        target = next((c for c in cells if len(c) > 1), None)
        if target is None:
            order = [c[0] for c in cells]
            blob, pos = serialize(order)
            if best[0] is None or blob < best[0]:
                best[0] = blob
                best_perms.clear()
                best_perms.append(pos)
            elif blob == best[0]:
                best_perms.append(pos)
            return
        nxt = max(colors) + 1
        for v in target:
            child = list(colors)
            child[v] = nxt
            # renumber so color ids stay dense and order-stable
            ranks = sorted(set(child))
            child = [ranks.index(c) for c in child]
            descend(_refine(m, n, child))

    descend(_refine(m, n, [0] * n))
    assert best[0] is not None
    return best[0], best_perms


def canonical_data(q: Quiver) -> tuple[bytes, list[tuple[int, ...]]]:
    """Canonical bytes and the full list of optimal relabelings (one per
    automorphism of the canonical form)."""
    return _canonical_search(q)


def canonicalize(q: Quiver) -> CanonicalKey:
    blob, perms = _canonical_search(q)
    return CanonicalKey(blob, perms[0])


def is_isomorphic(q1: Quiver, q2: Quiver) -> bool:
    if q1.n != q2.n or len(q1.arrows) != len(q2.arrows):
        return False
    return canonicalize(q1).bytes == canonicalize(q2).bytes


# ---------------------------------------------------------------------------
# Neighborhoods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Neighborhood:
    """Full subquiver on a vertex and all sources/targets of its arrows."""

    quiver: Quiver
    center: int
    vertices: tuple[int, ...]  # original vertex ids, in subquiver order


def neighborhood(q: Quiver, k: int) -> Neighborhood:
    verts = {k}
    for a in q.arrows:
        if a.source == k:
            verts.add(a.target)
        if a.target == k:
            verts.add(a.source)
    ordered = sorted(verts)
    index = {v: i for i, v in enumerate(ordered)}
    sub = tuple(
        Arrow(a.id, index[a.source], index[a.target])
        for a in q.arrows
        if a.source in verts and a.target in verts
    )
    return Neighborhood(Quiver(len(ordered), sub), index[k], tuple(ordered))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def quiver_to_obj(q: Quiver) -> dict:
    return {
        "n": q.n,
        "arrows": [{"id": a.id, "source": a.source, "target": a.target} for a in q.arrows],
    }


def quiver_from_obj(obj: dict) -> Quiver:
    return Quiver(
        int(obj["n"]),
        tuple(Arrow(str(a["id"]), int(a["source"]), int(a["target"])) for a in obj["arrows"]),
    )


def quiver_to_json(q: Quiver) -> str:
    return json.dumps(quiver_to_obj(q), indent=2)


def quiver_to_dot(q: Quiver, name: str = "quiver") -> str:
    lines = [f"digraph {name} {{"]
    for v in range(q.n):
        lines.append(f'  v{v} [label="{v}"];')
    for a in q.arrows:
        lines.append(f'  v{a.source} -> v{a.target} [label="{a.id}"];')
    lines.append("}")
    return "\n".join(lines)
