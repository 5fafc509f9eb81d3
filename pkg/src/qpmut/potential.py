"""Potentials on quivers and their mutation.

A potential is a rational linear combination of cyclic words in arrows.
Composition is read left to right: in a word (a, b) the target of a equals
the source of b, and the word closes up cyclically.  Words are stored in
their lexicographically minimal rotation.

Mutation at a vertex k proceeds in two steps: a premutation that reverses
the arrows at k, adds one composite arrow per composable pair through k and
appends the corresponding new 3-cycles to the potential; and a reduction
that eliminates 2-cycles of the quiver against quadratic potential terms by
repeated substitution.  All coefficient arithmetic is exact rational.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    CapExceededError,
    DegeneratePotentialError,
    ExchangeConsistencyError,
    InvalidQuiverError,
    NotReducedError,
)
from .quiver import (
    Arrow,
    CanonicalKey,
    Quiver,
    canonical_data,
    exchange_matrix,
    mutate_matrix,
    quiver_from_obj,
    quiver_to_obj,
)

Word = tuple[str, ...]
Terms = dict[Word, Fraction]


def cyclic_normalize(word: Word) -> Word:
    """Lexicographically minimal rotation of a cyclic word."""
    rotations = [word[i:] + word[:i] for i in range(len(word))]
    return min(rotations)


def check_cyclic(q: Quiver, word: Word) -> None:
    if not word:
        raise InvalidQuiverError("empty cyclic word")
    for t, aid in enumerate(word):
        if aid not in q.by_id:
            raise InvalidQuiverError(f"cyclic word uses unknown arrow {aid!r}")
        nxt = word[(t + 1) % len(word)]
        if q.target(aid) != q.source(nxt):
            raise InvalidQuiverError(f"cyclic word not composable at {aid!r} -> {nxt!r}")


@dataclass(frozen=True)
class Potential:
    """Finite map from cyclic words to nonzero rational coefficients."""

    terms: tuple[tuple[Word, Fraction], ...]

    @staticmethod
    def from_dict(d: Terms) -> "Potential":
        items = []
        for word, coeff in d.items():
            if coeff == 0:
                continue
            if len(word) == 1:
                raise InvalidQuiverError("length-1 potential terms are loops")
            items.append((cyclic_normalize(word), Fraction(coeff)))
        items.sort(key=lambda wc: (len(wc[0]), wc[0]))
        return Potential(tuple(items))

    def as_dict(self) -> Terms:
        return {w: c for w, c in self.terms}

    def __len__(self):
        return len(self.terms)

    def max_length(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)


@dataclass(frozen=True)
class QP:
    """A quiver together with a potential on it.

    ``reduced`` means the quiver has no 2-cycles and the potential no
    length-2 terms; only reduced QPs can be mutated.
    """

    quiver: Quiver
    potential: Potential
    reduced: bool

    def __post_init__(self):
        for word, _ in self.potential.terms:
            check_cyclic(self.quiver, word)

    @staticmethod
    def make(quiver: Quiver, terms: Terms) -> "QP":
        pot = Potential.from_dict(terms)
        reduced = not quiver.has_two_cycle() and all(len(w) > 2 for w, _ in pot.terms)
        return QP(quiver, pot, reduced)

    @cached_property
    def _canonical(self) -> tuple[bytes, tuple[tuple[int, ...], ...]]:
        blob, perms = canonical_data(self.quiver)
        return blob, tuple(perms)


@dataclass(frozen=True)
class ReductionConfig:
    degree_cap: int
    stabilization_margin: int = 2

    @staticmethod
    def default_for(q: Quiver) -> "ReductionConfig":
        return ReductionConfig(degree_cap=max(2 * len(q.arrows), 8))


# ---------------------------------------------------------------------------
# Cyclic derivatives
# ---------------------------------------------------------------------------

def cyclic_derivative(terms: Terms, arrow_id: str) -> dict[Word, Fraction]:
    """d/d(arrow) of a potential: for every occurrence of the arrow in a
    cyclic word, the rotated remainder path.  Paths map target(a) -> source(a);
    the empty remainder never occurs because length-1 words are excluded."""
    out: dict[Word, Fraction] = {}
    for word, coeff in terms.items():
        for t, aid in enumerate(word):
            if aid == arrow_id:
                rest = word[t + 1 :] + word[:t]
                out[rest] = out.get(rest, Fraction(0)) + coeff
    return {p: c for p, c in out.items() if c != 0}


# ---------------------------------------------------------------------------
# Premutation
# ---------------------------------------------------------------------------

def premutate(qp: QP, k: int) -> QP:
    """Reverse the arrows at k, composite every path through k, extend W.

    Arrows a: i->k and b: k->j become a*: k->i and b*: j->k; each pair
    contributes a composite [a.b]: i->j.  In W every consecutive passage
    a.b through k is replaced by [a.b], and the sum of the cycles
    [a.b] b* a* is added.  The result is generally unreduced.
    """
    q = qp.quiver
    if not 0 <= k < q.n:
        raise IndexError(f"vertex {k} out of range")
    if not qp.reduced:
        raise NotReducedError("premutation requires a reduced QP")

    ins = q.ins[k]
    outs = q.outs[k]
    star = {a.id: a.id + "*" for a in ins + outs}

    arrows: list[Arrow] = []
    for a in q.arrows:
        if a.target == k:
            arrows.append(Arrow(star[a.id], k, a.source))
        elif a.source == k:
            arrows.append(Arrow(star[a.id], a.target, k))
        else:
            arrows.append(a)
    composite = {}
    for a in ins:
        for b in outs:
            cid = f"[{a.id}.{b.id}]"
            composite[(a.id, b.id)] = cid
            arrows.append(Arrow(cid, a.source, b.target))

    new_quiver = Quiver(q.n, tuple(arrows))

    new_terms: Terms = {}

    def add(word: Word, coeff: Fraction):
        word = cyclic_normalize(word)
        c = new_terms.get(word, Fraction(0)) + coeff
        if c:
            new_terms[word] = c
        else:
            new_terms.pop(word, None)

    in_ids = {a.id for a in ins}
    for word, coeff in qp.potential.terms:
        m = len(word)
        replaced: list[str] = []
        t = 0
        # every passage through k is an (in-arrow, out-arrow) pair; the pair
        # may wrap around the stored rotation, so rotate first if needed
        if word[-1] in in_ids:
            word = word[-1:] + word[:-1]
        while t < m:
            aid = word[t]
            if aid in in_ids:
                bid = word[(t + 1) % m]
                replaced.append(composite[(aid, bid)])
                t += 2
            else:
                replaced.append(aid)
                t += 1
        add(tuple(replaced), coeff)

    for a in ins:
        for b in outs:
            add((composite[(a.id, b.id)], star[b.id], star[a.id]), Fraction(1))

    return QP(new_quiver, Potential.from_dict(new_terms), reduced=False)


# ---------------------------------------------------------------------------
# Reduction: splitting off the trivial part
# ---------------------------------------------------------------------------

def _substitute(
    terms: Terms, arrow_id: str, correction: dict[Word, Fraction], cap: int
) -> Terms:
    """Replace every occurrence of the arrow by (arrow - correction),
    expanding multilinearly and truncating words beyond cap."""
    out: Terms = {}

    def add(word: Word, coeff: Fraction):
        if len(word) > cap:
            return
        word = cyclic_normalize(word)
        c = out.get(word, Fraction(0)) + coeff
        if c:
            out[word] = c
        else:
            out.pop(word, None)

    for word, coeff in terms.items():
        slots = [t for t, aid in enumerate(word) if aid == arrow_id]
        if not slots:
            add(word, coeff)
            continue
        # expand the product over all occurrences
        expansions: list[tuple[Word, Fraction]] = [((), coeff)]
        prev = 0
        for t in slots:
            segment = word[prev:t]
            nxt: list[tuple[Word, Fraction]] = []
            for built, c in expansions:
                base = built + segment
                nxt.append((base + (arrow_id,), c))
                for path, pc in correction.items():
                    nxt.append((base + path, -c * pc))
            expansions = nxt
            prev = t + 1
        tail = word[prev:]
        for built, c in expansions:
            add(built + tail, c)
    return out


def reduce_qp(
    qp: QP, cfg: ReductionConfig | None = None, trace: list | None = None
) -> QP:
    """Eliminate 2-cycles of the quiver against length-2 potential terms.

    While a quadratic term c*a*b exists, substitute
        a -> a - (1/c) * (dW/db - c*a),   b -> b - (1/c) * (dW/da - c*b)
    until a and b occur only in that term, then delete both arrows and the
    term.  Substitution pushes the stray occurrences into higher degree, so
    with a Jacobian-finite input the corrections die out under the cap.
    """
    q = qp.quiver
    if cfg is None:
        cfg = ReductionConfig.default_for(q)
    terms = qp.potential.as_dict()
    if cfg.degree_cap < max((len(w) for w in terms), default=0):
        raise CapExceededError("degree cap below longest input term")
    arrows = {a.id: a for a in q.arrows}

    def quadratic():
        quads = sorted(w for w in terms if len(w) == 2)
        return quads[0] if quads else None

    while True:
        pair = quadratic()
        if pair is None:
            break
        a_id, b_id = pair
        for _ in range(cfg.degree_cap + 1):
            c = terms[pair]
            da = cyclic_derivative(terms, a_id)
            db = cyclic_derivative(terms, b_id)
            ra = {p: x for p, x in db.items() if p != (a_id,)}
            extra = db.get((a_id,), Fraction(0)) - c
            if extra:
                ra[(a_id,)] = extra
            rb = {p: x for p, x in da.items() if p != (b_id,)}
            extra = da.get((b_id,), Fraction(0)) - c
            if extra:
                rb[(b_id,)] = extra
            if not ra and not rb:
                break
            inv = 1 / c
            if ra:
                corr = {p: x * inv for p, x in ra.items()}
                terms = _substitute(terms, a_id, corr, cfg.degree_cap)
                if trace is not None:
                    trace.append({"substitute": a_id, "correction": _combo_obj(corr)})
            if rb:
                corr = {p: x * inv for p, x in rb.items()}
                terms = _substitute(terms, b_id, corr, cfg.degree_cap)
                if trace is not None:
                    trace.append({"substitute": b_id, "correction": _combo_obj(corr)})
            if pair not in terms:
                raise DegeneratePotentialError(
                    f"quadratic term {pair} vanished during substitution"
                )
        else:
            raise CapExceededError(
                f"2-cycle ({a_id}, {b_id}) not eliminated within degree cap {cfg.degree_cap}"
            )
        del terms[pair]
        del arrows[a_id]
        del arrows[b_id]
        if trace is not None:
            trace.append({"eliminated": [a_id, b_id]})

    new_quiver = Quiver(q.n, tuple(a for a in q.arrows if a.id in arrows))
    for word in terms:
        for aid in word:
            if aid not in arrows:
                raise DegeneratePotentialError(
                    f"term {word} survives on a deleted arrow {aid}"
                )
    if new_quiver.has_two_cycle():
        raise DegeneratePotentialError(
            "2-cycle in the quiver admits no eliminating quadratic term"
        )
    return QP(new_quiver, Potential.from_dict(terms), reduced=True)


def rename_arrows(qp: QP) -> QP:
    """Deterministically rename arrows to a0, a1, ... (sorted by endpoints,
    then by old id).  Mutation composes names like ``[a3.a5*]``; renaming
    after each mutation keeps ids bounded along long mutation paths."""
    order = sorted(qp.quiver.arrows, key=lambda a: (a.source, a.target, a.id))
    mapping = {a.id: f"a{i}" for i, a in enumerate(order)}
    new_q = Quiver(
        qp.quiver.n,
        tuple(Arrow(mapping[a.id], a.source, a.target) for a in order),
    )
    terms = {
        tuple(mapping[aid] for aid in word): coeff
        for word, coeff in qp.potential.terms
    }
    return QP(new_q, Potential.from_dict(terms), qp.reduced)


def mutate_qp(
    qp: QP,
    k: int,
    cfg: ReductionConfig | None = None,
    trace: list | None = None,
    rename: bool = True,
) -> QP:
    """Full mutation at k: reduce(premutate(qp, k)).

    The exchange matrix of the result is checked against the matrix mutation
    rule applied to the input; a mismatch raises, since it means either the
    premutation or the reduction miscounted arrows.
    """
    pre = premutate(qp, k)
    if trace is not None:
        trace.append({"premutated": qp_to_obj(pre)})
    out = reduce_qp(pre, cfg, trace)
    expected = mutate_matrix(exchange_matrix(qp.quiver), k)
    actual = exchange_matrix(out.quiver)
    if expected != actual:
        raise ExchangeConsistencyError(
            f"mutation at {k}: exchange matrix {actual} != matrix-rule result {expected}"
        )
    return rename_arrows(out) if rename else out


# ---------------------------------------------------------------------------
# Keys and counts
# ---------------------------------------------------------------------------

def qp_key(qp: QP, mode: str = "quiver") -> CanonicalKey:
    """Canonical key of a reduced QP.

    mode "quiver": the quiver canonical form alone (the potential rides
    along as decoration).  mode "structural": the quiver key extended with
    the multiset of term lengths and each term's support as a multiset of
    canonical arrow images, minimized over all optimal relabelings.
    """
    if not qp.reduced:
        raise NotReducedError("keys are defined for reduced QPs")
    blob, perms = qp._canonical
    if mode == "quiver":
        return CanonicalKey(blob, perms[0])
    if mode != "structural":
        raise ValueError(f"unknown key mode {mode!r}")
    q = qp.quiver
    best = None
    for perm in perms:
        sig = tuple(
            sorted(
                (
                    len(word),
                    tuple(sorted((perm[q.source(a)], perm[q.target(a)]) for a in word)),
                )
                for word, _ in qp.potential.terms
            )
        )
        if best is None or sig < best:
            best = sig
    payload = blob + repr(best).encode()
    return CanonicalKey(payload, perms[0])


def triangle_count(qp: QP) -> int:
    """Number of length-3 cyclic words in the potential support."""
    if not qp.reduced:
        raise NotReducedError("triangle count is defined for reduced QPs")
    return sum(1 for w, _ in qp.potential.terms if len(w) == 3)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _combo_obj(combo: dict[Word, Fraction]) -> list:
    return [
        {"coeff": str(c), "path": list(p)}
        for p, c in sorted(combo.items(), key=lambda pc: (len(pc[0]), pc[0]))
    ]


def qp_to_obj(qp: QP) -> dict:
    obj = quiver_to_obj(qp.quiver)
    obj["potential"] = [
        {"coeff": str(coeff), "cycle": list(word)} for word, coeff in qp.potential.terms
    ]
    return obj


def qp_from_obj(obj: dict) -> QP:
    q = quiver_from_obj(obj)
    terms: Terms = {}
    for entry in obj.get("potential", []):
        word = tuple(str(x) for x in entry["cycle"])
        check_cyclic(q, word)
        coeff = Fraction(entry["coeff"])
        if coeff == 0:
            raise InvalidQuiverError("zero coefficient in potential")
        word = cyclic_normalize(word)
        if word in terms:
            raise InvalidQuiverError(f"duplicate potential term {word}")
        terms[word] = coeff
    return QP.make(q, terms)


def qp_to_json(qp: QP) -> str:
    return json.dumps(qp_to_obj(qp), indent=2)


def qp_from_json(text: str) -> QP:
    return qp_from_obj(json.loads(text))
