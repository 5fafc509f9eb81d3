"""Breadth-first enumeration of mutation classes up to isomorphism.

Nodes are canonical representatives deduplicated by quiver-level canonical
key (structural keys are tracked alongside so a finer-than-quiver class
count is visible when it differs).  Every vertex of every node is mutated,
so the edge list certifies both connectivity and the involution property.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import (
    DimensionNotResolvedError,
    InfiniteDimensionalError,
    NotGentleError,
    QPMutError,
    SingularCartanError,
)
from .gentle import (
    aag,
    gentle_cartan,
    gentle_from_qp,
    good_vertices,
    int_det,
    mu_minus_defined,
    mu_plus_defined,
)
from .potential import QP, mutate_qp, qp_key, triangle_count


@dataclass
class ClassNode:
    qp: QP
    key: bytes
    structural_key: bytes
    invariants: dict = field(default_factory=dict)


@dataclass
class MutationClassReport:
    nodes: list[ClassNode]
    edges: list[tuple[int, int, int]]  # (node, mutated vertex, node)
    key_mode: str
    complete: bool
    seed_index: int
    node_cap: int
    invariant_mode: str

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def structural_class_count(self) -> int:
        return len({n.structural_key for n in self.nodes})

    def good_edge_stats(self) -> tuple[int, list[tuple[int, int]]]:
        """(number of good directed edges, list of bad (node, vertex))."""
        bad = []
        good = 0
        for i, k, _ in self.edges:
            flags = self.nodes[i].invariants.get("good_vertices")
            if flags is None:
                continue
            if flags[k]:
                good += 1
            else:
                bad.append((i, k))
        return good, bad


def _gentle_invariants(qp: QP) -> dict:
    pres = gentle_from_qp(qp)
    cartan = gentle_cartan(pres)
    return {
        "n": qp.quiver.n,
        "e": len(qp.quiver.arrows),
        "t": triangle_count(qp),
        "aag": aag(pres),
        "cartan_det": int_det(cartan),
        "good_vertices": good_vertices(qp),
        "mu_minus": [mu_minus_defined(pres, k) for k in range(qp.quiver.n)],
        "mu_plus": [mu_plus_defined(pres, k) for k in range(qp.quiver.n)],
    }


def _jacobian_invariants(qp: QP) -> dict:
    from .jacobian import cartan, coxeter_polynomial, groebner_basis, jacobian_relations

    basis = groebner_basis(jacobian_relations(qp))
    c = cartan(basis)
    inv = {
        "n": qp.quiver.n,
        "e": len(qp.quiver.arrows),
        "t": triangle_count(qp),
        "dim": basis.dimension,
        "cartan_det": int_det(c),
    }
    try:
        inv["coxeter"] = coxeter_polynomial(c)
    except SingularCartanError:
        inv["coxeter"] = None
    return inv


def node_invariants(qp: QP, mode: str) -> dict:
    if mode == "none":
        return {
            "n": qp.quiver.n,
            "e": len(qp.quiver.arrows),
            "t": triangle_count(qp),
        }
    if mode == "gentle":
        return _gentle_invariants(qp)
    if mode == "jacobian":
        return _jacobian_invariants(qp)
    if mode == "auto":
        try:
            return _gentle_invariants(qp)
        except NotGentleError:
            return _jacobian_invariants(qp)
    raise ValueError(f"unknown invariant mode {mode!r}")


def enumerate_class(
    seed: QP,
    key_mode: str = "quiver",
    node_cap: int = 10000,
    invariant_mode: str = "auto",
    threads: int = 1,
) -> MutationClassReport:
    """Close the seed under mutation at every vertex, up to isomorphism.

    Stops when the frontier empties or node_cap is reached (the report is
    then marked incomplete).  The node list is finally sorted by canonical
    key so the output is independent of expansion schedule.
    """
    if not seed.reduced:
        raise QPMutError("enumeration requires a reduced seed")

    def keys_of(qp: QP) -> tuple[bytes, bytes]:
        return qp_key(qp, "quiver").bytes, qp_key(qp, "structural").bytes

    kq, ks = keys_of(seed)
    seed_id = kq if key_mode == "quiver" else ks
    nodes = [ClassNode(seed, kq, ks)]
    index = {seed_id: 0}
    edges: list[tuple[int, int, int]] = []
    frontier = [0]
    complete = True
    nverts = seed.quiver.n

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            nxt: list[int] = []
            jobs = [(i, k) for i in frontier for k in range(nverts)]
            if pool is not None:
                results = list(
                    pool.map(lambda ik: mutate_qp(nodes[ik[0]].qp, ik[1]), jobs)
                )
            else:
                results = [mutate_qp(nodes[i].qp, k) for i, k in jobs]
            for (i, k), out in zip(jobs, results):
                okq, oks = keys_of(out)
                out_id = okq if key_mode == "quiver" else oks
                j = index.get(out_id)
                if j is None:
                    if len(nodes) >= node_cap:
                        complete = False
                        continue
                    j = len(nodes)
                    index[out_id] = j
                    nodes.append(ClassNode(out, okq, oks))
                    nxt.append(j)
                edges.append((i, k, j))
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()

    for node in nodes:
        node.invariants = node_invariants(node.qp, invariant_mode)

    # canonical presentation order
    order = sorted(range(len(nodes)), key=lambda i: (nodes[i].key, nodes[i].structural_key))
    rank = {old: new for new, old in enumerate(order)}
    nodes = [nodes[i] for i in order]
    edges = sorted((rank[i], k, rank[j]) for i, k, j in edges)
    return MutationClassReport(
        nodes=nodes,
        edges=edges,
        key_mode=key_mode,
        complete=complete,
        seed_index=rank[0],
        node_cap=node_cap,
        invariant_mode=invariant_mode,
    )


# ---------------------------------------------------------------------------
# Verdicts on the four class conditions
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    status: str  # "verified" | "refuted" | "inconclusive"
    witness: dict | None = None

    def as_obj(self):
        return {"status": self.status, "witness": self.witness}


@dataclass
class DeltaReport:
    finite_dimensional: Verdict  # one member has a finite-dimensional algebra
    derived_equivalent: Verdict  # all members derived equivalent
    all_mutations_good: Verdict  # every mutation is good
    finite_class: Verdict  # the class itself is finite

    def as_obj(self):
        return {
            "delta1": self.finite_dimensional.as_obj(),
            "delta2": self.derived_equivalent.as_obj(),
            "delta3": self.all_mutations_good.as_obj(),
            "delta4": self.finite_class.as_obj(),
        }


def delta_report(report: MutationClassReport) -> DeltaReport:
    from .jacobian import groebner_basis, jacobian_relations

    seed = report.nodes[report.seed_index].qp
    try:
        basis = groebner_basis(jacobian_relations(seed))
        d1 = Verdict("verified", {"dim": basis.dimension})
    except (DimensionNotResolvedError, InfiniteDimensionalError) as exc:
        d1 = Verdict("inconclusive", {"error": str(exc)})

    d4 = Verdict("verified" if report.complete else "inconclusive",
                 None if report.complete else {"node_cap": report.node_cap})

    # invariant mismatch between any two nodes refutes derived equivalence
    d2 = None
    for field_name in ("cartan_det", "aag"):
        values = {}
        for idx, node in enumerate(report.nodes):
            v = node.invariants.get(field_name)
            if v is None:
                continue
            values.setdefault(str(v), (idx, v))
        if len(values) > 1:
            (ia, va), (ib, vb) = sorted(values.values())[:2]
            d2 = Verdict(
                "refuted",
                {"invariant": field_name, "nodes": [ia, ib], "values": [str(va), str(vb)]},
            )
            break

    gentle_class = all("good_vertices" in n.invariants for n in report.nodes)
    if gentle_class:
        good, bad = report.good_edge_stats()
        if bad:
            d3 = Verdict("refuted", {"bad": bad[:10]})
        else:
            d3 = Verdict("verified" if report.complete else "inconclusive",
                         {"good_edges": good})
    else:
        d3 = Verdict("inconclusive", {"reason": "goodness criterion needs a gentle class"})

    if d2 is None:
        if gentle_class and d3.status == "verified":
            d2 = Verdict("verified", {"via": "all mutations good"})
        else:
            d2 = Verdict("inconclusive", None)
    return DeltaReport(d1, d2, d3, d4)


def disjointness_check(a: MutationClassReport, b: MutationClassReport) -> dict:
    """Compare two enumerated classes: node-key disjointness plus whether
    the invariant already separates them."""
    keys_a = {n.key for n in a.nodes}
    keys_b = {n.key for n in b.nodes}
    aag_a = {str(n.invariants.get("aag")) for n in a.nodes}
    aag_b = {str(n.invariants.get("aag")) for n in b.nodes}
    return {
        "disjoint": not (keys_a & keys_b),
        "aag_separates": not (aag_a & aag_b) and None not in (aag_a, aag_b),
        "aag_values": [sorted(aag_a), sorted(aag_b)],
    }


def report_to_obj(report: MutationClassReport) -> dict:
    from .potential import qp_to_obj

    def inv_obj(inv: dict) -> dict:
        out = {}
        for key, val in inv.items():
            if key == "aag":
                out[key] = val.as_obj()
            else:
                out[key] = val
        return out

    return {
        "size": report.size,
        "structural_class_count": report.structural_class_count,
        "key_mode": report.key_mode,
        "complete": report.complete,
        "seed_index": report.seed_index,
        "nodes": [
            {
                "key": node.key.hex(),
                "structural_key": node.structural_key.hex()[:64],
                "qp": qp_to_obj(node.qp),
                "invariants": inv_obj(node.invariants),
            }
            for node in report.nodes
        ],
        "edges": [list(e) for e in report.edges],
    }


def mutation_graph_dot(report: MutationClassReport) -> str:
    lines = ["digraph mutation_class {"]
    for i, node in enumerate(report.nodes):
        label = node.key.hex()[:10]
        lines.append(f'  n{i} [label="{i}:{label}"];')
    seen = set()
    for i, k, j in report.edges:
        if (j, k, i) in seen:
            continue
        seen.add((i, k, j))
        lines.append(f'  n{i} -> n{j} [label="{k}"];')
    lines.append("}")
    return "\n".join(lines)
