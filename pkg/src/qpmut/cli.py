"""Command-line front end.

Subcommands: gen, mutate, enumerate, invariants, delta, verify-paper.
All inputs and outputs are JSON; rationals are serialized as exact "p/q"
strings.  Exit codes: 0 success, 1 usage error, 2 computation error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import QPMutError
from .explorer import (
    delta_report,
    disjointness_check,
    enumerate_class,
    mutation_graph_dot,
    report_to_obj,
)
from .generators import (
    StarParams,
    SurfaceParams,
    build_disc_fan,
    build_pqr,
    build_surface_qp,
    build_x6,
)
from .potential import QP, mutate_qp, qp_from_obj, qp_key, qp_to_obj
from .quiver import quiver_to_dot
from . import verify


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qpmut")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a built-in QP")
    gen.add_argument("--family", required=True, choices=["surface", "pqr", "x6", "disc"])
    gen.add_argument("--g", type=int)
    gen.add_argument("--b", type=int)
    gen.add_argument("--p", type=int)
    gen.add_argument("--q", type=int)
    gen.add_argument("--r", type=int)
    gen.add_argument("--points", type=int)
    gen.add_argument("--out")
    gen.add_argument("--dot")

    mut = sub.add_parser("mutate", help="mutate a QP at a vertex")
    mut.add_argument("--input", required=True)
    mut.add_argument("--at", type=int, required=True)
    mut.add_argument("--trace", action="store_true")
    mut.add_argument("--out")

    enum = sub.add_parser("enumerate", help="enumerate the mutation class")
    enum.add_argument("--input", required=True)
    enum.add_argument("--key-mode", choices=["quiver", "structural"], default="quiver")
    enum.add_argument("--node-cap", type=int, default=10000)
    enum.add_argument(
        "--invariants", choices=["auto", "gentle", "jacobian", "none"], default="auto"
    )
    enum.add_argument("--threads", type=int, default=1)
    enum.add_argument("--out")
    enum.add_argument("--dot")

    inv = sub.add_parser("invariants", help="derived invariants of one QP")
    inv.add_argument("--input", required=True)
    inv.add_argument("--mode", choices=["gentle", "jacobian", "both"], default="both")
    inv.add_argument("--out")

    delta = sub.add_parser("delta", help="enumerate and report the class conditions")
    delta.add_argument("--input", required=True)
    delta.add_argument("--node-cap", type=int, default=10000)
    delta.add_argument(
        "--invariants", choices=["auto", "gentle", "jacobian", "none"], default="auto"
    )
    delta.add_argument("--threads", type=int, default=1)
    delta.add_argument("--out")

    ver = sub.add_parser("verify-paper", help="run the full reference verification suite")
    ver.add_argument(
        "--only",
        choices=["surface", "exceptional", "disc"],
        default=None,
        help="restrict to one suite",
    )
    ver.add_argument("--threads", type=int, default=1)
    ver.add_argument("--out")
    return p


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_qp(path: str) -> QP:
    with open(path) as fh:
        return qp_from_obj(json.load(fh))


def _cmd_gen(args) -> int:
    if args.family == "surface":
        if args.g is None or args.b is None:
            raise QPMutError("surface family needs --g and --b")
        qp = build_surface_qp(SurfaceParams(args.g, args.b))
    elif args.family == "pqr":
        if None in (args.p, args.q, args.r):
            raise QPMutError("pqr family needs --p, --q and --r")
        qp = build_pqr(StarParams(args.p, args.q, args.r))
    elif args.family == "x6":
        qp = build_x6()
    else:
        if args.points is None:
            raise QPMutError("disc family needs --points")
        qp = build_disc_fan(args.points)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(quiver_to_dot(qp.quiver))
    _emit(json.dumps(qp_to_obj(qp), indent=2), args.out)
    return 0


def _cmd_mutate(args) -> int:
    qp = _load_qp(args.input)
    trace: list | None = [] if args.trace else None
    out = mutate_qp(qp, args.at, trace=trace)
    payload = qp_to_obj(out)
    if args.trace:
        payload = {"result": payload, "trace": trace}
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def _cmd_enumerate(args) -> int:
    qp = _load_qp(args.input)
    report = enumerate_class(
        qp,
        key_mode=args.key_mode,
        node_cap=args.node_cap,
        invariant_mode=args.invariants,
        threads=args.threads,
    )
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(mutation_graph_dot(report))
    _emit(json.dumps(report_to_obj(report), indent=2), args.out)
    return 0


def _cmd_invariants(args) -> int:
    from .gentle import (
        aag,
        gentle_cartan,
        gentle_from_qp,
        good_vertices,
        int_det,
        mu_minus_defined,
        mu_plus_defined,
    )
    from .jacobian import cartan, coxeter_polynomial, groebner_basis, jacobian_relations
    from .errors import NotGentleError, SingularCartanError

    qp = _load_qp(args.input)
    payload = {}
    if args.mode in ("gentle", "both"):
        try:
            pres = gentle_from_qp(qp)
            c = gentle_cartan(pres)
            payload["gentle"] = {
                "aag": aag(pres).as_obj(),
                "cartan": [list(r) for r in c],
                "cartan_det": int_det(c),
                "good_vertices": good_vertices(qp),
                "mu_minus": [mu_minus_defined(pres, k) for k in range(qp.quiver.n)],
                "mu_plus": [mu_plus_defined(pres, k) for k in range(qp.quiver.n)],
            }
        except NotGentleError as exc:
            if args.mode == "gentle":
                raise
            payload["gentle"] = {"error": str(exc)}
    if args.mode in ("jacobian", "both"):
        from .jacobian import tilting_flags

        basis = groebner_basis(jacobian_relations(qp))
        c = cartan(basis)
        minus, plus = tilting_flags(qp, basis)
        entry = {
            "dim": basis.dimension,
            "cartan": [list(r) for r in c],
            "cartan_det": int_det(c),
            "tilting_minus": minus,
            "tilting_plus": plus,
        }
        try:
            entry["coxeter"] = list(coxeter_polynomial(c))
        except SingularCartanError:
            entry["coxeter"] = None
        payload["jacobian"] = entry
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def _cmd_delta(args) -> int:
    qp = _load_qp(args.input)
    report = enumerate_class(
        qp,
        node_cap=args.node_cap,
        invariant_mode=args.invariants,
        threads=args.threads,
    )
    payload = {
        "size": report.size,
        "complete": report.complete,
        "verdicts": delta_report(report).as_obj(),
    }
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def _cmd_verify(args) -> int:
    results = verify.run(only=args.only, threads=args.threads)
    text = verify.render(results)
    _emit(text, args.out)
    if args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0 if all(r.ok for r in results) else 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "gen": _cmd_gen,
        "mutate": _cmd_mutate,
        "enumerate": _cmd_enumerate,
        "invariants": _cmd_invariants,
        "delta": _cmd_delta,
        "verify-paper": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except QPMutError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
