"""Command-line frontend.

Thin adapters over the library: every subcommand loads JSON inputs, calls the
corresponding library function, and prints the exact rational value next to
its base-2 logarithm.  Identical inputs through the CLI and the library
produce identical exact values, output ordering is deterministic, and
--json mirrors the human-readable output for machines.

Exit codes: 0 when every requested computation and ordering/claim check
passes, 1 when a check fails, 2 on malformed input or size caps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import bounds, constructions, protocols
from .core import (
    DEFAULT_TILE_CAP,
    ErrorFn,
    InputDistribution,
    ParseError,
    SizeLimitError,
    ValidationError,
    distribution_from_json,
    format_rational,
    load_relation,
    load_weighting,
    parse_rational,
    read_json_file,
    weighting_to_json,
    write_json_file,
)
from .pseudotranscript import (
    load_pseudotranscript,
    pseudotranscript_to_json,
)

LOG_ORDER_TOLERANCE = 1e-9


def _tile_cap() -> int:
    raw = os.environ.get("COMMLB_TILE_CAP")
    if raw is None:
        return DEFAULT_TILE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"must be an integer, got {raw!r}", "COMMLB_TILE_CAP") from None


def _load_mu(spec: str, x_size: int, y_size: int) -> InputDistribution:
    if spec == "uniform":
        return InputDistribution.uniform(x_size, y_size)
    return distribution_from_json(read_json_file(spec))


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _print_bound(result: bounds.BoundResult, args, kind: str) -> int:
    if result.status != "optimal":
        if args.json:
            _emit({"kind": kind, "status": result.status})
        else:
            print(f"status: {result.status}")
        return 1
    if args.emit_cert:
        write_json_file(args.emit_cert, weighting_to_json(result.certificate))
    if args.json:
        _emit(
            {
                "kind": kind,
                "status": result.status,
                "value": format_rational(result.value),
                "log2_bits": result.log2_value,
            }
        )
    else:
        print(format_rational(result.value))
        print(f"{result.log2_value:.6f} bits")
    return 0


def cmd_prt(args) -> int:
    rel, errfn = load_relation(args.relation)
    if args.eps is not None:
        errfn = ErrorFn.constant(rel.x_size, rel.y_size, parse_rational(args.eps, "--eps"))
    elif errfn is None:
        errfn = ErrorFn.zero(rel.x_size, rel.y_size)
    return _print_bound(bounds.prt(rel, errfn, tile_cap=_tile_cap()), args, "prt")


def cmd_relaxed_prt(args) -> int:
    rel, _ = load_relation(args.relation)
    eps = parse_rational(args.eps, "--eps")
    return _print_bound(
        bounds.relaxed_prt(rel, eps, tile_cap=_tile_cap()), args, "relaxed-prt"
    )


def cmd_relaxed_prt_mu(args) -> int:
    rel, _ = load_relation(args.relation)
    eps = parse_rational(args.eps, "--eps")
    mu = _load_mu(args.mu, rel.x_size, rel.y_size)
    return _print_bound(
        bounds.relaxed_prt_mu(rel, eps, mu, tile_cap=_tile_cap()), args, "relaxed-prt-mu"
    )


def cmd_lift(args) -> int:
    rel, _ = load_relation(args.relation)
    weighting = load_weighting(args.certificate)
    lifted = constructions.lift(rel, weighting)
    argument = lifted.renyi_argument()
    from .measures import log2_exact

    if args.out:
        write_json_file(args.out, pseudotranscript_to_json(lifted))
    if args.json:
        _emit(
            {
                "argument": format_rational(argument),
                "log2_bits": log2_exact(argument),
                "pseudotranscript": pseudotranscript_to_json(lifted),
            }
        )
    else:
        print(format_rational(argument))
        print(f"{log2_exact(argument):.6f} bits")
    return 0


def cmd_slice(args) -> int:
    rel, _ = load_relation(args.relation)
    q_transcript = load_pseudotranscript(args.pseudotranscript)
    result = constructions.slice_pseudotranscript(rel, q_transcript)
    from .measures import log2_exact

    if args.out:
        write_json_file(args.out, weighting_to_json(result.weighting))
    if args.json:
        _emit(
            {
                "total": format_rational(result.total),
                "log2_bits": log2_exact(result.total),
                "certificate": weighting_to_json(result.weighting),
            }
        )
    else:
        print(format_rational(result.total))
        print(f"{log2_exact(result.total):.6f} bits")
    return 0


def cmd_prune(args) -> int:
    rel, _ = load_relation(args.relation)
    q_transcript = load_pseudotranscript(args.pseudotranscript)
    mu = _load_mu(args.mu, rel.x_size, rel.y_size)
    delta = parse_rational(args.delta, "--delta")
    result = constructions.prune(rel, q_transcript, mu, delta, tile_cap=_tile_cap())
    if args.out:
        write_json_file(args.out, result.to_json_dict())
    if args.json:
        _emit(result.to_json_dict())
    else:
        print(f"delta = {format_rational(result.delta)}")
        print(f"Delta = {result.Delta:.6f}")
        print(f"epsilon = {format_rational(result.epsilon)}")
        print(f"removed mass = {format_rational(result.removed_mass)}")
        for claim in result.claims:
            status = "PASS" if claim.passed else "FAIL"
            print(f"claim {claim.name}: {status} ({claim.detail})")
    return 0 if result.passed else 1


def cmd_verify(args) -> int:
    rel, errfn = load_relation(args.relation)
    weighting = load_weighting(args.certificate)
    if args.eps is not None:
        eps = parse_rational(args.eps, "--eps")
        if args.mu is not None:
            mu = _load_mu(args.mu, rel.x_size, rel.y_size)
            report = bounds.verify_certificate(rel, weighting, eps=eps, mu=mu)
        else:
            report = bounds.verify_certificate(rel, weighting, eps=eps)
    else:
        if errfn is None:
            errfn = ErrorFn.zero(rel.x_size, rel.y_size)
        report = bounds.verify_certificate(rel, weighting, errfn=errfn)
    if args.json:
        _emit(
            {
                "mode": report.mode,
                "total_weight": format_rational(report.total_weight),
                "pass": report.passed,
                "violations": list(report.violations),
            }
        )
    else:
        print(report.format_report())
    return 0 if report.passed else 1


def cmd_report(args) -> int:
    rel, _ = load_relation(args.relation)
    eps = parse_rational(args.eps, "--eps")
    mu = _load_mu(args.mu, rel.x_size, rel.y_size)
    cap = _tile_cap()

    r_mu = bounds.relaxed_prt_mu(rel, eps, mu, tile_cap=cap).require_optimal()
    r_rel = bounds.relaxed_prt(rel, eps, tile_cap=cap).require_optimal()
    r_prt = bounds.prt(
        rel, ErrorFn.constant(rel.x_size, rel.y_size, eps), tile_cap=cap
    ).require_optimal()

    det_note = None
    det_bits = None
    if rel.x_size <= protocols.MAX_ENUM_INPUT and rel.y_size <= protocols.MAX_ENUM_INPUT:
        search = protocols.enumerate_zero_error(rel, args.max_bits)
        if search.found:
            det_bits = search.bits
        else:
            det_note = f"none <= {args.max_bits} bits"
    else:
        det_note = "skipped (size)"

    orderings = [
        ("relaxed-prt-mu <= relaxed-prt", r_mu.value <= r_rel.value),
        ("relaxed-prt <= prt", r_rel.value <= r_prt.value),
    ]
    if det_bits is not None:
        orderings.append(
            ("log2(prt) <= R_det", r_prt.log2_value <= det_bits + LOG_ORDER_TOLERANCE)
        )

    if args.json:
        payload = {
            "eps": format_rational(eps),
            "relaxed_prt_mu": {
                "value": format_rational(r_mu.value),
                "log2_bits": r_mu.log2_value,
            },
            "relaxed_prt": {
                "value": format_rational(r_rel.value),
                "log2_bits": r_rel.log2_value,
            },
            "prt": {"value": format_rational(r_prt.value), "log2_bits": r_prt.log2_value},
            "r_det_bits": det_bits,
            "r_det_note": det_note,
            "orderings": {name: bool(ok) for name, ok in orderings},
            "pass": all(ok for _, ok in orderings),
        }
        _emit(payload)
    else:
        print(f"{'measure':<16}{'value':<12}log2(bits)")
        for name, res in (
            ("relaxed-prt-mu", r_mu),
            ("relaxed-prt", r_rel),
            ("prt", r_prt),
        ):
            print(f"{name:<16}{format_rational(res.value):<12}{res.log2_value:.3f}")
        if det_bits is not None:
            print(f"{'R_det':<16}{'-':<12}{det_bits}")
        else:
            print(f"{'R_det':<16}{'-':<12}{det_note}")
        for name, ok in orderings:
            print(f"ordering {name}: {'ok' if ok else 'VIOLATED'}")
    return 0 if all(ok for _, ok in orderings) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commlb",
        description="Partition-bound LPs, information costs, and the "
        "constructions relating them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("prt", cmd_prt, "partition bound of a relation file")
    p.add_argument("relation")
    p.add_argument("--eps", help="constant error rate overriding the file's error")
    p.add_argument("--emit-cert", metavar="PATH", help="write the optimal certificate")

    p = add("relaxed-prt", cmd_relaxed_prt, "relaxed partition bound")
    p.add_argument("relation")
    p.add_argument("--eps", required=True)
    p.add_argument("--emit-cert", metavar="PATH")

    p = add("relaxed-prt-mu", cmd_relaxed_prt_mu, "distributional relaxed bound")
    p.add_argument("relation")
    p.add_argument("--eps", required=True)
    p.add_argument("--mu", required=True, help="distribution file or 'uniform'")
    p.add_argument("--emit-cert", metavar="PATH")

    p = add("lift", cmd_lift, "exact-cover certificate -> pseudotranscript")
    p.add_argument("relation")
    p.add_argument("certificate")
    p.add_argument("--out", metavar="PATH", help="write the pseudotranscript")

    p = add("slice", cmd_slice, "pseudotranscript -> exact-cover certificate")
    p.add_argument("relation")
    p.add_argument("pseudotranscript")
    p.add_argument("--out", metavar="PATH", help="write the certificate")

    p = add("prune", cmd_prune, "prune a pseudotranscript; verify all claims")
    p.add_argument("relation")
    p.add_argument("pseudotranscript")
    p.add_argument("--mu", required=True, help="distribution file or 'uniform'")
    p.add_argument("--delta", required=True)
    p.add_argument("--out", metavar="PATH", help="write the JSON claim report")

    p = add("verify", cmd_verify, "re-check a certificate exactly")
    p.add_argument("relation")
    p.add_argument("certificate")
    p.add_argument("--eps", help="relaxed mode (with --mu: distributional)")
    p.add_argument("--mu", help="distribution file or 'uniform'")

    p = add("report", cmd_report, "bound-comparison table with ordering checks")
    p.add_argument("relation")
    p.add_argument("--eps", default="0")
    p.add_argument("--mu", default="uniform")
    p.add_argument("--max-bits", type=int, default=protocols.MAX_ENUM_BITS)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, ValidationError, SizeLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
