"""Command-line entry point.

Exit codes: 0 success, 1 usage, 2 invalid spec, 3 infeasible request,
4 internal verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import adversary, oracle, render, sequence, tree, witness
from .errors import (
    CoincidentPoints,
    DepthTooLarge,
    NoSuchM,
    NotUniform,
    PointNotInDomain,
    PointOnSet,
    SameHalfPlaneViolation,
    SpecIsUniform,
    SpecValidationError,
    VerificationFailed,
)

EXIT_OK, EXIT_USAGE, EXIT_SPEC, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3, 4

# schema for `build --format json`
BUILD_SCHEMA = {
    "type": "object",
    "required": ["spec", "depth", "leaves", "gaps"],
    "properties": {
        "spec": {"type": "object", "required": ["prefix", "tail"]},
        "depth": {"type": "integer", "minimum": 0},
        "leaves": {"type": "array", "items": {"$ref": "#/$defs/row"}},
        "gaps": {"type": "array", "items": {"$ref": "#/$defs/row"}},
    },
    "$defs": {
        "row": {
            "type": "object",
            "required": list(tree.CSV_COLUMNS),
            "properties": {
                "depth": {"type": "integer", "minimum": 0},
                "path": {"type": "string", "pattern": "^[01]*$"},
                "lo_num": {"type": "integer"},
                "lo_den": {"type": "integer", "minimum": 1},
                "hi_num": {"type": "integer"},
                "hi_den": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        }
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dump(doc) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def parse_point(text: str) -> complex:
    """"x,y" with decimal or p/q components."""
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    try:
        x, y = (float(Fraction(p.strip())) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from exc
    return complex(x, y)


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc


def _load_spec(path: str) -> sequence.SequenceSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecValidationError("$", f"not valid JSON ({exc.msg})") from exc
    return sequence.validate_spec(doc)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_classify(args) -> int:
    spec = _load_spec(args.spec)
    verdict = sequence.classify_moduli_standard(spec, args.delta)
    print(_dump(verdict.to_json()))
    if args.delta is not None and verdict.uniform and verdict.n_of_delta == sequence.INFINITE:
        print(f"N(ω,{args.delta}) is infinite; pick a smaller delta", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_build(args) -> int:
    spec = _load_spec(args.spec)
    t = tree.build_tree(spec, args.depth)
    if args.format == "csv":
        sys.stdout.write(tree.export_csv(t))
    else:
        print(_dump(tree.export_json(t)))
    return EXIT_OK


def cmd_witness(args) -> int:
    spec = _load_spec(args.spec)
    result = witness.build_witness(spec, args.delta, args.a, args.b,
                                   samples_per_unit=args.samples)
    print(_dump(result.to_json()))
    if args.svg:
        depth = max(1, min(10, args.svg_depth))
        _write(args.svg, render.render_witness(tree.CantorTree(spec, depth), result.curve))
    return EXIT_OK


def cmd_adversary(args) -> int:
    spec = _load_spec(args.spec)
    cert = adversary.certificate(spec, args.c)
    if args.cutoff is not None:
        cert.enumeration = adversary.verify_no_curve(cert, spec, args.cutoff)
    print(_dump(cert.to_json()))
    if not cert.holds:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = _load_spec(args.spec)
    print(_dump(oracle.pair_bounds(spec, args.a, args.b, args.depth, args.delta)))
    return EXIT_OK


def cmd_distance(args) -> int:
    d = sequence.metric_d(_load_spec(args.spec_a), _load_spec(args.spec_b))
    print(_dump({"d": "inf" if math.isinf(d) else d}))
    return EXIT_OK


def cmd_render(args) -> int:
    spec = _load_spec(args.spec)
    _write(args.out, render.render_set(tree.build_tree(spec, args.depth)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cantor-uniform",
                description="Uniformity of complements of generalized Cantor sets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", help="uniformity verdict and constant")
    s.add_argument("spec")
    s.add_argument("--delta", type=parse_fraction)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("build", help="intervals and gaps to a given depth")
    s.add_argument("spec")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("witness", help="curve certifying the conditions for a pair")
    s.add_argument("spec")
    s.add_argument("--a", type=parse_point, required=True)
    s.add_argument("--b", type=parse_point, required=True)
    s.add_argument("--delta", type=parse_fraction)
    s.add_argument("--svg")
    s.add_argument("--svg-depth", type=int, default=6)
    s.add_argument("--samples", type=int, default=64, help="samples per unit length ratio")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("adversary", help="non-uniformity certificate")
    s.add_argument("spec")
    s.add_argument("--c", type=parse_fraction, required=True)
    s.add_argument("--cutoff", type=int)
    s.set_defaults(func=cmd_adversary)

    s = sub.add_parser("oracle", help="brute-force bounds for one pair")
    s.add_argument("spec")
    s.add_argument("--a", type=parse_point, required=True)
    s.add_argument("--b", type=parse_point, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--delta", type=parse_fraction)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("distance", help="metric between two sequences")
    s.add_argument("spec_a")
    s.add_argument("spec_b")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("render", help="SVG picture of the first stages")
    s.add_argument("spec")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "depth", 0) is not None and getattr(args, "depth", 0) < 0:
            raise UsageError("--depth must be nonnegative")
        if getattr(args, "samples", 1) <= 0:
            raise UsageError("--samples must be positive")
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SpecValidationError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (NotUniform, SpecIsUniform, NoSuchM, PointNotInDomain, CoincidentPoints,
            SameHalfPlaneViolation, DepthTooLarge) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (VerificationFailed, PointOnSet) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
