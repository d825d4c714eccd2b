"""Command-line interface: ``pdecomp <command> ...``.

Exit codes: 0 success, 1 usage or I/O error, 2 module not exact,
3 certification failed, 4 schema error, 5 internal inconsistency. Errors are
reported on stderr as a single line ``error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import formats
from .blocks import random_exact_module, synth
from .decompose import certify, decompose
from .errors import (
    CertificationError,
    InconsistencyError,
    NotExactError,
    PDecompError,
    SchemaError,
)
from .field import PrimeField
from .grid import conjugate, parse_path, restrict_path, smoothing, validate
from .interlevel import IntervalGrid, interlevel_barcode
from .metric import bottleneck, format_cost
from .plot import plot_svg
from .zigzag import decompose_path, zigzag_decompose

EXIT_OK, EXIT_USAGE, EXIT_NOT_EXACT, EXIT_CERT, EXIT_SCHEMA, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(path: Optional[str], obj) -> None:
    if path:
        formats.write_json(path, obj)
    else:
        print(json.dumps(obj, indent=1))


def _field(p: int) -> PrimeField:
    try:
        return PrimeField(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    M = formats.load(args.module, formats.module_from_json)
    report = validate(M)
    print(report.summary())
    return EXIT_OK if report.exact else EXIT_NOT_EXACT


def cmd_decompose(args) -> int:
    M = formats.load(args.module, formats.module_from_json)
    B = decompose(M, threads=args.threads)
    _emit(args.output, formats.barcode_to_json(B))
    return EXIT_OK


def cmd_certify(args) -> int:
    M = formats.load(args.module, formats.module_from_json)
    B = formats.load(args.barcode, formats.barcode_from_json)
    cert = certify(M, B)
    print(f"certified: {len(B)} blocks, {len(cert.bases)} points")
    return EXIT_OK


def cmd_synth(args) -> int:
    B = formats.load(args.barcode, formats.barcode_from_json)
    M = synth(B, _field(args.p))
    if args.seed is not None:
        M = conjugate(M, args.seed)
    _emit(args.output, formats.module_to_json(M))
    return EXIT_OK


def cmd_random(args) -> int:
    if min(args.n, args.m) < 0 or args.blocks < 1:
        raise UsageError("--n and --m must be nonnegative and --blocks at least 1")
    M, truth = random_exact_module(args.n, args.m, args.blocks, args.seed, _field(args.p))
    _emit(args.output, formats.module_to_json(M))
    if args.truth:
        formats.write_json(args.truth, formats.barcode_to_json(truth))
    return EXIT_OK


def cmd_zigzag(args) -> int:
    Z = formats.load(args.zigzag, formats.zigzag_from_json)
    _emit(args.output, formats.intervals_to_json(zigzag_decompose(Z, threads=args.threads)))
    return EXIT_OK


def cmd_interlevel(args) -> int:
    G = formats.load(args.graph, formats.graph_from_json)
    B, grid = interlevel_barcode(G, _field(args.p), threads=args.threads)
    _emit(args.output, formats.barcode_to_json(B, levels=grid.levels))
    return EXIT_OK


def _level_coords(data, B):
    levels = formats.barcode_levels(data)
    if levels is None:
        raise UsageError("--level-units needs barcodes carrying a 'levels' field")
    grid = IntervalGrid(tuple(levels))
    if (grid.size, grid.size) != (B.n, B.m):
        raise SchemaError(f"levels describe a {grid.size}x{grid.size} grid, barcode is {B.n}x{B.m}")
    return grid.coordinates()


def cmd_distance(args) -> int:
    data1, data2 = formats.read_json(args.first), formats.read_json(args.second)
    B1, B2 = formats.barcode_from_json(data1), formats.barcode_from_json(data2)
    if args.level_units:
        d = bottleneck(B1, B2, _level_coords(data1, B1), _level_coords(data2, B2))
    else:
        if (B1.n, B1.m) != (B2.n, B2.m):
            raise SchemaError(f"barcodes live on grids {B1.n}x{B1.m} and {B2.n}x{B2.m}")
        d = bottleneck(B1, B2)
    print(format_cost(d))
    return EXIT_OK


def cmd_smooth(args) -> int:
    M = formats.load(args.module, formats.module_from_json)
    report = validate(M)
    if not report.exact:
        raise NotExactError(f"module is not exact: {report.summary()}")
    try:
        S = smoothing(M, args.ex, args.ey)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args.output, formats.module_to_json(S))
    return EXIT_OK


def cmd_restrict(args) -> int:
    M = formats.load(args.module, formats.module_from_json)
    try:
        path = parse_path(args.path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not validate(M).commutes:
        raise NotExactError("module does not commute; restriction is not well defined")
    P = restrict_path(M, path, strict=not args.allow_unrelated)
    _emit(args.output, formats.path_to_json(P, decompose_path(P, threads=args.threads)))
    return EXIT_OK


def cmd_plot(args) -> int:
    B = formats.load(args.barcode, formats.barcode_from_json)
    svg = plot_svg(B, title=args.title or "")
    if args.output:
        formats.write_text(args.output, svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdecomp", description="Block decomposition of exact grid persistence modules.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def threads(p):
        p.add_argument("--threads", type=int, default=None, help="worker threads (0 = all cores; default from PDECOMP_THREADS, else 1)")

    p = sub.add_parser("validate", help="check commutativity and exactness")
    p.add_argument("module")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decompose", help="compute the block barcode")
    p.add_argument("module")
    p.add_argument("-o", "--output")
    threads(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("certify", help="verify a barcode with explicit block bases")
    p.add_argument("module")
    p.add_argument("barcode")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("synth", help="direct sum of the blocks of a barcode")
    p.add_argument("barcode")
    p.add_argument("-o", "--output")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--seed", type=int, default=None, help="conjugate by random bases drawn from this seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("random", help="random exact module with its hidden barcode")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("-o", "--output")
    p.add_argument("--truth")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("zigzag", help="interval decomposition of a zigzag module")
    p.add_argument("zigzag")
    p.add_argument("-o", "--output")
    threads(p)
    p.set_defaults(func=cmd_zigzag)

    p = sub.add_parser("interlevel", help="H0 interlevel-set barcode of a function on a graph")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.add_argument("--p", type=int, default=2)
    threads(p)
    p.set_defaults(func=cmd_interlevel)

    p = sub.add_parser("distance", help="bottleneck distance between two barcodes")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--level-units", action="store_true", help="measure in the function values stored under 'levels'")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("smooth", help="smoothing by a grid vector")
    p.add_argument("module")
    p.add_argument("--ex", type=int, required=True)
    p.add_argument("--ey", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("restrict", help="restriction to a path of grid points")
    p.add_argument("module")
    p.add_argument("--path", required=True, help='points as "x0,y0;x1,y1;..."')
    p.add_argument("--allow-unrelated", action="store_true", help="accept incomparable consecutive points")
    p.add_argument("-o", "--output")
    threads(p)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("plot", help="render a barcode as SVG")
    p.add_argument("barcode")
    p.add_argument("-o", "--output")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


_ERROR_CODES = [
    (UsageError, "usage", EXIT_USAGE),
    (SchemaError, "schema", EXIT_SCHEMA),
    (NotExactError, "validation", EXIT_NOT_EXACT),
    (CertificationError, "certification", EXIT_CERT),
    (InconsistencyError, "internal", EXIT_INTERNAL),
    (PDecompError, "input", EXIT_SCHEMA),
    (OSError, "io", EXIT_USAGE),
]


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
        return args.func(args)
    except tuple(cls for cls, _, _ in _ERROR_CODES) as exc:
        for cls, kind, code in _ERROR_CODES:
            if isinstance(exc, cls):
                message = " ".join(str(exc).split())
                print(f"error[{kind}]: {message}", file=sys.stderr)
                return code
        raise  # pragma: no cover


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
