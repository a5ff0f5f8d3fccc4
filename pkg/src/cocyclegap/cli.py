"""Command-line entry point.

    cocyclegap group info --k 3
    cocyclegap cocycle --k 3 --subgroup translations --decide
    cocyclegap norm single --k 4 --m 3
    cocyclegap norm pair --k 3 --kprime 4 --out pair.json
    cocyclegap scan --kmin 3 --kmax 6 --out scan.jsonl --csv scan.csv

Exit codes: 0 ok, 2 bad input or cap exceeded, 3 an estimate did not converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments as ex
from .spectral import DEFAULT_MAX_ITERS, DEFAULT_TOL

EXIT_OK, EXIT_PRECONDITION, EXIT_NOT_CONVERGED = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PRECONDITION, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _ring(text: str) -> dict:
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"--ring is not valid JSON: {e}") from e
    return desc.get("ring", desc) if isinstance(desc, dict) else desc


def _spectral_flags(p):
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2])
    p.add_argument("--method", choices=["lanczos", "power"], default="lanczos")
    p.add_argument("--delta", type=float, default=None, help="user-supplied delta for the D(m, delta) column")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cocyclegap", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    group = sub.add_parser("group").add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = group.add_parser("info")
    info.add_argument("--k", type=int)
    info.add_argument("--ring", type=_ring)
    info.add_argument("--out", default=None)

    coc = sub.add_parser("cocycle")
    coc.add_argument("--k", type=int)
    coc.add_argument("--ring", type=_ring)
    coc.add_argument("--character", type=_int_list, default=None, help="coefficient weights, e.g. 1,0")
    coc.add_argument("--subgroup", choices=["translations", "linear"], default=None)
    coc.add_argument("--decide", action="store_true")
    coc.add_argument("--check", choices=["auto", "exhaustive", "sampled"], default="auto")
    coc.add_argument("--samples", type=int, default=10**6)
    coc.add_argument("--seed", type=int, default=0)
    coc.add_argument("--export", default=None, help="write the (restricted) cocycle table as JSON")
    coc.add_argument("--out", default=None)

    norm = sub.add_parser("norm").add_subparsers(dest="action", required=True, parser_class=_Parser)
    single = norm.add_parser("single")
    single.add_argument("--k", type=int, required=True)
    _spectral_flags(single)
    pair = norm.add_parser("pair")
    pair.add_argument("--k", type=int, required=True)
    pair.add_argument("--kprime", type=int, required=True)
    pair.add_argument("--cap", type=int, default=ex.PAIR_CAP, help="max tensor dimension")
    _spectral_flags(pair)

    scan = sub.add_parser("scan")
    scan.add_argument("--kmin", type=int, required=True)
    scan.add_argument("--kmax", type=int, required=True)
    scan.add_argument("--cap", type=int, default=ex.PAIR_CAP)
    scan.add_argument("--csv", default=None)
    _spectral_flags(scan)
    return parser


def _spectral(args) -> ex.SpectralConfig:
    return ex.SpectralConfig(tol=args.tol, max_iters=args.max_iters, seeds=tuple(args.seeds), method=args.method)


def run(args, argv: list[str]) -> dict:
    command = ["cocyclegap", *argv]
    if args.verb == "group":
        return ex.cmd_group_info(k=args.k, ring=args.ring, command=command)
    if args.verb == "cocycle":
        return ex.cmd_cocycle(
            k=args.k, ring=args.ring, character=args.character, subgroup=args.subgroup, decide=args.decide,
            mode=args.check, samples=args.samples, seed=args.seed, export=args.export, command=command,
        )
    if args.verb == "norm" and args.action == "single":
        if args.m < 2:
            raise ValueError("m must be >= 2")
        return ex.cmd_norm_single(args.k, args.m, _spectral(args), delta=args.delta, command=command)
    if args.verb == "norm":
        if args.m < 2:
            raise ValueError("m must be >= 2")
        return ex.cmd_norm_pair(args.k, args.kprime, args.m, _spectral(args), delta=args.delta, cap=args.cap, command=command)
    if args.m < 2:
        raise ValueError("m must be >= 2")
    return ex.cmd_scan(
        args.kmin, args.kmax, args.m, _spectral(args), out_path=args.out, csv_path=args.csv,
        delta=args.delta, cap=args.cap, command=command,
    )


def _converged(report: dict) -> bool:
    if "rows" in report:
        return report["summary"]["all_converged"]
    return report.get("norm", {}).get("converged", True)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        report = run(args, argv)
    except (ValueError, OverflowError) as e:
        # caps, bad descriptors, invalid m or delta all land here
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.verb == "scan":
        print(ex.dumps({"summary": report["summary"], "rows": len(report["rows"])}))
    else:
        text = ex.dumps(report)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        print(text)
    if not _converged(report):
        print("error: norm estimate did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
