"""Command-line front end.

Decision commands print ``YES`` or ``NO``; the exit status only reports
usage errors (2) and exceeded resource caps (3).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import List, Optional

from . import digraph as dg
from . import splittings as sp
from . import whitehead as wh
from .errors import CyclicSplitError, InvalidLetter, ResourceLimit
from .words import Alphabet, Word

EXIT_USAGE = 2
EXIT_LIMIT = 3


class UsageError(Exception):
    pass


def parse_generators(text: str, alphabet: Alphabet) -> List[Word]:
    """Comma or newline separated words; duplicates kept, identities dropped."""
    return alphabet.parse_words(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _gens(args, which: str = "g") -> List[Word]:
    inline, path = getattr(args, which), getattr(args, which.upper() + "file", None)
    if inline is not None and path is not None:
        raise UsageError("give generators inline or from a file, not both")
    if path is not None:
        with open(path) as fh:
            inline = fh.read()
    if inline is None:
        raise UsageError("no generators given")
    return parse_generators(inline, args.alphabet)


def _answer(out, yes: bool, witness=None, show: bool = False) -> None:
    print("YES" if yes else "NO", file=out)
    if show and witness is not None:
        print(_dump(witness), file=out)


def _graph_out(args, g, out, extra=None) -> None:
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(dg.to_dot(g))
    if args.json or not args.dot:
        payload = dg.to_json(g)
        if extra:
            payload.update(extra)
        print(_dump(payload), file=out)


def cmd_stallings(args, out):
    g = dg.stallings_graph(_gens(args), args.alphabet, based=args.based)
    _graph_out(args, g, out)


def cmd_minimize(args, out):
    s = dg.stallings_graph(_gens(args), args.alphabet, based=False)
    low, seq = wh.minimize(s, args.max_rank)
    extra = {"sequence": seq.to_json(args.alphabet)} if args.witness else None
    _graph_out(args, low, out, extra)


def cmd_min_set(args, out):
    s = dg.stallings_graph(_gens(args), args.alphabet, based=False)
    store = wh.min_set(s, args.max_rank, args.max_closure)
    if args.json:
        members = []
        for _, g, seq in store.items():
            entry = dg.to_json(g)
            if args.witness:
                entry["sequence"] = seq.to_json(args.alphabet)
            members.append(entry)
        print(_dump({"size": len(store), "edges": store.edge_count, "members": members}), file=out)
    else:
        print(f"{len(store)} graphs with {store.edge_count} edges", file=out)


def cmd_orbit_eq(args, out):
    ok, seq = wh.orbit_equivalent(_gens(args), _gens(args, "k"), args.alphabet,
                                  args.max_rank, args.max_closure)
    _answer(out, ok, None if seq is None else seq.to_json(args.alphabet), args.witness)


def _witness_answer(args, out, w):
    _answer(out, w is not None, None if w is None else w.to_json(), args.witness)


def cmd_free_factor(args, out):
    _witness_answer(args, out, sp.in_proper_free_factor(_gens(args), args.alphabet, args.max_rank))


def cmd_segment(args, out):
    _witness_answer(args, out, sp.segment_elliptic(_gens(args), args.alphabet,
                                                   args.max_rank, args.max_closure))


def cmd_rank2(args, out):
    _witness_answer(args, out, sp.rank2_loop_witness(_gens(args), args.alphabet, args.method,
                                                     args.max_rank, args.max_closure))


def cmd_property_l(args, out):
    _answer(out, sp.property_L_orbit(_gens(args), args.alphabet, args.max_rank, args.max_closure))


def cmd_fixes_point(args, out):
    gens = _gens(args)
    if len(gens) != 1:
        raise UsageError("fixes-point takes exactly one word")
    if args.alphabet.rank == 2:
        cmd_rank2(args, out)
    else:
        cmd_segment(args, out)


COMMANDS = {
    "stallings": (cmd_stallings, "Stallings graph of the subgroup"),
    "minimize": (cmd_minimize, "a minimal automorphic image"),
    "min-set": (cmd_min_set, "all minimal automorphic images"),
    "orbit-eq": (cmd_orbit_eq, "is H automorphic to a conjugate of K"),
    "free-factor": (cmd_free_factor, "is H in a proper free factor"),
    "segment-elliptic": (cmd_segment, "is H elliptic in a segment splitting (rank >= 3)"),
    "rank2-elliptic": (cmd_rank2, "is H automorphic into a conjugate of <a, a^b> (rank 2)"),
    "property-l": (cmd_property_l, "does some minimal image have property (L)"),
    "fixes-point": (cmd_fixes_point, "does one element fix a point in a cyclic splitting"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclicsplit", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-X", "--alphabet", required=True, type=Alphabet.from_string,
                        help="generator letters, e.g. a,b,c")
    common.add_argument("-g", "--generators", dest="g", help="inline generator list")
    common.add_argument("-f", "--file", dest="Gfile", help="file with one word per line")
    common.add_argument("--json", action="store_true")
    common.add_argument("--dot", metavar="PATH")
    common.add_argument("--witness", action="store_true")
    common.add_argument("--based", action="store_true")
    common.add_argument("--max-rank", type=int, default=wh.DEFAULT_MAX_RANK)
    common.add_argument("--max-closure", type=int, default=wh.DEFAULT_MAX_CLOSURE)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        if name == "orbit-eq":
            p.add_argument("-k", "--other", dest="k", help="generators of K")
            p.add_argument("-F", "--other-file", dest="Kfile")
        if name in ("rank2-elliptic", "fixes-point"):
            p.add_argument("--method", choices=("morphism", "quotients"), default="morphism")
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    random.seed(args.seed)
    try:
        args.func(args, out)
    except (InvalidLetter, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except CyclicSplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
