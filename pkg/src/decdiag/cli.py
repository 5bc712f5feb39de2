"""Command-line front end.

Exit codes: 0 property holds / artifact produced, 1 property fails / no
labelling exists, 2 usage or input error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

from . import __version__
from .ars import Ars, CommArs, PropertyName, check, check_commutation
from .cofinality import dcr2_construct
from .decreasing import (
    DEFAULT_BUDGET,
    LabelledArs,
    LabelledCommArs,
    dc_search,
    dcr_search,
    is_locally_decreasing,
    is_locally_decreasing_comm,
)
from .dot import export_dot
from .errors import ArsError, NotConfluentError, ParseError
from .fileformat import format_system, parse_system
from .fologic import eval_formula, paper_formula, parse_formula
from .modeltheory import gen_family_named, locally_isomorphic
from .phi import phi, phi_witness_labelling

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


class _IO:
    def __init__(self, stdin, stdout, stderr):
        self.stdin = stdin
        self.stdout = stdout
        self.stderr = stderr

    def read(self, path):
        if path == "-":
            text = self.stdin.read()
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise _UsageError(f"cannot read {path}: {exc.strerror}") from None
        try:
            return parse_system(text)
        except ParseError as exc:
            raise _UsageError(f"{path}: {exc}") from None

    def write(self, path, text):
        if path is None or path == "-":
            self.stdout.write(text)
            return
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise _UsageError(f"cannot write {path}: {exc.strerror}") from None

    def say(self, line, to_stderr=False):
        (self.stderr if to_stderr else self.stdout).write(line + "\n")


def _plain(system):
    if isinstance(system, (LabelledArs, LabelledCommArs)):
        return system.unlabelled
    return system


def _fmt_witness(witness) -> str:
    if witness is None:
        return ""
    return " witness " + " ".join(str(x) for x in witness)


def _fmt_peak(peak) -> str:
    (c, beta), (b, alpha) = peak.left, peak.right
    return f"peak apex={peak.apex} left={c}@{beta} right={b}@{alpha}"


# -- subcommands ---------------------------------------------------------

def _cmd_check(args, io: _IO) -> int:
    system = _plain(io.read(args.file))
    if args.prop:
        names = [p for chunk in args.prop for p in chunk.split(",") if p]
        try:
            props = [PropertyName.parse(p) for p in names]
        except ArsError as exc:
            raise _UsageError(str(exc)) from None
    elif isinstance(system, CommArs):
        props = [PropertyName.COMMUTE]
    else:
        props = [p for p in PropertyName if p is not PropertyName.COMMUTE]
    all_hold = True
    for prop in props:
        if prop is PropertyName.COMMUTE:
            if not isinstance(system, CommArs):
                raise _UsageError("commute needs a file with '~>' steps")
            report = check_commutation(system)
        else:
            if isinstance(system, CommArs):
                raise _UsageError(f"{prop.value.lower()} needs a file without '~>' steps")
            report = check(system, prop)
        all_hold &= report.holds
        io.say(f"{prop.value} {'true' if report.holds else 'false'}{_fmt_witness(report.witness)}")
    return EXIT_OK if all_hold else EXIT_FAIL


def _cmd_verify(args, io: _IO) -> int:
    system = io.read(args.file)
    if isinstance(system, LabelledArs):
        report = is_locally_decreasing(system)
    elif isinstance(system, LabelledCommArs):
        report = is_locally_decreasing_comm(system)
    else:
        raise _UsageError("verify needs a labelled file")
    if report.holds:
        io.say("DECREASING")
        return EXIT_OK
    io.say(f"NOT-DECREASING {_fmt_peak(report.witness[0])}")
    return EXIT_FAIL


def _cmd_dcr2(args, io: _IO) -> int:
    system = _plain(io.read(args.file))
    if not isinstance(system, Ars):
        raise _UsageError("dcr2 needs a file without '~>' steps")
    to_stdout = args.out is None or args.out == "-"
    try:
        labelled = dcr2_construct(system)
    except NotConfluentError as exc:
        a, b = exc.pair
        io.say(f"NOT CONFLUENT component={exc.component} pair={a},{b}", to_stderr=to_stdout)
        return EXIT_FAIL
    io.write(args.out, format_system(labelled))
    io.say("DCR2 OK", to_stderr=to_stdout)
    return EXIT_OK


def _cmd_search(args, io: _IO, comm: bool) -> int:
    system = _plain(io.read(args.file))
    if comm and not isinstance(system, CommArs):
        raise _UsageError("search-dc needs a file with '~>' steps (or '# kind: comm')")
    if not comm and not isinstance(system, Ars):
        raise _UsageError("search-dcr needs a file without '~>' steps")
    if args.k < 1:
        raise _UsageError("-k must be at least 1")
    budget = None if args.budget == 0 else args.budget
    search = dc_search if comm else dcr_search
    result = search(system, args.k, budget=budget, multi_label=args.multi_label)
    to_stdout = args.out == "-"
    if result.found:
        if args.out is not None:
            io.write(args.out, format_system(result.labelling))
        io.say("DECREASING", to_stderr=to_stdout)
        return EXIT_OK
    if result.exhausted:
        io.say("NOT-DECREASING", to_stderr=to_stdout)
        return EXIT_FAIL
    io.say(f"UNKNOWN(budget) expansions={result.expansions}", to_stderr=to_stdout)
    return EXIT_UNKNOWN


def _cmd_gen(args, io: _IO) -> int:
    kind = args.kind
    if kind == "phi":
        if args.n is None:
            raise _UsageError("gen phi needs -n")
        try:
            p = phi(args.n)
            system = phi_witness_labelling(args.n) if args.witness else p.comm
        except ArsError as exc:
            raise _UsageError(str(exc)) from None
        names = ["a1", "a", "c", "b", "b1"]
        comments = [f"phi level {args.n}"]
        comments.append("distinguished " + " ".join(f"{k}={v}" for k, v in zip(names, p.distinguished)))
        comments.extend(f"node {i} = {name}" for i, name in enumerate(p.names))
    else:
        if args.witness:
            raise _UsageError("--witness only applies to gen phi")
        family = kind.removesuffix("-family")
        if args.p is None:
            raise _UsageError(f"gen {kind} needs -p")
        try:
            system, node_names = gen_family_named(family, args.p)
        except ArsError as exc:
            raise _UsageError(str(exc)) from None
        comments = [f"{family} family, p={args.p}"]
        comments.extend(f"node {i} = {name}" for i, name in enumerate(node_names))
    io.write(args.out, format_system(system, comments))
    return EXIT_OK


def _parse_binding(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name or not value.isdigit():
        raise _UsageError(f"--bind expects name=node, got {text!r}")
    return name, int(value)


def _parse_paper(text: str):
    name, _, params = text.partition(":")
    try:
        values = [int(x) for x in params.split(",")] if params else []
    except ValueError:
        raise _UsageError(f"bad parameters in --paper {spec!r}") from None
    return paper_formula(name, *values)


def _cmd_fo(args, io: _IO) -> int:
    system = _plain(io.read(args.file))
    if not isinstance(system, Ars):
        raise _UsageError("fo needs a file without '~>' steps")
    if (args.formula is None) == (args.paper is None):
        raise _UsageError("give exactly one of --formula and --paper")
    env = dict(_parse_binding(b) for b in args.bind or [])
    try:
        formula = parse_formula(args.formula) if args.formula is not None else _parse_paper(args.paper)
        value = eval_formula(system, formula, env)
    except ArsError as exc:
        raise _UsageError(str(exc)) from None
    io.say("true" if value else "false")
    return EXIT_OK if value else EXIT_FAIL


def _cmd_hanf(args, io: _IO) -> int:
    a = _plain(io.read(args.file_a))
    b = _plain(io.read(args.file_b))
    if not isinstance(a, Ars) or not isinstance(b, Ars):
        raise _UsageError("hanf needs files without '~>' steps")
    if args.r < 0:
        raise _UsageError("-r must be a natural number")
    result = locally_isomorphic(a, b, args.r)
    if result.holds:
        io.say("LOCALLY-ISOMORPHIC")
    else:
        io.say(f"NOT r-LOCALLY-ISOMORPHIC r={args.r}")
    keys = sorted(set(result.table_a) | set(result.table_b))
    for i, key in enumerate(keys):
        n_nodes, edges = key
        edge_text = ",".join(f"{s}>{d}" for s, d in edges)
        io.say(f"class {i} nodes={n_nodes} edges={edge_text or '-'} "
               f"A={result.table_a.get(key, 0)} B={result.table_b.get(key, 0)}")
    return EXIT_OK if result.holds else EXIT_FAIL


def _cmd_dot(args, io: _IO) -> int:
    io.write(args.out, export_dot(io.read(args.file)))
    return EXIT_OK


# -- entry point ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decdiag", description="Finite rewrite system analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide properties of a system")
    p.add_argument("file")
    p.add_argument("--prop", action="append",
                   help="property tag (cr, wcr, sc, diamond, un, unr, nfp, wn, sn, ac, ind, "
                        "inc, cp, commute); repeatable or comma separated; default all")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("verify", help="check local decreasingness of a labelled file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("dcr2", help="build a two-label decreasing labelling")
    p.add_argument("file")
    p.add_argument("--out", help="output file; '-' or absent writes standard output")
    p.set_defaults(func=_cmd_dcr2)

    for name, comm in (("search-dcr", False), ("search-dc", True)):
        p = sub.add_parser(name, help="search a decreasing labelling with k labels")
        p.add_argument("file")
        p.add_argument("-k", type=int, required=True)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="state expansion limit; 0 for none")
        p.add_argument("--multi-label", action="store_true",
                       help="let one step carry several labels")
        p.add_argument("--out", help="write the labelling found here ('-' for standard output)")
        p.set_defaults(func=lambda a, io, comm=comm: _cmd_search(a, io, comm))

    p = sub.add_parser("gen", help="generate a system")
    p.add_argument("kind", choices=["phi", "cr-family", "sn-family", "inc-family", "sc-family"])
    p.add_argument("-n", type=int, help="level for phi")
    p.add_argument("-p", type=int, help="number of components for families")
    p.add_argument("--witness", action="store_true", help="emit the decreasing witness labelling")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("fo", help="evaluate a first-order sentence")
    p.add_argument("file")
    p.add_argument("--formula")
    p.add_argument("--paper", help="delta_un:<i> | delta_unr:<i>,<j> | delta_ac:<i> | xi_a | xi_not_a")
    p.add_argument("--bind", action="append", help="name=node; repeatable")
    p.set_defaults(func=_cmd_fo)

    p = sub.add_parser("hanf", help="compare r-neighbourhood counts")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("-r", type=int, required=True)
    p.set_defaults(func=_cmd_hanf)

    p = sub.add_parser("dot", help="export Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dot)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdin: Optional[TextIO] = None,
        stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Run the command line ``argv`` and return the exit code."""
    io = _IO(stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, io)
    except _UsageError as exc:
        io.say(f"error: {exc}", to_stderr=True)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())
