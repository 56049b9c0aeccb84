"""Command-line front end.

Exit codes: 0 SAT/TRUE, 1 UNSAT/FALSE/NONE-UP-TO, 2 UNKNOWN, 3 error.
Verdicts go to stdout as one line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formula as fm
from . import kripke, minimize, normal_form, oracle, solver, tiling
from .c1 import build_alpha, render_c1
from .kripke import FrameClass, parse_frames

EXIT = {"sat": 0, "unsat": 1, "none-up-to": 1, "unknown": 2}
ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as UNKNOWN
    def error(self, message):
        raise UsageError(message)


def _add_input(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", "-i", help="formula file, or - for stdin")
    g.add_argument("--formula", "-f", help="formula text")


def _add_frames(p):
    p.add_argument("--frames", default="", help="comma-separated subset of rfl,ser,sym,tr,eucl")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gmlsat", description="Graded modal logic satisfiability toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="decide satisfiability over a frame class")
    _add_input(p)
    _add_frames(p)
    p.add_argument("--cap", type=int, default=solver.DEFAULT_CAP, help="largest model size searched")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out", help="write the model of a SAT answer as JSON")
    p.add_argument("--dot-out", help="write the model of a SAT answer as Graphviz DOT")

    p = sub.add_parser("check", help="model-check a formula at a world")
    _add_input(p)
    p.add_argument("--model", "-m", required=True)
    p.add_argument("--world", "-w", help="world to check (default: the designated world)")

    p = sub.add_parser("nf", help="print the normal form")
    _add_input(p)
    p.add_argument("--parts", action="store_true", help="list the components instead of one formula")

    p = sub.add_parser("c1", help="print the counting translation")
    _add_input(p)
    _add_frames(p)

    p = sub.add_parser("minimize", help="shrink a transitive model of a formula")
    _add_input(p)
    p.add_argument("--model", "-m", required=True)
    p.add_argument("--out", "-o", help="output JSON file (default: stdout)")

    p = sub.add_parser("tiling-gen", help="print the tiling reduction formula")
    p.add_argument("--tiling", "-t", required=True, help="tiling JSON file")
    p.add_argument("--part", choices=("full", "gamma"), default="full")
    p.add_argument("--canonical-out", help="also write the canonical grid model as JSON")

    p = sub.add_parser("oracle", help="exhaustive search over small structures")
    _add_input(p)
    _add_frames(p)
    p.add_argument("--max-size", "-k", type=int, default=3)
    p.add_argument("--model-out")
    return ap


def _read_formula(args) -> fm.Formula:
    if args.formula is not None:
        return fm.parse(args.formula)
    if args.input == "-":
        return fm.parse(sys.stdin.read())
    with open(args.input, encoding="utf-8") as fh:
        return fm.parse(fh.read())


def _frames(args):
    return parse_frames(args.frames)


def _note(msg):
    print(msg, file=sys.stderr)


def _write_model(P, json_path=None, dot_path=None):
    if json_path:
        kripke.dump(P, json_path)
    if dot_path:
        with open(dot_path, "w", encoding="utf-8") as fh:
            fh.write(kripke.to_dot(P))


def cmd_solve(args):
    f = _read_formula(args)
    v = solver.decide(f, _frames(args), solver.SolverOptions(cap=args.cap, seed=args.seed))
    print(v)
    if v.is_sat:
        _note(f"model: {len(v.model.structure.worlds)} worlds")
        _write_model(v.model, args.model_out, args.dot_out)
    elif v.reason:
        _note(v.reason)
    return EXIT[v.status]


def cmd_check(args):
    f = _read_formula(args)
    P = kripke.load(args.model)
    w = P.world if args.world is None else args.world
    ok = kripke.check(P.structure, w, f)
    print("TRUE" if ok else "FALSE")
    return 0 if ok else 1


def cmd_nf(args):
    nf = normal_form.normalize(_read_formula(args))
    if not args.parts:
        print(fm.render(normal_form.to_formula(nf)))
        return 0
    print(f"eta: {fm.render(nf.eta)}")
    print(f"theta: {fm.render(nf.theta)}")
    for c in nf.lowers:
        print(f"lower: {c.guard} -> dia>={c.count} {fm.render(c.body)}")
    for c in nf.uppers:
        print(f"upper: {c.guard} -> dia<={c.count} {fm.render(c.body)}")
    return 0


def cmd_c1(args):
    f = _read_formula(args)
    print(render_c1(build_alpha(f, _frames(args) - {FrameClass.EUCL})))
    return 0


def cmd_minimize(args):
    f = _read_formula(args)
    P = kripke.load(args.model)
    if not kripke.is_transitive(P.structure):
        raise ValueError("minimize needs a transitive model")
    if not kripke.check(P.structure, P.world, f):
        raise ValueError("the model does not satisfy the formula at its designated world")
    nf = normal_form.normalize(f)
    small = minimize.minimize(normal_form.expand(P, nf), nf)
    small = normal_form.strip(small, nf.fresh)
    _note(f"minimized: {len(P.structure.worlds)} -> {len(small.structure.worlds)} worlds")
    if args.out:
        kripke.dump(small, args.out)
    else:
        print(json.dumps(kripke.to_json(small)))
    return 0


def cmd_tiling_gen(args):
    inst = tiling.load_instance(args.tiling)
    f = tiling.gamma(inst.n) if args.part == "gamma" else tiling.reduction(inst)
    print(fm.render(f))
    if args.canonical_out:
        kripke.dump(tiling.canonical_model(inst.n), args.canonical_out)
    return 0


def cmd_oracle(args):
    f = _read_formula(args)
    v = oracle.brute_force(f, _frames(args), args.max_size)
    print(v)
    if v.is_sat:
        _write_model(v.model, args.model_out)
    else:
        _note(v.reason)
    return EXIT[v.status]


COMMANDS = {
    "solve": cmd_solve,
    "check": cmd_check,
    "nf": cmd_nf,
    "c1": cmd_c1,
    "minimize": cmd_minimize,
    "tiling-gen": cmd_tiling_gen,
    "oracle": cmd_oracle,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _note(f"usage error: {exc}")
    except fm.ParseError as exc:
        _note(f"parse error: {exc}")
    except (OSError, ValueError) as exc:
        _note(f"error: {exc}")
    except KeyError as exc:
        _note(f"error: {exc.args[0]}")
    return ERROR


def main() -> None:
    sys.exit(run())
