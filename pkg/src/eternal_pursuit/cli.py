"""Command-line entry point.

Machine-readable output goes to stdout, diagnostics and prompts to stderr.
Exit codes: 0 success, 1 verification mismatch, 2 bad input, 3 state budget
exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from typing import TextIO

from . import bounds as B
from .engine import BUDGET_ENV, capt_k, eternal_cop_number, solve_eternal
from .errors import BudgetExceeded, IllegalMove, PursuitError
from .graph import Graph, load_graph
from .reduction import SetCoverInstance, build_reduction
from .strategy import Session, extract_strategy, single_play_strategy
from .suites import SUITES, report, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _graph(source: str) -> Graph:
    g = load_graph(source)
    return g if g.name else replace(g, name=source)


def _emit(out: TextIO, args, doc: dict, text: str) -> None:
    if args.json:
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


# -- verbs --------------------------------------------------------------------

def cmd_gen(args, out, err) -> int:
    g = _graph(args.graph)
    doc = {"name": g.name, "n": g.n, "m": g.m, "edges": [list(e) for e in g.edges], "digest": g.digest()}
    _emit(out, args, doc, g.to_edge_list())
    return EXIT_OK


def cmd_solve(args, out, err) -> int:
    g = _graph(args.graph)
    if args.k is not None:
        sol = solve_eternal(g, args.k, args.t)
        stats = sol.stats
        doc = {"graph": g.name, "t": args.t, "k": args.k, "wins": bool(sol),
               "configs": stats.configs, "rounds": stats.rounds, "winning_configs": len(sol.win_set)}
        text = (f"{args.k} cop(s) {'win' if sol else 'lose'} every play within {args.t} step(s) on {g.name}\n"
                f"configs explored {stats.configs}, fixpoint rounds {stats.rounds}, "
                f"winning configs {len(sol.win_set)}")
        table_k, table_sol = args.k, sol if sol else None
    else:
        res = eternal_cop_number(g, args.t)
        stats = res.stats
        doc = {"graph": g.name, "t": args.t, "value": res.value, "configs": stats.configs, "rounds": stats.rounds}
        text = f"value {res.value}\nconfigs explored {stats.configs}, fixpoint rounds {stats.rounds}"
        table_k, table_sol = res.value, None
    if args.strategy_out:
        if args.k is not None and table_sol is None:
            raise UsageError(f"no eternal strategy exists for {args.k} cop(s)")
        table = extract_strategy(g, table_k, args.t, solution=table_sol)
        with open(args.strategy_out, "w") as fh:
            fh.write(table.to_json())
        err.write(f"strategy table with {len(table.moves)} moves written to {args.strategy_out}\n")
    _emit(out, args, doc, text)
    return EXIT_OK


def cmd_capt(args, out, err) -> int:
    g = _graph(args.graph)
    value = capt_k(g, args.k)
    shown = "infinite" if value == float("inf") else str(int(value))
    _emit(out, args, {"graph": g.name, "k": args.k, "capt": None if shown == "infinite" else int(value)}, shown)
    return EXIT_OK


def cmd_bound(args, out, err) -> int:
    g = _graph(args.graph)
    reports = B.applicable_bounds(g, args.t)
    if args.which != "all":
        reports = [r for r in reports if r.name == args.which]
        if not reports:
            raise UsageError(f"bound {args.which!r} does not apply to {g.name} at t={args.t}")
    exact = None
    if not args.no_exact:
        try:
            exact = eternal_cop_number(g, args.t).value
        except BudgetExceeded as exc:
            err.write(f"skipping exact cross-check: {exc}\n")
    for r in reports:
        r.exact_value = exact
    lines = []
    for r in reports:
        line = f"{r.name:<22} {r.kind:<6} {r.value}"
        if r.rational is not None and r.rational.denominator != 1:
            line += f" (= ceil {r.rational})"
        if exact is not None:
            line += "  ok" if r.holds_for(exact) else f"  VIOLATED (exact {exact})"
        lines.append(line)
    if exact is not None:
        lines.append(f"exact value {exact}")
    doc = {"graph": g.name, "t": args.t, "exact": exact, "bounds": [r.as_dict() for r in reports]}
    _emit(out, args, doc, "\n".join(lines))
    bad = exact is not None and not all(r.holds_for(exact) for r in reports)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_reduce(args, out, err) -> int:
    if args.instance == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.instance) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.instance!r}: {exc.strerror}") from None
    inst = SetCoverInstance.parse(text)
    red = build_reduction(inst, args.t)
    if args.roles:
        with open(args.roles, "w") as fh:
            fh.write(red.role_map())
    g = red.graph
    doc = {"n": g.n, "m": g.m, "edges": [list(e) for e in g.edges], "roles": list(red.roles),
           "t": args.t, "digest": g.digest()}
    _emit(out, args, doc, g.to_edge_list())
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    checks = run_suite(args.suite, args.max_n, args.max_t, jobs=args.jobs)
    rep = report(checks)
    lines = [f"{'ok  ' if c.ok else 'FAIL'} {c.suite:<9} t={c.t} {c.instance}: expected {c.expected}, got {c.got}"
             for c in checks if args.verbose or not c.ok]
    lines.append(f"{rep['checked']} checks, {rep['mismatches']} mismatches")
    _emit(out, args, rep, "\n".join(lines))
    return EXIT_MISMATCH if rep["mismatches"] else EXIT_OK


PASS_WORDS = ("", ".", "p", "pass", "s", "stay")


def cmd_play(args, out, err, stdin: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    g = _graph(args.graph)
    k = args.k if args.k is not None else eternal_cop_number(g, args.t).value
    sol = solve_eternal(g, k, args.t)
    if sol:
        table = extract_strategy(g, k, args.t, solution=sol)
    else:
        err.write(f"{k} cop(s) cannot win every play within {args.t} steps; "
                  "the cops fall back to a single-play strategy\n")
        table = single_play_strategy(g, k, args.t)
    session = Session(g, table)
    out.write(f"{g.name}: {g.n} vertices, {k} cop(s), t={args.t}\n")
    out.write(f"cops start on {list(session.config)}\n")
    out.flush()
    while not session.finished:
        if session.awaiting_placement:
            prompt = f"play {session.play + 1}: place the robber (vertex, q quits)> "
        else:
            prompt = f"robber at {session.robber}, {session.steps_left} step(s) left: move (vertex, enter passes, q quits)> "
        err.write(prompt)
        err.flush()
        line = stdin.readline()
        if not line:
            break
        word = line.strip().lower()
        if word in ("q", "quit"):
            break
        try:
            if session.awaiting_placement:
                events = session.place(int(word))
            else:
                events = session.move(session.robber if word in PASS_WORDS else int(word))
        except (ValueError, IllegalMove) as exc:
            msg = str(exc) if isinstance(exc, IllegalMove) else f"not a vertex: {word!r}"
            err.write(f"illegal: {msg}\n")
            continue
        for ev in events:
            out.write(ev.describe(g) + "\n")
        out.flush()
    captures = sum(1 for ev in session.transcript if ev.kind == "capture")
    out.write(f"{session.play} play(s), {captures} capture(s)" + (", robber escaped\n" if session.finished else "\n"))
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eternal-pursuit",
                                description="Exact solver and bounds for eternal bounded-time Cops and Robbers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="list every checked instance and log progress")
    common.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1,
                        help="worker processes for verify suites (default: all cores); never changes output")
    common.add_argument("--budget", type=_positive, help=f"cap on solver table entries (overrides {BUDGET_ENV})")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, help_text, graph=True):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--json", action="store_true", help="machine-readable JSON output")
        mode.add_argument("--text", dest="json", action="store_false", help="human-readable output (default)")
        if graph:
            sp.add_argument("graph", help="generator spec (path:6, spider:3x4, grid:3x3, ...) or edge-list file")
        return sp

    verb("gen", "write a graph in edge-list format")
    sp = verb("solve", "exact eternal cop number, or a decision for fixed k")
    sp.add_argument("--t", type=_positive, required=True, help="time-steps allowed per play")
    sp.add_argument("--k", type=_positive, help="decide whether k cops suffice")
    sp.add_argument("--strategy-out", metavar="FILE", help="also write the certified strategy table as JSON")
    sp = verb("capt", "fewest time-steps in which k cops surely capture")
    sp.add_argument("--k", type=_positive, required=True)
    sp = verb("bound", "closed-form and structural bounds, cross-checked against the solver")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--which", default="all", help="bound name, or all (default)")
    sp.add_argument("--no-exact", action="store_true", help="skip the exact cross-check")
    sp = verb("reduce", "build the set-cover reduction graph", graph=False)
    sp.add_argument("instance", help="set-cover instance file ('alpha beta k' then one subset per line), or - for stdin")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--roles", metavar="FILE", help="write the vertex role map as JSON")
    sp = verb("verify", "check formulas and bounds against the exact solver", graph=False)
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--max-n", type=_positive, default=8)
    sp.add_argument("--max-t", type=_positive, default=4)
    sp = verb("play", "play the robber against an optimal cop strategy")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, help="number of cops (default: the eternal cop number)")
    return p


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "capt": cmd_capt, "bound": cmd_bound,
            "reduce": cmd_reduce, "verify": cmd_verify, "play": cmd_play}


def run(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err,
                        format="%(levelname)s %(name)s: %(message)s")
    saved = os.environ.get(BUDGET_ENV)
    if args.budget:
        os.environ[BUDGET_ENV] = str(args.budget)
    try:
        return COMMANDS[args.verb](args, out, err)
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except (UsageError, PursuitError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = saved


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
