"""Command-line driver: ``kbpmc check | export | solutions | rules``.

Exit codes: 0 everything passed, 1 some check failed, 2 the fixed point
stayed unresolved (or a rule system has no coherent solution), 3 the input
was rejected.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .ctlk import Verdict, deadlocks, mc_mask, run_check
from .formula import Not, nnf
from .guarded import (
    DECIDED, classify, enumerate_solutions, interpret,
    iteration_semantics, liberal_reinterpretation,
)
from .kernel import KripkeLabeller, MustCanStructure, reachable_mask
from .lang import DEFAULT_MAX_STATES, ParseError, SpecError, load
from .rules import (
    RuleSyntaxError, enumerate_closure_fixpoints, explain, format_rule, lfp_mc, parse_rules,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_UNRESOLVED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    """The input file could not be turned into a model; maps to exit code 3."""


# -- reports -----------------------------------------------------------------

@dataclass
class CheckResult:
    kind: str
    text: str
    verdict: str                          # PASS, FAIL, or UNKNOWN for bound verdicts
    witness: Optional[list] = None        # [[action or None, state name], ...]
    counterexample: Optional[str] = None
    on_bounds: bool = False


@dataclass
class RunReport:
    path: str
    tag: str
    states: int
    mu: int
    nu: int
    iterations: Optional[int] = None
    reachable_mu: Optional[int] = None
    reachable_nu: Optional[int] = None
    diagnostics: str = ""
    model_source: Optional[str] = None    # constructive, fallback, liberal, iteration
    model_edges: Optional[int] = None
    model_reachable: Optional[int] = None
    iteration: Optional[dict] = None
    liberal_is_solution: Optional[bool] = None
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.model_source is not None

    @property
    def exit_code(self) -> int:
        if not self.solved:
            return EXIT_UNRESOLVED
        if any(c.verdict != "PASS" for c in self.checks):
            return EXIT_CHECK_FAILED
        return EXIT_OK

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exit_code"] = self.exit_code
        return d

    def lines(self, witness: bool = False, timing: bool = False) -> list[str]:
        out = [f"MODEL {self.tag} states={self.states} mu={self.mu} nu={self.nu}"]
        if self.iterations is not None:
            out.append(f"FIXPOINT iterations={self.iterations} reachable_mu={self.reachable_mu} "
                       f"reachable_nu={self.reachable_nu}")
        if self.iteration is not None:
            it = self.iteration
            out.append(f"ITERATION eta={it['eta']} alpha={it['alpha']} status={it['status']}")
        if self.diagnostics:
            out.append(f"NOTE {self.diagnostics}")
        if self.liberal_is_solution is not None:
            out.append(f"LIBERAL edges={self.model_edges} "
                       f"solution={'yes' if self.liberal_is_solution else 'no'}")
        if self.solved:
            out.append(f"SOLUTION source={self.model_source} edges={self.model_edges} "
                       f"reachable={self.model_reachable}")
        for c in self.checks:
            word = "BOUND" if c.on_bounds else "CHECK"
            out.append(f"{word} {c.kind} {c.text} {c.verdict}")
            if c.counterexample is not None:
                out.append(f"  COUNTEREXAMPLE {c.counterexample}")
            if witness and c.witness:
                for i, (act, st) in enumerate(c.witness):
                    out.append(f"  WITNESS {i} {act or 'init'} {st}")
        for w in self.warnings:
            out.append(f"WARNING {w}")
        if timing and self.timing:
            out.append("TIMING " + " ".join(f"{k}={v:.3f}s" for k, v in self.timing.items()))
        return out


# -- model construction ---------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def load_model(path: str, max_states: int = DEFAULT_MAX_STATES, max_edges: Optional[int] = None):
    text = _read(path)
    try:
        model = load(text, max_states)
    except ParseError as e:
        raise InputError(f"{path}:{e.line}:{e.col}: {e.msg}") from None
    except SpecError as e:
        raise InputError("\n".join(f"{path}:{d}" for d in e.diagnostics)) from None
    if max_edges is not None:
        edges = len(model.system.union_relation)
        if edges > max_edges:
            raise InputError(f"{path}: {edges} candidate transitions exceed --max-edges {max_edges}")
    return model


def _bound_verdict(y: MustCanStructure, req) -> str:
    """Verdict shared by every solution between the bounds, or UNKNOWN."""
    basis = y.basis
    if req.kind == "reachable":
        target = KripkeLabeller(basis, basis.full_mask).label(req.formula)
        if reachable_mask(basis, y.lower) & target:
            return "PASS"
        if not reachable_mask(basis, y.upper) & target:
            return "FAIL"
        return "UNKNOWN"
    init = basis.initial
    if init & ~mc_mask(y, nnf(req.formula)) == 0:
        return "PASS"
    if init & mc_mask(y, nnf(Not(req.formula))):
        return "FAIL"
    return "UNKNOWN"


def _check_result(model, req, names, actions) -> CheckResult:
    v: Verdict = run_check(model, req, actions)
    res = CheckResult(req.kind, req.name, "PASS" if v.holds else "FAIL")
    if v.witness:
        res.witness = [[a, names[s]] for a, s in v.witness]
    if v.counterexample_state is not None:
        res.counterexample = names[v.counterexample_state]
    return res


def run(path: str, mode: str = "constructive", fallback: bool = True, liberal: bool = False,
        bounds: bool = False, max_states: int = DEFAULT_MAX_STATES,
        max_edges: Optional[int] = None) -> RunReport:
    """Parse, elaborate and solve a specification, then run its checks."""
    clock = {}
    t0 = time.perf_counter()
    em = load_model(path, max_states, max_edges)
    gs = em.system
    basis = gs.basis
    names = basis.names
    clock["load"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    model = None
    if mode == "iteration":
        it = iteration_semantics(gs)
        model = it.semantics
        e = len(model.relation)
        report = RunReport(path, "Iteration", basis.n, e, e,
                           iteration={"eta": it.eta, "alpha": it.alpha, "status": it.status},
                           model_source="iteration")
    else:
        c = classify(gs, fallback=fallback)
        y = c.fixpoint
        report = RunReport(path, c.tag, basis.n, len(y.lower), len(y.upper),
                           iterations=c.trace.steps,
                           reachable_mu=reachable_mask(basis, y.lower).bit_count(),
                           reachable_nu=reachable_mask(basis, y.upper).bit_count(),
                           diagnostics=c.diagnostics)
        if c.solved:
            model = c.solution
            report.model_source = "constructive" if c.tag == DECIDED else "fallback"
        elif liberal:
            model = liberal_reinterpretation(gs, y)
            report.liberal_is_solution = interpret(gs, model).relation == model.relation
            report.model_source = "liberal"
    clock["solve"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    actions = em.action_relations()
    if model is not None:
        report.model_edges = len(model.relation)
        report.model_reachable = reachable_mask(basis, model.relation).bit_count()
        report.checks = [_check_result(model, req, names, actions) for req in em.checks]
    elif bounds:
        report.checks = [CheckResult(req.kind, req.name, _bound_verdict(c.fixpoint, req), on_bounds=True)
                         for req in em.checks]
    clock["checks"] = time.perf_counter() - t0
    report.warnings = list(em.warnings)
    if model is not None:
        dead = sorted(deadlocks(model))
        if dead:
            report.warnings.append(f"{len(dead)} reachable deadlock state(s), first {names[dead[0]]}")
    report.timing = clock
    return report


# -- subcommands -----------------------------------------------------------------

def _emit(lines, out):
    for line in lines:
        print(line, file=out)


def cmd_check(args, out) -> int:
    report = run(args.file, args.mode, not args.no_fallback, args.liberal, args.bounds,
                 args.max_states, args.max_edges)
    _emit(report.lines(args.witness, args.timing), out)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            d = report.to_dict()
            if not args.timing:
                d.pop("timing")
            json.dump(d, fh, indent=2)
            fh.write("\n")
    return report.exit_code


def cmd_export(args, out) -> int:
    from .export import to_dot, to_json
    em = load_model(args.file, args.max_states, args.max_edges)
    gs = em.system
    if args.mode == "iteration":
        target, tag = iteration_semantics(gs).semantics, "Iteration"
    else:
        c = classify(gs, fallback=not args.no_fallback)
        tag = c.tag
        if args.bounds:
            target = c.fixpoint
        elif c.solved:
            target = c.solution
        elif args.liberal:
            target = liberal_reinterpretation(gs, c.fixpoint)
        else:
            print(f"error: {args.file}: fixed point unresolved ({c.diagnostics}); "
                  "use --bounds to export both relations", file=sys.stderr)
            return EXIT_UNRESOLVED
    actions = em.action_relations()
    if args.format == "json":
        text = json.dumps(to_json(target, actions, em.source_hash, tag), indent=1) + "\n"
    else:
        text = to_dot(target, actions, accessibility=args.acc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_solutions(args, out) -> int:
    em = load_model(args.file, args.max_states, args.max_edges)
    names = em.basis.names
    try:
        sols = enumerate_solutions(em.system, cap=args.cap, jobs=args.jobs)
    except ValueError as e:
        raise InputError(f"{args.file}: {e}") from None
    print(f"SOLUTIONS {len(sols)}", file=out)
    for i, m in enumerate(sols):
        edges = ", ".join(f"{names[s]} -> {names[t]}" for s, t in m.edges())
        print(f"SOLUTION {i} edges={len(m.relation)} {{{edges}}}", file=out)
    return EXIT_OK


def _set_text(rs, elems) -> str:
    return "{" + ", ".join(map(str, rs.ordered(elems))) + "}"


def cmd_rules(args, out) -> int:
    text = _read(args.file)
    try:
        rs = parse_rules(text)
    except RuleSyntaxError as e:
        raise InputError(f"{args.file}: {e}") from None
    print("UNIVERSE " + " ".join(map(str, rs.universe)), file=out)
    for r in rs.rules:
        print(f"RULE {format_rule(r)}", file=out)
    res = lfp_mc(rs)
    state = "decided" if res.decided else "undecided"
    print(f"LFP must={_set_text(rs, res.must)} can={_set_text(rs, res.can)} {state} "
          f"steps={len(res.trace) - 1}", file=out)
    code = EXIT_OK
    enum = None
    if args.enumerate or (args.explain is not None and args.given is None):
        try:
            enum = enumerate_closure_fixpoints(rs, cap=args.cap)
        except ValueError as e:
            raise InputError(f"{args.file}: {e}") from None
    if args.enumerate:
        if not enum.coherent:
            print("no coherent solution", file=out)
            code = EXIT_UNRESOLVED
        for fp in enum.fixpoints:
            print(f"FIXPOINT {_set_text(rs, fp)}", file=out)
        if enum.coherent:
            least = _set_text(rs, enum.least) if enum.least is not None else "none"
            unique = " (unique)" if len(enum.fixpoints) == 1 else ""
            print(f"LEAST {least}{unique}", file=out)
    if args.explain is not None:
        if args.explain not in rs.index:
            raise InputError(f"{args.file}: {args.explain!r} is not in the universe")
        if args.given is not None:
            given = [x for x in args.given.split(",") if x]
            unknown = [x for x in given if x not in rs.index]
            if unknown:
                raise InputError(f"{args.file}: {', '.join(unknown)} not in the universe")
        else:
            given = enum.least if enum is not None and enum.least is not None else ()
        d = explain(rs, given, args.explain)
        head = f"EXPLAIN {args.explain} given {_set_text(rs, given)}"
        if d is None:
            print(f"{head}: not derivable", file=out)
        else:
            print(head, file=out)
            print(d.render(), file=out)
            print(f"NEGATIVE {_set_text(rs, d.negative_premisses)}", file=out)
    return code


# -- argument parsing -------------------------------------------------------------

def _model_flags(p):
    p.add_argument("file", help="specification file")
    p.add_argument("--mode", choices=("constructive", "iteration"), default="constructive",
                   help="model source: constructive fixed point (default) or iteration semantics")
    p.add_argument("--no-fallback", action="store_true",
                   help="do not retry undecided fixed points by re-interpreting the must bound")
    p.add_argument("--liberal", action="store_true",
                   help="on an unresolved fixed point, use the liberal re-interpretation")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, metavar="N")
    p.add_argument("--max-edges", type=int, default=None, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kbpmc", description="Model checker for knowledge-based programs.")
    ap.add_argument("--version", action="version", version=f"kbpmc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="solve a specification and run its checks")
    _model_flags(p)
    p.add_argument("--witness", action="store_true", help="print witness paths of reachability checks")
    p.add_argument("--bounds", action="store_true",
                   help="on an unresolved fixed point, report verdicts shared by all solutions")
    p.add_argument("--dump", metavar="FILE", help="write the report as JSON")
    p.add_argument("--timing", action="store_true", help="print wall-clock timings")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="export a solved model or the fixed-point bounds")
    _model_flags(p)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--bounds", action="store_true", help="export both relations of the fixed point")
    p.add_argument("--acc", action="store_true", help="include accessibility edges in DOT output")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("solutions", help="enumerate all solutions by brute force")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=20, help="maximum number of candidate edges")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, metavar="N")
    p.add_argument("--max-edges", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_solutions)

    p = sub.add_parser("rules", help="solve a rule file")
    p.add_argument("file")
    p.add_argument("--enumerate", action="store_true", help="list every closure fixed point")
    p.add_argument("--explain", metavar="Y", help="print a derivation of Y")
    p.add_argument("--given", metavar="B",
                   help="comma-separated blocked set for --explain (default: the least fixed point)")
    p.add_argument("--cap", type=int, default=14, help="largest universe to enumerate")
    p.set_defaults(func=cmd_rules)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
