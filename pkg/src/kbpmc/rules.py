"""Rule systems with positive and negative premisses.

A rule ``(X, ∦Z) / y`` derives ``y`` once everything in ``X`` is derived
and nothing in ``Z`` is.  Besides the must/can fixed point and brute-force
closure enumeration, this module encodes guarded systems as rule systems over
judgements ``(state, formula)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

from .formula import (
    TRUE, And, Atom, Const, Formula, Knows, Not, Or, Possible,
    is_temporal_free, iter_bits, nnf, show, subformulas,
)
from .kernel import KripkeLabeller, states_of

__all__ = [
    "Rule", "RuleSystem", "MustCanPair", "LfpResult", "Derivation", "ClosureEnumeration",
    "StratifiedEvaluation", "apply_mc", "lfp_mc", "lfp_well_founded", "closure", "enumerate_closure_fixpoints",
    "explain", "encode_general", "encode_stratified", "parse_rules", "format_rules",
    "RuleSyntaxError",
]


@dataclass(frozen=True)
class Rule:
    positive: frozenset
    negative: frozenset
    conclusion: Hashable

    def __str__(self) -> str:
        return format_rule(self)


class RuleSystem:
    """Rules over a finite ordered universe; sets are handled as bitmasks internally."""

    def __init__(self, universe: Sequence[Hashable], rules: Iterable[Rule]):
        self.universe = tuple(universe)
        self.index = {u: i for i, u in enumerate(self.universe)}
        if len(self.index) != len(self.universe):
            raise ValueError("universe elements must be distinct")
        self.rules = tuple(rules)
        compiled = []
        for r in self.rules:
            for u in (*r.positive, *r.negative, r.conclusion):
                if u not in self.index:
                    raise ValueError(f"{u!r} is not in the universe")
            compiled.append((self.mask(r.positive), self.mask(r.negative), self.index[r.conclusion]))
        self._compiled = compiled

    def mask(self, elems: Iterable[Hashable]) -> int:
        m = 0
        for u in elems:
            m |= 1 << self.index[u]
        return m

    def elems(self, mask: int) -> frozenset:
        return frozenset(self.universe[i] for i in iter_bits(mask))

    def ordered(self, elems: Iterable[Hashable]) -> list:
        return sorted(elems, key=self.index.__getitem__)

    @property
    def full(self) -> int:
        return (1 << len(self.universe)) - 1

    def __len__(self):
        return len(self.rules)

    def __repr__(self) -> str:
        return f"RuleSystem({len(self.universe)} elements, {len(self.rules)} rules)"


@dataclass(frozen=True)
class MustCanPair:
    must: frozenset
    can: frozenset

    def __post_init__(self):
        if not self.must <= self.can:
            raise ValueError("must set must be contained in the can set")


def _apply(rs: RuleSystem, p: int, q: int) -> tuple[int, int]:
    must = can = 0
    for pos, neg, y in rs._compiled:
        if pos & ~p == 0 and neg & q == 0:
            must |= 1 << y
        if pos & ~q == 0 and neg & p == 0:
            can |= 1 << y
    return must, can


def apply_mc(rs: RuleSystem, pq: MustCanPair) -> MustCanPair:
    must, can = _apply(rs, rs.mask(pq.must), rs.mask(pq.can))
    return MustCanPair(rs.elems(must), rs.elems(can))


@dataclass
class LfpResult:
    pair: MustCanPair
    trace: list          # MustCanPair iterates from the bottom pair

    @property
    def must(self):
        return self.pair.must

    @property
    def can(self):
        return self.pair.can

    @property
    def decided(self) -> bool:
        return self.pair.must == self.pair.can


def lfp_mc(rs: RuleSystem) -> LfpResult:
    """Kleene iteration of the must/can operator from (∅, U)."""
    p, q = 0, rs.full
    trace = [(p, q)]
    cap = 2 * len(rs.universe) + 2
    while True:
        nxt = _apply(rs, p, q)
        if nxt == (p, q):
            break
        if len(trace) > cap:
            raise RuntimeError("must/can iteration exceeded its bound")
        p, q = nxt
        trace.append(nxt)
    pairs = [MustCanPair(rs.elems(a), rs.elems(b)) for a, b in trace]
    return LfpResult(pairs[-1], pairs)


def lfp_well_founded(rs: RuleSystem) -> LfpResult:
    """Alternating fixed point: each bound is a least closure against the other.

    must' = closure(R, can) and can' = closure(R, must).  Unlike Kleene
    iteration of the must/can operator, a conclusion supported only by a
    positive cycle never enters the can bound.
    """
    def clos(blocked: int) -> int:
        return _closure_mask(rs, [(pos, y) for pos, neg, y in rs._compiled if neg & blocked == 0])

    p, q = 0, rs.full
    trace = [(p, q)]
    while True:
        nxt = (clos(q), clos(p))
        if nxt == (p, q):
            break
        if len(trace) > 2 * len(rs.universe) + 2:
            raise RuntimeError("alternating iteration exceeded its bound")
        p, q = nxt
        trace.append(nxt)
    pairs = [MustCanPair(rs.elems(a), rs.elems(b)) for a, b in trace]
    return LfpResult(pairs[-1], pairs)


def _closure_mask(rs: RuleSystem, active: Sequence[tuple[int, int]]) -> int:
    """Least set closed under the given positive rules (pos mask, conclusion)."""
    derived = 0
    pending = list(active)
    while True:
        rest = []
        grew = False
        for pos, y in pending:
            if pos & ~derived == 0:
                if not derived >> y & 1:
                    derived |= 1 << y
                    grew = True
            else:
                rest.append((pos, y))
        if not grew:
            return derived
        pending = rest


def closure(rs: RuleSystem, blocked: Iterable[Hashable]) -> frozenset:
    """Everything derivable without relying on the absence of a blocked element."""
    b = rs.mask(blocked)
    active = [(pos, y) for pos, neg, y in rs._compiled if neg & b == 0]
    return rs.elems(_closure_mask(rs, active))


@dataclass
class ClosureEnumeration:
    fixpoints: list          # frozensets in canonical order
    least: Optional[frozenset]

    @property
    def coherent(self) -> bool:
        return bool(self.fixpoints)


def enumerate_closure_fixpoints(rs: RuleSystem, cap: int = 14) -> ClosureEnumeration:
    """All B with closure(B) = B, visiting subsets in Gray-code order."""
    n = len(rs.universe)
    if n > cap:
        raise ValueError(f"universe of {n} elements exceeds the enumeration cap {cap}")
    compiled = rs._compiled
    hits = [0] * len(compiled)          # blocked negative premisses per rule
    by_elem = [[] for _ in range(n)]
    for r, (_, neg, _) in enumerate(compiled):
        for e in iter_bits(neg):
            by_elem[e].append(r)
    b = 0
    found = []
    for i in range(1 << n):
        if i:
            flip = (i & -i).bit_length() - 1
            bit = 1 << flip
            delta = -1 if b & bit else 1
            b ^= bit
            for r in by_elem[flip]:
                hits[r] += delta
        active = [(compiled[r][0], compiled[r][2]) for r in range(len(compiled)) if hits[r] == 0]
        if _closure_mask(rs, active) == b:
            found.append(b)
    found.sort(key=lambda m: (m.bit_count(), [i for i in iter_bits(m)]))
    least = None
    for m in found:
        if all(m & ~o == 0 for o in found):
            least = rs.elems(m)
            break
    return ClosureEnumeration([rs.elems(m) for m in found], least)


@dataclass
class Derivation:
    rule: Rule
    children: tuple = ()

    @property
    def conclusion(self):
        return self.rule.conclusion

    @property
    def height(self) -> int:
        return 1 + max((c.height for c in self.children), default=0)

    @property
    def positive_premisses(self) -> frozenset:
        """Premisses left open; empty for a closed derivation."""
        done = {c.conclusion for c in self.children}
        own = frozenset(p for p in self.rule.positive if p not in done)
        return own.union(*(c.positive_premisses for c in self.children))

    @property
    def negative_premisses(self) -> frozenset:
        return self.rule.negative.union(*(c.negative_premisses for c in self.children))

    def render(self, show_elem=str, indent: int = 0) -> str:
        lines = ["  " * indent + show_elem(self.conclusion) + "   by " + format_rule(self.rule, show_elem)]
        for c in self.children:
            lines.append(c.render(show_elem, indent + 1))
        return "\n".join(lines)


def explain(rs: RuleSystem, blocked: Iterable[Hashable], target: Hashable) -> Optional[Derivation]:
    """A closed derivation of ``target`` of minimal height avoiding blocked negatives."""
    b = rs.mask(blocked)
    usable = [(k, pos) for k, (pos, neg, _) in enumerate(rs._compiled) if neg & b == 0]
    best: dict[int, int] = {}          # element -> rule index of its lowest derivation
    derived = 0
    while True:
        new = {}
        for k, pos in usable:
            y = rs._compiled[k][2]
            if derived >> y & 1 or y in new:
                continue
            if pos & ~derived == 0:
                new[y] = k
        if not new:
            break
        for y, k in new.items():
            best[y] = k
            derived |= 1 << y
    goal = rs.index[target]
    if goal not in best:
        return None

    def build(y: int) -> Derivation:
        rule = rs.rules[best[y]]
        kids = tuple(build(rs.index[p]) for p in rs.ordered(rule.positive))
        return Derivation(rule, kids)

    return build(goal)


# -- text format -------------------------------------------------------------

class RuleSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_rules(text: str) -> RuleSystem:
    """Parse ``y <- x1 x2 ; ! z1 z2`` lines, ``#`` comments and ``universe a b c``."""
    declared = None
    mentioned: dict = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "<-" not in line:
            words = line.split()
            if words[0] == "universe":
                if declared is not None:
                    raise RuleSyntaxError(lineno, "universe declared twice")
                declared = words[1:]
                continue
            if len(words) != 1:
                raise RuleSyntaxError(lineno, "expected 'head <- body' or a single fact")
            head, body = words[0], ""
        else:
            head, body = (part.strip() for part in line.split("<-", 1))
            if len(head.split()) != 1:
                raise RuleSyntaxError(lineno, "a rule has exactly one conclusion")
        if ";" in body:
            pos_text, neg_text = body.split(";", 1)
            if neg_text.strip() and not neg_text.strip().startswith("!"):
                raise RuleSyntaxError(lineno, "negative premisses must follow '!'")
        elif "!" in body:
            cut = body.index("!")
            pos_text, neg_text = body[:cut], body[cut:]
        else:
            pos_text, neg_text = body, ""
        pos = pos_text.split()
        neg = neg_text.replace("!", " ").split()
        if any("!" in p or ";" in p for p in pos):
            raise RuleSyntaxError(lineno, "malformed positive premisses")
        for sym in (head, *pos, *neg):
            mentioned.setdefault(sym, lineno)
        rules.append(Rule(frozenset(pos), frozenset(neg), head))
    if declared is not None:
        extra = [s for s in mentioned if s not in declared]
        if extra:
            raise RuleSyntaxError(mentioned[extra[0]], f"symbol {extra[0]!r} is not in the declared universe")
        universe = declared
    else:
        universe = list(mentioned)
    return RuleSystem(universe, rules)


def format_rule(rule: Rule, show_elem=str) -> str:
    pos = " ".join(sorted(show_elem(p) for p in rule.positive))
    neg = " ".join(sorted(show_elem(z) for z in rule.negative))
    parts = [show_elem(rule.conclusion), "<-"]
    if pos:
        parts.append(pos)
    if neg:
        parts += [";", "!", neg]
    return " ".join(parts)


def format_rules(rs: RuleSystem) -> str:
    lines = ["universe " + " ".join(map(str, rs.universe))]
    lines += [format_rule(r) for r in rs.rules]
    return "\n".join(lines) + "\n"


# -- encodings of guarded systems -----------------------------------------------

def _formula_closure(gs) -> list[Formula]:
    order: dict = {TRUE: None}
    todo = []
    for a in gs.actions:
        if not is_temporal_free(a.guard):
            raise ValueError(f"action {a.name}: rule encodings need temporal-free guards")
        todo += [nnf(a.guard), nnf(Not(a.guard))]
    while todo:
        f = todo.pop(0)
        for g in subformulas(f):
            if g in order:
                continue
            order[g] = None
            if isinstance(g, Knows):
                todo.append(nnf(Not(g.sub)))
    return list(order)


def encode_general(gs, reachable_possibility: bool = True) -> RuleSystem:
    """Judgements ``(s, ψ)``: s is reachable and satisfies ψ.

    ``(s, TRUE)`` stands for reachability.  With ``reachable_possibility`` the
    possibility rule also asks for ``(s, TRUE)``, so every derivable judgement
    is about a reachable state; without it a possibility judgement can be
    derived at an unreachable state and feed that state's outgoing actions.
    """
    basis = gs.basis
    forms = _formula_closure(gs)
    universe = [(s, f) for s in range(basis.n) for f in forms]
    rules: list[Rule] = []
    E = frozenset()
    for s0 in iter_bits(basis.initial):
        rules.append(Rule(E, E, (s0, TRUE)))
    for a in gs.actions:
        g = nnf(a.guard)
        for s, t in a.relation.pairs():
            rules.append(Rule(frozenset({(s, g)}), E, (t, TRUE)))
    for f in forms:
        for s in range(basis.n):
            here = frozenset({(s, TRUE)})
            if isinstance(f, Atom):
                if f.mask >> s & 1:
                    rules.append(Rule(here, E, (s, f)))
            elif isinstance(f, Not):
                if not f.sub.mask >> s & 1:
                    rules.append(Rule(here, E, (s, f)))
            elif isinstance(f, And):
                rules.append(Rule(frozenset({(s, f.left), (s, f.right)}), E, (s, f)))
            elif isinstance(f, Or):
                rules.append(Rule(frozenset({(s, f.left)}), E, (s, f)))
                rules.append(Rule(frozenset({(s, f.right)}), E, (s, f)))
            elif isinstance(f, Possible):
                acc = basis.accessibility(f.agent)
                for t in iter_bits(acc.image(s)):
                    prem = {(t, f.sub), (s, TRUE)} if reachable_possibility else {(t, f.sub)}
                    rules.append(Rule(frozenset(prem), E, (s, f)))
            elif isinstance(f, Knows):
                acc = basis.accessibility(f.agent)
                dual = nnf(Not(f.sub))
                blockers = frozenset((t, dual) for t in iter_bits(acc.image(s)))
                rules.append(Rule(here, blockers, (s, f)))
            elif isinstance(f, Const):
                pass        # TRUE comes from reachability, FALSE never holds
            else:
                raise ValueError(f"cannot encode {show(f)}")
    return RuleSystem(universe, rules)


def judgement_name(basis, elem) -> str:
    s, f = elem
    return f"{basis.names[s]} |= {show(f)}"


@dataclass
class StratifiedEvaluation:
    layers: list                 # RS^0, RS^1, ... as frozensets
    satisfaction: list           # per layer: {action name: states where its guard holds}
    caveat: Optional[str] = None

    @property
    def reachable(self) -> frozenset:
        return self.layers[-1]


def encode_stratified(gs, k_max: int, provides_witnesses: Optional[bool] = None) -> StratifiedEvaluation:
    """Depth-indexed evaluation: knowledge at depth k ranges over RS^k only.

    RS^0 = S0, and RS^{k+1} holds S0 plus the targets of action edges leaving
    states of RS^k whose guard holds at depth k.
    """
    for a in gs.actions:
        if not is_temporal_free(a.guard):
            raise ValueError(f"action {a.name}: stratified evaluation needs temporal-free guards")
    basis = gs.basis
    layer = basis.initial
    layers = [layer]
    sats = []
    for _ in range(k_max):
        lab = KripkeLabeller(basis, layer)
        sat = {a.name: lab.label(a.guard) & layer for a in gs.actions}
        sats.append({k: states_of(v) for k, v in sat.items()})
        nxt = basis.initial
        for a in gs.actions:
            nxt |= a.relation.post(sat[a.name])
        layer = nxt
        layers.append(layer)
    caveat = None
    if provides_witnesses is not True:
        caveat = ("depth-indexed evaluation is only sound for systems that provide epistemic witnesses; "
                  + ("this system does not" if provides_witnesses is False else "witness provision was not established"))
    return StratifiedEvaluation([states_of(m) for m in layers], sats, caveat)
