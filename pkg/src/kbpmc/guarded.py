"""Epistemically guarded transition systems and their semantics.

A guarded system is a list of actions ``guard ▷ B`` over a state basis.
Given a transition structure M, each action contributes the edges of B that
leave a reachable state where its guard holds; a solution is an M that
reproduces itself.  The constructive semantics iterates the same idea on
must/can structures from the bottom element.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .ctlk import ETSLabeller, MCLabeller
from .formula import Formula, Knows, Not, is_temporal_free, iter_bits, knowledge_subformulas, nnf
from .kernel import (
    MustCanStructure, Relation, StateBasis, TransitionStructure,
    compute_reachability, reachable_mask, bottom, states_of, _check_basis,
)

__all__ = [
    "GuardedAction", "GuardedSystem", "FixpointTrace", "IterationResult",
    "Classification", "EpistemicAnalysis", "interpret", "interpret_mc",
    "action_contributions", "lfp_constructive", "iteration_semantics", "classify",
    "liberal_reinterpretation", "enumerate_solutions", "structure_provides_witnesses",
    "structure_is_synchronous", "system_epistemic_analysis",
    "DECIDED", "FALLBACK", "UNRESOLVED",
]

DECIDED = "Decided"
FALLBACK = "FallbackSolved"
UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class GuardedAction:
    name: str
    guard: Formula
    relation: Relation

    @cached_property
    def positive(self) -> Formula:
        return nnf(self.guard)

    @cached_property
    def negative(self) -> Formula:
        return nnf(Not(self.guard))


@dataclass(frozen=True, eq=False)
class GuardedSystem:
    basis: StateBasis
    actions: tuple

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise ValueError("action names must be unique")
        for a in self.actions:
            if a.relation.n != self.basis.n:
                raise ValueError(f"action {a.name} ranges over a different basis")

    @cached_property
    def union_relation(self) -> Relation:
        rows = [0] * self.basis.n
        for a in self.actions:
            for s in iter_bits(a.relation.sources()):
                rows[s] |= a.relation.succ[s]
        return Relation(self.basis.n, rows)

    @cached_property
    def knowledge_guards(self) -> list[Formula]:
        seen: dict = {}
        for a in self.actions:
            for k in knowledge_subformulas(a.guard):
                seen.setdefault(k, None)
        return list(seen)

    def action(self, name: str) -> GuardedAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


def _union(n: int, parts: Iterable[Relation]) -> Relation:
    rows = [0] * n
    for r in parts:
        for s in iter_bits(r.sources()):
            rows[s] |= r.succ[s]
    return Relation(n, rows)


def _enabled_part(rel: Relation, mask: int) -> Relation:
    src = rel.sources()
    if src & ~mask == 0:
        return rel
    return rel.restrict_sources(mask)


# -- interpretation functionals ----------------------------------------------

def action_contributions(gs: GuardedSystem, m: TransitionStructure) -> list[tuple[str, Relation]]:
    """Per-action edge sets of the interpretation of ``m``, in declaration order."""
    _check_basis(gs.basis, m.basis)
    reach = reachable_mask(m.basis, m.relation)
    lab = ETSLabeller(m, reach)
    out = []
    for a in gs.actions:
        enabled = reach & lab.label(a.guard)
        out.append((a.name, _enabled_part(a.relation, enabled)))
    return out


def interpret(gs: GuardedSystem, m: TransitionStructure) -> TransitionStructure:
    parts = action_contributions(gs, m)
    return TransitionStructure(gs.basis, _union(gs.basis.n, (r for _, r in parts)))


def _mc_parts(gs: GuardedSystem, y: MustCanStructure):
    _check_basis(gs.basis, y.basis)
    lab = MCLabeller(y)
    parts = []
    for a in gs.actions:
        pos = lab.label(a.positive)
        neg = lab.label(a.negative)
        must = _enabled_part(a.relation, lab.reach_must & pos)
        can = _enabled_part(a.relation, lab.reach_can & ~neg)
        parts.append((a.name, must, can))
    return parts


def interpret_mc(gs: GuardedSystem, y: MustCanStructure) -> MustCanStructure:
    parts = _mc_parts(gs, y)
    n = gs.basis.n
    return MustCanStructure(gs.basis, _union(n, (p[1] for p in parts)),
                            _union(n, (p[2] for p in parts)))


def liberal_reinterpretation(gs: GuardedSystem, y: MustCanStructure) -> TransitionStructure:
    """Fire every action whose guard positively holds at a can-reachable state."""
    lab = MCLabeller(y)
    parts = [_enabled_part(a.relation, lab.reach_can & lab.label(a.positive)) for a in gs.actions]
    return TransitionStructure(gs.basis, _union(gs.basis.n, parts))


def liberal_contributions(gs: GuardedSystem, y: MustCanStructure) -> list[tuple[str, Relation]]:
    lab = MCLabeller(y)
    return [(a.name, _enabled_part(a.relation, lab.reach_can & lab.label(a.positive)))
            for a in gs.actions]


# -- constructive least fixed point ------------------------------------------

@dataclass
class FixpointTrace:
    iterates: list                 # Y_0 = bottom, ..., last two equal
    per_action: list               # per step: {name: (must, can)}

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    @property
    def fixpoint(self) -> MustCanStructure:
        return self.iterates[-1]


def lfp_constructive(gs: GuardedSystem, cap: int = None) -> FixpointTrace:
    if cap is None:
        cap = 2 * len(gs.union_relation) + 4
    y = bottom(gs.basis)
    iterates = [y]
    per_action = []
    n = gs.basis.n
    while True:
        parts = _mc_parts(gs, y)
        per_action.append({name: (mu, nu) for name, mu, nu in parts})
        nxt = MustCanStructure(gs.basis, _union(n, (p[1] for p in parts)),
                               _union(n, (p[2] for p in parts)))
        iterates.append(nxt)
        if nxt == y:
            return FixpointTrace(iterates, per_action)
        if len(iterates) > cap + 1:
            raise RuntimeError("constructive iteration exceeded its bound; the chain is not monotone")
        y = nxt


# -- iteration semantics ------------------------------------------------------

@dataclass
class IterationResult:
    iterates: list          # N_0, N_1, ...; the successor of the last one is N_eta
    eta: int
    alpha: int
    status: str             # "fixed_point" or "non_monotone_stop"

    @property
    def semantics(self) -> TransitionStructure:
        return self.iterates[self.alpha]

    def successor_index(self, k: int) -> int:
        return k + 1 if k + 1 < len(self.iterates) else self.eta


def iteration_semantics(gs: GuardedSystem) -> IterationResult:
    """Iterate the functional from the all-edges structure until a repetition."""
    n = gs.basis.n
    cur = TransitionStructure(gs.basis, Relation.full(n))
    iterates = [cur]
    seen = {cur.relation: 0}
    while True:
        nxt = interpret(gs, cur)
        if nxt.relation in seen:
            eta = seen[nxt.relation]
            break
        seen[nxt.relation] = len(iterates)
        iterates.append(nxt)
        cur = nxt
    res = IterationResult(iterates, eta, eta, "")
    k = eta
    while True:
        here = iterates[k].relation
        after = iterates[res.successor_index(k)].relation
        if here == after:
            res.alpha, res.status = k, "fixed_point"
            return res
        if not after.issubset(here):
            res.alpha, res.status = k, "non_monotone_stop"
            return res
        k = res.successor_index(k)


# -- classification -------------------------------------------------------------

@dataclass
class Classification:
    tag: str
    fixpoint: MustCanStructure
    solution: Optional[TransitionStructure]
    diagnostics: str
    trace: FixpointTrace = field(repr=False, default=None)

    @property
    def solved(self) -> bool:
        return self.solution is not None


def classify(gs: GuardedSystem, fallback: bool = True) -> Classification:
    trace = lfp_constructive(gs)
    y = trace.fixpoint
    if y.decided:
        return Classification(DECIDED, y, y.must,
                              f"decided after {trace.steps} steps", trace)
    if fallback:
        low = interpret(gs, y.must).relation
        high = interpret(gs, y.can).relation
        if low == y.upper and high == y.upper:
            return Classification(FALLBACK, y, y.can,
                                  "interpreting the must bound yields the can bound, which is a solution",
                                  trace)
        why = ("interpreting the must bound does not yield the can bound" if low != y.upper
               else "the can bound is not a solution")
    else:
        why = "fallback disabled"
    return Classification(UNRESOLVED, y, None,
                          f"undecided fixed point: |must|={len(y.lower)} |can|={len(y.upper)}; {why}",
                          trace)


# -- brute-force solutions ---------------------------------------------------------

def _solutions_chunk(gs: GuardedSystem, edges: list, start: int, stop: int) -> list[int]:
    n = gs.basis.n
    temporal = not all(is_temporal_free(a.guard) for a in gs.actions)
    cache: dict = {}
    found = []
    for code in range(start, stop):
        rows = [0] * n
        c, i = code, 0
        while c:
            if c & 1:
                s, t = edges[i]
                rows[s] |= 1 << t
            c >>= 1
            i += 1
        rel = Relation(n, rows)
        reach = reachable_mask(gs.basis, rel)
        key = (reach, rel.restrict_sources(reach)) if temporal else reach
        img = cache.get(key)
        if img is None:
            img = interpret(gs, TransitionStructure(gs.basis, rel)).relation
            cache[key] = img
        if img == rel:
            found.append(code)
    return found


def enumerate_solutions(gs: GuardedSystem, cap: int = 20, jobs: int = 1) -> list[TransitionStructure]:
    """All solutions, by trying every subset of the union of action relations.

    Without temporal guards the interpretation depends on a structure only
    through its reachable states, so images are cached per reachable set;
    otherwise the cache is keyed by the reachable fragment of the relation.  Results come sorted by
    size, then by edge list.
    """
    edges = gs.union_relation.edges()
    if len(edges) > cap:
        raise ValueError(f"{len(edges)} candidate edges exceed the enumeration cap {cap}")
    total = 1 << len(edges)
    if jobs > 1 and total >= 1 << 10:
        step = -(-total // jobs)
        bounds = [(i, min(i + step, total)) for i in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(_solutions_chunk, gs, edges, a, b) for a, b in bounds]
            codes = [c for f in futs for c in f.result()]
    else:
        codes = _solutions_chunk(gs, edges, 0, total)
    sols = []
    for code in codes:
        sols.append(gs.basis.structure(e for i, e in enumerate(edges) if code >> i & 1))
    sols.sort(key=lambda m: (len(m.relation), m.edges()))
    return sols


# -- witnesses and synchrony ----------------------------------------------------------

def structure_provides_witnesses(m: TransitionStructure, formulas: Iterable[Formula]) -> bool:
    """Every failing K_a g at depth k is refuted by an a-accessible state of depth ≤ k."""
    info = compute_reachability(m)
    lab = ETSLabeller(m, info.reachable_mask)
    for f in formulas:
        if not isinstance(f, Knows):
            raise ValueError(f"expected a knowledge formula, got {f}")
        acc = m.basis.accessibility(f.agent)
        holds = lab.label(f)
        refuting = lab.full & ~lab.label(f.sub)
        for layer in info.layer_masks:
            for s in iter_bits(layer & ~holds):
                if not acc.image(s) & layer & refuting:
                    return False
    return True


def structure_is_synchronous(m: TransitionStructure) -> bool:
    """Accessibility never links reachable states of different depth."""
    info = compute_reachability(m)
    reach = info.reachable_mask
    depth = info.depth
    for a in m.basis.agents:
        acc = m.basis.accessibility(a)
        for s in iter_bits(reach):
            for t in iter_bits(acc.image(s) & reach):
                k = min(depth[s], depth[t])
                layer = info.layer(k)
                if not (layer >> s & 1 and layer >> t & 1):
                    return False
    return True


@dataclass(frozen=True)
class EpistemicAnalysis:
    provides_witnesses: bool
    synchronous: bool
    checked: int                        # number of reachable-set candidates
    witness_failure: Optional[frozenset] = None
    synchrony_failure: Optional[frozenset] = None


def _canonical_structure(basis: StateBasis, states: int) -> TransitionStructure:
    """A structure whose reachable set is exactly ``states`` (which contains S0)."""
    rows = [0] * basis.n
    for s in iter_bits(basis.initial):
        rows[s] = states
    return TransitionStructure(basis, Relation(basis.n, rows))


def _analyse_chunk(gs: GuardedSystem, free: list, start: int, stop: int):
    basis = gs.basis
    phis = gs.knowledge_guards
    wit_fail = syn_fail = None
    for code in range(start, stop):
        states = basis.initial
        for i, s in enumerate(free):
            if code >> i & 1:
                states |= 1 << s
        img = interpret(gs, _canonical_structure(basis, states))
        if wit_fail is None and not structure_provides_witnesses(img, phis):
            wit_fail = states
        if syn_fail is None and not structure_is_synchronous(img):
            syn_fail = states
        if wit_fail is not None and syn_fail is not None:
            break
    return wit_fail, syn_fail


def system_epistemic_analysis(gs: GuardedSystem, cap: int = 16, jobs: int = 1) -> EpistemicAnalysis:
    """Witness provision and synchrony of every interpretation of ``gs``.

    Interpretation and satisfaction depend on a structure only through its
    reachable set, and every superset of the initial states is the reachable
    set of some structure.  Quantifying over those supersets is therefore
    exact.
    """
    basis = gs.basis
    if basis.initial == 0:
        free: list = []
    else:
        free = list(iter_bits(basis.full_mask & ~basis.initial))
    if len(free) > cap:
        raise ValueError(f"{len(free)} non-initial states exceed the analysis cap {cap}")
    total = 1 << len(free)
    if jobs > 1 and total >= 64:
        step = -(-total // jobs)
        bounds = [(i, min(i + step, total)) for i in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = [f.result() for f in [ex.submit(_analyse_chunk, gs, free, a, b) for a, b in bounds]]
    else:
        results = [_analyse_chunk(gs, free, 0, total)]
    wit = next((w for w, _ in results if w is not None), None)
    syn = next((s for _, s in results if s is not None), None)
    return EpistemicAnalysis(
        wit is None, syn is None, total,
        None if wit is None else states_of(wit),
        None if syn is None else states_of(syn),
    )
