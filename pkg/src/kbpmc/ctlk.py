"""CTL with knowledge: labelling over plain and must/can structures, checks, witnesses."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .formula import Formula, Temporal, is_nnf, is_propositional, iter_bits, nnf
from .kernel import (
    ConstructiveLabeller, KripkeLabeller, MustCanStructure, Relation,
    TransitionStructure, reachable_mask, states_of,
)

__all__ = [
    "eval_ets", "eval_mc", "ets_mask", "mc_mask", "ctlk_nnf", "CheckRequest",
    "Verdict", "run_check", "deadlocks", "UnresolvedModelError",
]


class UnresolvedModelError(ValueError):
    """Checks need a solved model."""


# -- path-quantifier algorithms over one relation ---------------------------
# All paths are infinite, so states that only lead to dead ends satisfy no
# existential path formula.

def infinite_from(rel: Relation, full: int) -> int:
    """States from which some infinite path starts."""
    return eg(rel, full)


def ex(rel: Relation, target: int, inf: int) -> int:
    return rel.pre(target & inf)


def eu(rel: Relation, stay: int, goal: int, inf: int) -> int:
    z = goal & inf
    frontier = z
    while frontier:
        new = rel.pre(frontier) & stay & ~z
        z |= new
        frontier = new
    return z


def eg(rel: Relation, keep: int) -> int:
    """Greatest set inside ``keep`` where every state has a successor in the set."""
    z = keep
    succ = rel.succ
    count = {}
    queue = []
    for s in iter_bits(keep):
        c = (succ[s] & keep).bit_count()
        if c:
            count[s] = c
        else:
            queue.append(s)
            z &= ~(1 << s)
    pred = None
    while queue:
        if pred is None:
            pred = rel.pred
        t = queue.pop()
        for p in iter_bits(pred[t] & z):
            count[p] -= 1
            if count[p] == 0:
                z &= ~(1 << p)
                queue.append(p)
    return z


def er(rel: Relation, release: int, hold: int, inf: int) -> int:
    """E[release R hold]: hold forever, or hold up to and including a release state."""
    return eg(rel, hold) | eu(rel, hold, release & hold, inf)


class _PathOps:
    """Existential operators over a relation and their universal duals."""

    def __init__(self, rel: Relation, full: int):
        self.rel = rel
        self.full = full
        self._inf = None

    @property
    def inf(self) -> int:
        if self._inf is None:
            self._inf = infinite_from(self.rel, self.full)
        return self._inf

    def existential(self, op: str, args: Sequence[int]) -> int:
        rel, full = self.rel, self.full
        if op == "EX":
            return ex(rel, args[0], self.inf)
        if op == "EF":
            return eu(rel, full, args[0], self.inf)
        if op == "EG":
            return eg(rel, args[0])
        if op == "EU":
            return eu(rel, args[0], args[1], self.inf)
        if op == "ER":
            return er(rel, args[0], args[1], self.inf)
        raise ValueError(op)

    def universal(self, op: str, args: Sequence[int]) -> int:
        full = self.full
        comp = [full & ~a for a in args]
        dual = {"AX": "EX", "AF": "EG", "AG": "EF", "AU": "ER", "AR": "EU"}[op]
        return full & ~self.existential(dual, comp)


class ETSLabeller(KripkeLabeller):
    """Classical CTLK over the reachable fragment of a transition structure."""

    def __init__(self, m: TransitionStructure, reach: int = None):
        if reach is None:
            reach = reachable_mask(m.basis, m.relation)
        super().__init__(m.basis, reach)
        self.paths = _PathOps(m.relation.restrict_sources(reach), self.full)

    def temporal(self, f: Temporal) -> int:
        args = [self.label(a) for a in f.args]
        if f.op[0] == "E":
            return self.paths.existential(f.op, args)
        return self.paths.universal(f.op, args)


class MCLabeller(ConstructiveLabeller):
    """Constructive CTLK: E-operators follow must edges, A-operators can edges."""

    def __init__(self, y: MustCanStructure, reach_must: int = None, reach_can: int = None):
        super().__init__(y, reach_must, reach_can)
        self.must_paths = _PathOps(y.lower, self.full)
        self.can_paths = _PathOps(y.upper, self.full)

    def temporal(self, f: Temporal) -> int:
        args = [self.label(a) for a in f.args]
        if f.op[0] == "E":
            return self.must_paths.existential(f.op, args)
        return self.can_paths.universal(f.op, args)


def ets_mask(m: TransitionStructure, phi: Formula) -> int:
    lab = ETSLabeller(m)
    return lab.label(phi) & lab.reach


def mc_mask(y: MustCanStructure, phi: Formula) -> int:
    if not is_nnf(phi):
        raise ValueError("eval_mc needs a formula in negation normal form")
    lab = MCLabeller(y)
    return lab.label(phi) & lab.reach_can


def eval_ets(m: TransitionStructure, phi: Formula) -> frozenset[int]:
    """Reachable states of ``m`` satisfying ``phi`` (classical semantics)."""
    return states_of(ets_mask(m, phi))


def eval_mc(y: MustCanStructure, phi: Formula) -> frozenset[int]:
    """Can-reachable states constructively satisfying the NNF formula ``phi``."""
    return states_of(mc_mask(y, phi))


def ctlk_nnf(phi: Formula) -> Formula:
    return nnf(phi)


# -- checks ----------------------------------------------------------------

@dataclass(frozen=True)
class CheckRequest:
    kind: str                 # "initial" or "reachable"
    formula: Formula
    name: str = ""
    location: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("initial", "reachable"):
            raise ValueError(f"unknown check kind {self.kind!r}")
        if self.kind == "reachable" and not is_propositional(self.formula):
            raise ValueError("reachable checks take state predicates only")


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[tuple] = None            # ((action, state), ...), first action None
    counterexample_state: Optional[int] = None


def deadlocks(m: TransitionStructure) -> frozenset[int]:
    reach = reachable_mask(m.basis, m.relation)
    return frozenset(s for s in iter_bits(reach) if not m.relation.succ[s])


def run_check(model: TransitionStructure, req: CheckRequest,
              actions: Sequence[tuple[str, Relation]] = None) -> Verdict:
    """Decide one check on a solved model.

    ``actions`` lists (name, relation) pairs in declaration order and labels
    witness steps; an edge is labelled by the first action containing it.
    """
    if model is None:
        raise UnresolvedModelError("cannot run checks without a solution")
    if req.kind == "initial":
        sat = ets_mask(model, req.formula)
        bad = model.basis.initial & ~sat
        if bad:
            return Verdict(False, counterexample_state=(bad & -bad).bit_length() - 1)
        return Verdict(True)
    return _reachability_witness(model, req.formula, actions)


def _reachability_witness(model, pred: Formula, actions) -> Verdict:
    basis = model.basis
    target = KripkeLabeller(basis, basis.full_mask).label(pred)
    rel = model.relation
    if actions is None:
        actions = [("step", rel)]
    else:
        # only the parts that belong to the model
        actions = [(name, r & rel) for name, r in actions]
    parent: dict = {}
    queue = deque()
    for s in iter_bits(basis.initial):
        parent[s] = None
        queue.append(s)
    found = None
    while queue:
        s = queue.popleft()
        if target >> s & 1:
            found = s
            break
        row = rel.succ[s]
        for name, r in actions:
            for t in iter_bits(r.succ[s] & row):
                if t not in parent:
                    parent[t] = (s, name)
                    queue.append(t)
    if found is None:
        return Verdict(False)
    steps = []
    s = found
    while parent[s] is not None:
        prev, name = parent[s]
        steps.append((name, s))
        s = prev
    steps.append((None, s))
    return Verdict(True, witness=tuple(reversed(steps)))
