"""State bases, transition structures, must/can structures and satisfaction.

State sets are Python ints used as bitmasks (bit ``s`` set means state ``s``
is in the set).  Relations store one successor mask per state, plus a lazily
built predecessor table; both directions are needed by the labelling code.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .formula import (
    And, Atom, Const, Formula, Iff, Implies, Knows, Not, Or, Possible, Temporal,
    is_nnf, is_temporal_free, iter_bits, nnf,
)

__all__ = [
    "Signature", "Relation", "Partition", "AccessRelation", "StateBasis",
    "TransitionStructure", "MustCanStructure", "ReachabilityInfo",
    "UnreachableStateError", "BasisMismatchError", "compute_reachability",
    "reachable_mask", "kripke_sat", "nnf", "mc_sat", "mc_sat_posneg", "mc_leq",
    "bottom", "mask_of", "states_of",
]


class UnreachableStateError(ValueError):
    """Satisfaction is only defined at reachable states."""


class BasisMismatchError(ValueError):
    pass


def mask_of(states: Iterable[int]) -> int:
    m = 0
    for s in states:
        m |= 1 << s
    return m


def states_of(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


@dataclass(frozen=True)
class Signature:
    propositions: tuple[str, ...]
    agents: tuple[str, ...]

    def __post_init__(self):
        for kind, names in (("proposition", self.propositions), ("agent", self.agents)):
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate {kind} identifiers in {names}")


# -- relations -------------------------------------------------------------

class Relation:
    """A binary relation on ``range(n)``; immutable and hashable."""

    __slots__ = ("n", "succ", "_pred", "_hash", "_size", "_src")

    def __init__(self, n: int, succ: Sequence[int], _pred=None):
        self.n = n
        self.succ = tuple(succ)
        if len(self.succ) != n:
            raise ValueError("successor table has wrong length")
        full = (1 << n) - 1
        if any(m & ~full for m in self.succ):
            raise ValueError("relation mentions states outside the basis")
        self._pred = _pred
        self._hash = None
        self._size = None
        self._src = None

    @classmethod
    def empty(cls, n: int) -> "Relation":
        return cls(n, (0,) * n, _pred=(0,) * n)

    @classmethod
    def full(cls, n: int) -> "Relation":
        row = (1 << n) - 1
        rows = (row,) * n
        return cls(n, rows, _pred=rows)

    @classmethod
    def identity(cls, n: int) -> "Relation":
        rows = tuple(1 << s for s in range(n))
        return cls(n, rows, _pred=rows)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        succ = [0] * n
        for s, t in pairs:
            if not (0 <= s < n and 0 <= t < n):
                raise ValueError(f"edge ({s},{t}) outside the basis")
            succ[s] |= 1 << t
        return cls(n, succ)

    @property
    def pred(self) -> tuple[int, ...]:
        if self._pred is None:
            pred = [0] * self.n
            for s, row in enumerate(self.succ):
                bit = 1 << s
                for t in iter_bits(row):
                    pred[t] |= bit
            self._pred = tuple(pred)
        return self._pred

    def pairs(self) -> Iterator[tuple[int, int]]:
        for s, row in enumerate(self.succ):
            for t in iter_bits(row):
                yield (s, t)

    def edges(self) -> list[tuple[int, int]]:
        return list(self.pairs())

    def __len__(self) -> int:
        if self._size is None:
            self._size = sum(row.bit_count() for row in self.succ)
        return self._size

    def __iter__(self):
        return self.pairs()

    def __contains__(self, edge) -> bool:
        s, t = edge
        return 0 <= s < self.n and bool(self.succ[s] >> t & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.n == other.n and self.succ == other.succ

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.succ))
        return self._hash

    def __le__(self, other: "Relation") -> bool:
        return self.issubset(other)

    def issubset(self, other: "Relation") -> bool:
        return all(a & ~b == 0 for a, b in zip(self.succ, other.succ))

    def __or__(self, other: "Relation") -> "Relation":
        return Relation(self.n, [a | b for a, b in zip(self.succ, other.succ)])

    def __and__(self, other: "Relation") -> "Relation":
        return Relation(self.n, [a & b for a, b in zip(self.succ, other.succ)])

    def __sub__(self, other: "Relation") -> "Relation":
        return Relation(self.n, [a & ~b for a, b in zip(self.succ, other.succ)])

    def sources(self) -> int:
        if self._src is None:
            m = 0
            for s, row in enumerate(self.succ):
                if row:
                    m |= 1 << s
            self._src = m
        return self._src

    def restrict_sources(self, mask: int) -> "Relation":
        return Relation(self.n, [row if mask >> s & 1 else 0 for s, row in enumerate(self.succ)])

    def post(self, mask: int) -> int:
        """States with a predecessor in ``mask``."""
        out = 0
        succ = self.succ
        for s in iter_bits(mask):
            out |= succ[s]
        return out

    def pre(self, mask: int) -> int:
        """States with a successor in ``mask``."""
        out = 0
        pred = self.pred
        for t in iter_bits(mask):
            out |= pred[t]
        return out

    def __repr__(self) -> str:
        return f"Relation({self.n}, {self.edges()})"


class Partition:
    """An equivalence relation given by a class label per state."""

    def __init__(self, labels: Sequence):
        self.n = len(labels)
        ids: dict = {}
        classes: list[int] = []
        index = []
        for s, lab in enumerate(labels):
            if lab not in ids:
                ids[lab] = len(classes)
                classes.append(0)
            c = ids[lab]
            classes[c] |= 1 << s
            index.append(c)
        self.classes = tuple(classes)
        self.class_index = tuple(index)

    def image(self, s: int) -> int:
        return self.classes[self.class_index[s]]

    def pre(self, mask: int) -> int:
        out = 0
        for c in self.classes:
            if c & mask:
                out |= c
        return out

    post = pre

    def contains(self, s: int, t: int) -> bool:
        return self.class_index[s] == self.class_index[t]

    def pairs(self) -> Iterator[tuple[int, int]]:
        for s in range(self.n):
            for t in iter_bits(self.image(s)):
                yield (s, t)

    def to_relation(self) -> Relation:
        return Relation(self.n, [self.image(s) for s in range(self.n)])

    def is_equivalence(self) -> bool:
        return True

    def __eq__(self, other) -> bool:
        if isinstance(other, Partition):
            return sorted(self.classes) == sorted(other.classes)
        if isinstance(other, AccessRelation):
            return self.to_relation() == other.relation
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.classes)))


class AccessRelation:
    """An arbitrary accessibility relation (not necessarily an equivalence)."""

    def __init__(self, relation: Relation):
        self.relation = relation
        self.n = relation.n

    def image(self, s: int) -> int:
        return self.relation.succ[s]

    def pre(self, mask: int) -> int:
        return self.relation.pre(mask)

    def post(self, mask: int) -> int:
        return self.relation.post(mask)

    def contains(self, s: int, t: int) -> bool:
        return (s, t) in self.relation

    def pairs(self):
        return self.relation.pairs()

    def to_relation(self) -> Relation:
        return self.relation

    def is_equivalence(self) -> bool:
        r = self.relation
        succ = r.succ
        for s in range(self.n):
            if not succ[s] >> s & 1:
                return False
            for t in iter_bits(succ[s]):
                if not succ[t] >> s & 1:
                    return False
                if succ[t] & ~succ[s]:
                    return False
        return True

    def __eq__(self, other) -> bool:
        if isinstance(other, (Partition, AccessRelation)):
            return self.to_relation() == other.to_relation()
        return NotImplemented

    def __hash__(self):
        return hash(self.relation)


# -- bases and structures --------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateBasis:
    """States ``0..n-1`` with labelling, initial states and accessibility."""

    n: int
    labels: tuple
    initial: int
    access: Mapping[str, object]
    signature: Signature
    names: tuple = ()

    def __post_init__(self):
        if len(self.labels) != self.n:
            raise ValueError("labelling must cover every state")
        if self.initial & ~self.full_mask:
            raise ValueError("initial states outside the basis")
        for a, acc in self.access.items():
            if acc.n != self.n:
                raise ValueError(f"accessibility of {a} has the wrong size")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"s{i}" for i in range(self.n)))

    @classmethod
    def build(cls, labels: Sequence[Iterable[str]], initial: Iterable[int],
              accessibility: Mapping[str, Iterable[tuple[int, int]]] = None,
              observability: Mapping[str, Iterable[str]] = None,
              names: Sequence[str] = (), propositions: Sequence[str] = None,
              strict: bool = False) -> "StateBasis":
        """Build a basis from explicit accessibility pairs or observed propositions.

        Observed propositions induce agreement partitions.  Explicit pairs are
        taken as given; a non-equivalence warns, or raises when ``strict``.
        """
        labels = tuple(frozenset(l) for l in labels)
        n = len(labels)
        if propositions is None:
            propositions = sorted(set().union(*labels)) if labels else []
        access: dict = {}
        for a, obs in (observability or {}).items():
            obs = frozenset(obs)
            access[a] = Partition([frozenset(l & obs) for l in labels])
        for a, pairs in (accessibility or {}).items():
            if a in access:
                raise ValueError(f"agent {a} given twice")
            acc = AccessRelation(Relation.from_pairs(n, pairs))
            if not acc.is_equivalence():
                msg = f"accessibility of agent {a} is not an equivalence relation"
                if strict:
                    raise ValueError(msg)
                warnings.warn(msg, stacklevel=2)
            access[a] = acc
        sig = Signature(tuple(propositions), tuple(access))
        return cls(n, labels, mask_of(initial), access, sig, tuple(names))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.access)

    @property
    def initial_states(self) -> frozenset[int]:
        return states_of(self.initial)

    def accessibility(self, agent: str):
        try:
            return self.access[agent]
        except KeyError:
            raise KeyError(f"unknown agent {agent!r}") from None

    def atom(self, prop: str) -> Atom:
        """The extensional atom for a labelling proposition."""
        return Atom(prop, mask_of(s for s, l in enumerate(self.labels) if prop in l))

    def state_index(self, name: str) -> int:
        return self.names.index(name)

    def same_as(self, other: "StateBasis") -> bool:
        if self is other:
            return True
        return (self.n == other.n and self.labels == other.labels
                and self.initial == other.initial
                and set(self.access) == set(other.access)
                and all(self.access[a] == other.access[a] for a in self.access))

    def relation(self, pairs: Iterable[tuple[int, int]]) -> Relation:
        return Relation.from_pairs(self.n, pairs)

    def structure(self, pairs: Iterable[tuple[int, int]]) -> "TransitionStructure":
        return TransitionStructure(self, self.relation(pairs))


def _check_basis(a: StateBasis, b: StateBasis):
    if not a.same_as(b):
        raise BasisMismatchError("structures are over different state bases")


@dataclass(frozen=True)
class TransitionStructure:
    basis: StateBasis
    relation: Relation

    def __post_init__(self):
        if self.relation.n != self.basis.n:
            raise ValueError("relation size does not match the basis")

    @property
    def transitions(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.relation.pairs())

    def edges(self) -> list[tuple[int, int]]:
        return self.relation.edges()

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionStructure):
            return NotImplemented
        return self.basis.same_as(other.basis) and self.relation == other.relation

    def __hash__(self):
        return hash(self.relation)


@dataclass(frozen=True)
class MustCanStructure:
    basis: StateBasis
    lower: Relation
    upper: Relation

    def __post_init__(self):
        if not self.lower.issubset(self.upper):
            raise ValueError("must/can structure requires lower ⊆ upper")

    @property
    def must(self) -> TransitionStructure:
        return TransitionStructure(self.basis, self.lower)

    @property
    def can(self) -> TransitionStructure:
        return TransitionStructure(self.basis, self.upper)

    @property
    def decided(self) -> bool:
        return self.lower == self.upper

    def __eq__(self, other) -> bool:
        if not isinstance(other, MustCanStructure):
            return NotImplemented
        return (self.basis.same_as(other.basis) and self.lower == other.lower
                and self.upper == other.upper)

    def __hash__(self):
        return hash((self.lower, self.upper))


def bottom(basis: StateBasis) -> MustCanStructure:
    """The least element (∅, S×S) of the extension order."""
    return MustCanStructure(basis, Relation.empty(basis.n), Relation.full(basis.n))


def mc_leq(y1: MustCanStructure, y2: MustCanStructure) -> bool:
    """Extension order: y2 has at least the must edges and at most the can edges of y1."""
    _check_basis(y1.basis, y2.basis)
    return y1.lower.issubset(y2.lower) and y2.upper.issubset(y1.upper)


# -- reachability ----------------------------------------------------------

@dataclass(frozen=True)
class ReachabilityInfo:
    """Layered reachability.  ``layer_masks[k]`` is the set reachable in at most k steps."""

    relation: Relation
    layer_masks: tuple
    _depth: dict = field(default=None, repr=False, compare=False)

    @property
    def reachable_mask(self) -> int:
        return self.layer_masks[-1]

    @property
    def reachable(self) -> frozenset[int]:
        return states_of(self.reachable_mask)

    @property
    def layers(self) -> tuple[frozenset[int], ...]:
        return tuple(states_of(m) for m in self.layer_masks)

    @property
    def stable_index(self) -> int:
        return len(self.layer_masks) - 1

    def layer(self, k: int) -> int:
        return self.layer_masks[min(k, len(self.layer_masks) - 1)]

    def edge_layer(self, k: int) -> Relation:
        """RT^k: edges leaving states reachable within k-1 steps."""
        if k == 0:
            return Relation.empty(self.relation.n)
        return self.relation.restrict_sources(self.layer(k - 1))

    @property
    def edge_layers(self) -> tuple[Relation, ...]:
        return tuple(self.edge_layer(k) for k in range(len(self.layer_masks) + 1))

    @property
    def reachable_edges(self) -> Relation:
        return self.relation.restrict_sources(self.reachable_mask)

    @property
    def depth(self) -> dict[int, int]:
        if self._depth is None:
            d = {}
            prev = 0
            for k, m in enumerate(self.layer_masks):
                for s in iter_bits(m & ~prev):
                    d[s] = k
                prev = m
            object.__setattr__(self, "_depth", d)
        return self._depth


def _layers(rel: Relation, init: int) -> tuple:
    layers = [init]
    cur = frontier = init
    while True:
        nxt = cur | rel.post(frontier)
        if nxt == cur:
            break
        frontier = nxt & ~cur
        cur = nxt
        layers.append(cur)
    return tuple(layers)


def reachable_mask(basis: StateBasis, rel: Relation) -> int:
    cur = frontier = basis.initial
    while frontier:
        new = rel.post(frontier) & ~cur
        cur |= new
        frontier = new
    return cur


def compute_reachability(m: TransitionStructure) -> ReachabilityInfo:
    return ReachabilityInfo(m.relation, _layers(m.relation, m.basis.initial))


# -- labelling -------------------------------------------------------------

class Labeller:
    """Memoized set-based evaluation of formulas.

    Subclasses decide how negation, knowledge and temporal operators read the
    structure.  ``label`` returns a bitmask over all states; callers restrict
    it to the states where satisfaction is defined.
    """

    def __init__(self, basis: StateBasis):
        self.basis = basis
        self.full = basis.full_mask
        self.memo: dict = {}

    def label(self, f: Formula) -> int:
        hit = self.memo.get(f)
        if hit is None:
            hit = self._compute(f)
            self.memo[f] = hit
        return hit

    def _compute(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return f.mask & self.full
        if isinstance(f, Const):
            return self.full if f.value else 0
        if isinstance(f, Not):
            return self.negation(f.sub)
        if isinstance(f, And):
            return self.label(f.left) & self.label(f.right)
        if isinstance(f, Or):
            return self.label(f.left) | self.label(f.right)
        if isinstance(f, Implies):
            return self.implication(f)
        if isinstance(f, Iff):
            return self.equivalence(f)
        if isinstance(f, Knows):
            return self.knows(f.agent, self.label(f.sub))
        if isinstance(f, Possible):
            return self.possible(f.agent, self.label(f.sub))
        if isinstance(f, Temporal):
            return self.temporal(f)
        raise TypeError(f"not a formula: {f!r}")

    def negation(self, sub: Formula) -> int:
        return self.full & ~self.label(sub)

    def implication(self, f: Implies) -> int:
        return (self.full & ~self.label(f.left)) | self.label(f.right)

    def equivalence(self, f: Iff) -> int:
        a, b = self.label(f.left), self.label(f.right)
        return self.full & ~(a ^ b)

    def knows(self, agent: str, sat: int) -> int:
        raise NotImplementedError

    def possible(self, agent: str, sat: int) -> int:
        raise NotImplementedError

    def temporal(self, f: Temporal) -> int:
        raise ValueError(f"temporal operator {f.op} is not supported here")


class KripkeLabeller(Labeller):
    """Classical semantics over the reachable part of a transition structure."""

    def __init__(self, basis: StateBasis, reach: int):
        super().__init__(basis)
        self.reach = reach

    def knows(self, agent, sat):
        acc = self.basis.accessibility(agent)
        return self.full & ~acc.pre(self.reach & ~sat)

    def possible(self, agent, sat):
        return self.basis.accessibility(agent).pre(self.reach & sat)


class ConstructiveLabeller(Labeller):
    """Constructive semantics on NNF formulas over a must/can structure.

    Universal knowledge reads the can-reachable states, possibility the
    must-reachable ones.
    """

    def __init__(self, y: MustCanStructure, reach_must: int = None, reach_can: int = None):
        super().__init__(y.basis)
        self.y = y
        self.reach_must = reachable_mask(y.basis, y.lower) if reach_must is None else reach_must
        self.reach_can = reachable_mask(y.basis, y.upper) if reach_can is None else reach_can

    def negation(self, sub):
        if not isinstance(sub, Atom):
            raise ValueError("constructive evaluation needs negation normal form")
        return self.full & ~sub.mask

    def implication(self, f):
        raise ValueError("constructive evaluation needs negation normal form")

    equivalence = implication

    def knows(self, agent, sat):
        acc = self.basis.accessibility(agent)
        return self.full & ~acc.pre(self.reach_can & ~sat)

    def possible(self, agent, sat):
        return self.basis.accessibility(agent).pre(self.reach_must & sat)


def kripke_sat(m: TransitionStructure, s: int, phi: Formula) -> bool:
    if not is_temporal_free(phi):
        raise ValueError("kripke_sat takes temporal-free formulas; use ctlk.eval_ets")
    reach = reachable_mask(m.basis, m.relation)
    if not reach >> s & 1:
        raise UnreachableStateError(f"state {s} is not reachable")
    return bool(KripkeLabeller(m.basis, reach).label(phi) >> s & 1)


def mc_sat(y: MustCanStructure, s: int, phi: Formula) -> bool:
    if not is_temporal_free(phi):
        raise ValueError("mc_sat takes temporal-free formulas; use ctlk.eval_mc")
    if not is_nnf(phi):
        raise ValueError("mc_sat needs a formula in negation normal form")
    lab = ConstructiveLabeller(y)
    if not lab.reach_can >> s & 1:
        raise UnreachableStateError(f"state {s} is not reachable in the can structure")
    return bool(lab.label(phi) >> s & 1)


@dataclass(frozen=True)
class PosNeg:
    positive: bool
    negative: bool


def posneg_masks(y: MustCanStructure, phi: Formula, reach_must: int, reach_can: int) -> tuple[int, int]:
    """Direct positive/negative satisfaction sets (no NNF translation)."""
    basis = y.basis
    full = basis.full_mask
    memo: dict = {}

    def go(f):
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            r = (f.mask & full, full & ~f.mask)
        elif isinstance(f, Const):
            r = (full, 0) if f.value else (0, full)
        elif isinstance(f, Not):
            p, n = go(f.sub)
            r = (n, p)
        elif isinstance(f, And):
            (p1, n1), (p2, n2) = go(f.left), go(f.right)
            r = (p1 & p2, n1 | n2)
        elif isinstance(f, Or):
            (p1, n1), (p2, n2) = go(f.left), go(f.right)
            r = (p1 | p2, n1 & n2)
        elif isinstance(f, Implies):
            (p1, n1), (p2, n2) = go(f.left), go(f.right)
            r = (n1 | p2, p1 & n2)
        elif isinstance(f, Iff):
            (p1, n1), (p2, n2) = go(f.left), go(f.right)
            r = ((p1 & p2) | (n1 & n2), (n1 | n2) & (p1 | p2))
        elif isinstance(f, (Knows, Possible)):
            acc = basis.accessibility(f.agent)
            p, n = go(f.sub)
            k_pos = full & ~acc.pre(reach_can & ~p)
            k_neg = acc.pre(reach_must & n)
            if isinstance(f, Knows):
                r = (k_pos, k_neg)
            else:
                # M_a g is not K_a not g
                r = (acc.pre(reach_must & p), full & ~acc.pre(reach_can & ~n))
        else:
            raise ValueError("positive/negative satisfaction is defined for temporal-free formulas")
        memo[f] = r
        return r

    return go(phi)


def mc_sat_posneg(y: MustCanStructure, s: int, phi: Formula) -> PosNeg:
    rm = reachable_mask(y.basis, y.lower)
    rc = reachable_mask(y.basis, y.upper)
    if not rc >> s & 1:
        raise UnreachableStateError(f"state {s} is not reachable in the can structure")
    p, n = posneg_masks(y, phi, rm, rc)
    return PosNeg(bool(p >> s & 1), bool(n >> s & 1))
