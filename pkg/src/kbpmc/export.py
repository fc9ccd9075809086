"""JSON and Graphviz export of solved models and fixed-point bounds.

Exports cover the reachable fragment only: states reachable along the
exported relation (the upper relation for bounds), the edges leaving them,
and accessibility pairs among them.  :func:`read_json` rebuilds kernel
structures from an export.
"""
from __future__ import annotations

import json
from importlib import resources
from typing import Optional, Sequence

from . import __version__
from .formula import iter_bits
from .kernel import MustCanStructure, Relation, StateBasis, TransitionStructure, reachable_mask

__all__ = ["FORMAT", "schema", "to_json", "read_json", "to_dot"]

FORMAT = "kbpmc-export/1"


def schema() -> dict:
    """The JSON schema that every export validates against."""
    text = resources.files("kbpmc").joinpath("data/export.schema.json").read_text()
    return json.loads(text)


def _edge_actions(rel: Relation, actions) -> dict:
    """Label each edge by the first action (in declaration order) containing it."""
    out: dict = {}
    for name, r in actions or ():
        for e in (r & rel).pairs():
            out.setdefault(e, name)
    return out


def _edge_list(rel: Relation, keep: int, labels: dict) -> list:
    return [{"from": s, "to": t, "action": labels.get((s, t))}
            for s, t in rel.restrict_sources(keep).pairs()]


def _header(basis: StateBasis, keep: int, kind: str) -> dict:
    props = list(basis.signature.propositions)
    states = [{"id": s, "name": basis.names[s], "props": sorted(basis.labels[s])}
              for s in iter_bits(keep)]
    acc = {}
    for a in basis.agents:
        rel = basis.accessibility(a)
        acc[a] = [[s, t] for s in iter_bits(keep) for t in iter_bits(rel.image(s) & keep)]
    return {"format": FORMAT, "kind": kind, "propositions": props, "states": states,
            "initial": list(iter_bits(basis.initial)), "accessibility": acc}


def to_json(model, actions: Sequence = None, spec_hash: Optional[str] = None,
            classification: Optional[str] = None) -> dict:
    """Export a :class:`TransitionStructure` or :class:`MustCanStructure` as a JSON object."""
    if isinstance(model, MustCanStructure):
        basis = model.basis
        keep = reachable_mask(basis, model.upper)
        labels = _edge_actions(model.upper, actions)
        doc = _header(basis, keep, "bounds")
        doc["edges_mu"] = _edge_list(model.lower, keep, labels)
        doc["edges_nu"] = _edge_list(model.upper, keep, labels)
    elif isinstance(model, TransitionStructure):
        basis = model.basis
        keep = reachable_mask(basis, model.relation)
        doc = _header(basis, keep, "structure")
        doc["edges"] = _edge_list(model.relation, keep, _edge_actions(model.relation, actions))
    else:
        raise TypeError(f"cannot export {type(model).__name__}")
    meta = {"spec_hash": spec_hash, "tool_version": __version__}
    if classification is not None:
        meta["classification"] = classification
    doc["meta"] = meta
    return doc


def read_json(doc: dict):
    """Rebuild the exported structure; state ids are renumbered densely in listed order.

    Returns ``(structure, ids)`` where ``ids[i]`` is the exported id of state ``i``.
    """
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    ids = [st["id"] for st in doc["states"]]
    index = {x: i for i, x in enumerate(ids)}
    if len(index) != len(ids):
        raise ValueError("duplicate state ids")

    def at(x):
        try:
            return index[x]
        except KeyError:
            raise ValueError(f"unknown state id {x}") from None

    acc = {a: [(at(s), at(t)) for s, t in pairs] for a, pairs in doc["accessibility"].items()}
    basis = StateBasis.build(
        [st["props"] for st in doc["states"]],
        initial=[at(x) for x in doc["initial"]],
        accessibility=acc,
        names=[st["name"] for st in doc["states"]],
        propositions=doc["propositions"],
    )

    def rel(edges):
        return Relation.from_pairs(basis.n, ((at(e["from"]), at(e["to"])) for e in edges))

    if doc["kind"] == "bounds":
        return MustCanStructure(basis, rel(doc["edges_mu"]), rel(doc["edges_nu"])), ids
    return TransitionStructure(basis, rel(doc["edges"])), ids


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _quote(s: str) -> str:
    return '"' + _esc(s) + '"'


def to_dot(model, actions: Sequence = None, accessibility: bool = False) -> str:
    """Graphviz source: must edges solid, can-only edges dashed, initial states doubled."""
    if isinstance(model, MustCanStructure):
        lower, upper = model.lower, model.upper
    else:
        lower = upper = model.relation
    basis = model.basis
    keep = reachable_mask(basis, upper)
    labels = _edge_actions(upper, actions)
    lines = ["digraph model {", "  node [shape=box, fontname=monospace];"]
    for s in iter_bits(keep):
        props = " ".join(sorted(basis.labels[s]))
        text = _esc(basis.names[s]) + ("\\n" + _esc(props) if props else "")
        extra = ", peripheries=2" if basis.initial >> s & 1 else ""
        lines.append(f'  n{s} [label="{text}"{extra}];')
    for s, t in upper.restrict_sources(keep).pairs():
        attrs = []
        if labels.get((s, t)):
            attrs.append(f"label={_quote(labels[(s, t)])}")
        if (s, t) not in lower:
            attrs.append("style=dashed")
        lines.append(f"  n{s} -> n{t}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    if accessibility:
        for a in basis.agents:
            rel = basis.accessibility(a)
            for s in iter_bits(keep):
                for t in iter_bits(rel.image(s) & keep):
                    if s < t:
                        lines.append(f"  n{s} -> n{t} [dir=none, style=dotted, color=gray, "
                                     f"label={_quote(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
