"""Interpreter and model checker for knowledge-based programs.

Submodules: :mod:`kbpmc.kernel` (state bases, structures, satisfaction),
:mod:`kbpmc.guarded` (guarded systems and their fixed points),
:mod:`kbpmc.ctlk` (temporal-epistemic checking), :mod:`kbpmc.rules`
(rule systems with negative premisses), :mod:`kbpmc.lang` (the
specification language) and :mod:`kbpmc.cli` (the command-line driver).
"""
__version__ = "0.1.0"

from .formula import (
    TRUE, FALSE, Atom, And, Or, Not, Implies, Iff, Knows, Possible, Temporal,
    EX, AX, EF, AF, EG, AG, EU, AU, ER, AR, nnf,
)
from .kernel import (
    MustCanStructure, Partition, Relation, StateBasis, TransitionStructure, kripke_sat, mc_sat,
)
from .guarded import (
    Classification, GuardedAction, GuardedSystem, classify, enumerate_solutions, interpret,
    interpret_mc, iteration_semantics, lfp_constructive,
)
from .ctlk import CheckRequest, Verdict, eval_ets, eval_mc, run_check
from .rules import Rule, RuleSystem, lfp_mc, parse_rules, enumerate_closure_fixpoints

__all__ = [
    "TRUE", "FALSE", "Atom", "And", "Or", "Not", "Implies", "Iff", "Knows", "Possible", "Temporal",
    "EX", "AX", "EF", "AF", "EG", "AG", "EU", "AU", "ER", "AR", "nnf",
    "MustCanStructure", "Partition", "Relation", "StateBasis", "TransitionStructure",
    "kripke_sat", "mc_sat",
    "Classification", "GuardedAction", "GuardedSystem", "classify", "enumerate_solutions",
    "interpret", "interpret_mc", "iteration_semantics", "lfp_constructive",
    "CheckRequest", "Verdict", "eval_ets", "eval_mc", "run_check",
    "Rule", "RuleSystem", "lfp_mc", "parse_rules", "enumerate_closure_fixpoints",
    "__version__",
]
