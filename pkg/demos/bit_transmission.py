"""Bit transmission: a sender repeats a bit until it is acknowledged.

Builds the protocol as a guarded system by hand, solves it, and asks what the
two agents come to know along the way.
"""
from kbpmc import samples
from kbpmc.ctlk import CheckRequest, run_check
from kbpmc.formula import EF, Knows, show
from kbpmc.guarded import classify, lfp_constructive, structure_is_synchronous, structure_provides_witnesses
from kbpmc.kernel import states_of, reachable_mask

gs = samples.bit_transmission()
basis = gs.basis

print("Actions and their knowledge-based guards:")
for a in gs.actions:
    print(f"  {a.name:6} guard {show(a.guard)}")

trace = lfp_constructive(gs)
print(f"\nThe must/can iteration settles after {trace.steps} steps.")
for k, y in enumerate(trace.iterates):
    print(f"  step {k}: {len(y.lower):2} must edges, {len(y.upper):2} can edges")

c = classify(gs)
print(f"\nClassification: {c.tag}")
reach = reachable_mask(basis, c.solution.relation)
print("Reachable states:", ", ".join(basis.names[s] for s in sorted(states_of(reach))))

kr = samples.receiver_knows_bit(basis)
for label, f in [("R knows the bit", kr), ("S knows that R knows", Knows("S", kr)),
                 ("R knows that S knows that R knows", Knows("R", Knows("S", kr)))]:
    v = run_check(c.solution, CheckRequest("initial", EF(f)))
    print(f"  eventually possible: {label:36} {'yes' if v.holds else 'no'}")

m = c.solution
print("\nThe solution provides epistemic witnesses:", structure_provides_witnesses(m, gs.knowledge_guards))
print("The solution is synchronous:", structure_is_synchronous(m))
