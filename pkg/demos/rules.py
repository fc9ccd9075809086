"""Rule systems with negative premisses.

A rule "y <- X ; ! Z" concludes y from the positive premisses X provided none
of Z is derivable.  A coherent solution is a set B that reproduces itself when
the rules are applied with B as the blocked set.
"""
from importlib.resources import files
from itertools import combinations

from kbpmc.rules import closure, enumerate_closure_fixpoints, explain, lfp_mc, parse_rules

for name in ("r0", "r3", "r5"):
    text = (files("kbpmc") / "corpus" / f"{name}.rules").read_text()
    rs = parse_rules(text)
    print(f"== {name}")
    print("   " + "\n   ".join(line for line in text.splitlines() if line and not line.startswith("#")))
    enum = enumerate_closure_fixpoints(rs)
    print("   closure of each blocked set:")
    for k in range(len(rs.universe) + 1):
        for blocked in combinations(rs.universe, k):
            got = sorted(closure(rs, blocked))
            mark = "  <- solution" if set(got) == set(blocked) else ""
            print(f"     blocked {sorted(blocked)} derives {got}{mark}")
    res = lfp_mc(rs)
    print(f"   must/can bounds: {sorted(res.must)} / {sorted(res.can)}")
    if enum.coherent:
        for b in enum.fixpoints:
            for y in sorted(b):
                d = explain(rs, b, y)
                print(f"   why {y} holds in {sorted(b)}:")
                print("     " + d.render().replace("\n", "\n     "))
    else:
        print("   no coherent solution")
    print()
