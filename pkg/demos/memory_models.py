"""Prescient reads in two-thread programs.

A thread may read a value early if it knows there is an execution that writes
it.  The reorder pair asks whether both threads can read 1; the inlining pair
asks the same of three registers.  The reorder-left program does not settle
constructively, so the demo also shows what the bounds and the plain
iteration say about it.
"""
from importlib.resources import files

from kbpmc.cli import main

corpus = files("kbpmc") / "corpus"
for name in ("mm_reorder_left", "mm_reorder_right", "mm_inline_left", "mm_inline_right"):
    print(f"== {name}")
    main(["check", "--witness", str(corpus / f"{name}.tm")])
    print()

print("== mm_reorder_left, sound verdicts from the bounds")
main(["check", "--bounds", str(corpus / "mm_reorder_left.tm")])
print("\n== mm_reorder_left, plain iteration of the interpretation")
main(["check", "--mode", "iteration", "--witness", str(corpus / "mm_reorder_left.tm")])
