"""The surprise exam, written in the specification language and run via the CLI.

The teacher may hold the exam on a day only if the students cannot know it is
coming.  The reachability check finds a schedule and prints a replayable
witness; the second check shows that an exam is not guaranteed.
"""
from importlib.resources import files

from kbpmc.cli import main

spec = files("kbpmc") / "corpus" / "unexpected_exam.tm"
print(spec.read_text())
print("-- kbpmc check --witness")
main(["check", "--witness", str(spec)])
