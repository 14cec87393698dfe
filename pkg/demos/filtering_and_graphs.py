"""How dependency thresholds prune a noisy directly-follows graph.

Writes two Graphviz files next to this script: the raw graph and the one
left after filtering infrequent and weakly dependent arcs.

    python3 demos/filtering_and_graphs.py
    dot -Tpng demos/filtered.dot -o filtered.png   # if graphviz is installed
"""

import random
from pathlib import Path

from proctext.discovery import DependencyThresholds, build_dfg, dependency, filter_model, to_dot
from proctext.eventlog import from_sequences

rng = random.Random(11)
happy = ["Register", "Check", "Decide", "Notify"]
sequences = []
for _ in range(200):
    seq = list(happy)
    if rng.random() < 0.3:
        seq.insert(2, "Recheck")
    if rng.random() < 0.05:
        # a little noise: swap two neighbours
        i = rng.randrange(len(seq) - 1)
        seq[i], seq[i + 1] = seq[i + 1], seq[i]
    sequences.append(seq)

model = build_dfg(from_sequences(sequences))
print("arc                      count  dependency")
for (a, b), n in sorted(model.arcs.items()):
    print(f"  {a:>8} -> {b:<10} {n:5d}  {dependency(a, b, model):+.3f}")

strict = filter_model(model, DependencyThresholds(min_dependency=0.8, min_arc_count=5))
dropped = sorted(set(model.arcs) - set(strict.arcs))
print(f"\nfiltering keeps {len(strict.arcs)} of {len(model.arcs)} arcs; dropped: {dropped}")

here = Path(__file__).resolve().parent
(here / "raw.dot").write_text(to_dot(model, "raw"))
(here / "filtered.dot").write_text(to_dot(strict, "filtered"))
print(f"wrote {here / 'raw.dot'} and {here / 'filtered.dot'}")
