"""Quantified sentences from a user vocabulary over a log with start/complete events.

Builds a small emergency-room log in memory, declares fuzzy terms for waiting
times and activity durations, and shows how the same schemas produce
"most ... are short" style sentences once a vocabulary is supplied.

    python3 demos/quantified_summaries.py
"""

import random
from datetime import datetime, timedelta, timezone

from proctext.analysis import replay
from proctext.configfile import load_config
from proctext.discovery import build_dfg
from proctext.eventlog import Event, EventLog, Lifecycle, LifecycleAbstraction
from proctext.protoforms import instantiate, rank_and_select
from proctext.realization import make_header, plan_document, report_to_text

rng = random.Random(3)
t0 = datetime(2021, 3, 1, tzinfo=timezone.utc)
events = []
for i in range(40):
    cid = f"er{i:02d}"
    t = t0 + timedelta(hours=6 * i)
    for act, mean_minutes in (("Triage", 10), ("Examination", 35), ("X-Ray", 20)):
        if act == "X-Ray" and rng.random() < 0.4:
            continue
        t += timedelta(minutes=rng.randint(5, 90))
        events.append(Event(cid, act, t, Lifecycle.START))
        t += timedelta(minutes=max(1, int(rng.gauss(mean_minutes, 5))))
        events.append(Event(cid, act, t, Lifecycle.COMPLETE))
log = EventLog.from_events(events, "emergency")

vocabulary = load_config("""
[variable: arc_waiting]
units = seconds
term = short: 0, 0, 20m, 40m
term = long: 30m, 60m, 3h, 3h

[variable: activity_duration]
units = seconds
term = quick: 0, 0, 15m, 25m
term = lengthy: 20m, 30m, 2h, 2h

[quantifier: almost all]
shape = 0.7, 0.95, 1, 1
""")

abstraction = LifecycleAbstraction.COLLAPSE_PAIRS
ind = replay(log, build_dfg(log, abstraction), abstraction)
instances = instantiate(vocabulary.schemas, ind, vocabulary.variables, vocabulary.quantifiers)
print(f"{len(instances)} candidate instances; keeping those with truth >= 0.5\n")
chosen = rank_and_select(instances, min_truth=0.5, per_category_cap=4)
for inst in chosen:
    print(f"  {inst.truth_degree:.2f}  {inst.id}")
print()
header = make_header(log.name, ind.time_span, len(log), len(ind.variants))
print(report_to_text(plan_document(chosen, vocabulary.templates, vocabulary.lexicon, header)))
