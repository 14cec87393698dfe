"""Directly-follows discovery, heuristics-style filtering and variant mining."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import EmptyLogError, InvalidArgument, UnknownActivity
from .eventlog import EventLog, LifecycleAbstraction, executions

Arc = tuple[str, str]


@dataclass(frozen=True)
class ProcessModel:
    """Directly-follows graph with frequency annotations.

    ``activities`` maps each label to its execution count and ``arcs`` maps
    ``(from, to)`` to the number of times ``to`` directly followed ``from``.
    ``alphabet`` is the full activity alphabet of the log the model was built
    from; it survives filtering so replay can tell filtered activities from
    unknown ones.
    """

    activities: Mapping[str, int]
    arcs: Mapping[Arc, int]
    start_counts: Mapping[str, int]
    end_counts: Mapping[str, int]
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
    alphabet: frozenset[str] = field(default_factory=frozenset)

    def successors(self, label: str) -> dict[str, int]:
        return {b: n for (a, b), n in self.arcs.items() if a == label}


@dataclass(frozen=True)
class DependencyThresholds:
    min_dependency: float = 0.0
    min_arc_count: int = 1
    min_activity_count: int = 1

    def __post_init__(self):
        if not -1.0 <= self.min_dependency <= 1.0:
            raise InvalidArgument(f"min_dependency must lie in [-1, 1], got {self.min_dependency}")
        if self.min_arc_count < 0:
            raise InvalidArgument(f"min_arc_count must be >= 0, got {self.min_arc_count}")
        if self.min_activity_count < 0:
            raise InvalidArgument(f"min_activity_count must be >= 0, got {self.min_activity_count}")


@dataclass(frozen=True)
class Variant:
    path: tuple[str, ...]
    trace_count: int
    case_ids: tuple[str, ...]


def activity_sequence(trace, abstraction=LifecycleAbstraction.COMPLETE_ONLY) -> tuple[str, ...]:
    execs, _ = executions(trace, abstraction)
    return tuple(x.activity for x in execs)


def build_dfg(
    log: EventLog, abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
) -> ProcessModel:
    if len(log) == 0:
        raise EmptyLogError("cannot discover a model from an empty log")
    acts: Counter = Counter()
    arcs: Counter = Counter()
    starts: Counter = Counter()
    ends: Counter = Counter()
    for trace in log:
        seq = activity_sequence(trace, abstraction)
        if not seq:
            # only dangling starts: nothing executed
            continue
        acts.update(seq)
        arcs.update(zip(seq, seq[1:]))
        starts[seq[0]] += 1
        ends[seq[-1]] += 1
    return ProcessModel(
        dict(sorted(acts.items())),
        dict(sorted(arcs.items())),
        dict(sorted(starts.items())),
        dict(sorted(ends.items())),
        abstraction,
        log.activity_alphabet,
    )


def dependency(a: str, b: str, model: ProcessModel) -> float:
    """Heuristics-miner dependency of ``a => b``, in (-1, 1).

    For distinct activities this is ``(|a>b| - |b>a|) / (|a>b| + |b>a| + 1)``.
    A self-loop uses the length-one-loop form ``|a>a| / (|a>a| + 1)``, since
    the general formula is identically zero when ``a == b``.
    """
    for x in (a, b):
        if x not in model.activities:
            raise UnknownActivity(f"unknown activity {x!r}")
    ab = model.arcs.get((a, b), 0)
    if a == b:
        return ab / (ab + 1)
    ba = model.arcs.get((b, a), 0)
    return (ab - ba) / (ab + ba + 1)


def filter_model(model: ProcessModel, t: DependencyThresholds = DependencyThresholds()) -> ProcessModel:
    keep = {a: n for a, n in model.activities.items() if n >= t.min_activity_count}
    arcs = {
        (a, b): n
        for (a, b), n in model.arcs.items()
        if a in keep and b in keep and n >= t.min_arc_count and dependency(a, b, model) >= t.min_dependency
    }
    return ProcessModel(
        keep,
        arcs,
        {a: n for a, n in model.start_counts.items() if a in keep},
        {a: n for a, n in model.end_counts.items() if a in keep},
        model.abstraction,
        model.alphabet,
    )


def extract_variants(
    log: EventLog, abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
) -> list[Variant]:
    """Group traces by activity sequence, most frequent first, ties by path."""
    if len(log) == 0:
        raise EmptyLogError("cannot extract variants from an empty log")
    groups: dict[tuple[str, ...], list[str]] = {}
    for trace in log:
        groups.setdefault(activity_sequence(trace, abstraction), []).append(trace.case_id)
    variants = [Variant(p, len(ids), tuple(sorted(ids))) for p, ids in groups.items()]
    variants.sort(key=lambda v: (-v.trace_count, v.path))
    return variants


def top_k_variants(variants: Sequence[Variant], k: int) -> list[Variant]:
    if k < 1:
        raise InvalidArgument(f"k must be >= 1, got {k}")
    return list(variants[:k])


# --- emitters ----------------------------------------------------------------


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(model: ProcessModel, name: str = "process") -> str:
    """Graphviz source for ``model`` with lexicographically ordered nodes and edges."""
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for act in sorted(model.activities):
        lines.append(f"  {_dot_id(act)} [label={_dot_id(f'{act} ({model.activities[act]})')}];")
    for (a, b) in sorted(model.arcs):
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)} [label=\"{model.arcs[(a, b)]}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_to_dict(model: ProcessModel) -> dict:
    return {
        "abstraction": model.abstraction.value,
        "activities": dict(sorted(model.activities.items())),
        "arcs": [
            {"from": a, "to": b, "count": n, "dependency": dependency(a, b, model)}
            for (a, b), n in sorted(model.arcs.items())
        ],
        "start_counts": dict(sorted(model.start_counts.items())),
        "end_counts": dict(sorted(model.end_counts.items())),
    }


def dump_model_json(model: ProcessModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
