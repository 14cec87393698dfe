"""Log replay and the indicators it produces.

All durations are whole seconds.  Statistics are computed from exact integer
power sums over the sorted sample, so results do not depend on the order in
which traces were visited.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable, Sequence, Union

from .discovery import ProcessModel, Variant, activity_sequence, extract_variants
from .errors import InvalidArgument, ReplayMismatch, UndefinedComparison, UnknownActivity
from .eventlog import (
    Diagnostic,
    EventLog,
    LifecycleAbstraction,
    Trace,
    executions,
    format_instant,
    seconds_between,
)

DAY = 86_400
HOUR = 3_600

Window = tuple[datetime, datetime]
Subject = Union[str, tuple[str, str]]


@dataclass(frozen=True)
class DurationStats:
    count: int
    mean: float
    median: float
    mode: float
    std_dev: float
    min: int
    max: int
    samples: tuple[int, ...] = field(default=(), repr=False)

    @classmethod
    def from_seconds(cls, values: Iterable[int], bin_seconds: int = DAY) -> "DurationStats":
        """Summarise a non-empty sample of integer durations.

        ``std_dev`` is the population standard deviation.  ``mode`` is the mean
        of the samples falling in the most populated ``bin_seconds``-wide bin,
        the lowest such bin winning ties.
        """
        xs = sorted(int(v) for v in values)
        n = len(xs)
        if n == 0:
            raise InvalidArgument("cannot summarise an empty sample")
        s1 = sum(xs)
        s2 = sum(x * x for x in xs)
        var = (n * s2 - s1 * s1) / (n * n)
        mid = n // 2
        median = float(xs[mid]) if n % 2 else (xs[mid - 1] + xs[mid]) / 2
        bins = Counter(x // bin_seconds for x in xs)
        best = min(bins, key=lambda b: (-bins[b], b))
        in_bin = [x for x in xs if x // bin_seconds == best]
        return cls(
            n, s1 / n, median, sum(in_bin) / len(in_bin), math.sqrt(var), xs[0], xs[-1], tuple(xs)
        )

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "median": self.median,
            "mode": self.mode,
            "std_dev": self.std_dev,
            "min": self.min,
            "max": self.max,
        }


@dataclass(frozen=True)
class ActivityStats:
    activity: str
    execution_count: int
    duration: DurationStats | None
    monthly_counts: dict[tuple[int, int], int]


@dataclass(frozen=True)
class ArcStats:
    source: str
    target: str
    traversal_count: int
    waiting: DurationStats | None


@dataclass(frozen=True)
class VariantStats:
    variant: Variant
    relative_frequency: float
    cycle_time: DurationStats


@dataclass(frozen=True)
class PathStats:
    """Cycle time of the traces that go through ``path``.

    With ``match="contains"`` a trace qualifies when ``path`` is a (not
    necessarily contiguous) subsequence of its activities; with ``"exact"``
    the activity sequence must equal ``path``.
    """

    path: tuple[str, ...]
    match: str
    trace_count: int
    cycle_time: DurationStats | None


class Metric(str, enum.Enum):
    ACTIVITY_COUNT = "activity_count"
    ACTIVITY_MEAN_DURATION = "activity_mean_duration"
    ARC_MEAN_WAITING = "arc_mean_waiting"


@dataclass(frozen=True)
class PeriodRequest:
    """A comparison to compute during replay.

    Leaving both windows as ``None`` with an ``activity_count`` metric and a
    pair subject asks for a whole-log comparison of two activity totals.
    """

    metric: Metric
    subject: Subject
    window_a: Window | None = None
    window_b: Window | None = None

    @property
    def is_total(self) -> bool:
        return self.window_a is None and self.window_b is None


@dataclass(frozen=True)
class PeriodComparison:
    metric: Metric
    subject: Subject
    window_a: Window | None
    window_b: Window | None
    value_a: float
    value_b: float
    relative_change: float
    warnings: tuple[str, ...] = ()

    @property
    def is_total(self) -> bool:
        return self.window_a is None


@dataclass(frozen=True)
class IndicatorSet:
    activities: dict[str, ActivityStats]
    arcs: dict[tuple[str, str], ArcStats]
    variants: list[VariantStats]
    periods: list[PeriodComparison] = field(default_factory=list)
    paths: list[PathStats] = field(default_factory=list)
    time_span: Window | None = None
    trace_count: int = 0
    event_count: int = 0
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
    unmatched_pairs: int = 0
    warnings: tuple[str, ...] = ()

    @classmethod
    def empty(cls) -> "IndicatorSet":
        return cls({}, {}, [])


def mode_bin(log: EventLog) -> int:
    """Day bins, or hour bins for logs spanning less than three days."""
    first, last = log.time_span
    return DAY if last - first >= timedelta(days=3) else HOUR


def activity_durations(trace: Trace, diagnostics: list | None = None) -> list[tuple[str, int]]:
    """Durations of start/complete pairs in ``trace``, in execution order.

    Each start pairs with the next complete of the same activity; a start left
    open is reported to ``diagnostics`` (when given) instead of yielding a
    duration.
    """
    execs, dangling = executions(trace, LifecycleAbstraction.COLLAPSE_PAIRS)
    if diagnostics is not None:
        for ev in dangling:
            diagnostics.append(Diagnostic(
                "unpaired_lifecycle",
                f"unpaired start of {ev.activity!r} at {format_instant(ev.timestamp)} "
                f"in case {trace.case_id}",
                trace.case_id,
            ))
    return [(x.activity, x.duration) for x in execs if x.paired]


def _arc_waits(execs):
    for prev, nxt in zip(execs, execs[1:]):
        # overlapping executions would give a negative gap
        yield (prev.activity, nxt.activity), max(0, seconds_between(prev.end, nxt.start)), prev.end


def _cycle_time(trace: Trace) -> int:
    return seconds_between(trace.events[0].timestamp, trace.events[-1].timestamp)


def replay(
    log: EventLog,
    model: ProcessModel,
    abstraction: LifecycleAbstraction | None = None,
    periods: Sequence[PeriodRequest] = (),
    paths: Sequence[Sequence[str]] = (),
    path_match: str = "contains",
    strict: bool = False,
) -> IndicatorSet:
    """Play every trace over ``model`` and summarise what happened.

    Directly-follows pairs that are not arcs of the model (because filtering
    removed them) are counted in ``unmatched_pairs`` and otherwise ignored;
    cycle times always use the raw first and last event of each trace.
    Requested comparisons that turn out undefined are dropped with a warning.
    """
    if abstraction is None:
        abstraction = model.abstraction
    if strict:
        unknown = sorted(log.activity_alphabet - model.alphabet)
        if unknown:
            raise ReplayMismatch(f"activities not in the model's alphabet: {unknown}")
    bin_seconds = mode_bin(log)

    counts: Counter = Counter()
    durations: dict[str, list[int]] = defaultdict(list)
    monthly: dict[str, Counter] = defaultdict(Counter)
    waits: dict[tuple[str, str], list[int]] = defaultdict(list)
    cycles: dict[str, int] = {}
    unmatched = 0
    for trace in log:
        execs, _ = executions(trace, abstraction)
        for x in execs:
            if x.activity not in model.activities:
                continue
            counts[x.activity] += 1
            monthly[x.activity][(x.end.year, x.end.month)] += 1
            if x.paired:
                durations[x.activity].append(x.duration)
        for arc, wait, _ in _arc_waits(execs):
            if arc in model.arcs:
                waits[arc].append(wait)
            else:
                unmatched += 1
        cycles[trace.case_id] = _cycle_time(trace)

    activities = {}
    for act in sorted(model.activities):
        ds = durations.get(act)
        activities[act] = ActivityStats(
            act,
            counts[act],
            DurationStats.from_seconds(ds, bin_seconds) if ds else None,
            dict(sorted(monthly[act].items())),
        )
    arcs = {}
    for arc in sorted(model.arcs):
        ws = waits.get(arc, [])
        arcs[arc] = ArcStats(
            arc[0], arc[1], len(ws), DurationStats.from_seconds(ws, bin_seconds) if ws else None
        )
    n = len(log)
    variants = [
        VariantStats(v, v.trace_count / n,
                     DurationStats.from_seconds((cycles[c] for c in v.case_ids), bin_seconds))
        for v in extract_variants(log, abstraction)
    ]

    warnings: list[str] = []
    comparisons = []
    for req in periods:
        try:
            if req.is_total:
                a, b = req.subject
                comparisons.append(compare_activity_totals(log, a, b, abstraction))
            else:
                comparisons.append(compare_periods(
                    log, req.metric, req.subject, req.window_a, req.window_b, abstraction
                ))
        except (UndefinedComparison, UnknownActivity) as exc:
            warnings.append(f"comparison {req.metric.value} of {_subject_text(req.subject)} dropped: {exc}")

    return IndicatorSet(
        activities,
        arcs,
        variants,
        comparisons,
        [path_stats(log, p, path_match, abstraction, bin_seconds) for p in paths],
        log.time_span,
        n,
        log.event_count,
        abstraction,
        unmatched,
        tuple(warnings),
    )


def is_subsequence(path: Sequence[str], seq: Sequence[str]) -> bool:
    it = iter(seq)
    return all(any(x == y for y in it) for x in path)


def path_stats(
    log: EventLog,
    path: Sequence[str],
    match: str = "contains",
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY,
    bin_seconds: int | None = None,
) -> PathStats:
    if match not in ("contains", "exact"):
        raise InvalidArgument(f"path match must be 'contains' or 'exact', got {match!r}")
    path = tuple(path)
    cycles = []
    for trace in log:
        seq = activity_sequence(trace, abstraction)
        ok = seq == path if match == "exact" else is_subsequence(path, seq)
        if ok:
            cycles.append(_cycle_time(trace))
    if bin_seconds is None:
        bin_seconds = mode_bin(log)
    stats = DurationStats.from_seconds(cycles, bin_seconds) if cycles else None
    return PathStats(path, match, len(cycles), stats)


# --- period comparisons ------------------------------------------------------


def _check_window(w: Window, label: str):
    if w is None or len(w) != 2 or not w[0] < w[1]:
        raise InvalidArgument(f"{label} must be a (start, end) pair with start < end")


def _in(ts: datetime, w: Window) -> bool:
    return w[0] <= ts < w[1]


def _window_value(log, metric, subject, window, abstraction) -> float | None:
    if metric == Metric.ARC_MEAN_WAITING:
        if not (isinstance(subject, tuple) and len(subject) == 2):
            raise InvalidArgument("arc_mean_waiting needs a (from, to) subject")
        ws = []
        for trace in log:
            execs, _ = executions(trace, abstraction)
            ws.extend(w for arc, w, at in _arc_waits(execs) if arc == subject and _in(at, window))
        return sum(ws) / len(ws) if ws else None
    if not isinstance(subject, str):
        raise InvalidArgument(f"{metric.value} needs a single activity subject")
    if metric == Metric.ACTIVITY_COUNT:
        return float(sum(
            1 for trace in log for x in executions(trace, abstraction)[0]
            if x.activity == subject and _in(x.end, window)
        ))
    ds = [
        x.duration
        for trace in log
        for x in executions(trace, LifecycleAbstraction.COLLAPSE_PAIRS)[0]
        if x.activity == subject and x.paired and _in(x.end, window)
    ]
    return sum(ds) / len(ds) if ds else None


def _subject_text(subject: Subject) -> str:
    return subject if isinstance(subject, str) else f"{subject[0]}->{subject[1]}"


def compare_periods(
    log: EventLog,
    metric: Metric,
    subject: Subject,
    window_a: Window,
    window_b: Window,
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY,
) -> PeriodComparison:
    """Compare ``metric`` between two half-open windows ``[start, end)``.

    Executions are placed in a window by their completion instant; arc
    traversals by the completion instant of their source.
    """
    metric = Metric(metric)
    _check_window(window_a, "window_a")
    _check_window(window_b, "window_b")
    warnings = []
    if window_a[0] < window_b[1] and window_b[0] < window_a[1] and window_a != window_b:
        warnings.append("windows overlap")
    va = _window_value(log, metric, subject, window_a, abstraction)
    vb = _window_value(log, metric, subject, window_b, abstraction)
    if va is None or vb is None:
        raise UndefinedComparison(f"no {metric.value} data for {_subject_text(subject)} in one of the windows")
    if vb == 0:
        raise UndefinedComparison(f"{metric.value} of {_subject_text(subject)} is 0 in the reference window")
    return PeriodComparison(metric, subject, window_a, window_b, va, vb, va / vb - 1, tuple(warnings))


def compare_activity_totals(
    log: EventLog,
    a: str,
    b: str,
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY,
) -> PeriodComparison:
    alphabet = log.activity_alphabet
    for x in (a, b):
        if x not in alphabet:
            raise UnknownActivity(f"unknown activity {x!r}")
    counts: Counter = Counter()
    for trace in log:
        counts.update(x.activity for x in executions(trace, abstraction)[0])
    ca, cb = counts[a], counts[b]
    if cb == 0:
        raise UndefinedComparison(f"activity {b!r} never executes")
    return PeriodComparison(Metric.ACTIVITY_COUNT, (a, b), None, None, float(ca), float(cb), ca / cb - 1)


# --- JSON --------------------------------------------------------------------


def _window_json(w: Window | None):
    return None if w is None else [format_instant(w[0]), format_instant(w[1])]


def _stats_json(s: DurationStats | None):
    return None if s is None else s.to_dict()


def comparison_to_dict(pc: PeriodComparison) -> dict:
    return {
        "metric": pc.metric.value,
        "subject": pc.subject if isinstance(pc.subject, str) else list(pc.subject),
        "window_a": _window_json(pc.window_a),
        "window_b": _window_json(pc.window_b),
        "value_a": pc.value_a,
        "value_b": pc.value_b,
        "relative_change": pc.relative_change,
        "warnings": list(pc.warnings),
    }


def indicators_to_dict(ind: IndicatorSet) -> dict:
    return {
        "abstraction": ind.abstraction.value,
        "time_span": _window_json(ind.time_span),
        "trace_count": ind.trace_count,
        "event_count": ind.event_count,
        "unmatched_pairs": ind.unmatched_pairs,
        "activities": {
            a: {
                "execution_count": s.execution_count,
                "duration": _stats_json(s.duration),
                "monthly_counts": {f"{y:04d}-{m:02d}": n for (y, m), n in s.monthly_counts.items()},
            }
            for a, s in sorted(ind.activities.items())
        },
        "arcs": [
            {"from": s.source, "to": s.target, "traversal_count": s.traversal_count,
             "waiting": _stats_json(s.waiting)}
            for _, s in sorted(ind.arcs.items())
        ],
        "variants": [
            {"path": list(v.variant.path), "trace_count": v.variant.trace_count,
             "case_ids": list(v.variant.case_ids), "relative_frequency": v.relative_frequency,
             "cycle_time": v.cycle_time.to_dict()}
            for v in ind.variants
        ],
        "paths": [
            {"path": list(p.path), "match": p.match, "trace_count": p.trace_count,
             "cycle_time": _stats_json(p.cycle_time)}
            for p in ind.paths
        ],
        "periods": [comparison_to_dict(pc) for pc in ind.periods],
        "warnings": list(ind.warnings),
    }


def dump_indicators_json(ind: IndicatorSet) -> str:
    return json.dumps(indicators_to_dict(ind), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
