"""Protoform schemas, their instantiation over indicators, and content selection.

A schema (abstraction level 2) names a sentence structure with free slots:
an optional quantifier Q, an optional qualifier B restricting the population
and a summariser A.  Binding the slots to concrete subjects gives a level-1
form whose fuzzy terms are still symbolic; evaluating it over the indicators
gives a level-0 instance carrying a truth degree.

Built-in schemas
----------------
period_change       crisp relative change of a metric between two windows
activity_totals     crisp relative change between two activity totals
activity_duration   "Q executions of X last A" (or the hedged mean when no vocabulary)
activity_compare    "Q executions of X last D more than those of Y"
arc_waiting         waiting time between two activities
branch              pattern: rare and frequent continuations after one activity
chain               pattern: consecutive arcs along a frequent variant
variant_cycle       cycle time of frequent variants
path_cycle          cycle time of traces going through a configured path
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

from .analysis import DurationStats, IndicatorSet, Metric
from .errors import InvalidArgument, UndefinedTruth
from .fuzzy import FuzzySet, LinguisticVariable, Quantifier, around, truth_degree


class SchemaKind(str, enum.Enum):
    PERIOD = "period"
    ACTIVITY = "activity"
    ARC = "arc"
    PATTERN = "pattern"
    VARIANT = "variant"


KIND_ORDER = {k: i for i, k in enumerate(SchemaKind)}


@dataclass(frozen=True)
class Protoform:
    id: str
    kind: SchemaKind
    summarizer: str
    quantified: bool = False
    qualifier: str | None = None
    variable: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    abstraction_level: int = 2

    def param(self, name: str, default=None):
        return self.params.get(name, default)


@dataclass(frozen=True)
class BoundProtoform:
    """Slots bound to subjects; summariser terms still symbolic."""

    schema: Protoform
    key: str
    bindings: Mapping[str, Any]
    abstraction_level: int = 1

    def evaluate(self, truth: float, support: int, children=(), **extra) -> "ProtoformInstance":
        return ProtoformInstance(
            self.schema, {**self.bindings, **extra}, truth, support, tuple(children), self.key
        )


@dataclass(frozen=True)
class ProtoformInstance:
    schema: Protoform
    bindings: Mapping[str, Any]
    truth_degree: float
    support_size: int
    children: tuple["ProtoformInstance", ...] = ()
    key: str = ""
    abstraction_level: int = 0

    def __post_init__(self):
        if not 0.0 <= self.truth_degree <= 1.0:
            raise InvalidArgument(f"truth degree {self.truth_degree} outside [0, 1]")

    @property
    def id(self) -> str:
        return f"{self.schema.id}:{self.key}"

    @property
    def kind(self) -> SchemaKind:
        return self.schema.kind

    @property
    def form(self) -> str:
        return self.bindings["form"]


def bind(schema: Protoform, key: str, **bindings) -> BoundProtoform:
    return BoundProtoform(schema, key, bindings)


BUILTIN_SCHEMAS: tuple[Protoform, ...] = (
    Protoform("period_change", SchemaKind.PERIOD, "relative change between windows",
              qualifier="subject"),
    Protoform("activity_totals", SchemaKind.ACTIVITY, "relative change between totals",
              qualifier="activity pair"),
    Protoform("activity_duration", SchemaKind.ACTIVITY, "duration", quantified=True,
              qualifier="activity", variable="activity_duration"),
    Protoform("activity_compare", SchemaKind.ACTIVITY, "duration exceeds other mean",
              quantified=True, qualifier="activity pair"),
    Protoform("arc_waiting", SchemaKind.ARC, "waiting time", quantified=True,
              qualifier="arc", variable="arc_waiting", params={"min_support": 1}),
    Protoform("branch", SchemaKind.PATTERN, "continuation frequency and delay",
              qualifier="activity"),
    Protoform("chain", SchemaKind.PATTERN, "delays along a path", qualifier="variant",
              params={"top_variants": 20, "max_arcs": 4}),
    Protoform("variant_cycle", SchemaKind.VARIANT, "cycle time", qualifier="variant",
              params={"top_variants": 20, "min_support": 2}),
    Protoform("path_cycle", SchemaKind.VARIANT, "cycle time", qualifier="path"),
)


def default_schemas() -> list[Protoform]:
    return list(BUILTIN_SCHEMAS)


def schema_by_id(schema_id: str) -> Protoform:
    for s in BUILTIN_SCHEMAS:
        if s.id == schema_id:
            return s
    raise InvalidArgument(f"unknown protoform schema {schema_id!r}")


def _arc_key(a: str, b: str) -> str:
    return f"{a}->{b}"


def _path_key(path: Sequence[str]) -> str:
    return " > ".join(path)


def _best_quantified(
    quantifiers: Sequence[Quantifier], term: FuzzySet, population: Sequence[float], shift: float = 0.0
) -> tuple[Quantifier, float] | None:
    if not quantifiers or not population:
        return None
    xs = [x - shift for x in population]
    best = None
    for q in quantifiers:
        t = truth_degree(q, term, xs)
        if best is None or t > best[1]:
            best = (q, t)
    return best


def _hedged(stats: DurationStats) -> float:
    """Truth of "the mean is around v" with v auto-centred on the mean."""
    return around(stats.mean)(stats.mean)


class _Instantiator:
    def __init__(self, ind: IndicatorSet, vocab: Sequence[LinguisticVariable],
                 quantifiers: Sequence[Quantifier]):
        self.ind = ind
        self.vocab = {v.name: v for v in vocab}
        self.quantifiers = list(quantifiers)

    def variable(self, schema: Protoform, units: str) -> LinguisticVariable | None:
        var = self.vocab.get(schema.variable) if schema.variable else None
        if var is not None and var.units != units:
            raise InvalidArgument(
                f"variable {var.name!r} is in {var.units} but schema {schema.id!r} needs {units}"
            )
        return var

    # each method yields ProtoformInstances for one schema

    def period_change(self, s: Protoform):
        for i, pc in enumerate(self.ind.periods):
            if pc.is_total:
                continue
            subj = pc.subject if isinstance(pc.subject, str) else _arc_key(*pc.subject)
            yield bind(s, f"{pc.metric.value}|{subj}|{i}", form=f"period.{_PERIOD_FORM[pc.metric]}",
                       comparison=pc).evaluate(1.0, 1)

    def activity_totals(self, s: Protoform):
        for pc in self.ind.periods:
            if not pc.is_total:
                continue
            a, b = pc.subject
            yield bind(s, _arc_key(a, b), form="activity.totals", a=a, b=b,
                       comparison=pc).evaluate(1.0, int(pc.value_a + pc.value_b))

    def activity_duration(self, s: Protoform):
        var = self.variable(s, "seconds")
        for act, st in self.ind.activities.items():
            if st.duration is None:
                continue
            if var is None:
                b = bind(s, act, form="activity.duration", activity=act)
                yield b.evaluate(_hedged(st.duration), st.duration.count, duration=st.duration.mean)
                continue
            for term in var.terms:
                best = _best_quantified(self.quantifiers, term, st.duration.samples)
                if best is None:
                    continue
                q, t = best
                yield bind(s, f"{act}|{term.label}", form="activity.duration_q", activity=act,
                           term=term.label).evaluate(t, st.duration.count, quantifier=q.label)

    def activity_compare(self, s: Protoform):
        timed = [(a, st.duration) for a, st in self.ind.activities.items() if st.duration]
        for a, da in timed:
            for b, db in timed:
                if a == b or da.mean <= db.mean:
                    continue
                delta = da.mean - db.mean
                best = _best_quantified(self.quantifiers, around(delta), da.samples, shift=db.mean)
                if best is None:
                    continue
                q, t = best
                yield bind(s, _arc_key(a, b), form="activity.compare", a=a, b=b,
                           delta=delta).evaluate(t, da.count, quantifier=q.label)

    def arc_instance(self, s: Protoform, arc) -> ProtoformInstance:
        st = self.ind.arcs[arc]
        return bind(s, _arc_key(*arc), form="arc.waiting", source=arc[0], target=arc[1]).evaluate(
            _hedged(st.waiting), st.traversal_count, duration=st.waiting.mean
        )

    def arc_waiting(self, s: Protoform):
        var = self.variable(s, "seconds")
        floor = int(s.param("min_support", 1))
        for arc, st in self.ind.arcs.items():
            if st.waiting is None or st.traversal_count < floor:
                continue
            if var is None:
                yield self.arc_instance(s, arc)
                continue
            for term in var.terms:
                best = _best_quantified(self.quantifiers, term, st.waiting.samples)
                if best is None:
                    continue
                q, t = best
                yield bind(s, f"{_arc_key(*arc)}|{term.label}", form="arc.waiting_q",
                           source=arc[0], target=arc[1], term=term.label).evaluate(
                    t, st.traversal_count, quantifier=q.label)

    def branch(self, s: Protoform):
        arc_schema = schema_by_id("arc_waiting")
        for act, ast in self.ind.activities.items():
            outs = sorted(
                (st.traversal_count, b)
                for (a, b), st in self.ind.arcs.items()
                if a == act and st.waiting is not None and st.traversal_count > 0
            )
            if len(outs) < 2 or ast.execution_count == 0:
                continue
            rare = outs[0]
            top = min(outs, key=lambda p: (-p[0], p[1]))
            if rare == top:
                continue
            children = [self.arc_instance(arc_schema, (act, b)) for _, b in (rare, top)]
            branches = [
                {"target": b, "fraction": n / ast.execution_count,
                 "duration": self.ind.arcs[(act, b)].waiting.mean}
                for n, b in (rare, top)
            ]
            yield bind(s, f"{act}|{rare[1]}|{top[1]}", form="pattern.branch", source=act,
                       branches=branches).evaluate(
                min(c.truth_degree for c in children), ast.execution_count, children)

    def chain(self, s: Protoform):
        arc_schema = schema_by_id("arc_waiting")
        max_arcs = int(s.param("max_arcs", 4))
        for vs in self.ind.variants[: int(s.param("top_variants", 20))]:
            path = vs.variant.path
            arcs = list(zip(path, path[1:]))
            if not 2 <= len(arcs) <= max_arcs:
                continue
            if any(a not in self.ind.arcs or self.ind.arcs[a].waiting is None for a in arcs):
                continue
            children = [self.arc_instance(arc_schema, a) for a in arcs]
            steps = [{"source": a, "target": b, "duration": self.ind.arcs[(a, b)].waiting.mean}
                     for a, b in arcs]
            yield bind(s, _path_key(path), form="pattern.chain", path=list(path),
                       steps=steps).evaluate(
                min(c.truth_degree for c in children), vs.variant.trace_count, children)

    def variant_cycle(self, s: Protoform):
        floor = int(s.param("min_support", 2))
        for vs in self.ind.variants[: int(s.param("top_variants", 20))]:
            if vs.variant.trace_count < floor:
                continue
            path = vs.variant.path
            yield bind(s, _path_key(path), form="variant.cycle", path=list(path),
                       fraction=vs.relative_frequency).evaluate(
                _hedged(vs.cycle_time), vs.variant.trace_count, duration=vs.cycle_time.mean)

    def path_cycle(self, s: Protoform):
        for ps in self.ind.paths:
            if ps.cycle_time is None:
                continue
            yield bind(s, f"{ps.match}|{_path_key(ps.path)}", form="variant.path",
                       path=list(ps.path), match=ps.match).evaluate(
                _hedged(ps.cycle_time), ps.trace_count, duration=ps.cycle_time.mean)


_PERIOD_FORM = {
    Metric.ACTIVITY_COUNT: "count",
    Metric.ACTIVITY_MEAN_DURATION: "duration",
    Metric.ARC_MEAN_WAITING: "waiting",
}


def instantiate(
    schemas: Iterable[Protoform],
    ind: IndicatorSet,
    vocab: Sequence[LinguisticVariable] = (),
    quantifiers: Sequence[Quantifier] = (),
) -> list[ProtoformInstance]:
    """Bind and evaluate every schema over ``ind``.

    Schemas with a vocabulary variable produce one instance per (subject,
    term), keeping the quantifier with the highest truth; without one they
    fall back to the auto-centred "around" hedge on the subject's mean.
    """
    worker = _Instantiator(ind, vocab, quantifiers)
    out: list[ProtoformInstance] = []
    for s in schemas:
        method = getattr(worker, s.id, None)
        if method is None or s.id.startswith("_"):
            raise InvalidArgument(f"no instantiation rule for schema {s.id!r}")
        try:
            out.extend(method(s))
        except UndefinedTruth:
            continue
    return out


def rank_and_select(
    instances: Iterable[ProtoformInstance], min_truth: float = 0.0, per_category_cap: int = 5
) -> list[ProtoformInstance]:
    """Keep instances with truth >= ``min_truth``; at most ``per_category_cap`` per kind.

    Within a kind the order is truth desc, support desc, then instance id.
    """
    if not 0.0 <= min_truth <= 1.0:
        raise InvalidArgument(f"min_truth must lie in [0, 1], got {min_truth}")
    if per_category_cap < 1:
        raise InvalidArgument(f"per_category_cap must be >= 1, got {per_category_cap}")
    key = lambda i: (KIND_ORDER[i.kind], -i.truth_degree, -i.support_size, i.id)
    ranked = sorted((i for i in instances if i.truth_degree >= min_truth), key=key)
    taken: dict[SchemaKind, int] = {}
    out = []
    for inst in ranked:
        n = taken.get(inst.kind, 0)
        if n < per_category_cap:
            out.append(inst)
            taken[inst.kind] = n + 1
    return out


def with_params(schema: Protoform, **params) -> Protoform:
    return replace(schema, params={**schema.params, **params})
