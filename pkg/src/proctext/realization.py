"""Template-based realisation of protoform instances into an ordered report.

Templates are plain text with named slots.  A slot may carry a modifier
after a colon that selects a surface form:

    {source}        activity, singular
    {source:pl}     activity, plural
    {source:np}     activity with its indefinite article ("a CAT")
    {source:def}    activity with "the"
    {source:event}  lexicon event phrase ("a patient undergoes Surgery")
    {duration}      weeks/days, days/hours or hours/minutes
    {duration:days} whole days only

Expert knowledge enters through the lexicon (surface forms and event
phrases per activity) and through user-supplied templates.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Any, Iterable, Mapping, Sequence

from .analysis import PeriodComparison, Window, comparison_to_dict
from .errors import InvalidArgument, MissingTemplate, ProcTextError, TemplateSlotError
from .eventlog import format_instant
from .protoforms import KIND_ORDER, ProtoformInstance, SchemaKind

_DAY = 86_400
_HOUR = 3_600
_MINUTE = 60


# --- humanisers --------------------------------------------------------------


def _unit(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}s"


def _two_units(total: int, per: int, big: str, small: str) -> str:
    hi, lo = divmod(total, per)
    if hi == 0:
        return _unit(lo, small)
    if lo == 0:
        return _unit(hi, big)
    return f"{_unit(hi, big)} and {_unit(lo, small)}"


def humanize_duration(seconds: float, style: str = "calendar") -> str:
    """Render a duration the way a person would say it.

    At three days or more the value is rounded to whole days and written as
    weeks and days; below that, to hours (days and hours); below three hours,
    to minutes (hours and minutes).  Rounding is half-to-even.  Months are
    never used.  ``style="days"`` always rounds to and prints whole days.
    """
    if seconds < 0:
        raise InvalidArgument(f"negative duration {seconds}")
    if style == "days":
        return _unit(round(seconds / _DAY), "day")
    if style != "calendar":
        raise InvalidArgument(f"unknown duration style {style!r}")
    if seconds >= 3 * _DAY:
        return _two_units(round(seconds / _DAY), 7, "week", "day")
    if seconds >= 3 * _HOUR:
        return _two_units(round(seconds / _HOUR), 24, "day", "hour")
    return _two_units(round(seconds / _MINUTE), 60, "hour", "minute")


def humanize_relative_change(
    rc: float, more: str = "more", less: str = "less", same: str = "about the same number of"
) -> str:
    if rc <= -1:
        raise InvalidArgument(f"relative change must be > -1, got {rc}")
    pct = round(abs(rc) * 100)
    if pct == 0:
        return same
    return f"{pct}% {less if rc < 0 else more}"


def humanize_fraction(f: float) -> str:
    return f"{round(f * 100)}%"


_ORDINAL = ["first", "second", "third", "fourth"]
_MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August",
           "September", "October", "November", "December"]


def _calendar_part(w: Window):
    start, end = (t.astimezone(timezone.utc) for t in w)
    if start.time() != datetime.min.time() or end.time() != datetime.min.time() or start.day != 1 or end.day != 1:
        return None
    months = (end.year - start.year) * 12 + end.month - start.month
    if months == 12 and start.month == 1:
        return ("year", start.year, None)
    if months == 6 and start.month in (1, 7):
        return ("half", start.year, (start.month - 1) // 6)
    if months == 3 and start.month in (1, 4, 7, 10):
        return ("quarter", start.year, (start.month - 1) // 3)
    if months == 1:
        return ("month", start.year, start.month - 1)
    return None


def humanize_window(w: Window, previous: Window | None = None) -> str:
    """Describe a half-open window, using calendar names where they fit.

    When ``previous`` falls in the same calendar year the year is referred
    back to ("the second half of that same year").
    """
    part = _calendar_part(w)
    if part is None:
        start = w[0].astimezone(timezone.utc)
        last = w[1].astimezone(timezone.utc)
        if last.time() == datetime.min.time():
            last -= timedelta(days=1)
        return f"the period from {start:%Y-%m-%d} to {last:%Y-%m-%d}"
    kind, year, idx = part
    prev = _calendar_part(previous) if previous is not None else None
    same_year = prev is not None and prev[1] == year and prev[0] != "year"
    if kind == "year":
        return f"year {year}"
    if kind == "month":
        return f"{_MONTHS[idx]} of that same year" if same_year else f"{_MONTHS[idx]} {year}"
    of_year = "that same year" if same_year else f"year {year}"
    return f"the {_ORDINAL[idx]} {kind} of {of_year}"


def join_words(items: Sequence[str]) -> str:
    items = list(items)
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


# --- lexicon -----------------------------------------------------------------


def pluralize(word: str) -> str:
    if re.search(r"[^aeiou]y$", word, re.I):
        return word[:-1] + "ies"
    if re.search(r"(s|x|z|ch|sh)$", word, re.I):
        return word + "es"
    return word + "s"


_VOWEL_LETTER_NAMES = set("AEFHILMNORSX")


def indefinite_article(word: str) -> str:
    head = re.split(r"[^A-Za-z]", word, 1)[0]
    # vowel-less capitals are spelled out ("an X-Ray", "an ECG"); the lexicon
    # article overrides anything this gets wrong
    if head.isupper() and not re.search(r"[AEIOUY]", head):
        return "an" if head[0] in _VOWEL_LETTER_NAMES else "a"
    return "an" if word[:1] and word[0].lower() in "aeiou" else "a"


@dataclass(frozen=True)
class LexEntry:
    singular: str
    plural: str
    article: str | None = None
    event: str | None = None


class Lexicon:
    """Surface forms per activity label, falling back to the raw label."""

    def __init__(self, entries: Mapping[str, LexEntry] | None = None):
        self.entries = dict(entries or {})

    def lookup(self, label: str) -> tuple[LexEntry, bool]:
        entry = self.entries.get(label)
        if entry is not None:
            return entry, False
        return LexEntry(label, pluralize(label), indefinite_article(label)), True

    def __contains__(self, label: str) -> bool:
        return label in self.entries


# --- templates ---------------------------------------------------------------

_SLOT = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)(?::([A-Za-z_]+))?\}")


@dataclass(frozen=True)
class Template:
    id: str
    pattern: str
    slots: tuple[str, ...]
    language: str = "en"

    def __post_init__(self):
        if "." not in self.id:
            raise InvalidArgument(f"template id {self.id!r} must look like '<kind>.<form>'")
        SchemaKind(self.kind)
        used = {m.group(1) for m in _SLOT.finditer(self.pattern)}
        undeclared = sorted(used - set(self.slots))
        if undeclared:
            raise TemplateSlotError(f"template {self.id!r} uses undeclared slots {undeclared}")

    @property
    def kind(self) -> str:
        return self.id.split(".", 1)[0]


def _t(id_, pattern, *slots):
    return Template(id_, pattern, tuple(slots))


DEFAULT_TEMPLATES: tuple[Template, ...] = (
    _t("period.count",
       "During {window_a}, {pct} {subject:pl} were registered compared to {window_b}.",
       "window_a", "pct", "subject", "window_b"),
    _t("period.duration",
       "During {window_a}, {subject:pl} lasted {pct} in average compared to {window_b}.",
       "window_a", "subject", "pct", "window_b"),
    _t("period.waiting",
       "During {window_a}, waiting time between {source:np} and {target:np} was {pct} "
       "in average compared to {window_b}.",
       "window_a", "source", "target", "pct", "window_b"),
    _t("activity.totals", "In the process, {pct} {a:pl} than {b:pl} were registered.",
       "pct", "a", "b"),
    _t("activity.duration", "{activity:pl} last around {duration} in average.",
       "activity", "duration"),
    _t("activity.duration_q", "{quantifier} executions of {activity} are {term}.",
       "quantifier", "activity", "term"),
    _t("activity.compare",
       "{quantifier} executions of {a} last around {delta} in average more than those of {b}.",
       "quantifier", "a", "delta", "b"),
    _t("arc.waiting", "Waiting time between {source:np} and {target:np} is around {duration} in average.",
       "source", "target", "duration"),
    _t("arc.waiting_self", "Waiting time between {source:pl} is around {duration} in average.",
       "source", "duration"),
    _t("arc.after", "Around {duration} after the {source} {target:event}.",
       "duration", "source", "target"),
    _t("arc.waiting_q", "{quantifier} waiting times between {source:np} and {target:np} are {term}.",
       "quantifier", "source", "target", "term"),
    _t("pattern.branch",
       "{b1_pct} of times, after the {source}, {b1_target:event} around {b1_duration} later. "
       "On the contrary, {b2_pct} of times, {b2_target:event} around {b2_duration} later.",
       "b1_pct", "source", "b1_target", "b1_duration", "b2_pct", "b2_target", "b2_duration"),
    _t("pattern.chain", "Along the path {path}, {steps}.", "path", "steps"),
    _t("variant.cycle",
       "{pct} of the cases follow the path {path}, which takes around {duration} in average.",
       "pct", "path", "duration"),
    _t("variant.path", "Cases that go through {path} take around {duration} in average.",
       "path", "duration"),
)


class TemplateSet:
    def __init__(self, templates: Iterable[Template] = DEFAULT_TEMPLATES):
        self._by_key: dict[tuple[str, str], Template] = {}
        for t in templates:
            self.add(t)

    def add(self, t: Template):
        """Add or replace the template for ``(language, id)``."""
        self._by_key[(t.language, t.id)] = t

    def get(self, form: str, language: str = "en") -> Template:
        t = self._by_key.get((language, form))
        if t is None:
            raise MissingTemplate(
                f"no {language!r} template for {form!r} (schema kind {form.split('.')[0]!r})"
            )
        return t

    def has(self, form: str, language: str = "en") -> bool:
        return (language, form) in self._by_key

    def __iter__(self):
        return iter(sorted(self._by_key.values(), key=lambda t: (t.language, t.id)))


# --- slot rendering ----------------------------------------------------------


@dataclass(frozen=True)
class _Act:
    label: str


@dataclass(frozen=True)
class _Dur:
    seconds: float


class _Renderer:
    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.fallbacks: set[str] = set()

    def entry(self, label: str) -> LexEntry:
        e, fallback = self.lexicon.lookup(label)
        if fallback:
            self.fallbacks.add(label)
        return e

    def act(self, label: str, mod: str | None = None) -> str:
        e = self.entry(label)
        if mod in (None, "sg"):
            return e.singular
        if mod == "pl":
            return e.plural
        article = e.article or indefinite_article(e.singular)
        if mod == "np":
            return f"{article} {e.singular}"
        if mod == "def":
            return f"the {e.singular}"
        if mod == "event":
            return e.event or f"{article} {e.singular} follows"
        raise TemplateSlotError(f"unknown activity modifier {mod!r}")

    def value(self, name: str, v: Any, mod: str | None) -> str:
        if isinstance(v, _Act):
            return self.act(v.label, mod)
        if isinstance(v, _Dur):
            return humanize_duration(v.seconds, "days" if mod == "days" else "calendar")
        if mod is not None:
            raise TemplateSlotError(f"slot {name!r} does not take modifier {mod!r}")
        return str(v)

    def fill(self, template: Template, slots: Mapping[str, Any]) -> str:
        def sub(m: re.Match) -> str:
            name, mod = m.group(1), m.group(2)
            if name not in slots:
                raise TemplateSlotError(f"template {template.id!r}: slot {name!r} has no value")
            return self.value(name, slots[name], mod)

        text = _SLOT.sub(sub, template.pattern).strip()
        text = text[:1].upper() + text[1:]
        if not text.endswith("."):
            text += "."
        return text


_PERIOD_WORDS = {
    "period.count": ("more", "less", "about the same number of"),
    "period.duration": ("longer", "shorter", "about as long"),
    "period.waiting": ("longer", "shorter", "about as long"),
}


def _slots(inst: ProtoformInstance, renderer: _Renderer) -> dict[str, Any]:
    b = inst.bindings
    form = inst.form
    if form.startswith("period."):
        pc: PeriodComparison = b["comparison"]
        more, less, same = _PERIOD_WORDS[form]
        slots = {
            "window_a": humanize_window(pc.window_a),
            "window_b": humanize_window(pc.window_b, pc.window_a),
            "pct": humanize_relative_change(pc.relative_change, more, less, same),
        }
        if isinstance(pc.subject, str):
            slots["subject"] = _Act(pc.subject)
        else:
            slots["source"], slots["target"] = _Act(pc.subject[0]), _Act(pc.subject[1])
        return slots
    if form == "activity.totals":
        return {"a": _Act(b["a"]), "b": _Act(b["b"]),
                "pct": humanize_relative_change(b["comparison"].relative_change)}
    if form.startswith("activity."):
        slots = {k: b[k] for k in ("quantifier", "term") if k in b}
        for k in ("activity", "a", "b"):
            if k in b:
                slots[k] = _Act(b[k])
        for k in ("duration", "delta"):
            if k in b:
                slots[k] = _Dur(b[k])
        return slots
    if form.startswith("arc."):
        slots = {"source": _Act(b["source"]), "target": _Act(b["target"])}
        slots.update({k: b[k] for k in ("quantifier", "term") if k in b})
        if "duration" in b:
            slots["duration"] = _Dur(b["duration"])
        return slots
    if form == "pattern.branch":
        slots = {"source": _Act(b["source"])}
        for i, br in enumerate(b["branches"], 1):
            slots[f"b{i}_target"] = _Act(br["target"])
            slots[f"b{i}_pct"] = humanize_fraction(br["fraction"])
            slots[f"b{i}_duration"] = _Dur(br["duration"])
        return slots
    path = join_words([renderer.act(x) for x in b["path"]])
    if form == "pattern.chain":
        steps = [
            f"around {humanize_duration(st['duration'])} pass between "
            f"{renderer.act(st['source'])} and {renderer.act(st['target'])}"
            if i == 0 else
            f"around {humanize_duration(st['duration'])} between "
            f"{renderer.act(st['source'])} and {renderer.act(st['target'])}"
            for i, st in enumerate(b["steps"])
        ]
        return {"path": path, "steps": join_words(steps)}
    slots = {"path": path, "duration": _Dur(b["duration"])}
    if "fraction" in b:
        slots["pct"] = humanize_fraction(b["fraction"])
    return slots


def _choose_form(inst: ProtoformInstance, templates: TemplateSet, lexicon: Lexicon, language: str) -> str:
    form = inst.form
    if form == "arc.waiting":
        b = inst.bindings
        if b["source"] == b["target"]:
            better = "arc.waiting_self"
        elif lexicon.lookup(b["target"])[0].event:
            better = "arc.after"
        else:
            better = form
        if templates.has(better, language):
            return better
    return form


def _realize(inst, templates, lexicon, language) -> tuple[str, tuple[str, ...]]:
    template = templates.get(_choose_form(inst, templates, lexicon, language), language)
    renderer = _Renderer(lexicon)
    text = renderer.fill(template, _slots(inst, renderer))
    return text, tuple(sorted(renderer.fallbacks))


def realize_instance(
    inst: ProtoformInstance,
    templates: TemplateSet | None = None,
    lexicon: Lexicon | None = None,
    language: str = "en",
) -> str:
    return _realize(inst, templates or TemplateSet(), lexicon or Lexicon(), language)[0]


# --- document ----------------------------------------------------------------


@dataclass(frozen=True)
class Sentence:
    text: str
    instance_id: str
    schema_kind: str
    truth_degree: float
    indicators: Mapping[str, Any] = field(default_factory=dict)
    lexicon_fallbacks: tuple[str, ...] = ()


@dataclass(frozen=True)
class Report:
    sentences: tuple[Sentence, ...]
    header: Mapping[str, Any]
    language: str = "en"


def _jsonable(v: Any) -> Any:
    if isinstance(v, PeriodComparison):
        return comparison_to_dict(v)
    if isinstance(v, datetime):
        return format_instant(v)
    if isinstance(v, Mapping):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def bindings_json(inst: ProtoformInstance) -> dict[str, Any]:
    return {k: _jsonable(v) for k, v in sorted(inst.bindings.items())}


def make_header(log_name: str = "", time_span: Window | None = None,
                trace_count: int = 0, variant_count: int = 0) -> dict[str, Any]:
    return {
        "log_name": log_name,
        "time_span": None if time_span is None else [format_instant(t) for t in time_span],
        "trace_count": trace_count,
        "variant_count": variant_count,
    }


def plan_document(
    instances: Iterable[ProtoformInstance],
    templates: TemplateSet | None = None,
    lexicon: Lexicon | None = None,
    header: Mapping[str, Any] | None = None,
    language: str = "en",
) -> Report:
    """Realise and order the selected instances.

    Order is period, activity, arc, pattern, variant; then truth degree
    (highest first); then support (largest first); then sentence text.  Instances realising to the same
    text collapse into one sentence, keeping the higher-truth instance.
    """
    templates = templates or TemplateSet()
    lexicon = lexicon or Lexicon()
    realized = []
    for inst in instances:
        try:
            text, fallbacks = _realize(inst, templates, lexicon, language)
        except ProcTextError as exc:
            raise type(exc)(f"instance {inst.id}: {exc}") from exc
        sentence = Sentence(text, inst.id, inst.kind.value, inst.truth_degree,
                            bindings_json(inst), fallbacks)
        realized.append(((KIND_ORDER[inst.kind], -inst.truth_degree, -inst.support_size,
                          text, inst.id), sentence))
    realized.sort(key=lambda pair: pair[0])
    seen: set[str] = set()
    kept = []
    for _, s in realized:
        if s.text not in seen:
            seen.add(s.text)
            kept.append(s)
    return Report(tuple(kept), dict(header or make_header()), language)


# --- emitters ----------------------------------------------------------------


def report_to_text(report: Report) -> str:
    h = report.header
    lines = [f"Process description: {h.get('log_name') or 'event log'}"]
    if h.get("time_span"):
        lines.append(f"Time span: {h['time_span'][0]} to {h['time_span'][1]}")
    lines.append(f"Traces: {h.get('trace_count', 0)}; variants: {h.get('variant_count', 0)}")
    lines.append("")
    lines.extend(s.text for s in report.sentences)
    return "\n".join(lines) + "\n"


def report_to_dict(report: Report) -> dict[str, Any]:
    return {
        "header": dict(report.header),
        "language": report.language,
        "sentences": [
            {
                "text": s.text,
                "instance_id": s.instance_id,
                "schema_kind": s.schema_kind,
                "truth_degree": s.truth_degree,
                "indicators": dict(s.indicators),
                "lexicon_fallbacks": list(s.lexicon_fallbacks),
            }
            for s in report.sentences
        ],
    }


def report_to_json(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


REPORT_JSON_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["header", "language", "sentences"],
    "additionalProperties": False,
    "properties": {
        "header": {
            "type": "object",
            "required": ["log_name", "time_span", "trace_count", "variant_count"],
            "properties": {
                "log_name": {"type": "string"},
                "time_span": {
                    "oneOf": [
                        {"type": "null"},
                        {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                    ]
                },
                "trace_count": {"type": "integer", "minimum": 0},
                "variant_count": {"type": "integer", "minimum": 0},
            },
        },
        "language": {"type": "string"},
        "sentences": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["text", "instance_id", "schema_kind", "truth_degree", "indicators",
                             "lexicon_fallbacks"],
                "additionalProperties": False,
                "properties": {
                    "text": {"type": "string", "minLength": 1},
                    "instance_id": {"type": "string"},
                    "schema_kind": {"enum": [k.value for k in SchemaKind]},
                    "truth_degree": {"type": "number", "minimum": 0, "maximum": 1},
                    "indicators": {"type": "object"},
                    "lexicon_fallbacks": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}
