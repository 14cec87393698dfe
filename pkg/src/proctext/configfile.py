"""Sectioned key/value configuration files.

Grammar, one construct per line::

    # comment (also ';')
    [section]
    [section: argument]
    key = value

Keys may repeat; repeated keys accumulate in order.  Recognised sections:

``[run]``
    Any command-line option, spelled with underscores (``min_truth = 0.5``).
    ``compare`` and ``path`` may repeat.
``[quantifier: <label>]``
    ``shape = a, b, c, d`` over proportions; optional ``monotone``.
``[variable: <name>]``
    ``units = seconds|ratio|count`` and one ``term = <label>: a, b, c, d``
    per term.  Values in seconds accept ``s``, ``m``, ``h``, ``d``, ``w``
    suffixes (``term = long: 2w, 3w, 8w, 12w``).
``[schemas]``
    ``enable = id, id, ...`` selects which protoform schemas run.
``[schema: <id>]``
    Numeric parameters of one schema (``top_variants = 10``).
``[template: <kind>.<form>]``
    ``pattern``, ``slots`` (comma separated) and optional ``lang``.
``[lexicon: <activity>]``
    ``singular``, ``plural``, ``article``, ``event``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

from .errors import ConfigError, ProcTextError
from .fuzzy import FuzzySet, LinguisticVariable, Monotone, Quantifier, default_quantifiers
from .protoforms import Protoform, default_schemas, schema_by_id
from .realization import DEFAULT_TEMPLATES, LexEntry, Lexicon, Template, TemplateSet, pluralize


@dataclass
class Entry:
    key: str
    value: str
    line: int


@dataclass
class Section:
    name: str
    arg: str | None
    line: int
    entries: list[Entry] = field(default_factory=list)

    def get(self, key: str) -> Entry | None:
        found = [e for e in self.entries if e.key == key]
        return found[-1] if found else None

    def getall(self, key: str) -> list[Entry]:
        return [e for e in self.entries if e.key == key]


_HEADER = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?::\s*(.+?)\s*)?\]$")
_KEYVAL = re.compile(r"^([A-Za-z_][A-Za-z0-9_.-]*)\s*=\s*(.*)$")


def parse_sections(text: str, source: str | None = None) -> list[Section]:
    sections: list[Section] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = _HEADER.match(line)
        if m:
            sections.append(Section(m.group(1).lower(), m.group(2), lineno))
            continue
        m = _KEYVAL.match(line)
        if m:
            if not sections:
                raise ConfigError("key outside of any [section]", lineno, source)
            sections[-1].entries.append(Entry(m.group(1).lower(), m.group(2).strip(), lineno))
            continue
        raise ConfigError(f"cannot parse line {raw.strip()!r}", lineno, source)
    return sections


_UNIT_SECONDS = {"s": 1, "m": 60, "h": 3600, "d": 86400, "w": 604800}


def parse_number(text: str, units: str = "ratio") -> float:
    t = text.strip().lower()
    if units == "seconds" and t and t[-1] in _UNIT_SECONDS:
        return float(t[:-1]) * _UNIT_SECONDS[t[-1]]
    return float(t)


def _numbers(entry: Entry, n: int, units: str, source) -> list[float]:
    parts = [p for p in entry.value.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{entry.key}: expected {n} comma-separated numbers", entry.line, source)
    try:
        return [parse_number(p, units) for p in parts]
    except ValueError:
        raise ConfigError(f"{entry.key}: not a number in {entry.value!r}", entry.line, source)


def split_list(value: str) -> list[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


@dataclass
class ConfigBundle:
    """Everything a run needs besides the log itself."""

    quantifiers: list[Quantifier] = field(default_factory=default_quantifiers)
    variables: list[LinguisticVariable] = field(default_factory=list)
    schemas: list[Protoform] = field(default_factory=default_schemas)
    templates: TemplateSet = field(default_factory=TemplateSet)
    lexicon: Lexicon = field(default_factory=Lexicon)
    run: dict[str, Entry] = field(default_factory=dict)
    run_lists: dict[str, list[Entry]] = field(default_factory=dict)
    base_dir: Path | None = None


RUN_LIST_KEYS = ("compare", "path")


def _apply(bundle: ConfigBundle, sec: Section, source):
    def fail(msg, line=sec.line):
        raise ConfigError(msg, line, source)

    def req(key) -> Entry:
        e = sec.get(key)
        if e is None:
            fail(f"[{sec.name}: {sec.arg}] needs '{key}'")
        return e

    if sec.name == "run":
        for e in sec.entries:
            if e.key in RUN_LIST_KEYS:
                bundle.run_lists.setdefault(e.key, []).append(e)
            else:
                bundle.run[e.key] = e
    elif sec.name == "quantifier":
        if not sec.arg:
            fail("[quantifier] needs a label: [quantifier: most]")
        shape = req("shape")
        a, b, c, d = _numbers(shape, 4, "ratio", source)
        mono = sec.get("monotone")
        try:
            q = Quantifier(sec.arg, FuzzySet(sec.arg, a, b, c, d, "ratio"),
                           Monotone(mono.value) if mono else None)
        except ValueError as exc:
            fail(str(exc), (mono or shape).line)
        bundle.quantifiers = [x for x in bundle.quantifiers if x.label != q.label] + [q]
    elif sec.name == "variable":
        if not sec.arg:
            fail("[variable] needs a name: [variable: arc_waiting]")
        units = req("units").value
        terms = []
        for e in sec.getall("term"):
            label, sep, rest = e.value.partition(":")
            if not sep:
                fail("term must look like 'label: a, b, c, d'", e.line)
            vals = _numbers(Entry("term", rest, e.line), 4, units, source)
            try:
                terms.append(FuzzySet(label.strip(), *vals, units=units))
            except ValueError as exc:
                fail(str(exc), e.line)
        try:
            var = LinguisticVariable(sec.arg, units, tuple(terms))
        except ValueError as exc:
            fail(str(exc))
        bundle.variables = [v for v in bundle.variables if v.name != var.name] + [var]
    elif sec.name == "schemas":
        e = req("enable")
        ids = split_list(e.value)
        current = {s.id: s for s in bundle.schemas}
        try:
            bundle.schemas = [current.get(i) or schema_by_id(i) for i in ids]
        except ProcTextError as exc:
            fail(str(exc), e.line)
    elif sec.name == "schema":
        if not sec.arg:
            fail("[schema] needs an id: [schema: chain]")
        try:
            base = next((s for s in bundle.schemas if s.id == sec.arg), None) or schema_by_id(sec.arg)
        except ProcTextError as exc:
            fail(str(exc))
        params = dict(base.params)
        for e in sec.entries:
            if e.key == "variable":
                base = replace(base, variable=e.value or None)
                continue
            try:
                v = float(e.value)
            except ValueError:
                fail(f"{e.key}: not a number", e.line)
            params[e.key] = int(v) if v.is_integer() else v
        new = replace(base, params=params)
        bundle.schemas = [new if s.id == new.id else s for s in bundle.schemas]
    elif sec.name == "template":
        if not sec.arg:
            fail("[template] needs an id: [template: arc.waiting]")
        pattern = req("pattern")
        slots = tuple(split_list(req("slots").value))
        lang = sec.get("lang")
        try:
            bundle.templates.add(Template(sec.arg, pattern.value, slots,
                                          lang.value if lang else "en"))
        except (ProcTextError, ValueError) as exc:
            fail(str(exc), pattern.line)
    elif sec.name == "lexicon":
        if not sec.arg:
            fail("[lexicon] needs an activity label: [lexicon: Surgery]")
        sg = sec.get("singular")
        singular = sg.value if sg else sec.arg
        pl = sec.get("plural")
        art, ev = sec.get("article"), sec.get("event")
        bundle.lexicon.entries[sec.arg] = LexEntry(
            singular, pl.value if pl else pluralize(singular),
            art.value if art else None, ev.value if ev else None,
        )
    else:
        fail(f"unknown section [{sec.name}]")


def load_config(text: str, bundle: ConfigBundle | None = None, source: str | None = None) -> ConfigBundle:
    """Apply a config text on top of ``bundle`` (defaults when omitted)."""
    bundle = bundle or ConfigBundle()
    for sec in parse_sections(text, source):
        _apply(bundle, sec, source)
    return bundle


def load_config_file(path, bundle: ConfigBundle | None = None) -> ConfigBundle:
    """Load a config file; ``protoforms``/``templates``/``lexicon`` keys in ``[run]``
    name further files (relative to this one) that are merged in first."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc.strerror}") from exc
    bundle = bundle or ConfigBundle()
    sections = parse_sections(text, str(p))
    for sec in sections:
        if sec.name != "run":
            continue
        for key in ("protoforms", "templates", "lexicon"):
            e = sec.get(key)
            if e is not None:
                load_config_file(p.parent / e.value, bundle)
    for sec in sections:
        _apply(bundle, sec, str(p))
    bundle.base_dir = p.parent
    return bundle


# --- dumping -----------------------------------------------------------------


def _num(x: float) -> str:
    return format(x, "g")


def _dump_lines(bundle: ConfigBundle) -> Iterator[str]:
    yield "# Protoform vocabulary and templates."
    yield "# Edit and pass back with --config.  Numbers in seconds may use s/m/h/d/w suffixes."
    yield ""
    for q in bundle.quantifiers:
        s = q.shape
        yield f"[quantifier: {q.label}]"
        yield f"shape = {_num(s.a)}, {_num(s.b)}, {_num(s.c)}, {_num(s.d)}"
        yield f"monotone = {Monotone(q.monotone).value}"
        yield ""
    for v in bundle.variables:
        yield f"[variable: {v.name}]"
        yield f"units = {v.units}"
        for t in v.terms:
            yield f"term = {t.label}: {_num(t.a)}, {_num(t.b)}, {_num(t.c)}, {_num(t.d)}"
        yield ""
    yield "[schemas]"
    yield "enable = " + ", ".join(s.id for s in bundle.schemas)
    yield ""
    for s in bundle.schemas:
        if not s.params and s.variable == schema_by_id(s.id).variable:
            continue
        yield f"[schema: {s.id}]"
        if s.variable != schema_by_id(s.id).variable:
            yield f"variable = {s.variable or ''}"
        for k, v in sorted(s.params.items()):
            yield f"{k} = {_num(v)}"
        yield ""
    for t in bundle.templates:
        yield f"[template: {t.id}]"
        if t.language != "en":
            yield f"lang = {t.language}"
        yield f"slots = {', '.join(t.slots)}"
        yield f"pattern = {t.pattern}"
        yield ""
    for label, e in sorted(bundle.lexicon.entries.items()):
        yield f"[lexicon: {label}]"
        yield f"singular = {e.singular}"
        yield f"plural = {e.plural}"
        if e.article:
            yield f"article = {e.article}"
        if e.event:
            yield f"event = {e.event}"
        yield ""


def dump_config(bundle: ConfigBundle) -> str:
    return "\n".join(_dump_lines(bundle)).rstrip("\n") + "\n"


def dump_defaults() -> str:
    return dump_config(ConfigBundle(templates=TemplateSet(DEFAULT_TEMPLATES)))
