"""End-to-end run configuration and the ingest -> discover -> analyse -> summarise -> realise chain."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .analysis import IndicatorSet, Metric, PeriodRequest, replay
from .configfile import ConfigBundle, Entry
from .discovery import DependencyThresholds, ProcessModel, build_dfg, filter_model
from .errors import ConfigError, InvalidArgument
from .eventlog import (
    ColumnMapping,
    ErrorPolicy,
    EventLog,
    IngestDiagnostics,
    LifecycleAbstraction,
    parse_instant,
    read_log,
)
from .protoforms import ProtoformInstance, instantiate, rank_and_select, with_params
from .realization import Report, make_header, plan_document

_COMPARE = re.compile(
    r"^(?P<metric>[a-z_]+):(?P<subject>[^:]+?)"
    r"(?::(?P<a0>.+?)\.\.(?P<a1>.+?):(?P<b0>\d{4}-.+?)\.\.(?P<b1>.+))?$"
)


def parse_compare(text: str) -> PeriodRequest:
    """Parse ``metric:subject:startA..endA:startB..endB``.

    Arc subjects are written ``A->B``.  ``activity_count:A vs B`` without
    windows compares the two activity totals over the whole log.
    """
    m = _COMPARE.match(text.strip())
    if not m:
        raise InvalidArgument(f"cannot parse comparison {text!r}")
    try:
        metric = Metric(m.group("metric"))
    except ValueError:
        raise InvalidArgument(f"unknown metric {m.group('metric')!r} in {text!r}")
    subject_text = m.group("subject").strip()
    if m.group("a0") is None:
        a, sep, b = subject_text.partition(" vs ")
        if metric != Metric.ACTIVITY_COUNT or not sep:
            raise InvalidArgument(
                f"{text!r}: without windows only 'activity_count:A vs B' totals are allowed"
            )
        return PeriodRequest(metric, (a.strip(), b.strip()))
    if metric == Metric.ARC_MEAN_WAITING:
        a, sep, b = subject_text.partition("->")
        if not sep:
            raise InvalidArgument(f"{text!r}: arc subjects are written A->B")
        subject: Any = (a.strip(), b.strip())
    else:
        subject = subject_text
    try:
        wa = (parse_instant(m.group("a0")), parse_instant(m.group("a1")))
        wb = (parse_instant(m.group("b0")), parse_instant(m.group("b1")))
    except ValueError as exc:
        raise InvalidArgument(f"{text!r}: bad window instant ({exc})")
    for w in (wa, wb):
        if not w[0] < w[1]:
            raise InvalidArgument(f"{text!r}: window start must precede its end")
    return PeriodRequest(metric, subject, wa, wb)


@dataclass
class RunConfig:
    log: Path | None = None
    format: str | None = None
    mapping: ColumnMapping = field(default_factory=ColumnMapping)
    delimiter: str = ","
    timezone: str = "UTC"
    policy: ErrorPolicy = ErrorPolicy.SKIP
    abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
    thresholds: DependencyThresholds = field(default_factory=DependencyThresholds)
    compare: list[PeriodRequest] = field(default_factory=list)
    paths: list[tuple[str, ...]] = field(default_factory=list)
    path_match: str = "contains"
    strict: bool = False
    min_truth: float = 0.0
    cap: int = 5
    top_variants: int = 20
    out: str = "text"
    dot: Path | None = None
    lang: str = "en"
    output: Path | None = None
    bundle: ConfigBundle = field(default_factory=ConfigBundle)


# options that fill the ColumnMapping
_MAPPING_KEYS = {
    "case_col": "case_col",
    "activity_col": "activity_col",
    "timestamp_col": "timestamp_col",
    "timestamp_format": "timestamp_format",
    "lifecycle_col": "lifecycle_col",
    "resource_col": "resource_col",
}


def _choice(options):
    def conv(v: str):
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return conv


def _bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


_CONVERTERS = {
    "log": Path,
    "format": _choice(("csv", "xes", "json")),
    "delimiter": str,
    "timezone": str,
    "policy": lambda v: ErrorPolicy(v),
    "abstraction": lambda v: LifecycleAbstraction(v),
    "min_dependency": float,
    "min_arc_count": int,
    "min_activity_count": int,
    "path_match": _choice(("contains", "exact")),
    "strict": _bool,
    "min_truth": float,
    "cap": int,
    "top_variants": int,
    "out": _choice(("text", "json")),
    "dot": Path,
    "lang": str,
    "output": Path,
}

_IGNORED_RUN_KEYS = ("protoforms", "templates", "lexicon")


def build_run_config(options: Mapping[str, Any], bundle: ConfigBundle | None = None) -> RunConfig:
    """Merge file values (``bundle.run``) with explicit ``options`` and validate everything.

    ``options`` holds command-line values; ``None`` means "not given".  Errors
    name the offending field (and the config line when it came from a file).
    """
    bundle = bundle or ConfigBundle()
    raw: dict[str, tuple[Any, Entry | None]] = {}
    for key, entry in bundle.run.items():
        if key in _IGNORED_RUN_KEYS:
            continue
        raw[key] = (entry.value, entry)
    for key, value in options.items():
        if value is not None and key not in ("compare", "path"):
            raw[key] = (value, None)

    cfg = RunConfig(bundle=bundle)
    mapping: dict[str, Any] = {}
    thresholds: dict[str, Any] = {}

    def err(key, msg, entry):
        raise ConfigError(f"{key}: {msg}", entry.line if entry else None)

    for key, (value, entry) in raw.items():
        if key in _MAPPING_KEYS:
            mapping[_MAPPING_KEYS[key]] = str(value) if value != "" else None
            continue
        conv = _CONVERTERS.get(key)
        if conv is None:
            err(key, "unknown option", entry)
        try:
            v = conv(value) if isinstance(value, str) else value
        except (ValueError, TypeError) as exc:
            err(key, f"invalid value {value!r} ({exc})", entry)
        if key in ("log", "dot", "output") and entry is not None and bundle.base_dir and not v.is_absolute():
            v = bundle.base_dir / v
        if key in ("min_dependency", "min_arc_count", "min_activity_count"):
            thresholds[key] = v
        else:
            setattr(cfg, key, v)

    try:
        cfg.thresholds = DependencyThresholds(**thresholds)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc
    cfg.mapping = replace(ColumnMapping(), **mapping)

    compares = [(e.value, e) for e in bundle.run_lists.get("compare", [])]
    compares += [(c, None) for c in options.get("compare") or []]
    for text, entry in compares:
        try:
            cfg.compare.append(parse_compare(text))
        except InvalidArgument as exc:
            err("compare", str(exc), entry)
    paths = [(e.value, e) for e in bundle.run_lists.get("path", [])]
    paths += [(p, None) for p in options.get("path") or []]
    for text, entry in paths:
        steps = tuple(s.strip() for s in text.split(",") if s.strip())
        if len(steps) < 1:
            err("path", "empty path", entry)
        cfg.paths.append(steps)

    if not 0.0 <= cfg.min_truth <= 1.0:
        err("min_truth", f"must lie in [0, 1], got {cfg.min_truth}", raw.get("min_truth", (None, None))[1])
    if cfg.cap < 1:
        err("cap", f"must be >= 1, got {cfg.cap}", raw.get("cap", (None, None))[1])
    if cfg.top_variants < 1:
        err("top_variants", f"must be >= 1, got {cfg.top_variants}", raw.get("top_variants", (None, None))[1])
    if len(cfg.delimiter) != 1:
        err("delimiter", "must be a single character", raw.get("delimiter", (None, None))[1])
    if cfg.lang not in {t.language for t in bundle.templates}:
        err("lang", f"no templates for language {cfg.lang!r}", raw.get("lang", (None, None))[1])
    return cfg


# --- stages ------------------------------------------------------------------


def load_log(cfg: RunConfig) -> tuple[EventLog, IngestDiagnostics]:
    if cfg.log is None:
        raise ConfigError("log: no input log given (--log)")
    return read_log(cfg.log, cfg.format, mapping=cfg.mapping, policy=cfg.policy,
                    delimiter=cfg.delimiter, default_tz=cfg.timezone)


def discover(cfg: RunConfig, log: EventLog) -> ProcessModel:
    return filter_model(build_dfg(log, cfg.abstraction), cfg.thresholds)


def analyze(cfg: RunConfig, log: EventLog, model: ProcessModel) -> IndicatorSet:
    return replay(log, model, cfg.abstraction, cfg.compare, cfg.paths, cfg.path_match, cfg.strict)


def summarize(cfg: RunConfig, ind: IndicatorSet) -> list[ProtoformInstance]:
    schemas = [
        with_params(s, top_variants=cfg.top_variants) if "top_variants" in s.params else s
        for s in cfg.bundle.schemas
    ]
    instances = instantiate(schemas, ind, cfg.bundle.variables, cfg.bundle.quantifiers)
    return rank_and_select(instances, cfg.min_truth, cfg.cap)


def describe(cfg: RunConfig, log: EventLog) -> tuple[Report, ProcessModel, IndicatorSet]:
    model = discover(cfg, log)
    ind = analyze(cfg, log, model)
    selected = summarize(cfg, ind)
    header = make_header(log.name, ind.time_span, ind.trace_count, len(ind.variants))
    report = plan_document(selected, cfg.bundle.templates, cfg.bundle.lexicon, header, cfg.lang)
    return report, model, ind
