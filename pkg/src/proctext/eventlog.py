"""Event-log data model and readers for CSV, a minimal XES subset and a JSON dump.

Timestamps are always stored as timezone-aware UTC instants.  Naive input
timestamps are interpreted in a configurable zone (UTC unless told otherwise).
"""

from __future__ import annotations

import csv
import enum
import io
import json
import re
import xml.etree.ElementTree as ET
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import IO, Any, Iterable, Iterator, Mapping, Sequence, Union
from zoneinfo import ZoneInfo

from .errors import EmptyLogError, IngestError, StructuralError, TimestampError

Scalar = Union[str, int, float, bool, datetime]
Source = Union[bytes, str, IO[bytes], IO[str]]


class Lifecycle(str, enum.Enum):
    START = "start"
    COMPLETE = "complete"


class ErrorPolicy(str, enum.Enum):
    FAIL = "fail"
    SKIP = "skip"


class LifecycleAbstraction(str, enum.Enum):
    """How lifecycle transitions map onto activity executions.

    ``COMPLETE_ONLY`` drops start events.  ``COLLAPSE_PAIRS`` merges each
    start with its matching complete into a single execution.
    """

    COMPLETE_ONLY = "complete_only"
    COLLAPSE_PAIRS = "collapse_pairs"


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: str
    timestamp: datetime
    lifecycle: Lifecycle = Lifecycle.COMPLETE
    resource: str | None = None
    attributes: Mapping[str, Scalar] = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    """A multiset of traces, keyed by case id.

    Traces are kept in case-id order so that nothing downstream depends on
    the order in which cases appeared in the input.
    """

    traces: Mapping[str, Trace]
    name: str = ""

    @classmethod
    def from_events(cls, events: Iterable[Event], name: str = "") -> "EventLog":
        by_case: dict[str, list[Event]] = defaultdict(list)
        for ev in events:
            by_case[ev.case_id].append(ev)
        traces = {}
        for cid in sorted(by_case):
            # sorted() is stable: equal timestamps keep input order
            evs = sorted(by_case[cid], key=lambda e: e.timestamp)
            traces[cid] = Trace(cid, tuple(evs))
        return cls(traces, name)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces.values())

    @property
    def event_count(self) -> int:
        return sum(len(t) for t in self.traces.values())

    @property
    def activity_alphabet(self) -> frozenset[str]:
        return frozenset(e.activity for t in self for e in t)

    @property
    def time_span(self) -> tuple[datetime, datetime]:
        if not self.traces:
            raise EmptyLogError("event log has no traces")
        first = min(t.events[0].timestamp for t in self)
        last = max(t.events[-1].timestamp for t in self)
        return first, last


def from_sequences(
    sequences: Sequence[Sequence[str]],
    start: datetime = datetime(2020, 1, 1, tzinfo=timezone.utc),
    step: timedelta = timedelta(hours=1),
    name: str = "",
) -> EventLog:
    """Build a complete-only log from bare activity sequences.

    Case ids are ``c1, c2, ...`` (zero padded so that they sort in input
    order) and events are spaced ``step`` apart.
    """
    width = len(str(len(sequences)))
    events = []
    for i, seq in enumerate(sequences, 1):
        cid = f"c{i:0{width}d}"
        for j, act in enumerate(seq):
            events.append(Event(cid, act, start + j * step))
    return EventLog.from_events(events, name)


# --- executions under a lifecycle abstraction -------------------------------


@dataclass(frozen=True)
class Execution:
    """One logical activity execution.  ``start == end`` when no start event was paired."""

    activity: str
    start: datetime
    end: datetime
    paired: bool = False

    @property
    def duration(self) -> int:
        return seconds_between(self.start, self.end)


def executions(
    trace: Trace, abstraction: LifecycleAbstraction = LifecycleAbstraction.COMPLETE_ONLY
) -> tuple[list[Execution], list[Event]]:
    """Map a trace onto executions; also return start events left unpaired.

    Under ``COLLAPSE_PAIRS`` each complete closes the oldest open start of the
    same activity.  Executions are ordered by the position of their first event.
    A complete with no open start is still an execution (of zero length).
    Starts that never complete are not executions.
    """
    if abstraction == LifecycleAbstraction.COMPLETE_ONLY:
        result = [
            Execution(e.activity, e.timestamp, e.timestamp)
            for e in trace
            if e.lifecycle == Lifecycle.COMPLETE
        ]
        return result, []

    open_starts: dict[str, list[tuple[int, Event]]] = defaultdict(list)
    placed: list[tuple[int, Execution]] = []
    for pos, ev in enumerate(trace):
        if ev.lifecycle == Lifecycle.START:
            open_starts[ev.activity].append((pos, ev))
            continue
        pending = open_starts.get(ev.activity)
        if pending:
            spos, sev = pending.pop(0)
            placed.append((spos, Execution(ev.activity, sev.timestamp, ev.timestamp, True)))
        else:
            placed.append((pos, Execution(ev.activity, ev.timestamp, ev.timestamp)))
    placed.sort(key=lambda p: p[0])
    unpaired = sorted(
        (p for starts in open_starts.values() for p in starts), key=lambda p: p[0]
    )
    return [x for _, x in placed], [ev for _, ev in unpaired]


def seconds_between(a: datetime, b: datetime) -> int:
    """Whole seconds from ``a`` to ``b``, rounding half a second up."""
    us = (b - a) // timedelta(microseconds=1)
    return (us + 500_000) // 1_000_000


# --- timestamps --------------------------------------------------------------

_FRACTION = re.compile(r"(\.\d+)")


def _zone(name: str | timezone | ZoneInfo):
    if isinstance(name, str):
        return timezone.utc if name.upper() == "UTC" else ZoneInfo(name)
    return name


def parse_instant(text: str, fmt: str | None = None, default_tz="UTC") -> datetime:
    """Parse a timestamp and normalise it to UTC.

    ``fmt`` is a ``strftime``-style pattern (``%Y``, ``%m``, ``%d``, ``%H``,
    ``%M``, ``%S``, ``%f`` for fractions, ``%z`` for the zone offset).  When
    it is ``None`` or ``"iso"`` the text must be ISO-8601 / RFC 3339.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty timestamp")
    if fmt is None or fmt.lower() == "iso":
        iso = text
        if iso[-1] in "zZ":
            iso = iso[:-1] + "+00:00"
        # fromisoformat in 3.10 wants exactly 3 or 6 fraction digits
        iso = _FRACTION.sub(lambda m: (m.group(1) + "000000")[:7], iso, count=1)
        dt = datetime.fromisoformat(iso)
    else:
        dt = datetime.strptime(text, fmt)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=_zone(default_tz))
    return dt.astimezone(timezone.utc)


def format_instant(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


# --- diagnostics ---------------------------------------------------------------


@dataclass
class IngestDiagnostics:
    rows_read: int = 0
    events_kept: int = 0
    skipped: Counter = field(default_factory=Counter)
    traces_built: int = 0
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def events_skipped(self) -> int:
        return sum(self.skipped.values())


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    case_id: str | None = None


class _Reject(Exception):
    def __init__(self, reason: str, detail: str, exc_type=StructuralError):
        self.reason = reason
        self.detail = detail
        self.exc_type = exc_type


def _reject_or_raise(diag: IngestDiagnostics, policy: ErrorPolicy, locator: str, err: _Reject):
    if policy == ErrorPolicy.FAIL:
        raise err.exc_type(f"{locator}: {err.detail}")
    diag.skipped[err.reason] += 1
    diag.warnings.append((locator, err.detail))


def _lifecycle(value: str | None) -> Lifecycle:
    v = (value or "").strip().lower()
    if v in ("", "complete"):
        return Lifecycle.COMPLETE
    if v == "start":
        return Lifecycle.START
    raise _Reject("unsupported lifecycle", f"unsupported lifecycle transition {value!r}")


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def _finish(events: list[Event], diag: IngestDiagnostics, name: str) -> EventLog:
    log = EventLog.from_events(events, name)
    diag.events_kept = len(events)
    diag.traces_built = len(log)
    if not log.traces:
        raise EmptyLogError("no events could be read from the input")
    return log


# --- CSV ---------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnMapping:
    case_col: str = "case_id"
    activity_col: str = "activity"
    timestamp_col: str = "timestamp"
    timestamp_format: str | None = None
    lifecycle_col: str | None = None
    resource_col: str | None = None

    def columns(self) -> list[str]:
        cols = [self.case_col, self.activity_col, self.timestamp_col]
        return cols + [c for c in (self.lifecycle_col, self.resource_col) if c]


def parse_csv(
    source: Source,
    mapping: ColumnMapping = ColumnMapping(),
    policy: ErrorPolicy = ErrorPolicy.SKIP,
    delimiter: str = ",",
    default_tz="UTC",
    name: str = "",
) -> tuple[EventLog, IngestDiagnostics]:
    """Read a CSV event log with a header row.

    Columns not named by ``mapping`` end up in each event's ``attributes``
    (empty cells are dropped).  Warnings are ``(locator, detail)`` pairs whose
    locator is the file line number, the header being line 1.
    """
    if mapping.timestamp_format and mapping.timestamp_format.lower() != "iso":
        try:
            datetime(2000, 1, 2, 3, 4, 5).strftime(mapping.timestamp_format)
        except ValueError as exc:
            raise StructuralError(f"invalid timestamp format {mapping.timestamp_format!r}") from exc
    reader = csv.DictReader(io.StringIO(_read_text(source), newline=""), delimiter=delimiter)
    header = reader.fieldnames
    if header is None:
        raise EmptyLogError("input has no header row")
    for col in mapping.columns():
        if col not in header:
            raise StructuralError(f"mapped column {col!r} not found in header {header}")
    mapped = set(mapping.columns())
    extra = [c for c in header if c not in mapped]

    diag = IngestDiagnostics()
    events: list[Event] = []
    for lineno, row in enumerate(reader, 2):
        diag.rows_read += 1
        locator = f"line {lineno}"
        try:
            case_id = (row.get(mapping.case_col) or "").strip()
            if not case_id:
                raise _Reject("empty case id", "empty case id")
            activity = (row.get(mapping.activity_col) or "").strip()
            if not activity:
                raise _Reject("empty activity", "empty activity label")
            raw_ts = row.get(mapping.timestamp_col) or ""
            try:
                ts = parse_instant(raw_ts, mapping.timestamp_format, default_tz)
            except ValueError:
                raise _Reject(
                    "unparseable timestamp", f"unparseable timestamp {raw_ts!r}", TimestampError
                )
            lc = _lifecycle(row.get(mapping.lifecycle_col)) if mapping.lifecycle_col else Lifecycle.COMPLETE
        except _Reject as err:
            _reject_or_raise(diag, policy, locator, err)
            continue
        resource = None
        if mapping.resource_col:
            resource = (row.get(mapping.resource_col) or "").strip() or None
        attrs = {c: row[c] for c in extra if row.get(c) not in (None, "")}
        events.append(Event(case_id, activity, ts, lc, resource, attrs))

    if diag.rows_read == 0:
        raise EmptyLogError("input has no data rows")
    return _finish(events, diag, name), diag


# --- XES ---------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(elem: ET.Element) -> Scalar:
    kind = _local(elem.tag)
    raw = elem.get("value", "")
    if kind == "date":
        return parse_instant(raw)
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "boolean":
        return raw.strip().lower() == "true"
    return raw


def parse_xes(
    source: Source, policy: ErrorPolicy = ErrorPolicy.SKIP, name: str = ""
) -> tuple[EventLog, IngestDiagnostics]:
    """Read the log > trace > event subset of XES.

    Only ``concept:name``, ``time:timestamp``, ``lifecycle:transition`` and
    ``org:resource`` carry meaning; any other typed attribute is kept in
    ``attributes``.  Extensions, globals and classifiers are ignored with a
    warning.  Traces without a ``concept:name`` get ids ``trace-1, trace-2, ...``.
    """
    try:
        root = ET.fromstring(_read_bytes(source))
    except ET.ParseError as exc:
        line, col = exc.position
        raise StructuralError(f"malformed XML at line {line}, column {col}: {exc}") from exc
    if _local(root.tag) != "log":
        raise StructuralError(f"root element is <{_local(root.tag)}>, expected <log>")

    diag = IngestDiagnostics()
    events: list[Event] = []
    warned: set[str] = set()
    n_trace = 0
    for child in root:
        tag = _local(child.tag)
        if tag != "trace":
            if tag in ("extension", "global", "classifier") and tag not in warned:
                warned.add(tag)
                diag.warnings.append(("log", f"<{tag}> elements are ignored"))
            continue
        n_trace += 1
        case_id = None
        for attr in child:
            if _local(attr.tag) == "string" and attr.get("key") == "concept:name":
                case_id = attr.get("value", "").strip() or None
        if case_id is None:
            case_id = f"trace-{n_trace}"
        n_event = 0
        for ev in child:
            if _local(ev.tag) != "event":
                continue
            n_event += 1
            diag.rows_read += 1
            locator = f"trace {case_id} event {n_event}"
            attrs: dict[str, Scalar] = {}
            try:
                for a in ev:
                    kind = _local(a.tag)
                    if kind in ("list", "container"):
                        continue
                    try:
                        attrs[a.get("key", "")] = _xes_value(a)
                    except ValueError:
                        if a.get("key") == "time:timestamp":
                            raise _Reject(
                                "unparseable timestamp",
                                f"unparseable timestamp {a.get('value')!r}",
                                TimestampError,
                            )
                        raise _Reject("bad attribute", f"bad {kind} value for {a.get('key')!r}")
                activity = attrs.pop("concept:name", None)
                if not isinstance(activity, str) or not activity.strip():
                    raise _Reject("missing concept:name", "event has no concept:name")
                ts = attrs.pop("time:timestamp", None)
                if not isinstance(ts, datetime):
                    raise _Reject("missing time:timestamp", "event has no time:timestamp date",
                                  TimestampError)
                lc = _lifecycle(attrs.pop("lifecycle:transition", None))
            except _Reject as err:
                _reject_or_raise(diag, policy, locator, err)
                continue
            resource = attrs.pop("org:resource", None)
            events.append(Event(case_id, activity.strip(), ts, lc,
                                str(resource) if resource is not None else None, attrs))

    if diag.rows_read == 0:
        raise EmptyLogError("XES document contains no events")
    return _finish(events, diag, name), diag


# --- validation --------------------------------------------------------------


def validate_log(log: EventLog) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for trace in log:
        cid = trace.case_id
        if len(trace) == 1:
            out.append(Diagnostic("single_event", f"single-event trace {cid}", cid))
        seen = Counter((e.activity, e.timestamp, e.lifecycle) for e in trace)
        for (act, ts, _), n in sorted(seen.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if n > 1:
                out.append(Diagnostic(
                    "duplicate_event",
                    f"duplicate event {act!r} at {format_instant(ts)} in case {cid} ({n} copies)",
                    cid,
                ))
        has_start = {e.activity for e in trace if e.lifecycle == Lifecycle.START}
        if not has_start:
            continue
        _, dangling = executions(trace, LifecycleAbstraction.COLLAPSE_PAIRS)
        for ev in dangling:
            out.append(Diagnostic(
                "unpaired_lifecycle",
                f"unpaired lifecycle: start of {ev.activity!r} at {format_instant(ev.timestamp)} "
                f"in case {cid} has no complete",
                cid,
            ))
        # a complete is unpaired when its activity uses start events in this trace
        open_count: Counter = Counter()
        for ev in trace:
            if ev.activity not in has_start:
                continue
            if ev.lifecycle == Lifecycle.START:
                open_count[ev.activity] += 1
            elif open_count[ev.activity]:
                open_count[ev.activity] -= 1
            else:
                out.append(Diagnostic(
                    "unpaired_lifecycle",
                    f"unpaired lifecycle: complete of {ev.activity!r} at "
                    f"{format_instant(ev.timestamp)} in case {cid} has no start",
                    cid,
                ))
    alphabet = log.activity_alphabet
    if len(alphabet) == 1:
        (only,) = alphabet
        out.append(Diagnostic("single_activity", f"alphabet size 1: every event is {only!r}"))
    return out


# --- JSON dump ---------------------------------------------------------------


def _attr_json(value: Scalar) -> dict[str, Any]:
    if isinstance(value, bool):
        return {"type": "boolean", "value": value}
    if isinstance(value, int):
        return {"type": "int", "value": value}
    if isinstance(value, float):
        return {"type": "float", "value": value}
    if isinstance(value, datetime):
        return {"type": "date", "value": format_instant(value)}
    return {"type": "string", "value": str(value)}


def _attr_from_json(obj: Mapping[str, Any]) -> Scalar:
    kind, value = obj["type"], obj["value"]
    if kind == "date":
        return parse_instant(value)
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    if kind == "boolean":
        return bool(value)
    return str(value)


def log_to_dict(log: EventLog) -> dict[str, Any]:
    return {
        "name": log.name,
        "traces": [
            {
                "case_id": t.case_id,
                "events": [
                    {
                        "activity": e.activity,
                        "timestamp": format_instant(e.timestamp),
                        "lifecycle": e.lifecycle.value,
                        "resource": e.resource,
                        "attributes": {k: _attr_json(v) for k, v in sorted(e.attributes.items())},
                    }
                    for e in t
                ],
            }
            for t in log
        ],
    }


def dump_log_json(log: EventLog) -> str:
    """Canonical JSON text of ``log``: sorted keys, two-space indent, trailing newline."""
    return json.dumps(log_to_dict(log), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_log_json(source: Source) -> EventLog:
    try:
        doc = json.loads(_read_text(source))
        events = [
            Event(
                t["case_id"],
                e["activity"],
                parse_instant(e["timestamp"]),
                Lifecycle(e.get("lifecycle", "complete")),
                e.get("resource"),
                {k: _attr_from_json(v) for k, v in e.get("attributes", {}).items()},
            )
            for t in doc["traces"]
            for e in t["events"]
        ]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"not a valid event-log JSON dump: {exc}") from exc
    if not events:
        raise EmptyLogError("JSON dump contains no events")
    return EventLog.from_events(events, doc.get("name", ""))


def read_log(
    path,
    fmt: str | None = None,
    mapping: ColumnMapping = ColumnMapping(),
    policy: ErrorPolicy = ErrorPolicy.SKIP,
    delimiter: str = ",",
    default_tz="UTC",
) -> tuple[EventLog, IngestDiagnostics]:
    """Read a log file, picking the parser from ``fmt`` or the file extension.

    ``mapping``, ``delimiter`` and ``default_tz`` only matter for CSV.
    """
    p = Path(path)
    if fmt is None:
        fmt = {".xes": "xes", ".json": "json"}.get(p.suffix.lower(), "csv")
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise IngestError(f"cannot read {p}: {exc.strerror}") from exc
    if fmt == "csv":
        return parse_csv(data, mapping, policy, delimiter, default_tz, name=p.stem)
    if fmt == "xes":
        return parse_xes(data, policy, name=p.stem)
    if fmt == "json":
        log = load_log_json(data)
        n = log.event_count
        return log, IngestDiagnostics(n, n, Counter(), len(log), [])
    raise IngestError(f"unknown log format {fmt!r}")


__all__ = [
    "ColumnMapping", "Diagnostic", "ErrorPolicy", "Event", "EventLog", "Execution",
    "IngestDiagnostics", "Lifecycle", "LifecycleAbstraction", "Trace", "dump_log_json",
    "executions", "format_instant", "from_sequences", "load_log_json", "parse_csv",
    "parse_instant", "parse_xes", "read_log", "seconds_between", "validate_log",
]
