"""Linguistic descriptions of processes recorded in event logs.

The pipeline reads an event log, discovers a directly-follows process model,
replays the log to compute performance indicators, evaluates fuzzy quantified
protoforms over those indicators and realises the best ones as sentences.
"""

from .analysis import DurationStats, IndicatorSet, Metric, PeriodRequest, replay
from .configfile import ConfigBundle, dump_defaults, load_config, load_config_file
from .discovery import (
    DependencyThresholds,
    ProcessModel,
    build_dfg,
    dependency,
    extract_variants,
    filter_model,
    to_dot,
    top_k_variants,
)
from .errors import (
    ConfigError,
    IngestError,
    InvalidArgument,
    ProcTextError,
)
from .eventlog import (
    ColumnMapping,
    ErrorPolicy,
    Event,
    EventLog,
    Lifecycle,
    LifecycleAbstraction,
    Trace,
    parse_csv,
    parse_xes,
    read_log,
    validate_log,
)
from .fuzzy import FuzzySet, LinguisticVariable, Quantifier, default_quantifiers, truth_degree
from .pipeline import RunConfig, build_run_config, describe
from .protoforms import Protoform, ProtoformInstance, default_schemas, instantiate, rank_and_select
from .realization import (
    Lexicon,
    Report,
    TemplateSet,
    humanize_duration,
    humanize_relative_change,
    plan_document,
    report_to_json,
    report_to_text,
)

__version__ = "0.1.0"
