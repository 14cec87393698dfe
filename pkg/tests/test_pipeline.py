from datetime import datetime, timezone

import pytest

from proctext.analysis import Metric
from proctext.configfile import load_config, load_config_file
from proctext.errors import ConfigError, InvalidArgument
from proctext.eventlog import ErrorPolicy, LifecycleAbstraction
from proctext.pipeline import build_run_config, describe, load_log, parse_compare

UTC = timezone.utc


class TestParseCompare:
    def test_windows(self):
        r = parse_compare("activity_count:Surgical Intervention:2018-01-01..2018-07-01:2018-07-01..2019-01-01")
        assert r.metric == Metric.ACTIVITY_COUNT
        assert r.subject == "Surgical Intervention"
        assert r.window_a == (datetime(2018, 1, 1, tzinfo=UTC), datetime(2018, 7, 1, tzinfo=UTC))
        assert r.window_b[1] == datetime(2019, 1, 1, tzinfo=UTC)

    def test_instants_with_times(self):
        r = parse_compare("arc_mean_waiting:A->B:2018-01-01T00:00:00Z..2018-02-01T12:30:00Z:"
                          "2018-03-01T00:00:00Z..2018-04-01T00:00:00Z")
        assert r.subject == ("A", "B")
        assert r.window_a[1] == datetime(2018, 2, 1, 12, 30, tzinfo=UTC)

    def test_totals(self):
        r = parse_compare("activity_count:Surgical Intervention vs Coronography")
        assert r.is_total and r.subject == ("Surgical Intervention", "Coronography")

    @pytest.mark.parametrize("bad", [
        "nonsense", "speed:A:2018-01-01..2018-02-01:2018-02-01..2018-03-01",
        "activity_count:A:2018-02-01..2018-01-01:2018-02-01..2018-03-01",
        "arc_mean_waiting:AB:2018-01-01..2018-02-01:2018-02-01..2018-03-01",
        "activity_mean_duration:A vs B",
    ])
    def test_rejects(self, bad):
        with pytest.raises(InvalidArgument):
            parse_compare(bad)


class TestRunConfig:
    def test_defaults(self):
        cfg = build_run_config({})
        assert cfg.cap == 5 and cfg.out == "text" and cfg.policy == ErrorPolicy.SKIP

    def test_flags_override_file(self):
        b = load_config("[run]\ncap = 3\nmin_truth = 0.2\n")
        cfg = build_run_config({"cap": "7", "min_truth": None}, b)
        assert cfg.cap == 7 and cfg.min_truth == 0.2

    def test_lists_merge(self):
        b = load_config("[run]\ncompare = activity_count:A vs B\npath = A, B\n")
        cfg = build_run_config({"compare": ["activity_count:B vs A"], "path": ["C"]}, b)
        assert [c.subject for c in cfg.compare] == [("A", "B"), ("B", "A")]
        assert cfg.paths == [("A", "B"), ("C",)]

    def test_mapping_and_enums(self):
        cfg = build_run_config({"case_col": "patient", "abstraction": "collapse_pairs",
                                "min_arc_count": "2", "strict": "true"})
        assert cfg.mapping.case_col == "patient"
        assert cfg.abstraction == LifecycleAbstraction.COLLAPSE_PAIRS
        assert cfg.thresholds.min_arc_count == 2
        assert cfg.strict is True

    @pytest.mark.parametrize("key, value, field", [
        ("cap", "0", "cap"), ("cap", "many", "cap"), ("min_truth", "2", "min_truth"),
        ("out", "xml", "out"), ("abstraction", "weird", "abstraction"),
        ("delimiter", ";;", "delimiter"), ("lang", "xx", "lang"),
        ("min_dependency", "5", "min_dependency"), ("top_variants", "0", "top_variants"),
        ("bogus", "1", "bogus"), ("compare", ["garbage"], "compare"),
    ])
    def test_invalid_field_named(self, key, value, field):
        with pytest.raises(ConfigError, match=field):
            build_run_config({key: value})

    def test_file_errors_carry_line(self):
        b = load_config("[run]\n\ncap = -4\n")
        with pytest.raises(ConfigError, match=r"3: cap"):
            build_run_config({}, b)

    def test_relative_paths_resolve(self, tmp_path):
        (tmp_path / "r.ini").write_text("[run]\nlog = data/x.csv\n")
        cfg = build_run_config({}, load_config_file(tmp_path / "r.ini"))
        assert cfg.log == tmp_path / "data" / "x.csv"

    def test_no_log(self):
        with pytest.raises(ConfigError, match="log"):
            load_log(build_run_config({}))


def test_describe_hospital(hospital_ini):
    cfg = build_run_config({}, load_config_file(hospital_ini))
    log, diag = load_log(cfg)
    assert diag.events_skipped == 0
    report, model, ind = describe(cfg, log)
    assert len(ind.periods) == 2
    assert report.header["trace_count"] == 205
    assert all(s.text.endswith(".") for s in report.sentences)
