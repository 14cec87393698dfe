import re
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proctext.analysis import DAY, HOUR, Metric, PeriodComparison
from proctext.errors import InvalidArgument, MissingTemplate, TemplateSlotError
from proctext.protoforms import ProtoformInstance, bind, schema_by_id
from proctext.realization import (
    REPORT_JSON_SCHEMA,
    LexEntry,
    Lexicon,
    Template,
    TemplateSet,
    humanize_duration,
    humanize_fraction,
    humanize_relative_change,
    humanize_window,
    indefinite_article,
    join_words,
    make_header,
    plan_document,
    pluralize,
    realize_instance,
    report_to_dict,
    report_to_json,
    report_to_text,
)

UTC = timezone.utc
H1 = (datetime(2018, 1, 1, tzinfo=UTC), datetime(2018, 7, 1, tzinfo=UTC))
H2 = (datetime(2018, 7, 1, tzinfo=UTC), datetime(2019, 1, 1, tzinfo=UTC))

LEX = Lexicon({
    "Second Session": LexEntry("Second Session", "Second Sessions", None, "a Second Session is held"),
    "Surgical Intervention": LexEntry("Surgical Intervention", "Surgical Interventions", None,
                                      "a patient undergoes Surgical Intervention"),
})


class TestHumanizeDuration:
    @pytest.mark.parametrize("days, text", [
        (41, "5 weeks and 6 days"), (42, "6 weeks"), (52, "7 weeks and 3 days"),
        (7, "1 week"), (8, "1 week and 1 day"), (3, "3 days"), (38.5, "5 weeks and 3 days"),
    ])
    def test_days(self, days, text):
        assert humanize_duration(days * DAY) == text

    def test_small(self):
        assert humanize_duration(0) == "0 minutes"
        assert humanize_duration(90 * 60) == "1 hour and 30 minutes"
        assert humanize_duration(26 * HOUR) == "1 day and 2 hours"
        assert humanize_duration(50) == "1 minute"

    def test_days_style(self):
        assert humanize_duration(114 * DAY, "days") == "114 days"
        assert humanize_duration(DAY, "days") == "1 day"

    def test_negative(self):
        with pytest.raises(InvalidArgument):
            humanize_duration(-1)

    def test_round_trip_all_days(self):
        for n in range(3, 1001):
            text = humanize_duration(n * DAY)
            m = re.fullmatch(r"(?:(\d+) weeks?)?(?: and )?(?:(\d) days?)?", text)
            w, d = int(m.group(1) or 0), int(m.group(2) or 0)
            assert 7 * w + d == n
            if " and " in text:
                assert 1 <= d <= 6

    @settings(max_examples=300, deadline=None)
    @given(st.floats(3 * DAY, 1000 * DAY))
    def test_round_trip_fractional(self, seconds):
        text = humanize_duration(seconds)
        m = re.fullmatch(r"(?:(\d+) weeks?)?(?: and )?(?:(\d) days?)?", text)
        w, d = int(m.group(1) or 0), int(m.group(2) or 0)
        assert 7 * w + d == round(seconds / DAY)
        assert d <= 6


class TestRelativeChange:
    @pytest.mark.parametrize("rc, text", [
        (-0.52, "52% less"), (0.0, "about the same number of"), (-0.78, "78% less"),
        (3.5454, "355% more"), (0.004, "about the same number of"),
    ])
    def test_examples(self, rc, text):
        assert humanize_relative_change(rc) == text

    def test_guard(self):
        with pytest.raises(InvalidArgument):
            humanize_relative_change(-1.0)

    @settings(max_examples=200)
    @given(st.floats(0.005, 0.99))
    def test_sign_symmetry(self, x):
        up, down = humanize_relative_change(x), humanize_relative_change(-x)
        assert up.replace("more", "less") == down

    def test_fraction(self):
        assert humanize_fraction(0.06) == "6%"
        assert humanize_fraction(0.33) == "33%"


class TestWindows:
    def test_halves(self):
        assert humanize_window(H1) == "the first half of year 2018"
        assert humanize_window(H2, H1) == "the second half of that same year"
        assert humanize_window(H2) == "the second half of year 2018"

    def test_other_shapes(self):
        y = (datetime(2018, 1, 1, tzinfo=UTC), datetime(2019, 1, 1, tzinfo=UTC))
        q = (datetime(2018, 4, 1, tzinfo=UTC), datetime(2018, 7, 1, tzinfo=UTC))
        m = (datetime(2018, 3, 1, tzinfo=UTC), datetime(2018, 4, 1, tzinfo=UTC))
        odd = (datetime(2018, 3, 5, tzinfo=UTC), datetime(2018, 4, 9, tzinfo=UTC))
        assert humanize_window(y) == "year 2018"
        assert humanize_window(q) == "the second quarter of year 2018"
        assert humanize_window(m) == "March 2018"
        assert humanize_window(odd) == "the period from 2018-03-05 to 2018-04-08"


class TestWords:
    def test_pluralize(self):
        assert pluralize("Coronography") == "Coronographies"
        assert pluralize("Consultation") == "Consultations"
        assert pluralize("Day") == "Days"
        assert pluralize("Patch") == "Patches"

    def test_article(self):
        assert indefinite_article("Assessment") == "an"
        assert indefinite_article("CAT") == "a"
        assert indefinite_article("X-Ray") == "an"
        assert indefinite_article("ECG") == "an"
        assert indefinite_article("PCR test") == "a"

    def test_join(self):
        assert join_words(["a"]) == "a"
        assert join_words(["a", "b", "c"]) == "a, b and c"


def arc(source, target, days, support=10, truth=1.0):
    return bind(schema_by_id("arc_waiting"), f"{source}->{target}", form="arc.waiting",
                source=source, target=target).evaluate(truth, support, duration=days * DAY)


def comparison(rc_a, rc_b, windows=(H1, H2), metric=Metric.ACTIVITY_COUNT, subject="Surgical Intervention"):
    return PeriodComparison(metric, subject, windows[0] if windows else None,
                            windows[1] if windows else None, rc_a, rc_b, rc_a / rc_b - 1)


class TestRealize:
    def test_arc_sentence(self):
        text = realize_instance(arc("Coronography", "CAT", 42))
        assert text == "Waiting time between a Coronography and a CAT is around 6 weeks in average."

    def test_self_loop(self):
        text = realize_instance(arc("Consultation", "Consultation", 41))
        assert text == "Waiting time between Consultations is around 5 weeks and 6 days in average."

    def test_event_phrase(self):
        text = realize_instance(arc("Medical-Surgical Session", "Surgical Intervention", 52), lexicon=LEX)
        assert text == ("Around 7 weeks and 3 days after the Medical-Surgical Session "
                        "a patient undergoes Surgical Intervention.")

    def test_branch(self):
        s = schema_by_id("branch")
        inst = bind(s, "x", form="pattern.branch", source="Medical-Surgical Session", branches=[
            {"target": "Second Session", "fraction": 0.06, "duration": 38.5 * DAY},
            {"target": "Surgical Intervention", "fraction": 0.33, "duration": 52 * DAY},
        ]).evaluate(1.0, 100)
        assert realize_instance(inst, lexicon=LEX) == (
            "6% of times, after the Medical-Surgical Session, a Second Session is held around "
            "5 weeks and 3 days later. On the contrary, 33% of times, a patient undergoes "
            "Surgical Intervention around 7 weeks and 3 days later."
        )

    def test_period_sentence(self):
        inst = bind(schema_by_id("period_change"), "k", form="period.count",
                    comparison=comparison(12, 25)).evaluate(1.0, 1)
        assert realize_instance(inst, lexicon=LEX) == (
            "During the first half of year 2018, 52% less Surgical Interventions were registered "
            "compared to the second half of that same year."
        )

    def test_totals_sentence(self):
        pc = PeriodComparison(Metric.ACTIVITY_COUNT, ("Surgical Intervention", "Coronography"),
                              None, None, 11, 50, 11 / 50 - 1)
        inst = bind(schema_by_id("activity_totals"), "k", form="activity.totals",
                    a=pc.subject[0], b=pc.subject[1], comparison=pc).evaluate(1.0, 61)
        assert realize_instance(inst) == (
            "In the process, 78% less Surgical Interventions than Coronographies were registered."
        )

    def test_lexicon_fallback_flagged(self):
        report = plan_document([arc("Foo", "Bar", 3)], lexicon=LEX)
        (s,) = report.sentences
        assert "a Foo and a Bar" in s.text
        assert s.lexicon_fallbacks == ("Bar", "Foo")

    def test_missing_template(self):
        with pytest.raises(MissingTemplate, match="arc_waiting:A->B"):
            plan_document([arc("A", "B", 3)], TemplateSet([]))

    def test_bad_template_slot(self):
        with pytest.raises(TemplateSlotError):
            Template("arc.waiting", "{nope}", ("source",))
        ts = TemplateSet([Template("arc.waiting", "{source:weird} {target} {duration}",
                                   ("source", "target", "duration"))])
        with pytest.raises(TemplateSlotError):
            realize_instance(arc("A", "B", 3), ts)

    def test_other_language(self):
        ts = TemplateSet()
        ts.add(Template("arc.waiting", "Entre {source} y {target} pasan {duration}",
                        ("source", "target", "duration"), "es"))
        assert realize_instance(arc("A", "B", 7), ts, language="es") == "Entre A y B pasan 1 week."


class TestPlan:
    def table_like(self):
        s = schema_by_id("branch")
        branch = bind(s, "b", form="pattern.branch", source="Medical-Surgical Session", branches=[
            {"target": "Second Session", "fraction": 0.06, "duration": 38.5 * DAY},
            {"target": "Surgical Intervention", "fraction": 0.33, "duration": 52 * DAY},
        ]).evaluate(1.0, 100)
        totals = PeriodComparison(Metric.ACTIVITY_COUNT, ("Surgical Intervention", "Coronography"),
                                  None, None, 11, 50, -0.78)
        path = bind(schema_by_id("path_cycle"), "p", form="variant.path",
                    path=["Assessment", "Surgical Intervention"]).evaluate(1.0, 39, duration=114 * DAY)
        return [
            path,
            branch,
            arc("Coronography", "CAT", 42),
            arc("Consultation", "Consultation", 41),
            arc("Medical-Surgical Session", "Surgical Intervention", 52),
            bind(schema_by_id("activity_totals"), "t", form="activity.totals",
                 a="Surgical Intervention", b="Coronography", comparison=totals).evaluate(1.0, 61),
            bind(schema_by_id("period_change"), "c", form="period.count",
                 comparison=comparison(12, 25)).evaluate(1.0, 1),
        ]

    def test_seven_in_category_order(self):
        report = plan_document(self.table_like(), lexicon=LEX)
        assert len(report.sentences) == 7
        kinds = [s.schema_kind for s in report.sentences]
        assert kinds == ["period", "activity", "arc", "arc", "arc", "pattern", "variant"]

    def test_empty(self):
        report = plan_document([], header=make_header("x"))
        assert report.sentences == ()
        assert report_to_text(report) == "Process description: x\nTraces: 0; variants: 0\n\n"

    def test_dedup(self):
        a, b = arc("A", "B", 3, support=5), arc("A", "B", 3, support=6)
        assert len(plan_document([a, b]).sentences) == 1

    def test_deterministic_and_order_free(self):
        xs = self.table_like()
        a = report_to_json(plan_document(xs, lexicon=LEX))
        b = report_to_json(plan_document(list(reversed(xs)), lexicon=LEX))
        assert a == b
        assert report_to_text(plan_document(xs, lexicon=LEX)) == report_to_text(plan_document(xs, lexicon=LEX))

    def test_json_schema(self):
        jsonschema = pytest.importorskip("jsonschema")
        doc = report_to_dict(plan_document(self.table_like(), lexicon=LEX, header=make_header(
            "h", H1, 3, 2)))
        jsonschema.validate(doc, REPORT_JSON_SCHEMA)
        assert doc["sentences"][0]["indicators"]["comparison"]["relative_change"] == pytest.approx(-0.52)

    def test_totality(self):
        # every selected instance becomes exactly one sentence (texts are distinct here)
        xs = self.table_like()
        report = plan_document(xs, lexicon=LEX)
        assert sorted(s.instance_id for s in report.sentences) == sorted(i.id for i in xs)
