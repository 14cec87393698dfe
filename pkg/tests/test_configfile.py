import pytest

from proctext.configfile import (
    ConfigBundle,
    dump_config,
    dump_defaults,
    load_config,
    load_config_file,
    parse_number,
    parse_sections,
)
from proctext.errors import ConfigError
from proctext.fuzzy import Monotone
from proctext.realization import TemplateSet, realize_instance


def test_sections_and_comments():
    secs = parse_sections("# top\n[run]\n; note\ncap = 3\n\n[quantifier: most]\nshape = 0, 1, 1, 1\n")
    assert [(s.name, s.arg) for s in secs] == [("run", None), ("quantifier", "most")]
    assert secs[0].get("cap").value == "3"
    assert secs[0].get("cap").line == 4


def test_errors_carry_lines():
    with pytest.raises(ConfigError, match=r"^cfg:2: "):
        parse_sections("[run]\nthis is not valid\n", "cfg")
    with pytest.raises(ConfigError, match="1:"):
        parse_sections("cap = 3\n")
    with pytest.raises(ConfigError, match=r"3: shape: expected 4"):
        load_config("[quantifier: q]\n\nshape = 0, 1\n")
    with pytest.raises(ConfigError, match="unknown section"):
        load_config("[nonsense]\n")


def test_number_suffixes():
    assert parse_number("2w", "seconds") == 1_209_600
    assert parse_number("1.5h", "seconds") == 5400
    assert parse_number("0.5") == 0.5


def test_quantifier_and_variable():
    b = load_config(
        "[quantifier: most]\nshape = 0.6, 0.9, 1, 1\n"
        "[variable: arc_waiting]\nunits = seconds\nterm = short: 0, 0, 1d, 2d\nterm = long: 1d, 3d, 5w, 6w\n"
    )
    most = next(q for q in b.quantifiers if q.label == "most")
    assert most.shape.params == (0.6, 0.9, 1, 1)
    assert [q.label for q in b.quantifiers].count("most") == 1
    (var,) = b.variables
    assert var.term("long").c == 35 * 86400


def test_invalid_quantifier_names_line():
    with pytest.raises(ConfigError, match="2:"):
        load_config("[quantifier: bad]\nshape = 0.6, 0.5, 1, 1\n")


def test_schemas_and_params():
    b = load_config("[schemas]\nenable = arc_waiting, chain\n[schema: chain]\ntop_variants = 3\n")
    assert [s.id for s in b.schemas] == ["arc_waiting", "chain"]
    assert b.schemas[1].params["top_variants"] == 3
    with pytest.raises(ConfigError, match="unknown protoform schema"):
        load_config("[schemas]\nenable = nope\n")


def test_template_and_lexicon():
    b = load_config(
        "[template: arc.waiting]\nslots = source, target, duration\npattern = {source} then {target}: {duration}\n"
        "[lexicon: CAT]\nsingular = CAT scan\nevent = a CAT scan is done\n"
    )
    assert b.templates.get("arc.waiting").pattern == "{source} then {target}: {duration}"
    assert b.lexicon.entries["CAT"].plural == "CAT scans"
    with pytest.raises(ConfigError, match="undeclared"):
        load_config("[template: arc.waiting]\nslots = source\npattern = {source} {target}\n")


def test_dump_reparses_and_is_fixed_point():
    text = dump_defaults()
    assert text.strip()
    assert dump_defaults() == text
    again = dump_config(load_config(text, ConfigBundle(templates=TemplateSet([]))))
    assert again == text


def test_dump_most():
    b = load_config(dump_defaults(), ConfigBundle(templates=TemplateSet([])))
    most = next(q for q in b.quantifiers if q.label == "most")
    assert most.shape.params == (0.5, 0.8, 1, 1)
    assert most.monotone == Monotone.NON_DECREASING
    assert "[quantifier: most]\nshape = 0.5, 0.8, 1, 1\n" in dump_defaults()


def test_custom_dump_round_trip():
    b = load_config(
        "[variable: arc_waiting]\nunits = seconds\nterm = short: 0, 0, 1d, 2d\n"
        "[lexicon: Second Session]\nevent = a second session is held\n"
    )
    text = dump_config(b)
    assert dump_config(load_config(text, ConfigBundle(templates=TemplateSet([])))) == text


def test_included_files(tmp_path):
    (tmp_path / "lex.ini").write_text("[lexicon: X]\nevent = x happens\n")
    (tmp_path / "run.ini").write_text("[run]\nlexicon = lex.ini\ncap = 2\n")
    b = load_config_file(tmp_path / "run.ini")
    assert b.lexicon.entries["X"].event == "x happens"
    assert b.run["cap"].value == "2"
    assert b.base_dir == tmp_path


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config_file("/nonexistent/x.ini")
