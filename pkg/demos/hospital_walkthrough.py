"""Walk the synthetic cardiology log through every stage and print what each produces.

    python3 demos/hospital_walkthrough.py
"""

from pathlib import Path

from proctext.configfile import load_config_file
from proctext.discovery import top_k_variants
from proctext.pipeline import analyze, build_run_config, discover, load_log, summarize
from proctext.realization import humanize_duration, make_header, plan_document, report_to_text

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

cfg = build_run_config({}, load_config_file(FIXTURES / "hospital.ini"))

log, diag = load_log(cfg)
print(f"read {diag.rows_read} rows into {len(log)} patient traces "
      f"({len(log.activity_alphabet)} activities, {diag.events_skipped} rows skipped)")

model = discover(cfg, log)
print(f"\ndirectly-follows graph: {len(model.activities)} activities, {len(model.arcs)} arcs")
for (a, b), n in sorted(model.arcs.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {a} -> {b}: {n}")

ind = analyze(cfg, log, model)
print("\nslowest hand-overs:")
for st in sorted(ind.arcs.values(), key=lambda s: -s.waiting.mean)[:3]:
    print(f"  {st.source} -> {st.target}: {humanize_duration(st.waiting.mean)} "
          f"over {st.traversal_count} traversals")
print("\nmost frequent variants:")
for vs in ind.variants[:3]:
    print(f"  {vs.variant.trace_count:3d}x  {' > '.join(vs.variant.path)}")
print(f"  (top 2 of {len(ind.variants)}: {[v.trace_count for v in top_k_variants([x.variant for x in ind.variants], 2)]})")
for pc in ind.periods:
    print(f"\ncomparison {pc.metric.value} {pc.subject}: {pc.value_a:g} vs {pc.value_b:g} "
          f"-> {pc.relative_change:+.2f}")

selected = summarize(cfg, ind)
print(f"\n{len(selected)} protoform instances selected; the first few:")
for inst in selected[:4]:
    print(f"  {inst.id}  truth={inst.truth_degree:.2f}  support={inst.support_size}")

report = plan_document(selected, cfg.bundle.templates, cfg.bundle.lexicon,
                       make_header(log.name, ind.time_span, len(log), len(ind.variants)))
print("\n" + report_to_text(report))
