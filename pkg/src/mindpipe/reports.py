"""Per-user and run-level report emission: structured JSON plus Markdown.

Reports are pure functions of the stage files; authors are emitted in
ascending order and human-readable fractions are rounded to two decimals
while the structured output keeps full precision.
"""

from __future__ import annotations

import hashlib
import re
from pathlib import Path

from . import runfiles, stats
from .config import PipelineConfig, packaged_path
from .recommendation import load_aliases

_SLUG_RE = re.compile(r"[^A-Za-z0-9_.-]")


def author_slug(author: str) -> str:
    """Filesystem-safe, collision-resistant file stem for an author."""
    slug = _SLUG_RE.sub("_", author)
    if slug != author or not slug:
        digest = hashlib.sha1(author.encode("utf-8")).hexdigest()[:8]
        slug = f"{slug or 'user'}-{digest}"
    return slug


def _fmt(fraction: float) -> str:
    return f"{fraction:.2f}"


def _load_stage_rows(run_dir: Path) -> dict:
    return {
        "cohort": runfiles.read_json(run_dir / runfiles.COHORT, "ingest"),
        "filtered": runfiles.read_jsonl(run_dir / runfiles.FILTERED, "filter"),
        "features": runfiles.read_jsonl(run_dir / runfiles.FEATURES, "extract"),
        "summaries": runfiles.read_jsonl(run_dir / runfiles.SUMMARIES, "aggregate"),
        "diagnosis": runfiles.read_jsonl(run_dir / runfiles.DIAGNOSIS, "diagnose"),
        "recommendations": runfiles.read_jsonl(run_dir / runfiles.RECOMMENDATIONS, "recommend"),
        "relations": runfiles.read_jsonl(run_dir / runfiles.RELATIONS, "interact"),
    }


def build_run_report(run_dir: Path, config: PipelineConfig, stage_stats: dict) -> dict:
    """Assemble all run-level statistics from the stage files."""
    rows = _load_stage_rows(run_dir)
    feature_rows = [r for r in rows["features"] if r["status"] == "ok"]
    aliases = load_aliases(packaged_path("data/therapy_aliases.json"))

    severity = stats.severity_distribution(feature_rows) if feature_rows else None
    entry_frac, user_frac = stats.temporal_coverage(feature_rows, rows["summaries"])
    therapy_table = stats.therapy_frequency(rows["recommendations"], aliases)
    relations = stats.relation_distribution(rows["relations"])

    cache_hits = sum(s.get("cache_hits", 0) for s in stage_stats.values())
    cache_misses = sum(s.get("cache_misses", 0) for s in stage_stats.values())
    total_calls = cache_hits + cache_misses

    report = {
        "stage_counts": stage_stats,
        "severity": {
            "entry_level": severity.entry_level if severity else {},
            "user_level": severity.user_level if severity else {},
            "users_excluded_all_flagged": severity.users_excluded_all_flagged if severity else 0,
        },
        "temporal_coverage": {
            "entry_fraction_with_timeline": entry_frac,
            "user_fraction_with_temporal_summary": user_frac,
        },
        "therapy_frequency": [{"therapy": name, "users": count} for name, count in therapy_table],
        "relations": {
            "fractions": relations.fractions,
            "related_fraction": relations.related_fraction,
            "total_pairs": relations.total,
        },
        "cache": {
            "hits": cache_hits,
            "misses": cache_misses,
            "hit_ratio": (cache_hits / total_calls) if total_calls else None,
        },
        "conservation_violations": stats.conservation_violations(stage_stats),
    }
    return report


def _run_report_markdown(report: dict) -> str:
    lines = ["# Run report", ""]
    lines.append("## Severity distribution")
    lines.append("")
    lines.append("| Entry band | Fraction |")
    lines.append("| --- | --- |")
    for band, fraction in report["severity"]["entry_level"].items():
        lines.append(f"| {band} | {_fmt(fraction)} |")
    lines.append("")
    lines.append("| User band | Fraction |")
    lines.append("| --- | --- |")
    for band, fraction in report["severity"]["user_level"].items():
        lines.append(f"| {band} | {_fmt(fraction)} |")
    excluded = report["severity"]["users_excluded_all_flagged"]
    lines.append("")
    lines.append(f"Users excluded from the user-level map (all entries flagged): {excluded}")
    lines.append("")
    coverage = report["temporal_coverage"]
    lines.append("## Temporal coverage")
    lines.append("")
    lines.append(
        f"- Entries with an in-text timeline: {_fmt(coverage['entry_fraction_with_timeline'])}"
    )
    lines.append(
        f"- Users with a temporal summary: {_fmt(coverage['user_fraction_with_temporal_summary'])}"
    )
    lines.append("")
    lines.append("## Therapy frequency")
    lines.append("")
    lines.append("| Therapy | Users |")
    lines.append("| --- | --- |")
    for row in report["therapy_frequency"]:
        lines.append(f"| {row['therapy']} | {row['users']} |")
    lines.append("")
    lines.append("## Post-comment relations")
    lines.append("")
    lines.append(f"Related fraction: {_fmt(report['relations']['related_fraction'])} "
                 f"over {report['relations']['total_pairs']} pairs")
    lines.append("")
    lines.append("| Relation | Fraction |")
    lines.append("| --- | --- |")
    for label, fraction in report["relations"]["fractions"].items():
        lines.append(f"| {label} | {_fmt(fraction)} |")
    lines.append("")
    cache = report["cache"]
    ratio = "n/a" if cache["hit_ratio"] is None else _fmt(cache["hit_ratio"])
    lines.append("## Cache")
    lines.append("")
    lines.append(f"- Hits: {cache['hits']}, misses: {cache['misses']}, hit ratio: {ratio}")
    lines.append("")
    lines.append("## Stage counts")
    lines.append("")
    for stage, counters in report["stage_counts"].items():
        summary = ", ".join(f"{key}={value}" for key, value in sorted(counters.items()))
        lines.append(f"- {stage}: {summary}")
    violations = report["conservation_violations"]
    lines.append("")
    lines.append("## Conservation")
    lines.append("")
    if violations:
        lines.extend(f"- VIOLATION: {v}" for v in violations)
    else:
        lines.append("- all stage dispositions conserved")
    return "\n".join(lines) + "\n"


def _user_payload(author: str, rows: dict) -> dict:
    summary_row = next((r for r in rows["summaries"] if r["author"] == author), None)
    diagnosis_row = next((r for r in rows["diagnosis"] if r["author"] == author), None)
    rec_row = next((r for r in rows["recommendations"] if r["author"] == author), None)
    status = summary_row["status"] if summary_row else "no_surviving_entries"
    payload = {"author": author, "status": status}
    if status == "safety_excluded":
        payload["escalation"] = rec_row["notice"] if rec_row else None
        return payload
    if summary_row:
        payload["non_temporal_summary"] = summary_row.get("non_temporal")
        payload["temporal_summary"] = summary_row.get("temporal")
        payload["chronology"] = summary_row.get("chronology", [])
    if diagnosis_row:
        payload["diagnosis"] = {
            key: diagnosis_row.get(key)
            for key in ("status", "text", "word_count", "over_budget", "failure")
        }
    if rec_row:
        payload["recommendations"] = {
            key: rec_row.get(key)
            for key in ("status", "therapies", "behavior_changes", "warnings", "failure")
        }
    return payload


def _user_markdown(payload: dict) -> str:
    lines = [f"# User profile: {payload['author']}", ""]
    if payload["status"] == "safety_excluded":
        lines.append("## Safety escalation")
        lines.append("")
        lines.append(payload.get("escalation") or "content withheld")
        lines.append("")
        return "\n".join(lines) + "\n"

    non_temporal = payload.get("non_temporal_summary")
    lines.append("## Non-temporal summary")
    lines.append("")
    if non_temporal:
        lines.append(f"- Overall severity: {non_temporal['overall_severity']}")
        lines.append(f"- Triggers: {'; '.join(non_temporal['triggers'])}")
        lines.append(f"- Disorders: {'; '.join(non_temporal['disorders'])}")
        lines.append(f"- Language and tone: {non_temporal['language_tone']}")
        lines.append(f"- Recurring themes: {non_temporal['recurring_themes']}")
        lines.append(f"- Overall status: {non_temporal['overall_status']}")
    else:
        lines.append(f"unavailable ({payload['status']})")
    lines.append("")

    lines.append("## Temporal summary")
    lines.append("")
    temporal = payload.get("temporal_summary")
    if temporal:
        lines.append(f"- Chronological events: {temporal['chronological_events']}")
        lines.append(f"- Duration: {temporal['duration']}")
        lines.append(f"- Frequency: {temporal['frequency']}")
        lines.append(f"- Recurrence: {temporal['recurrence']}")
        lines.append(f"- Explicit times: {temporal['explicit_times']}")
    else:
        lines.append("none")
    lines.append("")

    chronology = payload.get("chronology") or []
    lines.append("## Chronology")
    lines.append("")
    if chronology:
        for event in chronology:
            lines.append(f"- {event['date']} | {event['timeline']} | {event['content']}")
    else:
        lines.append("no entries with temporal references")
    lines.append("")

    diagnosis = payload.get("diagnosis")
    lines.append("## Diagnosis summary")
    lines.append("")
    if diagnosis and diagnosis.get("status") == "ok":
        lines.append(diagnosis["text"])
        lines.append("")
        over = " (over budget)" if diagnosis["over_budget"] else ""
        lines.append(f"Word count: {diagnosis['word_count']}{over}")
    else:
        lines.append("unavailable")
    lines.append("")

    recommendations = payload.get("recommendations")
    lines.append("## Recommendations")
    lines.append("")
    if recommendations and recommendations.get("status") == "ok":
        lines.append("Therapies:")
        for index, therapy in enumerate(recommendations["therapies"], start=1):
            lines.append(f"{index}. {therapy}")
        lines.append("")
        lines.append("Behavior changes:")
        for index, change in enumerate(recommendations["behavior_changes"], start=1):
            lines.append(f"{index}. {change}")
        for warning in recommendations.get("warnings") or []:
            lines.append(f"- note: {warning}")
    else:
        lines.append("unavailable")
    lines.append("")
    return "\n".join(lines) + "\n"


def emit_reports(run_dir: Path, config: PipelineConfig, stage_stats: dict) -> dict:
    """Write per-user reports and the run report; returns emission counters."""
    rows = _load_stage_rows(run_dir)
    reports_dir = run_dir / runfiles.REPORTS_DIR
    users_dir = reports_dir / "users"
    users_dir.mkdir(parents=True, exist_ok=True)

    authors = sorted({row["author"] for row in rows["summaries"]})
    for author in authors:
        payload = _user_payload(author, rows)
        slug = author_slug(author)
        runfiles.write_json(users_dir / f"{slug}.json", payload)
        (users_dir / f"{slug}.md").write_text(_user_markdown(payload), encoding="utf-8")

    report = build_run_report(run_dir, config, stage_stats)
    runfiles.write_json(reports_dir / "run_report.json", report)
    (reports_dir / "run_report.md").write_text(_run_report_markdown(report), encoding="utf-8")
    return {"users_reported": len(authors), "run_report": 1}
