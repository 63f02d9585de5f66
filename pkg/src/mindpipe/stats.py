"""Corpus statistics over stage files: severity bands, coverage, frequencies.

Every statistic is a plain linear scan over stage rows so tests can check
it against an independent recount. User-level severity bands come from a
fixed roll-up rule over each user's entry-severity fractions:

    severe            when p(severe) >= 0.5
    moderate_to_severe when p(severe) + p(moderate) >= 0.5
    mild_to_moderate   otherwise

computed over non-flagged entries; users with only flagged entries are
excluded from the user-level map and counted separately.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpusError
from .extraction import (
    SEVERITY_EXTREME,
    SEVERITY_MILD,
    SEVERITY_MODERATE,
    SEVERITY_SEVERE,
)

ENTRY_BANDS = (SEVERITY_MILD, SEVERITY_MODERATE, SEVERITY_SEVERE, SEVERITY_EXTREME)
USER_BANDS = ("mild_to_moderate", "moderate_to_severe", "severe")

BAND_MILD_TO_MODERATE = "mild_to_moderate"
BAND_MODERATE_TO_SEVERE = "moderate_to_severe"
BAND_SEVERE = "severe"


@dataclass
class SeverityDistribution:
    entry_level: dict[str, float]
    user_level: dict[str, float]
    users_excluded_all_flagged: int = 0


@dataclass
class RelationDistribution:
    fractions: dict[str, float] = field(default_factory=dict)
    related_fraction: float = 0.0
    total: int = 0


def roll_up_user(severities: list[str]) -> str:
    """Band one user from their non-flagged entry severities."""
    if not severities:
        raise ValueError("roll_up_user requires at least one severity")
    total = len(severities)
    p_severe = severities.count(SEVERITY_SEVERE) / total
    p_moderate = severities.count(SEVERITY_MODERATE) / total
    if p_severe >= 0.5:
        return BAND_SEVERE
    if p_severe + p_moderate >= 0.5:
        return BAND_MODERATE_TO_SEVERE
    return BAND_MILD_TO_MODERATE


def severity_distribution(feature_rows: list[dict]) -> SeverityDistribution:
    """Entry-level fractions by direct count; user-level via the roll-up rule.

    ``feature_rows`` are parsed rows with at least author, severity, and
    flagged fields; rows must all carry a severity (parse failures are not
    feature rows).
    """
    if not feature_rows:
        raise EmptyCorpusError("severity distribution over empty feature set")
    entry_counts = Counter(row["severity"] for row in feature_rows)
    total = len(feature_rows)
    entry_level = {band: entry_counts.get(band, 0) / total for band in ENTRY_BANDS}

    per_user: dict[str, list[str]] = {}
    users_seen: set[str] = set()
    for row in feature_rows:
        users_seen.add(row["author"])
        if not row["flagged"]:
            per_user.setdefault(row["author"], []).append(row["severity"])
    user_counts = Counter(roll_up_user(sevs) for sevs in per_user.values())
    user_total = sum(user_counts.values())
    user_level = (
        {band: user_counts.get(band, 0) / user_total for band in USER_BANDS}
        if user_total
        else {}
    )
    return SeverityDistribution(
        entry_level=entry_level,
        user_level=user_level,
        users_excluded_all_flagged=len(users_seen) - len(per_user),
    )


def therapy_frequency(
    recommendation_rows: list[dict], aliases: dict[str, str]
) -> list[tuple[str, int]]:
    """User counts per canonical therapy, descending, ties by name ascending."""
    from .recommendation import canonical_therapy

    counts: Counter[str] = Counter()
    for row in recommendation_rows:
        if row.get("status") != "ok":
            continue
        names = {canonical_therapy(t, aliases) for t in row.get("therapies", [])}
        counts.update(names)
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def relation_distribution(relation_rows: list[dict]) -> RelationDistribution:
    """Fractions per relation label plus the related fraction.

    A pair counts as related unless it is not_related, unprocessed for
    safety, or a backend-error fallback.
    """
    total = len(relation_rows)
    if total == 0:
        return RelationDistribution()
    counts = Counter(row["relation"] for row in relation_rows)
    unrelated = sum(
        1
        for row in relation_rows
        if row["relation"] in ("not_related", "unprocessed_safety")
        or (row["relation"] == "other" and row.get("detail") == "backend_error")
    )
    return RelationDistribution(
        fractions={label: count / total for label, count in sorted(counts.items())},
        related_fraction=1.0 - unrelated / total,
        total=total,
    )


def temporal_coverage(
    feature_rows: list[dict], summary_rows: list[dict]
) -> tuple[float, float]:
    """(entry fraction with a timeline, user fraction with a temporal summary).

    Entry fraction is over parsed feature rows; user fraction is over
    users that produced summaries.
    """
    entry_fraction = 0.0
    if feature_rows:
        with_timeline = sum(1 for row in feature_rows if row.get("timeline") is not None)
        entry_fraction = with_timeline / len(feature_rows)
    summarized = [row for row in summary_rows if row.get("status") == "ok"]
    user_fraction = 0.0
    if summarized:
        with_temporal = sum(1 for row in summarized if row.get("temporal") is not None)
        user_fraction = with_temporal / len(summarized)
    return entry_fraction, user_fraction


def conservation_violations(stage_stats: dict[str, dict]) -> list[str]:
    """Check that every stage's inputs equal the sum of its terminal dispositions."""
    violations: list[str] = []

    def check(stage: str, expression: str, left: int, right: int) -> None:
        if left != right:
            violations.append(f"{stage}: {expression}: {left} != {right}")

    ingest = stage_stats.get("ingest")
    if ingest:
        check("ingest", "lines = parsed + rejected", ingest["lines"], ingest["parsed"] + ingest["rejected"])
        check(
            "ingest",
            "parsed = cohort + non-cohort entries",
            ingest["parsed"],
            ingest["cohort_entries"] + ingest["noncohort_entries"],
        )

    filt = stage_stats.get("filter")
    if filt:
        check(
            "filter",
            "input = removed + flagged + relevant + irrelevant + unknown",
            filt["input_entries"],
            filt["removed"]
            + filt["flagged"]
            + filt["relevant"]
            + filt["irrelevant"]
            + filt["relevance_unknown"],
        )
        check("filter", "retained = flagged + relevant", filt["retained"], filt["flagged"] + filt["relevant"])

    extract = stage_stats.get("extract")
    if extract:
        check(
            "extract",
            "input = features + parse failures",
            extract["input_entries"],
            extract["features_ok"] + extract["parse_failures"],
        )

    aggregate = stage_stats.get("aggregate")
    if aggregate:
        check(
            "aggregate",
            "users = summarized + failures + safety + omitted",
            aggregate["cohort_users"],
            aggregate["summarized"]
            + aggregate["summary_failures"]
            + aggregate["safety_excluded"]
            + aggregate["omitted_no_entries"],
        )

    diagnose = stage_stats.get("diagnose")
    if diagnose:
        check(
            "diagnose",
            "input users = diagnosed + failures",
            diagnose["input_users"],
            diagnose["diagnosed"] + diagnose["failures"],
        )

    recommend = stage_stats.get("recommend")
    if recommend:
        check(
            "recommend",
            "input users = sets + failures",
            recommend["input_users"],
            recommend["sets"] + recommend["failures"],
        )

    interact = stage_stats.get("interact")
    if interact:
        check(
            "interact",
            "comments = paired + skipped",
            interact["input_comments"],
            interact["pairs"] + interact["skipped_no_parent"],
        )
        check("interact", "pairs = classified", interact["pairs"], interact["classified"])

    return violations
