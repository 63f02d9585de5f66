"""Fuse the two user summaries into the practitioner-facing diagnosis summary.

The diagnosis prompt is the canonical versioned template; the Dataframe
placeholder receives a fixed serialization of both summaries. Output is
stored verbatim with word accounting; over-budget summaries are flagged,
never truncated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .aggregation import NonTemporalSummary, TemporalSummary
from .errors import BackendError, BackendExhaustedError

logger = logging.getLogger(__name__)

WORD_TARGET = 400
DEFAULT_WORD_BUDGET_SLACK = 1.1

TEMPORAL_ABSENT_LINE = "Temporal summary: none"


@dataclass
class DiagnosisSummary:
    author: str
    text: str
    word_count: int
    over_budget: bool


def serialize_dataframe(
    non_temporal: NonTemporalSummary, temporal: TemporalSummary | None
) -> str:
    """Canonical Dataframe text: labeled non-temporal block, then temporal block."""
    lines = [
        "NON-TEMPORAL SUMMARY",
        f"Overall severity: {non_temporal.overall_severity}",
        f"Triggers: {'; '.join(non_temporal.triggers)}",
        f"Disorders: {'; '.join(non_temporal.disorders)}",
        f"Language and tone: {non_temporal.language_tone}",
        f"Recurring themes: {non_temporal.recurring_themes}",
        f"Overall status: {non_temporal.overall_status}",
        "",
    ]
    if temporal is None:
        lines.append(TEMPORAL_ABSENT_LINE)
    else:
        lines.extend(
            [
                "TEMPORAL SUMMARY",
                f"Chronological events: {temporal.chronological_events}",
                f"Duration: {temporal.duration}",
                f"Frequency: {temporal.frequency}",
                f"Recurrence: {temporal.recurrence}",
                f"Explicit times: {temporal.explicit_times}",
            ]
        )
    return "\n".join(lines)


def word_count(text: str) -> int:
    return len(text.split())


def diagnose(
    author: str,
    non_temporal: NonTemporalSummary,
    temporal: TemporalSummary | None,
    session,
    slack: float = DEFAULT_WORD_BUDGET_SLACK,
) -> tuple[DiagnosisSummary | None, str | None]:
    """Run the diagnosis prompt for one user; returns (summary, failure)."""
    tags = {"stage": "diagnose", "author": author}
    dataframe = serialize_dataframe(non_temporal, temporal)
    try:
        text = session.ask("diagnosis", {"Dataframe": dataframe}, tags=tags)
    except (BackendError, BackendExhaustedError) as exc:
        logger.warning("diagnosis failed for %s: %s", author, exc)
        return None, f"backend failure: {exc}"
    words = word_count(text)
    budget = int(round(WORD_TARGET * slack))
    return (
        DiagnosisSummary(author=author, text=text, word_count=words, over_budget=words > budget),
        None,
    )
