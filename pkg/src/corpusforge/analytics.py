"""Corpus metrics, per-batch progress, the leaderboard, and SUS scoring.

All computations are read-only over a store snapshot. The tokenizer is
a documented convention (lowercase, whitespace split, outer punctuation
stripped), not a reproduction claim for any published unique-word count:
token-internal apostrophes are retained because Hula orthography uses
them (e.g. "Vula'a").

Median convention: lower median for even counts (pure integer pick from
the sorted list).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .domain import PlatformError, Role, SentenceStatus, TranslationStatus, User
from .store import DocumentStore


class BadLengthError(PlatformError):
    code = "bad_length"


class OutOfRangeError(PlatformError):
    code = "out_of_range"


class UnknownBatchError(PlatformError):
    code = "unknown_batch"


@dataclass
class CorpusStats:
    pair_count: int = 0
    unique_source_words: int = 0
    unique_target_words: int = 0
    median_words: float = 0
    median_chars: float = 0
    # buckets "1", "2", "3+" -> fraction of pairs; empty when there are no pairs
    approval_distribution: dict[str, float] = field(default_factory=dict)
    # source-side medians, emitted for transparency alongside the target-side ones
    source_median_words: float = 0
    source_median_chars: float = 0


@dataclass(frozen=True)
class LeaderboardRow:
    translator_id: str
    display_name: str
    approved_count: int
    submitted_count: int
    rank: int


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip outer punctuation per chunk.

    Apostrophes inside a token survive (only leading/trailing punctuation
    is stripped); chunks that were pure punctuation disappear.
    """
    tokens = []
    for chunk in text.lower().split():
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            end -= 1
        if start < end:
            tokens.append(chunk[start:end])
    return tokens


def _lower_median(values: Sequence[int]) -> int:
    """Median of a non-empty sequence; lower of the two middles for even n."""
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def corpus_stats(pairs: Iterable[tuple[str, str, int]]) -> CorpusStats:
    """Aggregate (english, hula, attempts) pairs into corpus statistics.

    Medians are over the target (Hula) side; source-side medians ride
    along for transparency. attempts buckets into "1", "2", "3+".
    """
    pairs = list(pairs)
    if not pairs:
        return CorpusStats()
    source_words: set[str] = set()
    target_words: set[str] = set()
    target_word_counts: list[int] = []
    target_char_counts: list[int] = []
    source_word_counts: list[int] = []
    source_char_counts: list[int] = []
    buckets = {"1": 0, "2": 0, "3+": 0}
    for english, hula, attempts in pairs:
        en_tokens = tokenize(english)
        hu_tokens = tokenize(hula)
        source_words.update(en_tokens)
        target_words.update(hu_tokens)
        source_word_counts.append(len(en_tokens))
        source_char_counts.append(len(english))
        target_word_counts.append(len(hu_tokens))
        target_char_counts.append(len(hula))
        if attempts <= 1:
            buckets["1"] += 1
        elif attempts == 2:
            buckets["2"] += 1
        else:
            buckets["3+"] += 1
    n = len(pairs)
    return CorpusStats(
        pair_count=n,
        unique_source_words=len(source_words),
        unique_target_words=len(target_words),
        median_words=_lower_median(target_word_counts),
        median_chars=_lower_median(target_char_counts),
        approval_distribution={k: v / n for k, v in buckets.items()},
        source_median_words=_lower_median(source_word_counts),
        source_median_chars=_lower_median(source_char_counts),
    )


def leaderboard(users: Iterable[User], limit: int,
                first_approved_at: Mapping[str, int] | None = None) -> list[LeaderboardRow]:
    """Top translators by approved_count; ties by earliest first approval, then id."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    first_approved_at = first_approved_at or {}
    translators = [u for u in users if u.role is Role.TRANSLATOR]

    def order(u: User) -> tuple:
        return (-u.approved_count, first_approved_at.get(u.id, float("inf")), u.id)

    rows = []
    for rank, u in enumerate(sorted(translators, key=order)[:limit], start=1):
        rows.append(
            LeaderboardRow(
                translator_id=u.id,
                display_name=u.display_name,
                approved_count=u.approved_count,
                submitted_count=u.submitted_count,
                rank=rank,
            )
        )
    return rows


def sus_score(responses: Sequence[int]) -> float:
    """SUS score from 10 Likert responses (1..5).

    Odd items contribute response-1, even items 5-response; the sum is
    scaled by 2.5 onto 0..100.
    """
    if len(responses) != 10:
        raise BadLengthError(f"expected 10 responses, got {len(responses)}")
    total = 0
    for i, r in enumerate(responses, start=1):
        if not isinstance(r, int) or r < 1 or r > 5:
            raise OutOfRangeError(f"response {i} must be an integer in 1..5, got {r!r}")
        total += (r - 1) if i % 2 == 1 else (5 - r)
    return 2.5 * total


def sus_mean(response_sets: Iterable[Sequence[int]]) -> float:
    """Arithmetic mean of per-respondent SUS scores."""
    scores = [sus_score(r) for r in response_sets]
    if not scores:
        raise BadLengthError("no responses")
    return sum(scores) / len(scores)


class AnalyticsService:
    """Store-backed views over the live corpus."""

    def __init__(self, store: DocumentStore):
        self.store = store

    def approved_pairs(self) -> list[tuple[str, str, int]]:
        """(english, hula, attempts) for every sentence with an approved translation."""
        sentences = {
            r.payload["id"]: r.payload
            for r in self.store.query("sentence")
            if r.payload["status"] in (SentenceStatus.APPROVED.value, SentenceStatus.EXPORTED.value)
        }
        pairs = []
        for rec in self.store.query("translation", {"status": TranslationStatus.APPROVED.value}):
            sentence = sentences.get(rec.payload["sentence_id"])
            if sentence:
                pairs.append(
                    (sentence["english_text"], rec.payload["hula_text"], sentence["attempt_count"])
                )
        return pairs

    def corpus_stats(self) -> CorpusStats:
        return corpus_stats(self.approved_pairs())

    def progress(self, batch_id: str) -> dict[str, int]:
        """Sentence count per status for one batch; statuses missing are zero."""
        if not self.store.exists("batch", batch_id):
            raise UnknownBatchError(f"batch {batch_id!r} was never imported")
        counts = {status.value: 0 for status in SentenceStatus}
        for rec in self.store.query("sentence", {"batch_id": batch_id}):
            counts[rec.payload["status"]] += 1
        return counts

    def batches(self) -> list[str]:
        return [r.payload["id"] for r in self.store.query("batch")]

    def first_approval_times(self) -> dict[str, int]:
        """Earliest approving-review timestamp per translator."""
        translators_by_translation = {
            r.payload["id"]: r.payload["translator_id"]
            for r in self.store.query("translation", {"status": TranslationStatus.APPROVED.value})
        }
        first: dict[str, int] = {}
        for rec in self.store.query("review", {"decision": "approve"}):
            translator = translators_by_translation.get(rec.payload["translation_id"])
            if translator is None:
                continue
            at = rec.payload["reviewed_at"]
            if translator not in first or at < first[translator]:
                first[translator] = at
        return first

    def leaderboard(self, limit: int) -> list[LeaderboardRow]:
        users = [User.from_doc(r.payload, r.version) for r in self.store.query("user")]
        return leaderboard(users, limit, self.first_approval_times())

    def participation(self) -> dict[str, int]:
        users = self.store.query("user")
        roles = [r.payload["role"] for r in users]
        return {
            "translators": roles.count(Role.TRANSLATOR.value),
            "reviewers": roles.count(Role.REVIEWER.value),
            "admins": roles.count(Role.ADMIN.value),
        }

    def sus_summary(self) -> dict[str, Any]:
        scores = [r.payload["score"] for r in self.store.query("sus_response")]
        return {
            "respondents": len(scores),
            "mean": (sum(scores) / len(scores)) if scores else None,
        }

    def stats_report(self) -> str:
        """Text report mirroring the published corpus-and-participation table."""
        s = self.corpus_stats()
        p = self.participation()
        dist = s.approval_distribution
        lines = [
            "corpus and participation statistics",
            f"  sentence pairs:         {s.pair_count}",
            f"  unique english words:   {s.unique_source_words}",
            f"  unique hula words:      {s.unique_target_words}",
            f"  median sentence length: {s.median_words} words / {s.median_chars} characters (hula)",
            f"  median source length:   {s.source_median_words} words / {s.source_median_chars} characters (english)",
        ]
        if dist:
            lines.append(
                "  approved after 1 / 2 / 3+: "
                f"{dist['1'] * 100:.1f}% / {dist['2'] * 100:.1f}% / {dist['3+'] * 100:.1f}%"
            )
        else:
            lines.append("  approved after 1 / 2 / 3+: n/a")
        lines.append(f"  translators:            {p['translators']}")
        lines.append(f"  reviewers:              {p['reviewers']}")
        return "\n".join(lines)
