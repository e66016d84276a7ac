"""Domain records, enumerations, and the pure lifecycle rules.

Sentence lifecycle:

    available -> claimed -> awaiting_review -> approved -> exported
                   |  ^                           |
                   v  |        (flag)             v
               available    needs_revision <- awaiting_review
                                  ^  |
                                  |  v (re-claim)
                               claimed

A claimed sentence whose lease expires falls back to the status it was
claimed from (available or needs_revision), which is recorded on the
claim itself.

Everything here is pure: no I/O, no clocks, no store access. Timestamps
are integer epoch milliseconds, UTC.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any


class PlatformError(Exception):
    """Base for all platform errors; `code` is the machine-readable name."""

    code = "error"


class ForbiddenError(PlatformError):
    code = "forbidden"


class AlreadyReviewedError(PlatformError):
    code = "already_reviewed"


class EmptyFlagCommentError(PlatformError):
    code = "empty_flag_comment"


class SelfReviewError(PlatformError):
    code = "self_review"


class Role(str, Enum):
    ADMIN = "admin"
    TRANSLATOR = "translator"
    REVIEWER = "reviewer"


class SentenceStatus(str, Enum):
    AVAILABLE = "available"
    CLAIMED = "claimed"
    AWAITING_REVIEW = "awaiting_review"
    NEEDS_REVISION = "needs_revision"
    APPROVED = "approved"
    EXPORTED = "exported"


class TranslationStatus(str, Enum):
    SUBMITTED = "submitted"
    APPROVED = "approved"
    FLAGGED = "flagged"


class ReviewDecision(str, Enum):
    APPROVE = "approve"
    FLAG = "flag"


# Legal sentence transitions. claimed -> needs_revision happens when a
# lease expires on a sentence that was claimed out of needs_revision.
LEGAL_SENTENCE_TRANSITIONS: frozenset[tuple[SentenceStatus, SentenceStatus]] = frozenset(
    {
        (SentenceStatus.AVAILABLE, SentenceStatus.CLAIMED),
        (SentenceStatus.CLAIMED, SentenceStatus.AWAITING_REVIEW),
        (SentenceStatus.CLAIMED, SentenceStatus.AVAILABLE),
        (SentenceStatus.CLAIMED, SentenceStatus.NEEDS_REVISION),
        (SentenceStatus.AWAITING_REVIEW, SentenceStatus.APPROVED),
        (SentenceStatus.AWAITING_REVIEW, SentenceStatus.NEEDS_REVISION),
        (SentenceStatus.NEEDS_REVISION, SentenceStatus.CLAIMED),
        (SentenceStatus.APPROVED, SentenceStatus.EXPORTED),
    }
)


def legal_sentence_transition(from_status: SentenceStatus, to_status: SentenceStatus) -> bool:
    """True iff (from_status, to_status) is a legal lifecycle step."""
    return (from_status, to_status) in LEGAL_SENTENCE_TRANSITIONS


@dataclass(frozen=True)
class Claim:
    """Lease held by one translator; prior_status is where expiry reverts to."""

    translator_id: str
    lease_expiry: int  # epoch ms
    prior_status: SentenceStatus

    def to_doc(self) -> dict[str, Any]:
        return {
            "translator_id": self.translator_id,
            "lease_expiry": self.lease_expiry,
            "prior_status": self.prior_status.value,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Claim":
        return cls(
            translator_id=doc["translator_id"],
            lease_expiry=doc["lease_expiry"],
            prior_status=SentenceStatus(doc["prior_status"]),
        )


@dataclass
class Sentence:
    """An English source prompt plus lifecycle and assignment state."""

    id: str
    english_text: str
    batch_id: str
    status: SentenceStatus
    claim: Claim | None
    attempt_count: int
    created_at: int
    updated_at: int
    version: int = 0  # store version; 0 means not yet persisted

    def __post_init__(self) -> None:
        if not self.english_text:
            raise ValueError("english_text must be non-empty")
        if self.attempt_count < 0:
            raise ValueError("attempt_count must be non-negative")
        if (self.claim is not None) != (self.status is SentenceStatus.CLAIMED):
            raise ValueError("claim must be present iff status is claimed")

    def with_transition(self, to_status: SentenceStatus, *, claim: Claim | None,
                        now: int, attempt_count: int | None = None) -> "Sentence":
        """Copy with a legal status change applied; raises on illegal moves."""
        if not legal_sentence_transition(self.status, to_status):
            raise ValueError(f"illegal sentence transition {self.status.value} -> {to_status.value}")
        return replace(
            self,
            status=to_status,
            claim=claim,
            attempt_count=self.attempt_count if attempt_count is None else attempt_count,
            updated_at=now,
        )

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "english_text": self.english_text,
            "batch_id": self.batch_id,
            "status": self.status.value,
            "claim": self.claim.to_doc() if self.claim else None,
            "attempt_count": self.attempt_count,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any], version: int = 0) -> "Sentence":
        return cls(
            id=doc["id"],
            english_text=doc["english_text"],
            batch_id=doc["batch_id"],
            status=SentenceStatus(doc["status"]),
            claim=Claim.from_doc(doc["claim"]) if doc.get("claim") else None,
            attempt_count=doc["attempt_count"],
            created_at=doc["created_at"],
            updated_at=doc["updated_at"],
            version=version,
        )


@dataclass
class Translation:
    """One contributor's Hula rendering of a sentence."""

    id: str
    sentence_id: str
    translator_id: str
    hula_text: str
    audio_ref: str | None
    status: TranslationStatus
    attempt_index: int
    submitted_at: int
    version: int = 0

    def __post_init__(self) -> None:
        if not self.hula_text:
            raise ValueError("hula_text must be non-empty")
        if self.attempt_index < 1:
            raise ValueError("attempt_index must be positive")

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "sentence_id": self.sentence_id,
            "translator_id": self.translator_id,
            "hula_text": self.hula_text,
            "audio_ref": self.audio_ref,
            "status": self.status.value,
            "attempt_index": self.attempt_index,
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any], version: int = 0) -> "Translation":
        return cls(
            id=doc["id"],
            sentence_id=doc["sentence_id"],
            translator_id=doc["translator_id"],
            hula_text=doc["hula_text"],
            audio_ref=doc.get("audio_ref"),
            status=TranslationStatus(doc["status"]),
            attempt_index=doc["attempt_index"],
            submitted_at=doc["submitted_at"],
            version=version,
        )


@dataclass
class TranslationReview:
    """A reviewer's decision on one translation."""

    id: str
    translation_id: str
    reviewer_id: str
    decision: ReviewDecision
    comment: str
    reviewed_at: int
    version: int = 0

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "translation_id": self.translation_id,
            "reviewer_id": self.reviewer_id,
            "decision": self.decision.value,
            "comment": self.comment,
            "reviewed_at": self.reviewed_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any], version: int = 0) -> "TranslationReview":
        return cls(
            id=doc["id"],
            translation_id=doc["translation_id"],
            reviewer_id=doc["reviewer_id"],
            decision=ReviewDecision(doc["decision"]),
            comment=doc["comment"],
            reviewed_at=doc["reviewed_at"],
            version=version,
        )


@dataclass
class User:
    id: str
    display_name: str
    role: Role
    credential_hash: str
    approved_count: int = 0
    submitted_count: int = 0
    created_at: int = 0
    version: int = 0

    def __post_init__(self) -> None:
        if self.approved_count > self.submitted_count:
            raise ValueError("approved_count cannot exceed submitted_count")

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "display_name": self.display_name,
            "role": self.role.value,
            "credential_hash": self.credential_hash,
            "approved_count": self.approved_count,
            "submitted_count": self.submitted_count,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any], version: int = 0) -> "User":
        return cls(
            id=doc["id"],
            display_name=doc["display_name"],
            role=Role(doc["role"]),
            credential_hash=doc["credential_hash"],
            approved_count=doc["approved_count"],
            submitted_count=doc["submitted_count"],
            created_at=doc["created_at"],
            version=version,
        )


@dataclass
class AudioAttachment:
    id: str
    content_type: str
    byte_length: int
    payload_ref: str
    uploaded_by: str
    uploaded_at: int
    version: int = 0

    def __post_init__(self) -> None:
        if self.byte_length <= 0:
            raise ValueError("byte_length must be positive")

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "content_type": self.content_type,
            "byte_length": self.byte_length,
            "payload_ref": self.payload_ref,
            "uploaded_by": self.uploaded_by,
            "uploaded_at": self.uploaded_at,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any], version: int = 0) -> "AudioAttachment":
        return cls(
            id=doc["id"],
            content_type=doc["content_type"],
            byte_length=doc["byte_length"],
            payload_ref=doc["payload_ref"],
            uploaded_by=doc["uploaded_by"],
            uploaded_at=doc["uploaded_at"],
            version=version,
        )


@dataclass(frozen=True)
class AuditEvent:
    """One entry in the append-only who-did-what log."""

    seq: int
    actor_id: str
    action: str
    entity_kind: str
    entity_id: str
    timestamp: int
    detail: dict[str, Any] = field(default_factory=dict)

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "actor_id": self.actor_id,
            "action": self.action,
            "entity_kind": self.entity_kind,
            "entity_id": self.entity_id,
            "timestamp": self.timestamp,
            "detail": self.detail,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "AuditEvent":
        return cls(
            seq=doc["seq"],
            actor_id=doc["actor_id"],
            action=doc["action"],
            entity_kind=doc["entity_kind"],
            entity_id=doc["entity_id"],
            timestamp=doc["timestamp"],
            detail=doc.get("detail", {}),
        )


def validate_review(translation: Translation, *, reviewer_id: str,
                    decision: ReviewDecision, comment: str) -> str:
    """Check a prospective review against a translation.

    Returns the normalized (stripped) comment. Raises AlreadyReviewedError,
    EmptyFlagCommentError, or SelfReviewError.
    """
    if translation.status is not TranslationStatus.SUBMITTED:
        raise AlreadyReviewedError(
            f"translation {translation.id} is {translation.status.value}, not submitted"
        )
    if reviewer_id == translation.translator_id:
        raise SelfReviewError("reviewers may not review their own translations")
    comment = comment.strip()
    if decision is ReviewDecision.FLAG and not comment:
        raise EmptyFlagCommentError("a flag decision requires a non-empty comment")
    return comment
