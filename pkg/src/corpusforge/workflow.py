"""The four-stage pipeline: import, translate, review, export.

Every operation is an atomic read-modify-write against the store using
optimistic versioning with bounded retry; the contended record is always
CAS-ed first so races (two claimants, submit vs lease expiry, two
reviewers) resolve to exactly one winner. Role checks happen before any
write, and every successful mutating call appends exactly one audit
event whose action is listed in WORKFLOW_ACTIONS.
"""

from __future__ import annotations

import hashlib
import secrets
import threading
import uuid
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Sequence

from .clock import ms_to_iso, system_clock
from .domain import (
    AudioAttachment,
    Claim,
    ForbiddenError,
    PlatformError,
    ReviewDecision,
    Role,
    Sentence,
    SentenceStatus,
    Translation,
    TranslationReview,
    TranslationStatus,
    User,
    validate_review,
)
from .ledger import LedgerService
from .store import DocumentStore, DuplicateIdError, VersionConflictError

DEFAULT_LEASE_SECONDS = 3600
MAX_WRITE_RETRIES = 5

WORKFLOW_ACTIONS = frozenset(
    {
        "user_created",
        "batch_imported",
        "sentence_claimed",
        "leases_expired",
        "translation_submitted",
        "translation_reviewed",
        "corpus_exported",
    }
)


class EmptyBatchError(PlatformError):
    code = "empty_batch"


class NotClaimantError(PlatformError):
    code = "not_claimant"


class BlankTranslationError(PlatformError):
    code = "blank_translation"


class LeaseExpiredError(PlatformError):
    code = "lease_expired"


@dataclass(frozen=True)
class ImportItem:
    """One import line: the English text plus an optional caller-chosen id."""

    english_text: str
    sentence_id: str | None = None


@dataclass(frozen=True)
class BatchSummary:
    batch_id: str
    imported: int
    skipped_duplicates: int
    timestamp: int


@dataclass(frozen=True)
class ExportRecord:
    english_text: str
    hula_text: str
    audio_ref: str | None
    translator_id: str
    reviewer_id: str
    attempts: int
    approved_at: int

    def to_line(self) -> dict[str, Any]:
        return {
            "english_text": self.english_text,
            "hula_text": self.hula_text,
            "audio_ref": self.audio_ref,
            "translator_id": self.translator_id,
            "reviewer_id": self.reviewer_id,
            "attempts": self.attempts,
            "approved_at": ms_to_iso(self.approved_at),
        }


def hash_credential(credential: str) -> str:
    return hashlib.sha256(credential.encode("utf-8")).hexdigest()


def _require(actor: User, role: Role) -> None:
    if actor.role is not role:
        raise ForbiddenError(f"operation requires {role.value}, actor {actor.id} is {actor.role.value}")


class WorkflowService:
    def __init__(
        self,
        store: DocumentStore,
        ledger: LedgerService,
        *,
        clock: Callable[[], int] = system_clock,
        id_source: Callable[[], str] | None = None,
        lease_seconds: int = DEFAULT_LEASE_SECONDS,
    ):
        self.store = store
        self.ledger = ledger
        self.clock = clock
        self.id_source = id_source or (lambda: uuid.uuid4().hex)
        self.lease_seconds = lease_seconds
        self._import_lock = threading.Lock()

    # -- users ---------------------------------------------------------------

    def create_user(self, display_name: str, role: Role, *, user_id: str | None = None,
                    credential: str | None = None, actor_id: str = "system") -> tuple[User, str]:
        """Provision a user; returns the record and the plaintext credential."""
        if not display_name.strip():
            raise ValueError("display_name must be non-empty")
        role = Role(role)
        now = self.clock()
        credential = credential or secrets.token_urlsafe(24)
        user = User(
            id=user_id or self.id_source(),
            display_name=display_name.strip(),
            role=role,
            credential_hash=hash_credential(credential),
            created_at=now,
        )
        user.version = self.store.put("user", user.to_doc(), None)
        self.store.append_audit(
            actor_id=actor_id, action="user_created", entity_kind="user",
            entity_id=user.id, timestamp=now, detail={"role": role.value},
        )
        return user, credential

    def get_user(self, user_id: str) -> User:
        rec = self.store.get("user", user_id)
        return User.from_doc(rec.payload, rec.version)

    def find_user_by_credential(self, credential: str) -> User | None:
        rows = self.store.query("user", {"credential_hash": hash_credential(credential)})
        if not rows:
            return None
        return User.from_doc(rows[0].payload, rows[0].version)

    def _bump_user_counters(self, user_id: str, *, submitted: int = 0, approved: int = 0) -> None:
        for _ in range(MAX_WRITE_RETRIES):
            user = self.get_user(user_id)
            updated = replace(
                user,
                submitted_count=user.submitted_count + submitted,
                approved_count=user.approved_count + approved,
            )
            try:
                self.store.put("user", updated.to_doc(), user.version)
                return
            except VersionConflictError:
                continue
        raise VersionConflictError(f"could not update counters for user {user_id}")

    # -- import --------------------------------------------------------------

    def import_batch(self, actor: User, batch_id: str,
                     items: Sequence[str | ImportItem]) -> BatchSummary:
        """Create one Available sentence per unique trimmed text; duplicates skip.

        Duplicate detection is byte-exact after trimming, against the whole
        store and within the batch. The import is atomic: id collisions and
        blank items fail the call before anything is written.
        """
        _require(actor, Role.ADMIN)
        if not batch_id.strip():
            raise ValueError("batch_id must be non-empty")
        batch_id = batch_id.strip()
        if not items:
            raise EmptyBatchError("import items are empty")

        normalized: list[ImportItem] = []
        for i, item in enumerate(items, start=1):
            if isinstance(item, str):
                item = ImportItem(english_text=item)
            text = item.english_text.strip()
            if not text:
                raise ValueError(f"item {i} is blank")
            normalized.append(ImportItem(english_text=text, sentence_id=item.sentence_id))

        with self._import_lock:
            now = self.clock()
            existing = {rec.payload["english_text"] for rec in self.store.query("sentence")}
            plan: list[tuple[str, str]] = []
            planned_ids: set[str] = set()
            skipped = 0
            for item in normalized:
                if item.english_text in existing:
                    skipped += 1
                    continue
                sid = item.sentence_id or self.id_source()
                if sid in planned_ids or self.store.exists("sentence", sid):
                    raise DuplicateIdError(f"sentence id {sid} already exists")
                planned_ids.add(sid)
                existing.add(item.english_text)
                plan.append((sid, item.english_text))

            for sid, text in plan:
                sentence = Sentence(
                    id=sid,
                    english_text=text,
                    batch_id=batch_id,
                    status=SentenceStatus.AVAILABLE,
                    claim=None,
                    attempt_count=0,
                    created_at=now,
                    updated_at=now,
                )
                self.store.put("sentence", sentence.to_doc(), None)

            if self.store.exists("batch", batch_id):
                rec = self.store.get("batch", batch_id)
                doc = dict(rec.payload)
                doc["imported_total"] += len(plan)
                doc["updated_at"] = now
                self.store.put("batch", doc, rec.version)
            else:
                self.store.put(
                    "batch",
                    {"id": batch_id, "imported_total": len(plan), "created_at": now, "updated_at": now},
                    None,
                )

        summary = BatchSummary(
            batch_id=batch_id, imported=len(plan), skipped_duplicates=skipped, timestamp=now
        )
        self.store.append_audit(
            actor_id=actor.id, action="batch_imported", entity_kind="batch",
            entity_id=batch_id, timestamp=now,
            detail={"imported": summary.imported, "skipped_duplicates": summary.skipped_duplicates},
        )
        return summary

    # -- claiming ------------------------------------------------------------

    def _next_claimable(self, skip: set[str]) -> Sentence | None:
        """Oldest claimable sentence outside `skip`: Available before NeedsRevision."""
        for status in (SentenceStatus.AVAILABLE, SentenceStatus.NEEDS_REVISION):
            best = None
            best_key = None
            for rec in self.store.query("sentence", {"status": status.value}):
                payload = rec.payload
                if payload["id"] in skip:
                    continue
                key = (payload["created_at"], payload["id"])
                if best_key is None or key < best_key:
                    best, best_key = rec, key
            if best is not None:
                return Sentence.from_doc(best.payload, best.version)
        return None

    def claim_next(self, actor: User, lease_seconds: int | None = None) -> Sentence | None:
        """Atomically claim the next eligible sentence; None when nothing is claimable."""
        _require(actor, Role.TRANSLATOR)
        lease = self.lease_seconds if lease_seconds is None else lease_seconds
        if lease < 1:
            raise ValueError("lease_seconds must be >= 1")
        skip: set[str] = set()  # grows on every lost race, so the loop terminates
        while True:
            sentence = self._next_claimable(skip)
            if sentence is None:
                return None
            now = self.clock()
            claim = Claim(
                translator_id=actor.id,
                lease_expiry=now + lease * 1000,
                prior_status=sentence.status,
            )
            claimed = sentence.with_transition(SentenceStatus.CLAIMED, claim=claim, now=now)
            try:
                claimed.version = self.store.put("sentence", claimed.to_doc(), sentence.version)
            except VersionConflictError:
                skip.add(sentence.id)  # somebody else got it; try the next one
                continue
            self.store.append_audit(
                actor_id=actor.id, action="sentence_claimed", entity_kind="sentence",
                entity_id=claimed.id, timestamp=now,
                detail={"lease_expiry": claim.lease_expiry},
            )
            return claimed

    def expire_leases(self, now: int | None = None) -> int:
        """Revert every over-lease claim to its recorded pre-claim status."""
        now = self.clock() if now is None else now
        reverted = 0
        for rec in self.store.query("sentence", {"status": SentenceStatus.CLAIMED.value}):
            sentence = Sentence.from_doc(rec.payload, rec.version)
            for _ in range(MAX_WRITE_RETRIES):
                if sentence.status is not SentenceStatus.CLAIMED or sentence.claim.lease_expiry >= now:
                    break
                restored = sentence.with_transition(
                    sentence.claim.prior_status, claim=None, now=now
                )
                try:
                    self.store.put("sentence", restored.to_doc(), sentence.version)
                    reverted += 1
                    break
                except VersionConflictError:
                    # a submit (or another expirer) beat us; re-check the fresh record
                    fresh = self.store.get("sentence", sentence.id)
                    sentence = Sentence.from_doc(fresh.payload, fresh.version)
        if reverted:
            self.store.append_audit(
                actor_id="system", action="leases_expired", entity_kind="sentence",
                entity_id="*", timestamp=now, detail={"reverted": reverted},
            )
        return reverted

    # -- translation ---------------------------------------------------------

    def _sentence(self, sentence_id: str) -> Sentence:
        rec = self.store.get("sentence", sentence_id)
        return Sentence.from_doc(rec.payload, rec.version)

    def submit_translation(self, actor: User, sentence_id: str, hula_text: str,
                           audio: tuple[bytes, str] | None = None) -> Translation:
        """Record a translation for a sentence the actor holds a live claim on."""
        _require(actor, Role.TRANSLATOR)
        hula = hula_text.strip()
        if not hula:
            raise BlankTranslationError("translation text is blank")

        last_conflict: VersionConflictError | None = None
        for _ in range(MAX_WRITE_RETRIES):
            now = self.clock()
            sentence = self._sentence(sentence_id)
            if sentence.status is not SentenceStatus.CLAIMED or sentence.claim.translator_id != actor.id:
                raise NotClaimantError(f"{actor.id} holds no claim on sentence {sentence_id}")
            if sentence.claim.lease_expiry < now:
                raise LeaseExpiredError(f"claim on sentence {sentence_id} expired")
            updated = sentence.with_transition(
                SentenceStatus.AWAITING_REVIEW,
                claim=None,
                now=now,
                attempt_count=sentence.attempt_count + 1,
            )
            try:
                updated.version = self.store.put("sentence", updated.to_doc(), sentence.version)
            except VersionConflictError as exc:
                last_conflict = exc
                continue  # re-read; an expiry may have raced us

            audio_ref = None
            if audio is not None:
                data, content_type = audio
                attachment = AudioAttachment(
                    id=self.id_source(),
                    content_type=content_type,
                    byte_length=len(data),
                    payload_ref="",
                    uploaded_by=actor.id,
                    uploaded_at=now,
                )
                ref = self.store.put_blob(attachment.id, data)
                attachment = replace(attachment, payload_ref=ref)
                self.store.put("audio", attachment.to_doc(), None)
                audio_ref = attachment.id

            translation = Translation(
                id=self.id_source(),
                sentence_id=sentence_id,
                translator_id=actor.id,
                hula_text=hula,
                audio_ref=audio_ref,
                status=TranslationStatus.SUBMITTED,
                attempt_index=updated.attempt_count,
                submitted_at=now,
            )
            translation.version = self.store.put("translation", translation.to_doc(), None)
            self._bump_user_counters(actor.id, submitted=1)
            self.store.append_audit(
                actor_id=actor.id, action="translation_submitted", entity_kind="translation",
                entity_id=translation.id, timestamp=now,
                detail={"sentence_id": sentence_id, "attempt_index": translation.attempt_index},
            )
            return translation
        raise last_conflict

    # -- review --------------------------------------------------------------

    def _translation(self, translation_id: str) -> Translation:
        rec = self.store.get("translation", translation_id)
        return Translation.from_doc(rec.payload, rec.version)

    def review_translation(self, actor: User, translation_id: str,
                           decision: ReviewDecision, comment: str = "") -> TranslationReview:
        """Approve or flag one submitted translation; drives the sentence along."""
        _require(actor, Role.REVIEWER)

        # CAS the translation first: whoever flips it off Submitted owns the review.
        translation = self._translation(translation_id)
        for _ in range(MAX_WRITE_RETRIES):
            normalized_comment = validate_review(
                translation, reviewer_id=actor.id, decision=decision, comment=comment
            )
            now = self.clock()
            new_status = (
                TranslationStatus.APPROVED
                if decision is ReviewDecision.APPROVE
                else TranslationStatus.FLAGGED
            )
            flipped = replace(translation, status=new_status)
            try:
                flipped.version = self.store.put("translation", flipped.to_doc(), translation.version)
                translation = flipped
                break
            except VersionConflictError:
                translation = self._translation(translation_id)  # next pass raises AlreadyReviewed
        else:
            raise VersionConflictError(f"could not review translation {translation_id}")

        target = (
            SentenceStatus.APPROVED
            if decision is ReviewDecision.APPROVE
            else SentenceStatus.NEEDS_REVISION
        )
        for _ in range(MAX_WRITE_RETRIES):
            sentence = self._sentence(translation.sentence_id)
            moved = sentence.with_transition(target, claim=None, now=now)
            try:
                self.store.put("sentence", moved.to_doc(), sentence.version)
                break
            except VersionConflictError:
                continue
        else:
            raise VersionConflictError(f"could not update sentence {translation.sentence_id}")

        review = TranslationReview(
            id=self.id_source(),
            translation_id=translation_id,
            reviewer_id=actor.id,
            decision=decision,
            comment=normalized_comment,
            reviewed_at=now,
        )
        review.version = self.store.put("review", review.to_doc(), None)

        if decision is ReviewDecision.APPROVE:
            self._bump_user_counters(translation.translator_id, approved=1)
            self.ledger.accrue_for_approval(translation.translator_id, translation.sentence_id)

        self.store.append_audit(
            actor_id=actor.id, action="translation_reviewed", entity_kind="translation",
            entity_id=translation_id, timestamp=now,
            detail={
                "decision": decision.value,
                "sentence_id": translation.sentence_id,
            },
        )
        return review

    # -- export --------------------------------------------------------------

    def export_approved(self, actor: User, mark_exported: bool = False) -> list[ExportRecord]:
        """One record per Approved sentence, id-ascending, English byte-exact."""
        _require(actor, Role.ADMIN)
        approved_translations = {
            r.payload["sentence_id"]: r.payload
            for r in self.store.query("translation", {"status": TranslationStatus.APPROVED.value})
        }
        approving_reviews = {
            r.payload["translation_id"]: r.payload
            for r in self.store.query("review", {"decision": ReviewDecision.APPROVE.value})
        }
        records = []
        exported_ids = []
        for rec in self.store.query("sentence", {"status": SentenceStatus.APPROVED.value}):
            sentence = Sentence.from_doc(rec.payload, rec.version)
            translation = approved_translations.get(sentence.id)
            if translation is None:
                raise PlatformError(f"approved sentence {sentence.id} has no approved translation")
            review = approving_reviews[translation["id"]]
            records.append(
                ExportRecord(
                    english_text=sentence.english_text,
                    hula_text=translation["hula_text"],
                    audio_ref=translation.get("audio_ref"),
                    translator_id=translation["translator_id"],
                    reviewer_id=review["reviewer_id"],
                    attempts=sentence.attempt_count,
                    approved_at=review["reviewed_at"],
                )
            )
            exported_ids.append(sentence.id)

        if mark_exported and exported_ids:
            now = self.clock()
            for sentence_id in exported_ids:
                for _ in range(MAX_WRITE_RETRIES):
                    sentence = self._sentence(sentence_id)
                    moved = sentence.with_transition(SentenceStatus.EXPORTED, claim=None, now=now)
                    try:
                        self.store.put("sentence", moved.to_doc(), sentence.version)
                        break
                    except VersionConflictError:
                        continue
            self.store.append_audit(
                actor_id=actor.id, action="corpus_exported", entity_kind="sentence",
                entity_id="*", timestamp=now, detail={"exported": len(exported_ids)},
            )
        return records

    # -- work lists ------------------------------------------------------------

    def _flag_comments_by_sentence(self) -> dict[str, list[str]]:
        """Flag comments per sentence, oldest first (the guidance for revision)."""
        sentence_by_translation = {
            r.payload["id"]: r.payload["sentence_id"] for r in self.store.query("translation")
        }
        flags: dict[str, list[tuple[int, str]]] = {}
        for rec in self.store.query("review", {"decision": ReviewDecision.FLAG.value}):
            sid = sentence_by_translation.get(rec.payload["translation_id"])
            if sid is not None:
                flags.setdefault(sid, []).append((rec.payload["reviewed_at"], rec.payload["comment"]))
        return {sid: [c for _, c in sorted(pairs)] for sid, pairs in flags.items()}

    def list_tasks(self, actor: User) -> dict[str, Any]:
        """Role-appropriate work list (translator, reviewer, or admin view)."""
        if actor.role is Role.TRANSLATOR:
            flags = self._flag_comments_by_sentence()
            claimed = []
            for rec in self.store.query("sentence", {"status": SentenceStatus.CLAIMED.value}):
                sentence = Sentence.from_doc(rec.payload, rec.version)
                if sentence.claim.translator_id != actor.id:
                    continue
                claimed.append(
                    {
                        "sentence_id": sentence.id,
                        "english_text": sentence.english_text,
                        "batch_id": sentence.batch_id,
                        "attempt_count": sentence.attempt_count,
                        "lease_expiry": sentence.claim.lease_expiry,
                        "flag_comments": flags.get(sentence.id, []),
                    }
                )
            return {
                "role": Role.TRANSLATOR.value,
                "claimed": claimed,
                "available_count": self.store.count(
                    "sentence", {"status": SentenceStatus.AVAILABLE.value}
                ),
                "needs_revision_count": self.store.count(
                    "sentence", {"status": SentenceStatus.NEEDS_REVISION.value}
                ),
            }

        if actor.role is Role.REVIEWER:
            flags = self._flag_comments_by_sentence()
            latest: dict[str, dict[str, Any]] = {}
            for rec in self.store.query("translation"):
                doc = rec.payload
                cur = latest.get(doc["sentence_id"])
                if cur is None or doc["attempt_index"] > cur["attempt_index"]:
                    latest[doc["sentence_id"]] = doc
            queue = []
            for rec in self.store.query("sentence", {"status": SentenceStatus.AWAITING_REVIEW.value}):
                sentence = Sentence.from_doc(rec.payload, rec.version)
                translation = latest.get(sentence.id)
                if translation is None:
                    continue  # transient: submit in flight
                queue.append(
                    {
                        "sentence_id": sentence.id,
                        "english_text": sentence.english_text,
                        "batch_id": sentence.batch_id,
                        "translation_id": translation["id"],
                        "hula_text": translation["hula_text"],
                        "audio_ref": translation.get("audio_ref"),
                        "translator_id": translation["translator_id"],
                        "attempt_index": translation["attempt_index"],
                        "flag_comments": flags.get(sentence.id, []),
                    }
                )
            return {"role": Role.REVIEWER.value, "queue": queue}

        batches: dict[str, dict[str, int]] = {}
        for rec in self.store.query("batch"):
            batch_id = rec.payload["id"]
            counts = {status.value: 0 for status in SentenceStatus}
            for srec in self.store.query("sentence", {"batch_id": batch_id}):
                counts[srec.payload["status"]] += 1
            batches[batch_id] = counts
        return {"role": Role.ADMIN.value, "batches": batches}
