import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from corpusforge.domain import (
    AlreadyReviewedError,
    EmptyFlagCommentError,
    ForbiddenError,
    ReviewDecision,
    Role,
    SelfReviewError,
    SentenceStatus,
    TranslationStatus,
)
from corpusforge.invariants import verify_all
from corpusforge.store import DuplicateIdError
from corpusforge.workflow import (
    BlankTranslationError,
    EmptyBatchError,
    ImportItem,
    LeaseExpiredError,
    NotClaimantError,
)


def sentence_status(platform, sentence_id):
    return platform.store.get("sentence", sentence_id).payload["status"]


class TestImport:
    def test_batch_of_2000_unique(self, platform, users):
        items = [f"sentence number {i}" for i in range(2000)]
        summary = platform.workflow.import_batch(users["admin"], "b1", items)
        assert summary.imported == 2000
        assert summary.skipped_duplicates == 0
        assert platform.store.count("sentence", {"status": "available"}) == 2000

    def test_non_admin_forbidden(self, platform, users):
        with pytest.raises(ForbiddenError):
            platform.workflow.import_batch(users["translator"], "b1", ["x"])
        assert platform.store.count("sentence") == 0

    def test_in_batch_duplicates_skipped(self, platform, users):
        summary = platform.workflow.import_batch(
            users["admin"], "b1", ["same line", "other line", "same line"]
        )
        assert (summary.imported, summary.skipped_duplicates) == (2, 1)

    def test_cross_batch_duplicates_skipped(self, platform, users):
        platform.workflow.import_batch(users["admin"], "b1", ["shared", "solo-1"])
        summary = platform.workflow.import_batch(users["admin"], "b2", ["shared", "solo-2"])
        assert (summary.imported, summary.skipped_duplicates) == (1, 1)

    def test_trim_then_byte_exact_dedupe(self, platform, users):
        summary = platform.workflow.import_batch(
            users["admin"], "b1", ["  padded  ", "padded", "Padded"]
        )
        assert (summary.imported, summary.skipped_duplicates) == (2, 1)  # case differs: kept

    def test_counts_cover_all_items(self, platform, users):
        items = ["a", "b", "a", "c", "b", "a"]
        summary = platform.workflow.import_batch(users["admin"], "b1", items)
        assert summary.imported + summary.skipped_duplicates == len(items)

    def test_empty_batch_rejected(self, platform, users):
        with pytest.raises(EmptyBatchError):
            platform.workflow.import_batch(users["admin"], "b1", [])

    def test_blank_item_rejects_whole_batch(self, platform, users):
        with pytest.raises(ValueError, match="item 2"):
            platform.workflow.import_batch(users["admin"], "b1", ["ok", "   ", "fine"])
        assert platform.store.count("sentence") == 0

    def test_supplied_id_collision_is_atomic(self, platform, users):
        platform.workflow.import_batch(
            users["admin"], "b1", [ImportItem("first", "s-1")]
        )
        with pytest.raises(DuplicateIdError):
            platform.workflow.import_batch(
                users["admin"], "b2", [ImportItem("brand new", None), ImportItem("other", "s-1")]
            )
        assert platform.store.count("sentence") == 1  # nothing from the failed batch

    def test_reimport_same_batch_id_accumulates(self, platform, users):
        platform.workflow.import_batch(users["admin"], "b1", ["one"])
        platform.workflow.import_batch(users["admin"], "b1", ["two"])
        assert platform.store.get("batch", "b1").payload["imported_total"] == 2


class TestClaim:
    def test_empty_store_returns_none(self, platform, users):
        assert platform.workflow.claim_next(users["translator"]) is None

    def test_claims_available_sentence(self, platform, users, clock):
        platform.workflow.import_batch(users["admin"], "b1", ["hello"])
        sentence = platform.workflow.claim_next(users["translator"], 60)
        assert sentence.status is SentenceStatus.CLAIMED
        assert sentence.claim.translator_id == "t1"
        assert sentence.claim.lease_expiry == clock() + 60_000
        assert sentence.claim.prior_status is SentenceStatus.AVAILABLE

    def test_non_translator_forbidden(self, platform, users):
        with pytest.raises(ForbiddenError):
            platform.workflow.claim_next(users["admin"])

    def test_lease_seconds_validated(self, platform, users):
        with pytest.raises(ValueError):
            platform.workflow.claim_next(users["translator"], 0)

    def test_oldest_available_first(self, platform, users, clock):
        platform.workflow.import_batch(users["admin"], "b1", ["older"])
        clock.advance(1000)
        platform.workflow.import_batch(users["admin"], "b2", ["newer"])
        sentence = platform.workflow.claim_next(users["translator"])
        assert sentence.english_text == "older"

    def test_needs_revision_claimed_when_nothing_available(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["only one"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "walo")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.FLAG, "redo")
        assert sentence_status(platform, sentence.id) == "needs_revision"
        reclaimed = wf.claim_next(users["translator2"])
        assert reclaimed.id == sentence.id
        assert reclaimed.claim.prior_status is SentenceStatus.NEEDS_REVISION

    def test_available_preferred_over_needs_revision(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["first", "second"])
        claimed = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], claimed.id, "walo")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.FLAG, "redo")
        next_claim = wf.claim_next(users["translator"])
        assert next_claim.claim.prior_status is SentenceStatus.AVAILABLE

    def test_concurrent_claims_never_double_claim(self, platform, users):
        platform.workflow.import_batch(users["admin"], "b1", ["the only sentence"])
        barrier = threading.Barrier(2)

        def contend(actor):
            barrier.wait()
            return platform.workflow.claim_next(actor, 60)

        for _ in range(10):
            with ThreadPoolExecutor(max_workers=2) as pool:
                results = list(pool.map(contend, [users["translator"], users["translator2"]]))
            wins = [r for r in results if r is not None]
            assert len(wins) == 1
            platform.workflow.expire_leases(now=platform.workflow.clock() + 10**9)


class TestExpireLeases:
    def test_nothing_expired(self, platform, users):
        platform.workflow.import_batch(users["admin"], "b1", ["x"])
        platform.workflow.claim_next(users["translator"], 3600)
        assert platform.workflow.expire_leases() == 0

    def test_expired_lease_reverts_and_is_claimable(self, platform, users, clock):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"], 1)
        clock.advance(2000)
        assert wf.expire_leases() == 1
        assert sentence_status(platform, sentence.id) == "available"
        assert wf.claim_next(users["translator2"]).id == sentence.id

    def test_expiry_restores_needs_revision(self, platform, users, clock):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "walo")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.FLAG, "redo")
        wf.claim_next(users["translator"], 1)
        clock.advance(2000)
        assert wf.expire_leases() == 1
        assert sentence_status(platform, sentence.id) == "needs_revision"

    def test_submit_that_landed_first_is_not_reverted(self, platform, users, clock):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"], 1)
        wf.submit_translation(users["translator"], sentence.id, "walo")
        clock.advance(2000)
        assert wf.expire_leases() == 0
        assert sentence_status(platform, sentence.id) == "awaiting_review"


class TestSubmit:
    def test_valid_submit(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "  walo kila ")
        assert translation.status is TranslationStatus.SUBMITTED
        assert translation.attempt_index == 1
        assert translation.hula_text == "walo kila"
        stored = platform.store.get("sentence", sentence.id).payload
        assert stored["status"] == "awaiting_review"
        assert stored["attempt_count"] == 1
        assert stored["claim"] is None
        assert platform.workflow.get_user("t1").submitted_count == 1

    def test_submit_by_non_claimant(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        with pytest.raises(NotClaimantError):
            wf.submit_translation(users["translator2"], sentence.id, "walo")

    def test_submit_unclaimed_sentence(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sid = platform.store.query("sentence")[0].payload["id"]
        with pytest.raises(NotClaimantError):
            wf.submit_translation(users["translator"], sid, "walo")

    def test_blank_translation(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        with pytest.raises(BlankTranslationError):
            wf.submit_translation(users["translator"], sentence.id, "   ")

    def test_expired_lease_rejected(self, platform, users, clock):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"], 1)
        clock.advance(2000)
        with pytest.raises(LeaseExpiredError):
            wf.submit_translation(users["translator"], sentence.id, "walo")

    def test_audio_attachment_round_trip(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(
            users["translator"], sentence.id, "walo", audio=(b"abc", "audio/webm")
        )
        assert translation.audio_ref is not None
        meta = platform.store.get("audio", translation.audio_ref).payload
        assert meta["byte_length"] == 3
        assert meta["content_type"] == "audio/webm"
        assert platform.store.get_blob(translation.audio_ref) == b"abc"


class TestReview:
    def _submitted(self, platform, users, text="x"):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", [text])
        sentence = wf.claim_next(users["translator"])
        return sentence, wf.submit_translation(users["translator"], sentence.id, "walo kila")

    def test_approve_first_attempt(self, platform, users):
        sentence, translation = self._submitted(platform, users)
        review = platform.workflow.review_translation(
            users["reviewer"], translation.id, ReviewDecision.APPROVE
        )
        assert review.decision is ReviewDecision.APPROVE
        stored = platform.store.get("sentence", sentence.id).payload
        assert stored["status"] == "approved"
        assert stored["attempt_count"] == 1  # the "approved after 1" bucket
        assert platform.store.get("translation", translation.id).payload["status"] == "approved"
        assert platform.workflow.get_user("t1").approved_count == 1
        assert platform.ledger.balances().owed_minor == {"t1": 10}

    def test_flag_reenters_claim_pool(self, platform, users):
        sentence, translation = self._submitted(platform, users)
        platform.workflow.review_translation(
            users["reviewer"], translation.id, ReviewDecision.FLAG, "wrong register"
        )
        assert sentence_status(platform, sentence.id) == "needs_revision"
        assert platform.workflow.claim_next(users["translator2"]).id == sentence.id
        assert platform.ledger.balances().owed_minor == {}

    def test_flag_then_resubmit_then_approve(self, platform, users):
        wf = platform.workflow
        sentence, translation = self._submitted(platform, users)
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.FLAG, "redo")
        wf.claim_next(users["translator"])
        second = wf.submit_translation(users["translator"], sentence.id, "walo rava")
        wf.review_translation(users["reviewer"], second.id, ReviewDecision.APPROVE)
        stored = platform.store.get("sentence", sentence.id).payload
        assert stored["status"] == "approved"
        assert stored["attempt_count"] == 2
        approved = platform.store.query("translation", {"status": "approved"})
        assert len(approved) == 1
        assert approved[0].payload["id"] == second.id

    def test_non_reviewer_forbidden(self, platform, users):
        _, translation = self._submitted(platform, users)
        with pytest.raises(ForbiddenError):
            platform.workflow.review_translation(
                users["translator"], translation.id, ReviewDecision.APPROVE
            )

    def test_flag_without_comment(self, platform, users):
        sentence, translation = self._submitted(platform, users)
        with pytest.raises(EmptyFlagCommentError):
            platform.workflow.review_translation(
                users["reviewer"], translation.id, ReviewDecision.FLAG, "  "
            )
        assert sentence_status(platform, sentence.id) == "awaiting_review"

    def test_second_review_rejected(self, platform, users):
        _, translation = self._submitted(platform, users)
        platform.workflow.review_translation(
            users["reviewer"], translation.id, ReviewDecision.APPROVE
        )
        with pytest.raises(AlreadyReviewedError):
            platform.workflow.review_translation(
                users["reviewer"], translation.id, ReviewDecision.APPROVE
            )

    def test_self_review_rejected(self, platform, users):
        # construct the forbidden shape directly: a reviewer who authored the record
        platform.store.put(
            "translation",
            {
                "id": "tr-self", "sentence_id": "s-x", "translator_id": "r1",
                "hula_text": "walo", "audio_ref": None, "status": "submitted",
                "attempt_index": 1, "submitted_at": 0,
            },
            None,
        )
        with pytest.raises(SelfReviewError):
            platform.workflow.review_translation(
                users["reviewer"], "tr-self", ReviewDecision.APPROVE
            )

    def test_concurrent_reviews_exactly_one_wins(self, platform, users):
        wf = platform.workflow
        _, translation = self._submitted(platform, users)
        reviewer2, _ = wf.create_user("Rita", Role.REVIEWER, user_id="r2", credential="c")
        barrier = threading.Barrier(2)
        outcomes = []

        def race(actor):
            barrier.wait()
            try:
                wf.review_translation(actor, translation.id, ReviewDecision.APPROVE)
                return "ok"
            except AlreadyReviewedError:
                return "already"

        with ThreadPoolExecutor(max_workers=2) as pool:
            outcomes = sorted(pool.map(race, [users["reviewer"], reviewer2]))
        assert outcomes == ["already", "ok"]
        assert platform.store.count("review") == 1


class TestExport:
    def test_empty(self, platform, users):
        assert platform.workflow.export_approved(users["admin"]) == []

    def test_end_to_end_round_trip(self, platform, users):
        wf = platform.workflow
        text = "Vula'a voices carry (far)!"
        wf.import_batch(users["admin"], "b1", [text])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "vula'a walo")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.APPROVE)
        records = wf.export_approved(users["admin"])
        assert len(records) == 1
        record = records[0]
        assert record.english_text == text  # byte-exact
        assert record.attempts == 1
        assert record.hula_text == "vula'a walo"
        assert record.translator_id == "t1"
        assert record.reviewer_id == "r1"

    def test_double_export_identical(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["a", "b"])
        for _ in range(2):
            sentence = wf.claim_next(users["translator"])
            translation = wf.submit_translation(users["translator"], sentence.id, "walo")
            wf.review_translation(users["reviewer"], translation.id, ReviewDecision.APPROVE)
        first = wf.export_approved(users["admin"], mark_exported=False)
        second = wf.export_approved(users["admin"], mark_exported=False)
        assert first == second
        assert len(first) == 2

    def test_mark_exported_transitions_and_empties(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["a"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "walo")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.APPROVE)
        records = wf.export_approved(users["admin"], mark_exported=True)
        assert len(records) == 1
        assert sentence_status(platform, sentence.id) == "exported"
        assert wf.export_approved(users["admin"], mark_exported=True) == []

    def test_non_admin_forbidden(self, platform, users):
        with pytest.raises(ForbiddenError):
            platform.workflow.export_approved(users["translator"])


class TestListTasks:
    def test_fresh_translator_zero_counts(self, platform, users):
        tasks = platform.workflow.list_tasks(users["translator"])
        assert tasks == {
            "role": "translator",
            "claimed": [],
            "available_count": 0,
            "needs_revision_count": 0,
        }

    def test_reviewer_sees_submission(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        wf.submit_translation(users["translator"], sentence.id, "walo kila")
        tasks = wf.list_tasks(users["reviewer"])
        assert len(tasks["queue"]) == 1
        assert tasks["queue"][0]["hula_text"] == "walo kila"

    def test_revision_shows_prior_flag_comment(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["x"])
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, "walo")
        wf.review_translation(
            users["reviewer"], translation.id, ReviewDecision.FLAG, "use the elder form"
        )
        claimed = wf.claim_next(users["translator2"])
        translator_view = wf.list_tasks(users["translator2"])
        assert translator_view["claimed"][0]["flag_comments"] == ["use the elder form"]
        wf.submit_translation(users["translator2"], claimed.id, "walo rava")
        reviewer_view = wf.list_tasks(users["reviewer"])
        assert reviewer_view["queue"][0]["flag_comments"] == ["use the elder form"]

    def test_admin_batch_counts(self, platform, users):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", ["a", "b", "c"])
        wf.claim_next(users["translator"])
        view = wf.list_tasks(users["admin"])
        assert view["batches"]["b1"]["available"] == 2
        assert view["batches"]["b1"]["claimed"] == 1


class TestSystemInvariants:
    def test_conservation_through_full_lifecycle(self, platform, users, clock):
        wf = platform.workflow
        wf.import_batch(users["admin"], "b1", [f"s{i}" for i in range(8)])

        def total():
            counts = platform.analytics.progress("b1")
            return sum(counts.values())

        assert total() == 8
        for step in range(6):
            sentence = wf.claim_next(users["translator"])
            assert total() == 8
            translation = wf.submit_translation(users["translator"], sentence.id, "walo")
            assert total() == 8
            decision = ReviewDecision.FLAG if step % 3 == 0 else ReviewDecision.APPROVE
            wf.review_translation(
                users["reviewer"], translation.id, decision,
                "redo" if decision is ReviewDecision.FLAG else "",
            )
            assert total() == 8
        wf.export_approved(users["admin"], mark_exported=True)
        assert total() == 8
        assert verify_all(platform.store, platform.ledger) == []

    def test_audit_count_matches_mutating_calls(self, platform, users):
        # the users fixture already provisioned 4 users -> 4 audit events
        wf = platform.workflow
        mutations = 4
        wf.import_batch(users["admin"], "b1", ["a", "b"])
        mutations += 1
        sentence = wf.claim_next(users["translator"])
        mutations += 1
        wf.submit_translation(users["translator"], sentence.id, "walo")
        mutations += 1
        wf.review_translation(users["reviewer"], platform.store.query("translation")[0].payload["id"],
                              ReviewDecision.APPROVE)
        mutations += 2  # the review plus the ledger accrual it triggers
        wf.export_approved(users["admin"], mark_exported=True)
        mutations += 1
        wf.export_approved(users["admin"], mark_exported=False)  # read-only: no event
        assert wf.claim_next(users["translator2"]) is not None
        mutations += 1
        assert wf.expire_leases() == 0  # nothing reverted: no event
        events = platform.store.audit_events()
        assert len(events) == mutations
        assert [e.seq for e in events] == list(range(1, mutations + 1))
