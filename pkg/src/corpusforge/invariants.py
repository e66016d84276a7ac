"""Cross-module consistency checks over a quiescent store.

Used by the simulator (periodically and at the end of a run) and by
tests. Each violated rule yields one human-readable message; an empty
list means the state is consistent.
"""

from __future__ import annotations

from collections import Counter

from .domain import SentenceStatus, TranslationStatus
from .ledger import LedgerService, replay_balances
from .store import DocumentStore


def verify_all(store: DocumentStore, ledger: LedgerService | None = None) -> list[str]:
    problems: list[str] = []
    sentences = {r.payload["id"]: r.payload for r in store.query("sentence")}
    translations = [r.payload for r in store.query("translation")]
    reviews = [r.payload for r in store.query("review")]
    users = {r.payload["id"]: r.payload for r in store.query("user")}

    # claim/status coupling
    for sid, s in sentences.items():
        claimed = s["status"] == SentenceStatus.CLAIMED.value
        if claimed != (s.get("claim") is not None):
            problems.append(f"sentence {sid}: claim present does not match status {s['status']}")

    # attempt_count == number of translations; attempt_index contiguous 1..n
    by_sentence: dict[str, list[int]] = {}
    for t in translations:
        by_sentence.setdefault(t["sentence_id"], []).append(t["attempt_index"])
    for sid, s in sentences.items():
        indices = sorted(by_sentence.get(sid, []))
        if len(indices) != s["attempt_count"]:
            problems.append(
                f"sentence {sid}: attempt_count {s['attempt_count']} != {len(indices)} translations"
            )
        if indices != list(range(1, len(indices) + 1)):
            problems.append(f"sentence {sid}: attempt_index sequence {indices} not contiguous")

    # at most one approved translation per sentence; approved sentences have exactly one
    approved_per_sentence = Counter(
        t["sentence_id"] for t in translations if t["status"] == TranslationStatus.APPROVED.value
    )
    for sid, n in approved_per_sentence.items():
        if n > 1:
            problems.append(f"sentence {sid}: {n} approved translations")
    for sid, s in sentences.items():
        terminal = s["status"] in (SentenceStatus.APPROVED.value, SentenceStatus.EXPORTED.value)
        if terminal and approved_per_sentence.get(sid, 0) != 1:
            problems.append(
                f"sentence {sid}: status {s['status']} with {approved_per_sentence.get(sid, 0)} approved translations"
            )

    # at most one review per translation; no self-review
    reviews_per_translation = Counter(r["translation_id"] for r in reviews)
    for tid, n in reviews_per_translation.items():
        if n > 1:
            problems.append(f"translation {tid}: {n} reviews")
    translators = {t["id"]: t["translator_id"] for t in translations}
    for r in reviews:
        if r["reviewer_id"] == translators.get(r["translation_id"]):
            problems.append(f"review {r['id']}: reviewer translated their own submission")

    # per-batch conservation: status counts sum to the imported total
    for rec in store.query("batch"):
        batch = rec.payload
        in_batch = [s for s in sentences.values() if s["batch_id"] == batch["id"]]
        if len(in_batch) != batch["imported_total"]:
            problems.append(
                f"batch {batch['id']}: {len(in_batch)} sentences != imported_total {batch['imported_total']}"
            )

    # user counters
    for uid, u in users.items():
        if u["approved_count"] > u["submitted_count"]:
            problems.append(f"user {uid}: approved_count exceeds submitted_count")
    submitted_by = Counter(t["translator_id"] for t in translations)
    for uid, n in submitted_by.items():
        if uid in users and users[uid]["submitted_count"] != n:
            problems.append(f"user {uid}: submitted_count {users[uid]['submitted_count']} != {n}")

    # audit log: gap-free ascending seq
    seqs = [e.seq for e in store.audit_events()]
    if seqs != list(range(1, len(seqs) + 1)):
        problems.append("audit log seq is not the gap-free sequence 1..N")

    if ledger is not None:
        b = ledger.balances()
        folded = replay_balances(ledger.entries())
        if (b.pool_minor, b.contributed_total_minor, b.disbursed_total_minor, b.owed_minor) != (
            folded.pool_minor,
            folded.contributed_total_minor,
            folded.disbursed_total_minor,
            folded.owed_minor,
        ):
            problems.append("ledger incremental balances diverge from entry-list replay")
        if b.contributed_total_minor != b.pool_minor + b.disbursed_total_minor:
            problems.append("ledger conservation violated")
        if b.pool_minor < 0 or any(v < 0 for v in b.owed_minor.values()):
            problems.append("ledger has a negative balance")
        refs = [e.ref for e in ledger.entries() if e.kind == "accrual"]
        if len(refs) != len(set(refs)):
            problems.append("duplicate accrual refs in ledger")

    return problems
