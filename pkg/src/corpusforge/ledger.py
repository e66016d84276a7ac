"""Community-financing ledger: contributions, per-approval accruals, disbursements.

All amounts are integer toea (1 PGK = 100 toea); the default accrual
rate is 10 toea per approved sentence. The ordered entry log is the
source of truth; balances are maintained incrementally and must always
equal a fold over the log.

Owed balances may exceed the pool (liability can outrun funding); only
disbursement is pool-bounded.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .domain import PlatformError, SentenceStatus
from .store import DocumentStore, NotFoundError

DEFAULT_RATE_TOEA = 10

KIND_CONTRIBUTION = "contribution"
KIND_ACCRUAL = "accrual"
KIND_DISBURSEMENT = "disbursement"


class NonPositiveAmountError(PlatformError):
    code = "non_positive_amount"


class DuplicateAccrualError(PlatformError):
    code = "duplicate_accrual"


class SentenceNotApprovedError(PlatformError):
    code = "sentence_not_approved"


class InsufficientPoolError(PlatformError):
    code = "insufficient_pool"


class ExceedsOwedError(PlatformError):
    code = "exceeds_owed"


@dataclass(frozen=True)
class LedgerEntry:
    seq: int
    kind: str
    party: str
    amount_minor: int
    ref: str | None
    timestamp: int

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "party": self.party,
            "amount_minor": self.amount_minor,
            "ref": self.ref,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "LedgerEntry":
        return cls(
            seq=doc["seq"],
            kind=doc["kind"],
            party=doc["party"],
            amount_minor=doc["amount_minor"],
            ref=doc.get("ref"),
            timestamp=doc["timestamp"],
        )


@dataclass
class Balances:
    pool_minor: int = 0
    owed_minor: dict[str, int] = field(default_factory=dict)
    disbursed_total_minor: int = 0
    contributed_total_minor: int = 0


def replay_balances(entries: Iterable[LedgerEntry]) -> Balances:
    """Fold an ordered entry list into Balances (pure reference computation)."""
    b = Balances()
    for e in entries:
        if e.kind == KIND_CONTRIBUTION:
            b.contributed_total_minor += e.amount_minor
            b.pool_minor += e.amount_minor
        elif e.kind == KIND_ACCRUAL:
            b.owed_minor[e.party] = b.owed_minor.get(e.party, 0) + e.amount_minor
        elif e.kind == KIND_DISBURSEMENT:
            b.disbursed_total_minor += e.amount_minor
            b.pool_minor -= e.amount_minor
            b.owed_minor[e.party] = b.owed_minor.get(e.party, 0) - e.amount_minor
        else:
            raise ValueError(f"unknown ledger entry kind {e.kind!r}")
    return b


class LedgerService:
    """Serialized appends to ledger.log plus snapshot balance reads."""

    def __init__(self, store: DocumentStore, *, clock: Callable[[], int],
                 rate_toea: int = DEFAULT_RATE_TOEA):
        if rate_toea < 1:
            raise ValueError("rate_toea must be >= 1")
        self.store = store
        self.clock = clock
        self.rate_toea = rate_toea
        self._log = store.open_log("ledger.log")
        self._lock = threading.Lock()
        self._balances = replay_balances(self.entries())
        self._accrued_refs = {e.ref for e in self.entries() if e.kind == KIND_ACCRUAL}

    def entries(self) -> list[LedgerEntry]:
        return [LedgerEntry.from_doc(d) for d in self._log.all()]

    def balances(self) -> Balances:
        with self._lock:
            return Balances(
                pool_minor=self._balances.pool_minor,
                owed_minor=dict(self._balances.owed_minor),
                disbursed_total_minor=self._balances.disbursed_total_minor,
                contributed_total_minor=self._balances.contributed_total_minor,
            )

    def _append(self, kind: str, party: str, amount_minor: int, ref: str | None) -> LedgerEntry:
        entry = self._log.append(
            {
                "kind": kind,
                "party": party,
                "amount_minor": amount_minor,
                "ref": ref,
                "timestamp": self.clock(),
            }
        )
        return LedgerEntry.from_doc(entry)

    def contribute(self, member_id: str, amount_minor: int) -> LedgerEntry:
        if amount_minor < 1:
            raise NonPositiveAmountError("contribution must be a positive amount in toea")
        with self._lock:
            entry = self._append(KIND_CONTRIBUTION, member_id, amount_minor, None)
            self._balances.contributed_total_minor += amount_minor
            self._balances.pool_minor += amount_minor
        self.store.append_audit(
            actor_id=member_id, action="ledger_contribution", entity_kind="ledger",
            entity_id=str(entry.seq), timestamp=entry.timestamp,
            detail={"amount_minor": amount_minor},
        )
        return entry

    def accrue_for_approval(self, translator_id: str, sentence_id: str) -> LedgerEntry:
        """Credit the configured rate to a translator for one approved sentence."""
        try:
            sentence = self.store.get("sentence", sentence_id)
        except NotFoundError:
            raise SentenceNotApprovedError(f"sentence {sentence_id} does not exist")
        if sentence.payload["status"] != SentenceStatus.APPROVED.value:
            raise SentenceNotApprovedError(
                f"sentence {sentence_id} is {sentence.payload['status']}, not approved"
            )
        with self._lock:
            if sentence_id in self._accrued_refs:
                raise DuplicateAccrualError(f"sentence {sentence_id} already accrued")
            entry = self._append(KIND_ACCRUAL, translator_id, self.rate_toea, sentence_id)
            self._accrued_refs.add(sentence_id)
            owed = self._balances.owed_minor
            owed[translator_id] = owed.get(translator_id, 0) + self.rate_toea
        self.store.append_audit(
            actor_id=translator_id, action="ledger_accrual", entity_kind="ledger",
            entity_id=str(entry.seq), timestamp=entry.timestamp,
            detail={"sentence_id": sentence_id, "amount_minor": self.rate_toea},
        )
        return entry

    def disburse(self, translator_id: str, amount_minor: int) -> LedgerEntry:
        if amount_minor < 1:
            raise NonPositiveAmountError("disbursement must be a positive amount in toea")
        with self._lock:
            owed = self._balances.owed_minor.get(translator_id, 0)
            if amount_minor > owed:
                raise ExceedsOwedError(
                    f"cannot disburse {amount_minor}; translator {translator_id} is owed {owed}"
                )
            if amount_minor > self._balances.pool_minor:
                raise InsufficientPoolError(
                    f"cannot disburse {amount_minor}; pool holds {self._balances.pool_minor}"
                )
            entry = self._append(KIND_DISBURSEMENT, translator_id, amount_minor, None)
            self._balances.disbursed_total_minor += amount_minor
            self._balances.pool_minor -= amount_minor
            self._balances.owed_minor[translator_id] = owed - amount_minor
        self.store.append_audit(
            actor_id=translator_id, action="ledger_disbursement", entity_kind="ledger",
            entity_id=str(entry.seq), timestamp=entry.timestamp,
            detail={"amount_minor": amount_minor},
        )
        return entry

    def report(self) -> str:
        """Plain-text balance table: pool, per-translator owed, totals."""
        b = self.balances()
        lines = [
            "ledger balances (toea)",
            f"  pool:            {b.pool_minor}",
            f"  contributed:     {b.contributed_total_minor}",
            f"  disbursed:       {b.disbursed_total_minor}",
            "  owed:",
        ]
        if b.owed_minor:
            for party in sorted(b.owed_minor):
                lines.append(f"    {party}: {b.owed_minor[party]}")
        else:
            lines.append("    (none)")
        return "\n".join(lines)
