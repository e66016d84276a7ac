"""Deterministic desk-scale pipeline simulation.

Drives the real store/workflow/ledger stack end to end with synthetic
actors: T translators claim and submit, R reviewers approve the first
attempt with probability p1, the second with p2, and any third attempt
always. Randomness comes from one seeded Mersenne Twister
(random.Random), so a fixed seed reproduces the report byte for byte
within this implementation.

Invariants are verified every `check_every` mutating operations and once
at the end; any violation aborts the run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .analytics import CorpusStats
from .clock import ManualClock
from .domain import PlatformError, ReviewDecision, Role
from .invariants import verify_all
from .runtime import Platform, open_platform

SIM_EPOCH_MS = 1_767_225_600_000  # 2026-01-01T00:00:00Z
CONTRIBUTING_MEMBERS = 5

ENGLISH_WORDS = (
    "the a this that kettle lamp canoe river village market fish garden rain sun "
    "moon child elder story song water fire house road bird tree wind stone night "
    "morning family friend food salt sail net paddle wave shore reef island boat "
    "teacher school church race language word voice hand eye heart walks sits eats "
    "drinks sees hears makes takes gives brings holds carries old new big small good "
    "long short near far red green blue warm cold quick slow quiet loud happy"
).split()

HULA_WORDS = (
    "vula'a ketolo lamepa rava kila walo manu kaia puka lau nima mata vanagi tau "
    "koro rani maguli au oi ia ita imia idia lalo kone asi davara guba pouli rere "
    "mai lao noho kani inu ita'ia kamonai kara abia henia mailaia dogo huaia gauna "
    "matamata badana maragina namona daudau kwadogina kahirakahira daure kerukeru "
    "siahu keruma haraga metaira asi'regena boga kwalimu moale"
).split()


class SimulationParameterError(PlatformError):
    code = "bad_parameter"


class SimulationInvariantError(PlatformError):
    code = "invariant_violation"


@dataclass(frozen=True)
class SimulationConfig:
    sentences: int
    translators: int
    reviewers: int
    p1: float
    p2: float
    seed: int
    lease_seconds: int = 3600
    check_every: int = 500
    leaderboard_size: int = 10

    def validate(self) -> None:
        if self.sentences < 1 or self.translators < 1 or self.reviewers < 1:
            raise SimulationParameterError("sentences, translators, and reviewers must be >= 1")
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise SimulationParameterError("approve probabilities must lie in [0, 1]")


@dataclass
class SimulationResult:
    report: str
    stats: CorpusStats
    invariant_checks: int = 0
    violations: list[str] = field(default_factory=list)


def _synthetic_text(rng: random.Random, vocabulary: list[str], taken: set[str]) -> str:
    for _ in range(20):
        n = rng.randint(3, 12)
        text = " ".join(rng.choice(vocabulary) for _ in range(n))
        if text not in taken:
            taken.add(text)
            return text
    text = f"{text} x{len(taken)}"  # vanishingly rare; force uniqueness
    taken.add(text)
    return text


def run_simulation(config: SimulationConfig, data_dir: str | Path,
                   platform: Platform | None = None) -> SimulationResult:
    config.validate()
    rng = random.Random(config.seed)
    clock = ManualClock(SIM_EPOCH_MS)
    own_platform = platform is None
    if platform is None:
        counter = iter(range(1, 10_000_000))
        platform = open_platform(
            data_dir,
            clock=clock,
            id_source=lambda: f"x{next(counter):08d}",
            lease_seconds=config.lease_seconds,
            sync=False,  # synthetic run; durability is exercised by the store tests
        )
    wf, ledger = platform.workflow, platform.ledger
    result = SimulationResult(report="", stats=CorpusStats())

    def tick() -> None:
        clock.advance(137)

    def check() -> None:
        result.invariant_checks += 1
        problems = verify_all(platform.store, ledger)
        if problems:
            result.violations.extend(problems)
            raise SimulationInvariantError("; ".join(problems[:5]))

    try:
        admin, _ = wf.create_user("Admin", Role.ADMIN, user_id="admin", credential="sim-admin")
        translators = []
        for i in range(1, config.translators + 1):
            user, _ = wf.create_user(
                f"Translator {i:03d}", Role.TRANSLATOR,
                user_id=f"t{i:03d}", credential=f"sim-t{i:03d}",
            )
            translators.append(user)
        reviewers = []
        for i in range(1, config.reviewers + 1):
            user, _ = wf.create_user(
                f"Reviewer {i:02d}", Role.REVIEWER,
                user_id=f"r{i:02d}", credential=f"sim-r{i:02d}",
            )
            reviewers.append(user)

        for m in range(1, CONTRIBUTING_MEMBERS + 1):
            # voluntary contributions between PGK10 and PGK100
            ledger.contribute(f"m{m:03d}", rng.randrange(1000, 10001))
            tick()

        taken: set[str] = set()
        items = [_synthetic_text(rng, ENGLISH_WORDS, taken) for _ in range(config.sentences)]
        summary = wf.import_batch(admin, "sim-batch", items)
        tick()

        claims = submissions = approvals = flags = 0
        mutations = 0
        hula_taken: set[str] = set()
        while True:
            translator = translators[rng.randrange(len(translators))]
            sentence = wf.claim_next(translator, config.lease_seconds)
            if sentence is None:
                break
            claims += 1
            tick()
            hula = _synthetic_text(rng, HULA_WORDS, hula_taken)
            translation = wf.submit_translation(translator, sentence.id, hula)
            submissions += 1
            tick()

            reviewer = reviewers[rng.randrange(len(reviewers))]
            attempt = translation.attempt_index
            if attempt == 1:
                approve = rng.random() < config.p1
            elif attempt == 2:
                approve = rng.random() < config.p2
            else:
                approve = True
            if approve:
                wf.review_translation(reviewer, translation.id, ReviewDecision.APPROVE)
                approvals += 1
            else:
                wf.review_translation(
                    reviewer, translation.id, ReviewDecision.FLAG,
                    f"needs another pass (attempt {attempt})",
                )
                flags += 1
            tick()

            mutations += 3
            if mutations % config.check_every < 3:
                wf.expire_leases()
                check()

        # settle what the pool can cover, translator by translator
        balances = ledger.balances()
        pool_left = balances.pool_minor
        disbursed = 0
        for tid in sorted(balances.owed_minor):
            amount = min(balances.owed_minor[tid], pool_left)
            if amount >= 1:
                ledger.disburse(tid, amount)
                pool_left -= amount
                disbursed += amount
                tick()
        check()

        stats = platform.analytics.corpus_stats()
        result.stats = stats
        dist = stats.approval_distribution
        rows = platform.analytics.leaderboard(config.leaderboard_size)

        lines = [
            f"simulation report (seed={config.seed})",
            (
                f"parameters: sentences={config.sentences} translators={config.translators} "
                f"reviewers={config.reviewers} p1={config.p1:.4f} p2={config.p2:.4f}"
            ),
            (
                f"pipeline: imported={summary.imported} claims={claims} "
                f"submissions={submissions} approvals={approvals} flags={flags}"
            ),
            platform.analytics.stats_report(),
            "approval distribution:",
            f"  after 1:  {dist.get('1', 0.0) * 100:.2f}%",
            f"  after 2:  {dist.get('2', 0.0) * 100:.2f}%",
            f"  after 3+: {dist.get('3+', 0.0) * 100:.2f}%",
            f"leaderboard (top {config.leaderboard_size}):",
        ]
        for row in rows:
            lines.append(
                f"  {row.rank:2d}. {row.display_name} "
                f"({row.approved_count} approved / {row.submitted_count} submitted)"
            )
        lines.append(ledger.report())
        lines.append(f"disbursed this run: {disbursed} toea")
        lines.append(f"invariant checks: {result.invariant_checks}, violations: {len(result.violations)}")
        result.report = "\n".join(lines)
        return result
    finally:
        if own_platform:
            platform.close()
