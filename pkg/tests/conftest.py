from __future__ import annotations

import itertools

import pytest

from corpusforge.clock import ManualClock
from corpusforge.domain import ReviewDecision, Role
from corpusforge.runtime import open_platform


def sequential_ids(prefix: str = "id"):
    counter = itertools.count(1)
    return lambda: f"{prefix}{next(counter):08d}"


@pytest.fixture
def clock():
    return ManualClock()


@pytest.fixture
def platform(tmp_path, clock):
    # sync=False: durability is exercised explicitly in the store tests
    p = open_platform(tmp_path / "data", clock=clock, id_source=sequential_ids(), sync=False)
    yield p
    p.close()


@pytest.fixture
def users(platform):
    wf = platform.workflow
    admin, _ = wf.create_user("Admin", Role.ADMIN, user_id="admin", credential="admin-cred")
    translator, _ = wf.create_user("Tara", Role.TRANSLATOR, user_id="t1", credential="t1-cred")
    translator2, _ = wf.create_user("Toby", Role.TRANSLATOR, user_id="t2", credential="t2-cred")
    reviewer, _ = wf.create_user("Rhea", Role.REVIEWER, user_id="r1", credential="r1-cred")
    return {"admin": admin, "translator": translator, "translator2": translator2, "reviewer": reviewer}


def run_one_sentence(platform, users, text: str, *, flags_before_approve: int = 0,
                     hula: str = "hula text", batch: str = "b1"):
    """Import one sentence and drive it to Approved with n flag loops first."""
    wf = platform.workflow
    wf.import_batch(users["admin"], batch, [text])
    for i in range(flags_before_approve):
        sentence = wf.claim_next(users["translator"])
        translation = wf.submit_translation(users["translator"], sentence.id, f"{hula} v{i}")
        wf.review_translation(users["reviewer"], translation.id, ReviewDecision.FLAG, "not quite")
    sentence = wf.claim_next(users["translator"])
    translation = wf.submit_translation(users["translator"], sentence.id, hula)
    wf.review_translation(users["reviewer"], translation.id, ReviewDecision.APPROVE)
    return sentence.id
