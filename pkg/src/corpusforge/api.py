"""HTTP surface: bearer-token sessions and one endpoint per operation.

No business logic lives here; every mutating endpoint delegates to
exactly one workflow/ledger operation. Errors are returned as
{"error": <machine code>, "message": <human string>} with a status
mapped from the error code.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import asdict, dataclass
from typing import Any

from fastapi import Depends, FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from .domain import ForbiddenError, PlatformError, ReviewDecision, Role, User
from .runtime import Platform
from .workflow import ImportItem

SESSION_TTL_HOURS = 24
MAX_AUDIO_BYTES = 10 * 1024 * 1024


class InvalidCredentialError(PlatformError):
    code = "invalid_credential"


class UnauthenticatedError(PlatformError):
    code = "unauthenticated"


class ExpiredError(PlatformError):
    code = "expired"


class PayloadTooLargeError(PlatformError):
    code = "payload_too_large"


STATUS_BY_CODE = {
    "forbidden": 403,
    "unauthenticated": 401,
    "expired": 401,
    "invalid_credential": 401,
    "not_found": 404,
    "unknown_batch": 404,
    "version_conflict": 409,
    "duplicate_id": 409,
    "already_reviewed": 409,
    "duplicate_accrual": 409,
    "lease_expired": 409,
    "not_claimant": 409,
    "payload_too_large": 413,
}


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str
    role: Role
    issued_at: int
    expires_at: int


class SessionManager:
    """In-memory bearer sessions; tokens carry 256 bits of entropy."""

    def __init__(self, platform: Platform, ttl_hours: int = SESSION_TTL_HOURS):
        self.platform = platform
        self.clock = platform.workflow.clock
        self.ttl_ms = ttl_hours * 3600 * 1000
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def login(self, credential: str) -> Session:
        user = self.platform.workflow.find_user_by_credential(credential)
        if user is None:
            raise InvalidCredentialError("unknown credential")
        now = self.clock()
        session = Session(
            token=secrets.token_hex(32),
            user_id=user.id,
            role=user.role,
            issued_at=now,
            expires_at=now + self.ttl_ms,
        )
        with self._lock:
            self._sessions[session.token] = session
        self.platform.store.append_audit(
            actor_id=user.id, action="login", entity_kind="user",
            entity_id=user.id, timestamp=now, detail={},
        )
        return session

    def authorize(self, token: str | None, required_role: Role | None = None) -> User:
        if not token:
            raise UnauthenticatedError("missing bearer token")
        with self._lock:
            session = self._sessions.get(token)
        if session is None:
            raise UnauthenticatedError("unknown or revoked token")
        if self.clock() >= session.expires_at:
            raise ExpiredError("session expired")
        user = self.platform.workflow.get_user(session.user_id)
        if required_role is not None and user.role is not required_role:
            raise ForbiddenError(f"endpoint requires role {required_role.value}")
        return user


class LoginBody(BaseModel):
    credential: str


class ClaimBody(BaseModel):
    lease_seconds: int | None = None


class ReviewBody(BaseModel):
    decision: str
    comment: str = ""


class ImportLine(BaseModel):
    en: str
    id: str | None = None


class ImportBody(BaseModel):
    items: list[ImportLine]


class ContributionBody(BaseModel):
    member_id: str
    amount_minor: int


class DisbursementBody(BaseModel):
    translator_id: str
    amount_minor: int


class SusBody(BaseModel):
    responses: list[int]


def create_app(platform: Platform, *, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="corpusforge", docs_url=None, redoc_url=None)
    sessions = SessionManager(platform)
    app.state.platform = platform
    app.state.sessions = sessions
    wf = platform.workflow

    def _token(request: Request) -> str | None:
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            return header[7:].strip()
        return None

    def require(role: Role | None):
        def dependency(request: Request) -> User:
            return sessions.authorize(_token(request), role)

        return Depends(dependency)

    @app.exception_handler(PlatformError)
    async def platform_error_handler(_request: Request, exc: PlatformError):
        return JSONResponse(
            status_code=STATUS_BY_CODE.get(exc.code, 400),
            content={"error": exc.code, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "validation", "message": str(exc)})

    @app.post("/auth/login")
    def login(body: LoginBody) -> dict[str, Any]:
        session = sessions.login(body.credential)
        return {
            "token": session.token,
            "user_id": session.user_id,
            "role": session.role.value,
            "expires_at": session.expires_at,
        }

    @app.post("/batches/{batch_id}/import")
    def import_batch(batch_id: str, body: ImportBody,
                     actor: User = require(Role.ADMIN)) -> dict[str, Any]:
        items = [ImportItem(english_text=line.en, sentence_id=line.id) for line in body.items]
        summary = wf.import_batch(actor, batch_id, items)
        return asdict(summary)

    @app.post("/tasks/claim")
    def claim(body: ClaimBody, actor: User = require(Role.TRANSLATOR)) -> dict[str, Any]:
        sentence = wf.claim_next(actor, body.lease_seconds)
        return {"sentence": sentence.to_doc() if sentence else None}

    @app.post("/sentences/{sentence_id}/translations")
    async def submit_translation(sentence_id: str, request: Request,
                                 actor: User = require(Role.TRANSLATOR)) -> dict[str, Any]:
        content_type = request.headers.get("content-type", "")
        audio = None
        if content_type.startswith("multipart/"):
            form = await request.form()
            hula_text = str(form.get("hula_text", ""))
            upload = form.get("audio")
            if upload is not None and not isinstance(upload, str):
                data = await upload.read()
                if len(data) > MAX_AUDIO_BYTES:
                    raise PayloadTooLargeError(
                        f"audio exceeds {MAX_AUDIO_BYTES} bytes"
                    )
                audio = (data, upload.content_type or "application/octet-stream")
        else:
            body = await request.json()
            hula_text = body.get("hula_text", "")
        translation = wf.submit_translation(actor, sentence_id, hula_text, audio)
        return translation.to_doc()

    @app.post("/translations/{translation_id}/review")
    def review(translation_id: str, body: ReviewBody,
               actor: User = require(Role.REVIEWER)) -> dict[str, Any]:
        try:
            decision = ReviewDecision(body.decision)
        except ValueError:
            raise ValueError(f"decision must be 'approve' or 'flag', got {body.decision!r}")
        result = wf.review_translation(actor, translation_id, decision, body.comment)
        return result.to_doc()

    @app.get("/tasks")
    def tasks(actor: User = require(None)) -> dict[str, Any]:
        return wf.list_tasks(actor)

    @app.get("/export")
    def export(mark: bool = False, actor: User = require(Role.ADMIN)) -> Response:
        records = wf.export_approved(actor, mark_exported=mark)
        body = "".join(json.dumps(r.to_line(), ensure_ascii=False) + "\n" for r in records)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/stats")
    def stats(actor: User = require(None)) -> dict[str, Any]:
        analytics = platform.analytics
        return {
            "corpus": asdict(analytics.corpus_stats()),
            "progress": {batch: analytics.progress(batch) for batch in analytics.batches()},
            "participation": analytics.participation(),
            "sus": analytics.sus_summary(),
        }

    @app.get("/leaderboard")
    def leaderboard(limit: int = 10, actor: User = require(None)) -> dict[str, Any]:
        rows = platform.analytics.leaderboard(limit)
        return {"rows": [asdict(r) for r in rows]}

    @app.post("/ledger/contributions")
    def contribute(body: ContributionBody, actor: User = require(Role.ADMIN)) -> dict[str, Any]:
        entry = platform.ledger.contribute(body.member_id, body.amount_minor)
        return entry.to_doc()

    @app.post("/ledger/disbursements")
    def disburse(body: DisbursementBody, actor: User = require(Role.ADMIN)) -> dict[str, Any]:
        entry = platform.ledger.disburse(body.translator_id, body.amount_minor)
        return entry.to_doc()

    @app.get("/ledger/balances")
    def balances(actor: User = require(Role.ADMIN)) -> dict[str, Any]:
        b = platform.ledger.balances()
        return {
            "pool_minor": b.pool_minor,
            "owed_minor": b.owed_minor,
            "disbursed_total_minor": b.disbursed_total_minor,
            "contributed_total_minor": b.contributed_total_minor,
        }

    @app.post("/sus")
    def record_sus(body: SusBody, actor: User = require(None)) -> dict[str, Any]:
        from .analytics import sus_score

        score = sus_score(body.responses)
        now = wf.clock()
        record_id = wf.id_source()
        platform.store.put(
            "sus_response",
            {
                "id": record_id,
                "responses": list(body.responses),
                "score": score,
                "submitted_by": actor.id,
                "submitted_at": now,
            },
            None,
        )
        platform.store.append_audit(
            actor_id=actor.id, action="sus_recorded", entity_kind="sus_response",
            entity_id=record_id, timestamp=now, detail={"score": score},
        )
        return {"id": record_id, "score": score}

    @app.get("/audio/{attachment_id}")
    def audio(attachment_id: str, actor: User = require(None)) -> Response:
        meta = platform.store.get("audio", attachment_id)
        data = platform.store.get_blob(attachment_id)
        return Response(content=data, media_type=meta.payload["content_type"])

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
