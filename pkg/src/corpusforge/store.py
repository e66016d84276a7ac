"""File-backed versioned document store with optimistic concurrency.

On-disk layout under the data directory:

    <kind>/<id>.json    one self-describing JSON document per record
    audit.log           append-only JSONL audit events
    ledger.log          append-only JSONL ledger entries
    blobs/<id>          opaque binary payloads (audio)

Records are written via temp-file + atomic rename so a reader (or a
restart) sees either the old or the new document, never a torn one.
All records are mirrored in memory; disk is the durability layer and
reads are served from the mirror. One store instance owns a data
directory (single process, many threads).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

from .domain import AuditEvent, PlatformError


class NotFoundError(PlatformError):
    code = "not_found"


class VersionConflictError(PlatformError):
    code = "version_conflict"


class DuplicateIdError(PlatformError):
    code = "duplicate_id"


@dataclass(frozen=True)
class VersionedRecord:
    payload: dict[str, Any]
    version: int


class AppendLog:
    """Append-only JSONL file with a strictly increasing `seq` per line."""

    def __init__(self, path: Path, *, sync: bool = True):
        self._path = path
        self._sync = sync
        self._lock = threading.Lock()
        self._entries: list[dict[str, Any]] = []
        if path.exists():
            with path.open("r", encoding="utf-8") as f:
                lines = [ln.strip() for ln in f if ln.strip()]
            for i, line in enumerate(lines):
                try:
                    self._entries.append(json.loads(line))
                except json.JSONDecodeError:
                    if i == len(lines) - 1:
                        break  # torn final line from an interrupted append
                    raise
        self._fh = path.open("a", encoding="utf-8")

    def append(self, entry: dict[str, Any]) -> dict[str, Any]:
        """Assign the next seq, persist, and return the completed entry."""
        with self._lock:
            entry = dict(entry)
            entry["seq"] = len(self._entries) + 1
            self._fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self._fh.flush()
            if self._sync:
                os.fsync(self._fh.fileno())
            self._entries.append(entry)
            return entry

    def all(self) -> list[dict[str, Any]]:
        with self._lock:
            return list(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def close(self) -> None:
        self._fh.close()


class DocumentStore:
    """Versioned whole-document put/get/query plus the audit log and blobs."""

    def __init__(self, root: str | Path, *, sync: bool = True):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sync = sync
        self._lock = threading.RLock()
        self._kind_dirs: set[str] = set()
        # kind -> id -> (version, payload)
        self._records: dict[str, dict[str, tuple[int, dict[str, Any]]]] = {}
        self._load()
        (self.root / "blobs").mkdir(exist_ok=True)
        self.audit_log = AppendLog(self.root / "audit.log", sync=sync)

    def _load(self) -> None:
        for kind_dir in sorted(self.root.iterdir()) if self.root.exists() else []:
            if not kind_dir.is_dir() or kind_dir.name == "blobs":
                continue
            kind = kind_dir.name
            for doc_path in kind_dir.glob("*.json"):
                with doc_path.open("r", encoding="utf-8") as f:
                    doc = json.load(f)
                self._records.setdefault(kind, {})[doc["id"]] = (doc["version"], doc["payload"])

    def _write_doc(self, kind: str, record_id: str, version: int, payload: dict[str, Any]) -> None:
        kind_dir = self.root / kind
        if kind not in self._kind_dirs:
            kind_dir.mkdir(exist_ok=True)
            self._kind_dirs.add(kind)
        doc = {"kind": kind, "id": record_id, "version": version, "payload": payload}
        final = kind_dir / f"{record_id}.json"
        tmp = kind_dir / f"{record_id}.json.tmp"
        with tmp.open("w", encoding="utf-8") as f:
            f.write(json.dumps(doc, ensure_ascii=False))
            if self._sync:
                f.flush()
                os.fsync(f.fileno())
        os.replace(tmp, final)

    def put(self, kind: str, payload: dict[str, Any], expected_version: int | None) -> int:
        """Persist a record; expected_version None creates, else must match.

        Returns the new version. The payload must carry an "id" field.
        """
        record_id = payload.get("id")
        if not record_id:
            raise ValueError("payload must carry a non-empty 'id'")
        with self._lock:
            kind_records = self._records.setdefault(kind, {})
            current = kind_records.get(record_id)
            if expected_version is None:
                if current is not None:
                    raise DuplicateIdError(f"{kind}/{record_id} already exists")
                new_version = 1
            else:
                if current is None:
                    raise NotFoundError(f"{kind}/{record_id} does not exist")
                if current[0] != expected_version:
                    raise VersionConflictError(
                        f"{kind}/{record_id}: expected version {expected_version}, have {current[0]}"
                    )
                new_version = expected_version + 1
            payload = dict(payload)
            self._write_doc(kind, record_id, new_version, payload)
            kind_records[record_id] = (new_version, payload)
            return new_version

    def get(self, kind: str, record_id: str) -> VersionedRecord:
        with self._lock:
            current = self._records.get(kind, {}).get(record_id)
        if current is None:
            raise NotFoundError(f"{kind}/{record_id} not found")
        return VersionedRecord(payload=current[1], version=current[0])

    def exists(self, kind: str, record_id: str) -> bool:
        with self._lock:
            return record_id in self._records.get(kind, {})

    def query(
        self,
        kind: str,
        where: dict[str, Any] | None = None,
        *,
        predicate: Callable[[dict[str, Any]], bool] | None = None,
        offset: int = 0,
        limit: int | None = None,
    ) -> list[VersionedRecord]:
        """Records of a kind matching all field equalities, id-ascending.

        `limit`, when given, must be >= 1; offset/limit paginate the ordered
        result. `predicate` is an extra in-process filter over payloads.
        """
        if limit is not None and limit < 1:
            raise ValueError("limit must be >= 1")
        with self._lock:
            items = list(self._records.get(kind, {}).items())
        rows = []
        if where and len(where) == 1:
            [(wk, wv)] = where.items()
            for record_id, (version, payload) in items:
                if payload.get(wk) != wv or (predicate and not predicate(payload)):
                    continue
                rows.append((record_id, version, payload))
        else:
            for record_id, (version, payload) in items:
                if where and any(payload.get(k) != v for k, v in where.items()):
                    continue
                if predicate and not predicate(payload):
                    continue
                rows.append((record_id, version, payload))
        rows.sort(key=lambda r: r[0])
        if limit is not None:
            rows = rows[offset : offset + limit]
        elif offset:
            rows = rows[offset:]
        return [VersionedRecord(payload=p, version=v) for _, v, p in rows]

    def count(self, kind: str, where: dict[str, Any] | None = None) -> int:
        return len(self.query(kind, where))

    # -- audit -------------------------------------------------------------

    def append_audit(self, *, actor_id: str, action: str, entity_kind: str,
                     entity_id: str, timestamp: int,
                     detail: dict[str, Any] | None = None) -> AuditEvent:
        entry = self.audit_log.append(
            {
                "actor_id": actor_id,
                "action": action,
                "entity_kind": entity_kind,
                "entity_id": entity_id,
                "timestamp": timestamp,
                "detail": detail or {},
            }
        )
        return AuditEvent.from_doc(entry)

    def audit_events(self) -> list[AuditEvent]:
        return [AuditEvent.from_doc(e) for e in self.audit_log.all()]

    # -- blobs ---------------------------------------------------------------

    def put_blob(self, blob_id: str, data: bytes) -> str:
        """Store opaque bytes under blobs/<id>; returns the payload ref."""
        path = self.root / "blobs" / blob_id
        tmp = path.parent / (path.name + ".tmp")
        with tmp.open("wb") as f:
            f.write(data)
            if self._sync:
                f.flush()
                os.fsync(f.fileno())
        os.replace(tmp, path)
        return f"blobs/{blob_id}"

    def get_blob(self, blob_id: str) -> bytes:
        path = self.root / "blobs" / blob_id
        if not path.exists():
            raise NotFoundError(f"blob {blob_id} not found")
        return path.read_bytes()

    def open_log(self, name: str) -> AppendLog:
        """Open a named append-only log in this data directory (e.g. the ledger)."""
        return AppendLog(self.root / name, sync=self._sync)

    def kinds(self) -> Iterable[str]:
        with self._lock:
            return sorted(self._records.keys())

    def close(self) -> None:
        self.audit_log.close()
