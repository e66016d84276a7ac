"""Wires one data directory into a working platform instance.

Configuration comes from keyword arguments; the CLI and API read their
values from flags and environment variables (CORPUSFORGE_DATA_DIR,
CORPUSFORGE_PAYOUT_TOEA, CORPUSFORGE_LEASE_SECONDS, CORPUSFORGE_BIND).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .analytics import AnalyticsService
from .clock import system_clock
from .ledger import DEFAULT_RATE_TOEA, LedgerService
from .store import DocumentStore
from .workflow import DEFAULT_LEASE_SECONDS, WorkflowService

ENV_DATA_DIR = "CORPUSFORGE_DATA_DIR"
ENV_PAYOUT = "CORPUSFORGE_PAYOUT_TOEA"
ENV_LEASE = "CORPUSFORGE_LEASE_SECONDS"
ENV_BIND = "CORPUSFORGE_BIND"


@dataclass
class Platform:
    store: DocumentStore
    ledger: LedgerService
    workflow: WorkflowService
    analytics: AnalyticsService

    def close(self) -> None:
        self.store.close()


def open_platform(
    data_dir: str | Path,
    *,
    payout_toea: int = DEFAULT_RATE_TOEA,
    lease_seconds: int = DEFAULT_LEASE_SECONDS,
    clock: Callable[[], int] = system_clock,
    id_source: Callable[[], str] | None = None,
    sync: bool = True,
) -> Platform:
    store = DocumentStore(data_dir, sync=sync)
    ledger = LedgerService(store, clock=clock, rate_toea=payout_toea)
    workflow = WorkflowService(
        store, ledger, clock=clock, id_source=id_source, lease_seconds=lease_seconds
    )
    return Platform(store=store, ledger=ledger, workflow=workflow,
                    analytics=AnalyticsService(store))


def open_platform_from_env(data_dir: str | Path | None = None, **overrides) -> Platform:
    data_dir = data_dir or os.environ.get(ENV_DATA_DIR, "./corpusforge-data")
    kwargs = dict(
        payout_toea=int(os.environ.get(ENV_PAYOUT, DEFAULT_RATE_TOEA)),
        lease_seconds=int(os.environ.get(ENV_LEASE, DEFAULT_LEASE_SECONDS)),
    )
    kwargs.update(overrides)
    return open_platform(data_dir, **kwargs)
