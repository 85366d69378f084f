"""Global replacement pool: top-n% highest-frequency entities per type.

Ranking is per type, descending document frequency with ties broken by
ascending surface so the pool is reproducible across platforms. Types with
fewer than two entities are skipped (a 1-cycle swap is a no-op) and listed
on the pool for reporting.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field

from .errors import ValidationError
from .inventory import EntityInventory, TypedEntity

logger = logging.getLogger(__name__)


@dataclass
class GlobalPool:
    buckets: dict[str, list[TypedEntity]]
    budget_percent: float
    skipped_types: list[str] = field(default_factory=list)
    selection: str = "frequency"

    def all_entities(self) -> list[TypedEntity]:
        return [e for etype in sorted(self.buckets) for e in self.buckets[etype]]

    def size(self) -> int:
        return sum(len(b) for b in self.buckets.values())


def _bucket_size(member_count: int, n_percent: float) -> int:
    # round() guards float fuzz in products that should be exact (e.g. 100*5/100)
    return math.ceil(round(member_count * n_percent / 100.0, 9))


def _check_budget(n_percent: float) -> None:
    if not 0 <= n_percent <= 100:
        raise ValidationError(f"budget must be in [0, 100], got {n_percent}")


def build_global_pool(inventory: EntityInventory, n_percent: float) -> GlobalPool:
    _check_budget(n_percent)
    buckets: dict[str, list[TypedEntity]] = {}
    skipped: list[str] = []
    for etype in inventory.types():
        members = inventory.entities_of_type(etype)
        if len(members) < 2:
            logger.warning("type %s has %d entity; skipping", etype, len(members))
            skipped.append(etype)
            buckets[etype] = []
            continue
        k = _bucket_size(len(members), n_percent)
        ranked = sorted(members, key=lambda e: (-inventory.frequency(e), e.surface))
        buckets[etype] = ranked[:k]
    return GlobalPool(buckets=buckets, budget_percent=n_percent, skipped_types=skipped)


def build_random_pool(inventory: EntityInventory, n_percent: float, seed: int) -> GlobalPool:
    """Equal-budget uniform-random baseline used by attack comparisons."""
    _check_budget(n_percent)
    rng = random.Random(seed)
    buckets: dict[str, list[TypedEntity]] = {}
    skipped: list[str] = []
    for etype in inventory.types():
        members = inventory.entities_of_type(etype)
        if len(members) < 2:
            skipped.append(etype)
            buckets[etype] = []
            continue
        k = _bucket_size(len(members), n_percent)
        buckets[etype] = sorted(rng.sample(members, k))
    return GlobalPool(
        buckets=buckets,
        budget_percent=n_percent,
        skipped_types=skipped,
        selection="random",
    )
