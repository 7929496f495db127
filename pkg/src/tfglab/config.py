"""Explicit budgets with hard defaults.

Budgets are plain data passed down from the CLI; modules never read the
environment themselves (the CLI resolves TFGLAB_* overrides once).
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Budgets:
    ball_limit: int = 1_000_000          # max elements in a word-length ball
    window_limit: int = 100_000_000      # max materialized symbols per source
    family_limit: int = 2_000_000        # max |P_j| materialized per jlp level
    workers: int = 1                     # hint only; kernels are deterministic

    def __post_init__(self):
        if self.ball_limit <= 0 or self.window_limit <= 0 or self.family_limit <= 0:
            raise ValueError("budgets must be positive")


def budgets_from_env(base: Budgets | None = None) -> Budgets:
    """Apply TFGLAB_BALL_LIMIT / TFGLAB_WINDOW_LIMIT / TFGLAB_FAMILY_LIMIT overrides."""
    base = base or Budgets()
    def _get(name, default):
        raw = os.environ.get(name)
        return int(raw) if raw else default
    return Budgets(
        ball_limit=_get("TFGLAB_BALL_LIMIT", base.ball_limit),
        window_limit=_get("TFGLAB_WINDOW_LIMIT", base.window_limit),
        family_limit=_get("TFGLAB_FAMILY_LIMIT", base.family_limit),
        workers=base.workers,
    )


DEFAULT_BUDGETS = Budgets()
