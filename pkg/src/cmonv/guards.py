"""Desk-scale dimension guard: refuse constructions that would thrash."""

from __future__ import annotations

import os

DEFAULT_GUARD = 4096


class DimensionGuardError(RuntimeError):
    pass


def effective_guard(guard=None):
    if guard is not None:
        return guard
    env = os.environ.get("CMONV_GUARD")
    if env:
        return int(env)
    return DEFAULT_GUARD


def check_guard(size, what, guard=None):
    limit = effective_guard(guard)
    if size > limit:
        raise DimensionGuardError(
            f"{what} needs degreewise dimension {size} > guard {limit}")
    return size
