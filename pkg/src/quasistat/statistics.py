"""Occupation configurations of indistinguishable particles over quantum states.

Each configuration is a vector of occupation numbers, one entry per state.
Bosons may pile up in a state; fermions occupy each state at most once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import LimitExceeded

BOSON = "boson"
FERMION = "fermion"
KINDS = (BOSON, FERMION)

ENUMERATION_LIMIT = 10**7


@dataclass(frozen=True)
class CountResult:
    value: int
    formula_used: str

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)


def _check_kind(kind: str):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def _check_args(nu: int, k: int):
    if nu < 0:
        raise ValueError(f"particle number must be non-negative, got {nu}")
    if k < 1:
        raise ValueError(f"state count must be at least 1, got {k}")


def count_bosons(nu: int, k: int) -> CountResult:
    """Ways to put ``nu`` indistinguishable bosons into ``k`` states.

    Equals ``(k + nu - 1)! / ((k - 1)! nu!)``; evaluated as an exact binomial
    so no factorial is ever formed.
    """
    _check_args(nu, k)
    return CountResult(math.comb(k + nu - 1, nu), BOSON)


def count_fermions(nu: int, k: int) -> CountResult:
    """Ways to put ``nu`` fermions into ``k`` states, at most one per state."""
    _check_args(nu, k)
    return CountResult(math.comb(k, nu), FERMION)


def count(nu: int, k: int, kind: str) -> CountResult:
    _check_kind(kind)
    return count_bosons(nu, k) if kind == BOSON else count_fermions(nu, k)


def total_microstates(bins: Iterable[tuple[int, int]], kind: str) -> CountResult:
    """Product of the per-bin counts for ``(nu_i, k_i)`` bins."""
    _check_kind(kind)
    return CountResult(math.prod(count(nu, k, kind).value for nu, k in bins), kind)


def _occupations(nu: int, k: int, cap: int) -> Iterator[tuple[int, ...]]:
    # reverse-lexicographic: larger leading entries first
    if k == 1:
        if nu <= cap:
            yield (nu,)
        return
    for first in range(min(nu, cap), -1, -1):
        if nu - first > cap * (k - 1):
            break
        for tail in _occupations(nu - first, k - 1, cap):
            yield (first,) + tail


def iter_enumerate(nu: int, k: int, kind: str) -> Iterator[tuple[int, ...]]:
    _check_kind(kind)
    _check_args(nu, k)
    yield from _occupations(nu, k, nu if kind == BOSON else 1)


def enumerate_occupations(nu: int, k: int, kind: str,
                          limit: int = ENUMERATION_LIMIT) -> list[tuple[int, ...]]:
    """Every occupation vector of ``nu`` particles over ``k`` states.

    Vectors come in reverse-lexicographic order, so ``(nu, 0, ..., 0)`` is
    first. Fermions with ``nu > k`` give an empty list.

    Raises
    ------
    LimitExceeded
        If the number of vectors would exceed ``limit``.
    """
    n = count(nu, k, kind).value
    if n > limit:
        raise LimitExceeded(f"{n} configurations exceed the enumeration limit {limit}")
    return list(iter_enumerate(nu, k, kind))
