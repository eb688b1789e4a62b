"""Polynomial ring contexts with a fixed variable priority.

Every ring is a flint ``fmpq_mpoly`` context with graded lexicographic order.
Variables are ordered by the registry below first, fresh names after it in
sorted order, so the same set of names always gives the same context and the
same canonical term order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

import flint

REGISTRY: tuple[str, ...] = (
    "z", "t", "q", "a", "theta", "theta0", "thetainf", "d", "eps1", "eps2",
    "alpha", "beta", "a1", "a2", "b1", "b2", "e", "c1", "c2",
    "l1", "l2", "l3", "l4", "x1", "x2", "x3", "lam",
)
_RANK = {name: k for k, name in enumerate(REGISTRY)}

# display spellings accepted by the parser
ALIASES: dict[str, str] = {
    "θ": "theta", "θ0": "theta0", "θ∞": "thetainf", "ε1": "eps1", "ε2": "eps2",
    "α": "alpha", "β": "beta", "λ": "lam",
    "ℓ1": "l1", "ℓ2": "l2", "ℓ3": "l3", "ℓ4": "l4",
}

RESERVED = frozenset({"i"})


def _key(name: str):
    r = _RANK.get(name)
    return (0, r, "") if r is not None else (1, 0, name)


def check_name(name: str) -> str:
    if name in RESERVED:
        raise ValueError(f"'{name}' is reserved for the imaginary unit")
    if not name.isidentifier():
        raise ValueError(f"invalid indeterminate name {name!r}")
    return name


def ordered(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=_key))


@lru_cache(maxsize=None)
def context(names: tuple[str, ...]) -> flint.fmpq_mpoly_ctx:
    """Context for exactly ``names`` (which must already be in canonical order)."""
    return flint.fmpq_mpoly_ctx.get(names, "deglex")


def context_for(names: Iterable[str]) -> flint.fmpq_mpoly_ctx:
    return context(ordered(check_name(n) for n in names))


def union(c1: flint.fmpq_mpoly_ctx, c2: flint.fmpq_mpoly_ctx) -> flint.fmpq_mpoly_ctx:
    if c1 is c2:
        return c1
    n1, n2 = c1.names(), c2.names()
    if n1 == n2:
        return c1
    if set(n2) <= set(n1):
        return c1
    if set(n1) <= set(n2):
        return c2
    return context(ordered(n1 + n2))


EMPTY = context(())
