"""Derivations: d/dt extended to dependent generators through a declared flow."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import rings
from .ratfun import RatFun


@dataclass(frozen=True)
class DerivationSpec:
    """``D(wrt) = 1``, ``D(x) = images[x]`` and ``D(c) = 0`` for ``c`` in ``constants``."""

    wrt: str
    images: Mapping[str, RatFun] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()

    def __post_init__(self):
        images = {rings.ALIASES.get(k, k): RatFun.coerce(v) for k, v in self.images.items()}
        consts = frozenset(rings.ALIASES.get(c, c) for c in self.constants)
        if self.wrt in images or self.wrt in consts:
            raise ValueError(f"{self.wrt} assigned twice")
        clash = set(images) & consts
        if clash:
            raise ValueError(f"indeterminates assigned twice: {sorted(clash)}")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "constants", consts)

    def covered(self) -> set[str]:
        return {self.wrt, *self.images, *self.constants}

    def with_constants(self, *names: str) -> "DerivationSpec":
        return DerivationSpec(self.wrt, self.images, self.constants | frozenset(names))

    def __call__(self, f) -> RatFun:
        return apply_derivation(self, f)


def apply_derivation(D: DerivationSpec, f) -> RatFun:
    f = RatFun.coerce(f)
    free = f.free_symbols()
    missing = free - D.covered()
    if missing:
        raise ValueError(f"derivation does not cover indeterminate(s) {sorted(missing)}")
    out = RatFun.constant(0, f.context)
    if D.wrt in free:
        out = out + f.diff(D.wrt)
    for name, image in D.images.items():
        if name in free:
            out = out + f.diff(name) * image
    return out
