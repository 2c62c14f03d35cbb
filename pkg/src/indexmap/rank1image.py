"""Closed-form image of ``p -> Ind_p(a)`` for a single rational ``a``.

The image is all positive integers except up to four exceptional
families determined by the canonical decomposition of ``a``:

* odd integers (``a`` a square, up to a positive sign),
* odd multiples of ``|T|``,
* odd multiples of ``2|T|``,
* multiples of ``2^m |T| / 3`` that are prime to 3 (``a`` a cube, ``3 | T``).

Each family is a union of residue classes, so the image is periodic and
is reported as an ``ImageDescriptor`` (modulus plus allowed residues).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .ratmul import CanonicalDecomposition, canonical_decompose, is_cube


@dataclass(frozen=True)
class ExceptionalSet:
    """Residue-class family ``{h : h = r (mod M) for r in residues}``."""

    kind: str
    modulus: int
    residues: tuple
    generator: int  # the defining quantity: |T|, 2|T| or 2^m|T|/3 (1 for squares)

    def __contains__(self, h: int) -> bool:
        return h % self.modulus in self.residues

    def to_json(self) -> dict:
        return {"kind": self.kind, "modulus": self.modulus,
                "residues": list(self.residues), "generator": self.generator}


@dataclass(frozen=True)
class ExceptionalSets:
    decomposition: CanonicalDecomposition
    e_square: ExceptionalSet | None = None
    e_T: ExceptionalSet | None = None
    e_2T: ExceptionalSet | None = None
    e_3T: ExceptionalSet | None = None
    m: int | None = None

    @property
    def present(self) -> list:
        return [s for s in (self.e_square, self.e_T, self.e_2T, self.e_3T) if s is not None]

    def __contains__(self, h: int) -> bool:
        return any(h in s for s in self.present)


def cube_exponent_m(c: CanonicalDecomposition) -> int:
    eps, delta, d = c.epsilon, c.delta, c.d
    if eps == 0 and delta == 0:
        return d + 1
    if eps == 0 and delta == 1:
        return max(d + 1, 3)
    if eps == 1 and delta == 0:
        return d + 2
    if d != 1:
        return max(d + 2, 3)
    return 2


def exceptional_sets(a) -> ExceptionalSets:
    c = canonical_decompose(a)
    t = abs(c.T)
    e_sq = e_t = e_2t = e_3t = None
    if c.d >= 1 and c.epsilon == 0:
        e_sq = ExceptionalSet("square", 2, (1,), 1)
    if c.d == c.delta == c.epsilon == 0:
        e_t = ExceptionalSet("T", 2 * t, (t,), t)
    if c.d == c.delta == c.epsilon == 1:
        e_2t = ExceptionalSet("2T", 4 * t, (2 * t,), 2 * t)
    m = None
    if is_cube(c.a) and t % 3 == 0:
        m = cube_exponent_m(c)
        k = 2 ** m * t // 3
        e_3t = ExceptionalSet("3T", 3 * k, (k, 2 * k), k)
    return ExceptionalSets(c, e_sq, e_t, e_2t, e_3t, m)


def in_image(a, h: int, sets: ExceptionalSets | None = None) -> bool:
    """Whether ``h`` is ``Ind_p(a)`` for some odd prime ``p`` with ``v_p(a) = 0``."""
    if h < 1:
        raise ValueError("h must be a positive integer")
    sets = sets or exceptional_sets(a)
    return h not in sets


@dataclass(frozen=True)
class ImageDescriptor:
    a: Fraction
    modulus: int
    allowed_residues: tuple
    source: ExceptionalSets

    def __contains__(self, h: int) -> bool:
        return h % self.modulus in self.allowed_residues

    def to_json(self) -> dict:
        return {
            "a": str(self.a),
            "sets": [s.to_json() for s in self.source.present],
            "M": self.modulus,
            "allowed_residues": list(self.allowed_residues),
        }


def image_descriptor(a) -> ImageDescriptor:
    """Least modulus ``M`` with the image a union of classes mod ``M``."""
    sets = exceptional_sets(a)
    L = 1
    for s in sets.present:
        L = lcm(L, s.modulus)
    pattern = [r not in sets for r in range(L)]  # r = 0 stands for h = L
    M = next(M for M in _divisors(L)
             if all(pattern[r] == pattern[r % M] for r in range(L)))
    allowed = tuple(r for r in range(M) if pattern[r])
    return ImageDescriptor(sets.decomposition.a, M, allowed, sets)


def _divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]
