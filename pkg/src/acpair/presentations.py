"""Group presentations viewed as 2-complexes with a wedge-of-circles skeleton.

A presentation is an ordered generator tuple plus an ordered relator list.
The generator order is the identification of the 1-skeleton with the
ordered wedge of circles, so two presentations share a boundary exactly
when they have the same rank; generator names are display metadata and
carry no semantics (generator identity is positional).

Equality in the move-equivalence sense is handled in three regimes
elsewhere: the cheap canonical key below (sound, incomplete: it quotients
only by relator conjugation, inversion and reordering), certificate
replay, and bounded search.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import homology
from .words import (EMPTY, Word, cyclic_canonical, format_word, invert,
                    multiply, parse_word, reduce, substitute, valid_name,
                    word_key, compose_nielsen, exponent_sum)


class Generator(tuple):
    """Positional generator handle: (index, name)."""

    __slots__ = ()

    def __new__(cls, index, name):
        return super().__new__(cls, (index, name))

    @property
    def index(self):
        return self[0]

    @property
    def name(self):
        return self[1]


@dataclass(frozen=True)
class Presentation:
    gens: tuple  # tuple[str, ...]
    relators: tuple  # tuple[Word, ...]

    def __post_init__(self):
        gens = tuple(self.gens)
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be unique")
        for name in gens:
            if not valid_name(name):
                raise ValueError(f"invalid generator name {name!r}")
        rels = tuple(reduce(r) for r in self.relators)
        for r in rels:
            if any(abs(x) > len(gens) for x in r):
                raise ValueError(f"relator {r} uses a generator outside the context")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "relators", rels)

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def generators(self) -> tuple:
        return tuple(Generator(i, n) for i, n in enumerate(self.gens))

    def __str__(self):
        return format_presentation(self)


@dataclass(frozen=True)
class CanonicalKey:
    rank: int
    classes: tuple  # tuple[Word, ...], sorted canonical forms

    def sort_key(self):
        return (self.rank, len(self.classes), tuple(word_key(w) for w in self.classes))


@dataclass(frozen=True)
class ClosedComplex:
    components: tuple  # tuple[CanonicalKey, ...], sorted multiset

    def sort_key(self):
        return tuple(k.sort_key() for k in self.components)


EMPTY_COMPLEX = ClosedComplex(())


@lru_cache(maxsize=1 << 16)
def canonical_key(p: Presentation) -> CanonicalKey:
    classes = sorted((cyclic_canonical(r) for r in p.relators), key=word_key)
    return CanonicalKey(p.rank, tuple(classes))


def serialize_key(key: CanonicalKey) -> str:
    """Rank plus one canonical word per line, with positional names g1..gn."""
    names = [f"g{i + 1}" for i in range(key.rank)]
    lines = [str(key.rank)]
    lines.extend(format_word(w, names) for w in key.classes)
    return "\n".join(lines)


def euler_char(p: Presentation) -> int:
    return 1 - len(p.gens) + len(p.relators)


def product(p: Presentation, q: Presentation) -> Presentation:
    """Union along the common boundary wedge: same rank, relators concatenate.

    Boundary identification is positional; the first factor's names win.
    """
    if p.rank != q.rank:
        raise ValueError(f"boundary mismatch: ranks {p.rank} and {q.rank}")
    return Presentation(p.gens, p.relators + q.relators)


def unit_presentation(rank: int, names=None) -> Presentation:
    if names is None:
        names = tuple(f"g{i + 1}" for i in range(rank))
    return Presentation(tuple(names), ())


def wedge_s2(p: Presentation, count: int) -> Presentation:
    if count < 0:
        raise ValueError("count must be nonnegative")
    return Presentation(p.gens, p.relators + (EMPTY,) * count)


def fresh_name(taken, position: int) -> str:
    base = f"g{position + 1}"
    if base not in taken:
        return base
    k = 2
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def wedge_s1(p: Presentation, count: int) -> Presentation:
    if count < 0:
        raise ValueError("count must be nonnegative")
    gens = list(p.gens)
    for _ in range(count):
        gens.append(fresh_name(set(gens), len(gens)))
    return Presentation(tuple(gens), p.relators)


def apply_automorphism(p: Presentation, images, nielsen_steps) -> Presentation:
    """Act on relators by a free-group automorphism.

    `images` maps each generator index to its image word; the caller must
    certify the map by supplying a Nielsen decomposition, which is replayed
    and compared against the claimed images.  Recognizing automorphisms is
    not attempted.
    """
    if isinstance(images, dict):
        image_list = [images[i] for i in range(p.rank)]
    else:
        image_list = list(images)
    if len(image_list) != p.rank:
        raise ValueError("need one image per generator")
    composed = compose_nielsen(nielsen_steps, p.rank)
    if [reduce(w) for w in image_list] != composed:
        raise ValueError("images not certified by the supplied Nielsen decomposition")
    mapping = {i: w for i, w in enumerate(image_list)}
    return Presentation(p.gens, tuple(substitute(r, mapping) for r in p.relators))


def forget_boundary(p: Presentation) -> ClosedComplex:
    """The closed complex obtained by dropping the boundary identification.

    This reuses the canonical key and therefore under-approximates equality
    of closed complexes: it does not quotient by moves that change the
    1-skeleton.  Equal values mean equal; distinct values claim nothing.
    """
    return ClosedComplex((canonical_key(p),))


def disjoint_union(c: ClosedComplex, d: ClosedComplex) -> ClosedComplex:
    comps = sorted(c.components + d.components, key=lambda k: k.sort_key())
    return ClosedComplex(tuple(comps))


def abelianization(p: Presentation) -> homology.AbelianGroup:
    """Invariant factors plus free rank of the relator exponent matrix.

    Cheap move-invariant "same group" oracle: preserved by every legal
    move script.
    """
    matrix = [[exponent_sum(r, g) for g in range(p.rank)] for r in p.relators]
    return homology.cokernel_invariants(matrix, p.rank)


# ---------------------------------------------------------------------------
# Text format:
#   gens: r s t
#   rel: s^2 t^-3
#   rel: r^2 s^3 = s^3 r^2      (a = b becomes the relator a b^-1)
# Comments start with '#'.


def parse_relator_text(text: str, names) -> Word:
    left, eq, right = text.partition("=")
    w = parse_word(left, names)
    if eq:
        if "=" in right:
            raise ValueError(f"more than one '=' in relation {text!r}")
        w = multiply(w, invert(parse_word(right, names)))
    return w


def parse_presentation(text: str) -> Presentation:
    gens = None
    relators = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, colon, rest = line.partition(":")
        if not colon:
            raise ValueError(f"line {lineno}: expected 'gens:' or 'rel:'")
        head = head.strip()
        rest = rest.strip()
        if head == "gens":
            if gens is not None:
                raise ValueError(f"line {lineno}: duplicate gens line")
            gens = tuple(rest.split())
        elif head == "rel":
            if gens is None:
                raise ValueError(f"line {lineno}: rel before gens")
            relators.append(parse_relator_text(rest, gens))
        else:
            raise ValueError(f"line {lineno}: unknown directive {head!r}")
    if gens is None:
        raise ValueError("missing gens line")
    return Presentation(gens, tuple(relators))


def format_presentation(p: Presentation) -> str:
    lines = ["gens: " + " ".join(p.gens)]
    lines.extend("rel: " + format_word(r, p.gens) for r in p.relators)
    return "\n".join(lines) + "\n"


def make_presentation(gens, relator_texts=()) -> Presentation:
    """Convenience constructor from 'x y' and relator strings."""
    names = tuple(gens.split()) if isinstance(gens, str) else tuple(gens)
    return Presentation(names, tuple(parse_relator_text(t, names) for t in relator_texts))
