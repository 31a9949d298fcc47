"""Freely reduced words in a finitely generated free group.

A word is a tuple of nonzero ints.  Letter ``+k`` is the generator with
0-based index ``k-1``, letter ``-k`` its inverse.  The empty tuple is the
identity.  All functions return freely reduced words; all values are
immutable and hashable, so words can be used as dict keys and shared
freely between threads.

Generator names live at the presentation level (see ``presentations``);
words themselves are name-free, so the same word value makes sense in any
context with enough generators.  Rank checks happen where ranks are
declared.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

Word = tuple  # tuple[int, ...]

EMPTY: Word = ()

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def reduce(letters: Iterable[int]) -> Word:
    """Freely reduce a letter sequence.  Idempotent."""
    out: list[int] = []
    for x in letters:
        if not isinstance(x, int) or x == 0:
            raise ValueError(f"bad letter {x!r}: letters are nonzero ints")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(u: Word, v: Word) -> Word:
    """Product of two reduced words (cancellation only at the junction)."""
    out = list(u)
    for x in v:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert(u: Word) -> Word:
    return tuple(-x for x in reversed(u))


def conjugate(u: Word, w: Word) -> Word:
    """w * u * w^-1."""
    return multiply(multiply(w, u), invert(w))


def commutator(u: Word, v: Word) -> Word:
    """u * v * u^-1 * v^-1."""
    return multiply(multiply(u, v), multiply(invert(u), invert(v)))


def power(u: Word, k: int) -> Word:
    if k < 0:
        return power(invert(u), -k)
    out: Word = EMPTY
    for _ in range(k):
        out = multiply(out, u)
    return out


def exponent_sum(u: Word, gen) -> int:
    """Signed count of occurrences of a generator (0-based index or a
    positional generator handle with an .index)."""
    target = getattr(gen, "index", gen) + 1
    return sum(1 if x == target else -1 for x in u if abs(x) == target)


def max_index(u: Word) -> int:
    """Largest 0-based generator index occurring in u, or -1 for the identity."""
    return max((abs(x) for x in u), default=0) - 1


def substitute(u: Word, images: Mapping[int, Word]) -> Word:
    """Homomorphic extension of a generator map (0-based index -> word).

    Raises ValueError when a generator occurring in u has no image.
    """
    out: list[int] = []
    for x in u:
        idx = abs(x) - 1
        try:
            img = images[idx]
        except KeyError:
            raise ValueError(f"no image for generator index {idx}") from None
        if x < 0:
            img = invert(img)
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def identity_images(rank: int) -> list[Word]:
    return [(i + 1,) for i in range(rank)]


def compose_nielsen(steps: Sequence[tuple], rank: int) -> list[Word]:
    """Images of the automorphism given by a sequence of Nielsen steps.

    Steps are ("inv", i) or ("mul", i, j, "left"|"right") with 0-based
    indices; ("mul", i, j, "right") is g_i -> g_i g_j.  The composite is
    applied left to right.
    """
    imgs = identity_images(rank)
    for step in steps:
        if step[0] == "inv":
            _, i = step
            step_map = {k: ((-(i + 1),) if k == i else (k + 1,)) for k in range(rank)}
        elif step[0] == "mul":
            _, i, j, side = step
            if i == j:
                raise ValueError("Nielsen multiplication needs distinct generators")
            img = (i + 1, j + 1) if side == "right" else (j + 1, i + 1)
            step_map = {k: (img if k == i else (k + 1,)) for k in range(rank)}
        else:
            raise ValueError(f"unknown Nielsen step {step!r}")
        imgs = [substitute(w, step_map) for w in imgs]
    return imgs


# Deterministic letter order: generator index ascending, positive sign first.

def letter_key(x: int) -> tuple:
    return (abs(x), x < 0)


def word_key(u: Word) -> tuple:
    """Total order on words: by length, then letterwise."""
    return (len(u), tuple(letter_key(x) for x in u))


def cyclically_reduce(u: Word) -> Word:
    while len(u) > 1 and u[0] == -u[-1]:
        u = u[1:-1]
    return u


def cyclic_canonical(u: Word) -> Word:
    """Canonical representative of the conjugacy-and-inversion class.

    Cyclically reduces, then takes the least rotation of the result or of
    its inverse under the letter order above.  Two words get equal outputs
    exactly when they are conjugate up to inversion.
    """
    u = cyclically_reduce(u)
    if not u:
        return u
    best = None
    best_key = None
    for cand in (u, invert(u)):
        doubled = cand + cand
        for r in range(len(cand)):
            rot = doubled[r:r + len(cand)]
            key = tuple(letter_key(x) for x in rot)
            if best_key is None or key < best_key:
                best, best_key = rot, key
    return best


# ---------------------------------------------------------------------------
# Text grammar: whitespace-separated tokens `name` or `name^k`, `1` = identity.

def parse_word(text: str, names: Sequence[str]) -> Word:
    index = {name: i for i, name in enumerate(names)}
    out: list[int] = []
    for token in text.split():
        if token == "1":
            continue
        base, caret, exp = token.partition("^")
        if base not in index:
            raise ValueError(f"unknown generator {base!r} in word {text!r}")
        if caret:
            try:
                k = int(exp)
            except ValueError:
                raise ValueError(f"bad exponent in token {token!r}") from None
            if k == 0:
                raise ValueError(f"zero exponent in token {token!r}")
        else:
            k = 1
        letter = index[base] + 1 if k > 0 else -(index[base] + 1)
        for _ in range(abs(k)):
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
    return tuple(out)


def format_word(u: Word, names: Sequence[str]) -> str:
    if not u:
        return "1"
    parts = []
    i = 0
    while i < len(u):
        j = i
        while j < len(u) and u[j] == u[i]:
            j += 1
        idx = abs(u[i]) - 1
        if idx >= len(names):
            raise ValueError(f"letter {u[i]} outside the naming context")
        k = (j - i) if u[i] > 0 else -(j - i)
        parts.append(names[idx] if k == 1 else f"{names[idx]}^{k}")
        i = j
    return " ".join(parts)


def valid_name(name: str) -> bool:
    return bool(NAME_RE.match(name)) and name != "1"
