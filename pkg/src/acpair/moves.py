"""Elementary moves on presentations, replayable scripts, and bounded search.

Move semantics
--------------
ConjRel(j, w)          relator_j -> w relator_j w^-1
InvRel(j)              relator_j -> relator_j^-1
SlideRel(j, k, side)   relator_j -> relator_k relator_j (left) or
                       relator_j relator_k (right), k != j
NielsenInv(i)          declared generator map g_i -> g_i^-1; the inverse map
                       (itself) is substituted through all relators
NielsenMul(i, j, side) declared map g_i -> g_i g_j (right) / g_j g_i (left);
                       the inverse map is substituted through all relators
AddGen(name)           append a generator AND a relator equal to it
RemoveGen(i)           strict inverse: some relator is exactly g_i^+-1 and
                       g_i occurs nowhere else
AddTrivialRel          append the empty relator
RemoveTrivialRel(j)    delete relator j, which must be empty
RestrictedSlide(j, fs) relator_j -> relator_j * prod w [relator_k^s, h] w^-1,
                       every factor with k != j (exponent-zero slides)

Scripts carry a regime: "full" permits everything; "k_prime" permits only
ConjRel, InvRel and RestrictedSlide, plus the trivial-relator moves when
the script is explicitly flagged as stabilized.  Indices are 0-based in
memory and 1-based in script files.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .presentations import Presentation, canonical_key, euler_char
from .words import (EMPTY, Word, commutator, conjugate, format_word, invert,
                    letter_key, multiply, parse_word, reduce, substitute,
                    valid_name)


class MoveError(ValueError):
    """An illegal move: bad index or violated precondition."""


class RegimeError(MoveError):
    """A move outside the script's declared regime."""


@dataclass(frozen=True)
class ConjRel:
    j: int
    w: Word


@dataclass(frozen=True)
class InvRel:
    j: int


@dataclass(frozen=True)
class SlideRel:
    j: int
    k: int
    side: str  # "left" | "right"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise MoveError(f"bad slide side {self.side!r}")
        if self.j == self.k:
            raise MoveError("cannot slide a relator over itself")


@dataclass(frozen=True)
class NielsenInv:
    i: int


@dataclass(frozen=True)
class NielsenMul:
    i: int
    j: int
    side: str

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise MoveError(f"bad Nielsen side {self.side!r}")
        if self.i == self.j:
            raise MoveError("Nielsen multiplication needs distinct generators")


@dataclass(frozen=True)
class AddGen:
    name: str


@dataclass(frozen=True)
class RemoveGen:
    i: int


@dataclass(frozen=True)
class AddTrivialRel:
    pass


@dataclass(frozen=True)
class RemoveTrivialRel:
    j: int


@dataclass(frozen=True)
class RSFactor:
    w: Word
    k: int
    sign: int
    h: Word

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MoveError(f"bad factor sign {self.sign}")


@dataclass(frozen=True)
class RestrictedSlide:
    j: int
    factors: tuple  # tuple[RSFactor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if f.k == self.j:
                raise MoveError(
                    f"restricted slide on relator {self.j} may not use relator {f.k}")


K_PRIME_MOVES = (ConjRel, InvRel, RestrictedSlide)
K_PRIME_STABILIZED_EXTRA = (AddTrivialRel, RemoveTrivialRel)


@dataclass(frozen=True)
class MoveScript:
    moves: tuple
    regime: str = "full"
    stabilized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        if self.regime not in ("full", "k_prime"):
            raise MoveError(f"unknown regime {self.regime!r}")

    def __len__(self):
        return len(self.moves)

    def __add__(self, other: "MoveScript") -> "MoveScript":
        if self.regime != other.regime:
            raise MoveError("cannot concatenate scripts of different regimes")
        return MoveScript(self.moves + other.moves, self.regime,
                          self.stabilized or other.stabilized)


def _check_rel(j: int, count: int):
    if not 0 <= j < count:
        raise MoveError(f"relator index {j} out of range (have {count})")


def _check_gen(i: int, rank: int):
    if not 0 <= i < rank:
        raise MoveError(f"generator index {i} out of range (have {rank})")


def _check_word(w: Word, rank: int):
    if any(abs(x) > rank for x in w):
        raise MoveError(f"word {w} uses a generator outside the context")


def _nielsen_substitution(move, rank: int) -> dict:
    """The map substituted through relators: the inverse of the declared map."""
    images = {k: (k + 1,) for k in range(rank)}
    if isinstance(move, NielsenInv):
        _check_gen(move.i, rank)
        images[move.i] = (-(move.i + 1),)
    else:
        _check_gen(move.i, rank)
        _check_gen(move.j, rank)
        if move.side == "right":  # declared g_i -> g_i g_j
            images[move.i] = (move.i + 1, -(move.j + 1))
        else:                      # declared g_i -> g_j g_i
            images[move.i] = (-(move.j + 1), move.i + 1)
    return images


def apply_move(p: Presentation, move) -> Presentation:
    rels = list(p.relators)
    rank = p.rank
    if isinstance(move, ConjRel):
        _check_rel(move.j, len(rels))
        _check_word(move.w, rank)
        rels[move.j] = conjugate(rels[move.j], move.w)
    elif isinstance(move, InvRel):
        _check_rel(move.j, len(rels))
        rels[move.j] = invert(rels[move.j])
    elif isinstance(move, SlideRel):
        _check_rel(move.j, len(rels))
        _check_rel(move.k, len(rels))
        if move.side == "left":
            rels[move.j] = multiply(rels[move.k], rels[move.j])
        else:
            rels[move.j] = multiply(rels[move.j], rels[move.k])
    elif isinstance(move, (NielsenInv, NielsenMul)):
        images = _nielsen_substitution(move, rank)
        rels = [substitute(r, images) for r in rels]
    elif isinstance(move, AddGen):
        if not valid_name(move.name):
            raise MoveError(f"invalid generator name {move.name!r}")
        if move.name in p.gens:
            raise MoveError(f"generator name {move.name!r} already in use")
        return Presentation(p.gens + (move.name,),
                            p.relators + ((rank + 1,),))
    elif isinstance(move, RemoveGen):
        _check_gen(move.i, rank)
        letter = move.i + 1
        hits = [idx for idx, r in enumerate(rels) if any(abs(x) == letter for x in r)]
        if len(hits) != 1 or rels[hits[0]] not in ((letter,), (-letter,)):
            raise MoveError(
                f"generator {move.i} is not removable: need exactly one relator, "
                f"equal to that generator or its inverse, and no other occurrence")
        del rels[hits[0]]
        rels = [tuple(x - 1 if x > letter else x + 1 if x < -letter else x for x in r)
                for r in rels]
        return Presentation(p.gens[:move.i] + p.gens[move.i + 1:], tuple(rels))
    elif isinstance(move, AddTrivialRel):
        rels.append(EMPTY)
    elif isinstance(move, RemoveTrivialRel):
        _check_rel(move.j, len(rels))
        if rels[move.j] != EMPTY:
            raise MoveError(f"relator {move.j} is not trivial")
        del rels[move.j]
    elif isinstance(move, RestrictedSlide):
        _check_rel(move.j, len(rels))
        word = rels[move.j]
        for f in move.factors:
            _check_rel(f.k, len(rels))
            _check_word(f.w, rank)
            _check_word(f.h, rank)
            base = rels[f.k] if f.sign > 0 else invert(rels[f.k])
            word = multiply(word, conjugate(commutator(base, f.h), f.w))
        rels[move.j] = word
    else:
        raise MoveError(f"unknown move {move!r}")
    return Presentation(p.gens, tuple(rels))


def _regime_allows(move, regime: str, stabilized: bool) -> bool:
    if regime == "full":
        return True
    if isinstance(move, K_PRIME_MOVES):
        return True
    return stabilized and isinstance(move, K_PRIME_STABILIZED_EXTRA)


def _counts_after(move, n: int, m: int) -> tuple:
    if isinstance(move, AddGen):
        return n + 1, m + 1
    if isinstance(move, RemoveGen):
        return n - 1, m - 1
    if isinstance(move, AddTrivialRel):
        return n, m + 1
    if isinstance(move, RemoveTrivialRel):
        return n, m - 1
    return n, m


def replay(p: Presentation, script: MoveScript) -> Presentation:
    """Left fold of apply_move with regime and bookkeeping checks."""
    current = p
    n, m = p.rank, len(p.relators)
    for pos, move in enumerate(script.moves, start=1):
        if not _regime_allows(move, script.regime, script.stabilized):
            raise RegimeError(
                f"move {pos} ({type(move).__name__}) violates the "
                f"{script.regime} regime")
        try:
            current = apply_move(current, move)
        except MoveError as e:
            raise MoveError(f"move {pos} ({type(move).__name__}): {e}") from None
        n, m = _counts_after(move, n, m)
        assert (current.rank, len(current.relators)) == (n, m), \
            f"bookkeeping drift at move {pos}"
        assert euler_char(current) == 1 - n + m
    return current


def expand_restricted_slides(script: MoveScript) -> MoveScript:
    """Rewrite every RestrictedSlide as conjugate/invert/slide composites.

    Each factor w [R_k^s, h] w^-1 becomes two conjugated slides with
    opposite exponents of relator k, so the slide ledger of the result is
    zero on every pair it touches.
    """
    out = []
    for move in script.moves:
        if not isinstance(move, RestrictedSlide):
            out.append(move)
            continue
        for f in move.factors:
            for conj_word, sign in ((f.w, f.sign), (multiply(f.w, f.h), -f.sign)):
                steps = []
                if conj_word != EMPTY:
                    steps.append(ConjRel(f.k, conj_word))
                if sign < 0:
                    steps.append(InvRel(f.k))
                steps.append(SlideRel(move.j, f.k, "right"))
                if sign < 0:
                    steps.append(InvRel(f.k))
                if conj_word != EMPTY:
                    steps.append(ConjRel(f.k, invert(conj_word)))
                out.extend(steps)
    return MoveScript(tuple(out), "full", script.stabilized)


_INVERTIBLE = (ConjRel, InvRel, SlideRel, NielsenInv, NielsenMul, RestrictedSlide)


def invert_moves(moves: Iterable) -> list:
    """Inverse move sequence for the structurally stable move kinds.

    Moves that change the relator or generator lists are rejected: their
    inverses are position-dependent.
    """
    out = []
    for move in reversed(list(moves)):
        if isinstance(move, ConjRel):
            out.append(ConjRel(move.j, invert(move.w)))
        elif isinstance(move, InvRel):
            out.append(move)
        elif isinstance(move, SlideRel):
            out.extend([InvRel(move.k), move, InvRel(move.k)])
        elif isinstance(move, NielsenInv):
            out.append(move)
        elif isinstance(move, NielsenMul):
            # Applied substitution of the declared move is g_i -> g_i g_j^-1
            # (right) resp. g_j^-1 g_i (left); conjugating by NielsenInv(j)
            # realizes the inverse substitution.
            out.extend([NielsenInv(move.j), move, NielsenInv(move.j)])
        elif isinstance(move, RestrictedSlide):
            inv_factors = tuple(
                RSFactor(multiply(f.w, f.h), f.k, f.sign, invert(f.h))
                for f in reversed(move.factors))
            out.append(RestrictedSlide(move.j, inv_factors))
        else:
            raise MoveError(f"cannot invert structural move {type(move).__name__}")
    return out


def invert_script(script: MoveScript) -> MoveScript:
    return MoveScript(tuple(invert_moves(script.moves)), script.regime,
                      script.stabilized)


def slide_exponent_ledger(script: MoveScript) -> dict:
    """Signed slide counts per (target, source) pair.

    Only ConjRel/InvRel/SlideRel scripts are accepted.  Each slide of
    relator j over relator k contributes the current inversion parity of
    relator k; a slide sequence is expressible with exponent-zero moves
    only if every ledger entry vanishes.
    """
    parity: dict = {}
    ledger: dict = {}
    for pos, move in enumerate(script.moves, start=1):
        if isinstance(move, ConjRel):
            continue
        if isinstance(move, InvRel):
            parity[move.j] = -parity.get(move.j, 1)
        elif isinstance(move, SlideRel):
            key = (move.j, move.k)
            ledger[key] = ledger.get(key, 0) + parity.get(move.k, 1)
        else:
            raise MoveError(
                f"move {pos} ({type(move).__name__}): ledger only covers "
                f"ConjRel/InvRel/SlideRel scripts")
    return ledger


# ---------------------------------------------------------------------------
# Script files.  JSON object {"regime": ..., "stabilized": ..., "moves": [...]};
# a bare array is accepted on input and treated as a full-regime script.
# Relator and generator indices are 1-based in files.


def _move_to_json(move, names: list) -> dict:
    if isinstance(move, ConjRel):
        return {"op": "ConjRel", "j": move.j + 1, "w": format_word(move.w, names)}
    if isinstance(move, InvRel):
        return {"op": "InvRel", "j": move.j + 1}
    if isinstance(move, SlideRel):
        return {"op": "SlideRel", "j": move.j + 1, "k": move.k + 1, "side": move.side}
    if isinstance(move, NielsenInv):
        return {"op": "NielsenInv", "i": move.i + 1}
    if isinstance(move, NielsenMul):
        return {"op": "NielsenMul", "i": move.i + 1, "j": move.j + 1, "side": move.side}
    if isinstance(move, AddGen):
        return {"op": "AddGen", "name": move.name}
    if isinstance(move, RemoveGen):
        return {"op": "RemoveGen", "i": move.i + 1}
    if isinstance(move, AddTrivialRel):
        return {"op": "AddTrivialRel"}
    if isinstance(move, RemoveTrivialRel):
        return {"op": "RemoveTrivialRel", "j": move.j + 1}
    if isinstance(move, RestrictedSlide):
        return {"op": "RestrictedSlide", "j": move.j + 1,
                "factors": [{"w": format_word(f.w, names), "k": f.k + 1,
                             "sign": f.sign, "h": format_word(f.h, names)}
                            for f in move.factors]}
    raise MoveError(f"unknown move {move!r}")


def script_to_json(script: MoveScript, names: Sequence[str]) -> dict:
    """Serialize, tracking the evolving generator names through the script."""
    current = list(names)
    out = []
    for move in script.moves:
        out.append(_move_to_json(move, current))
        if isinstance(move, AddGen):
            current.append(move.name)
        elif isinstance(move, RemoveGen):
            del current[move.i]
    data = {"regime": script.regime, "moves": out}
    if script.stabilized:
        data["stabilized"] = True
    return data


def _move_from_json(obj: dict, names: list):
    op = obj["op"]
    if op == "ConjRel":
        return ConjRel(obj["j"] - 1, parse_word(obj["w"], names))
    if op == "InvRel":
        return InvRel(obj["j"] - 1)
    if op == "SlideRel":
        return SlideRel(obj["j"] - 1, obj["k"] - 1, obj["side"])
    if op == "NielsenInv":
        return NielsenInv(obj["i"] - 1)
    if op == "NielsenMul":
        return NielsenMul(obj["i"] - 1, obj["j"] - 1, obj["side"])
    if op == "AddGen":
        return AddGen(obj["name"])
    if op == "RemoveGen":
        return RemoveGen(obj["i"] - 1)
    if op == "AddTrivialRel":
        return AddTrivialRel()
    if op == "RemoveTrivialRel":
        return RemoveTrivialRel(obj["j"] - 1)
    if op == "RestrictedSlide":
        return RestrictedSlide(obj["j"] - 1, tuple(
            RSFactor(parse_word(f["w"], names), f["k"] - 1, f["sign"],
                     parse_word(f["h"], names))
            for f in obj["factors"]))
    raise MoveError(f"unknown op {op!r}")


def script_from_json(data, names: Sequence[str]) -> MoveScript:
    if isinstance(data, list):
        data = {"regime": "full", "moves": data}
    current = list(names)
    moves = []
    for obj in data["moves"]:
        move = _move_from_json(obj, current)
        moves.append(move)
        if isinstance(move, AddGen):
            current.append(move.name)
        elif isinstance(move, RemoveGen):
            del current[move.i]
    return MoveScript(tuple(moves), data.get("regime", "full"),
                      bool(data.get("stabilized", False)))


def load_script(path: str, names: Sequence[str]) -> MoveScript:
    with open(path) as fh:
        return script_from_json(json.load(fh), names)


def dump_script(script: MoveScript, names: Sequence[str], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(script_to_json(script, names), fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Bounded breadth-first equivalence search.


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 3
    max_relator_length: int = 24
    max_states: int = 10000
    conjugator_length: int = 3
    factor_word_length: int = 1


def enumerate_words(rank: int, max_len: int) -> list:
    """All reduced words of length 1..max_len, in deterministic letter order."""
    letters = sorted((x for i in range(1, rank + 1) for x in (i, -i)),
                     key=letter_key)
    out = []
    layer = [EMPTY]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        out.extend(nxt)
        layer = nxt
    return out


def _neighbor_fragments(p: Presentation, regime: str, target_rels: int,
                        conj_words: list, factor_words: list):
    """Yield (move fragment, successor) pairs in deterministic order."""
    m = len(p.relators)
    if regime == "full":
        if m > target_rels:
            for j, r in enumerate(p.relators):
                if r == EMPTY:
                    yield [RemoveTrivialRel(j)]
        if m < target_rels:
            yield [AddTrivialRel()]
        for j in range(m):
            yield [InvRel(j)]
        for j in range(m):
            for k in range(m):
                if j == k:
                    continue
                for side in ("left", "right"):
                    yield [SlideRel(j, k, side)]
                    yield [InvRel(k), SlideRel(j, k, side), InvRel(k)]
        for j in range(m):
            for w in conj_words:
                yield [ConjRel(j, w)]
    else:
        for j in range(m):
            yield [InvRel(j)]
        for j in range(m):
            for k in range(m):
                if j == k:
                    continue
                for sign in (1, -1):
                    for w in [EMPTY] + conj_words:
                        for h in factor_words:
                            yield [RestrictedSlide(j, (RSFactor(w, k, sign, h),))]
        for j in range(m):
            for w in conj_words:
                yield [ConjRel(j, w)]


def bounded_equivalence_search(p: Presentation, q: Presentation,
                               budget: SearchBudget = SearchBudget(),
                               regime: str = "full"):
    """Breadth-first search for a move script from p to q.

    Returns a replay-verified MoveScript, or None when the budget is
    exhausted.  A None result claims nothing: inequivalence is never
    asserted.  States are deduplicated on canonical keys, so the cheap
    conjugation/inversion/permutation quotient is baked into the frontier.
    """
    if p.rank != q.rank:
        raise ValueError(f"boundary mismatch: ranks {p.rank} and {q.rank}")
    if regime not in ("full", "k_prime"):
        raise ValueError(f"unknown regime {regime!r}")
    goal = canonical_key(q)
    target_rels = len(q.relators)
    if regime == "k_prime" and len(p.relators) != target_rels:
        return None  # k_prime moves preserve the relator count
    start = canonical_key(p)

    def finish(moves) -> MoveScript:
        script = MoveScript(tuple(moves), regime)
        assert canonical_key(replay(p, script)) == goal
        return script

    if start == goal:
        return finish(())

    conj_words = enumerate_words(p.rank, budget.conjugator_length)
    factor_words = enumerate_words(p.rank, budget.factor_word_length)
    parents = {start: None}  # key -> (parent key, fragment)
    states = {start: p}
    frontier = deque([start])
    depth = {start: 0}
    while frontier:
        key = frontier.popleft()
        if depth[key] >= budget.max_depth:
            continue
        here = states[key]
        for fragment in _neighbor_fragments(here, regime, target_rels,
                                            conj_words, factor_words):
            try:
                nxt = here
                for move in fragment:
                    nxt = apply_move(nxt, move)
            except MoveError:
                continue
            if any(len(r) > budget.max_relator_length for r in nxt.relators):
                continue
            nkey = canonical_key(nxt)
            if nkey in parents:
                continue
            parents[nkey] = (key, tuple(fragment))
            if nkey == goal:
                moves = []
                cur = nkey
                while parents[cur] is not None:
                    prev, frag = parents[cur]
                    moves[:0] = frag
                    cur = prev
                return finish(moves)
            if len(parents) >= budget.max_states:
                return None
            states[nkey] = nxt
            depth[nkey] = depth[key] + 1
            frontier.append(nkey)
    return None
