"""Constructive pipelines: common-generator normalization, product
stabilization from normal-closure witnesses, the certified null-vector
pipeline, the Lustig presentation family, restricted-move certificate
checking, and bounded witness search.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .moves import (AddGen, ConjRel, InvRel, MoveScript, NielsenInv,
                    NielsenMul, RegimeError, SlideRel, invert_script, replay)
from .pairing import EquivalenceCertificate, FormalSum, verify_null
from .presentations import (Presentation, canonical_key, euler_char,
                            fresh_name, product, wedge_s2)
from .words import (EMPTY, Word, commutator, format_word, invert, multiply,
                    parse_word, power, reduce)


class WitnessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Nielsen-composite script builders (2-deformations: generator-level moves).


def _append_letter_moves(i: int, letter: int) -> list:
    """Moves whose net substitution is g_i -> g_i * letter.

    The engine substitutes the inverse of a declared Nielsen map, so a
    plain right multiplication appends the negative letter and appending a
    positive letter needs conjugation by an inversion pair.
    """
    j = abs(letter) - 1
    if letter < 0:
        return [NielsenMul(i, j, "right")]
    return [NielsenInv(j), NielsenMul(i, j, "right"), NielsenInv(j)]


def append_word_moves(i: int, u: Word) -> list:
    """Moves realizing the substitution g_i -> g_i * u (u must avoid g_i)."""
    if any(abs(x) - 1 == i for x in u):
        raise ValueError("appended word may not involve the rewritten generator")
    moves = []
    for letter in reversed(u):
        moves.extend(_append_letter_moves(i, letter))
    return moves


def swap_generators_moves(i: int, j: int) -> list:
    """Moves whose net substitution transposes g_i and g_j.

    Composite of three transvections and one inversion; all other
    generators are untouched.
    """
    if i == j:
        return []
    return [
        # g_i -> g_i g_j
        NielsenInv(j), NielsenMul(i, j, "right"), NielsenInv(j),
        # g_j -> g_i^-1 g_j
        NielsenMul(j, i, "left"),
        # g_i -> g_j g_i
        NielsenInv(j), NielsenMul(i, j, "left"), NielsenInv(j),
        # fix the leftover inversion
        NielsenInv(i),
    ]


def permutation_moves(perm: Sequence[int]) -> list:
    """Moves relabelling positions so that new position k holds old perm[k]."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation")
    location = list(range(n))   # location[g] = current position of old generator g
    occupant = list(range(n))   # occupant[p] = old generator at position p
    moves = []
    for k in range(n):
        want = perm[k]
        cur = location[want]
        if cur == k:
            continue
        moves.extend(swap_generators_moves(k, cur))
        other = occupant[k]
        occupant[k], occupant[cur] = want, other
        location[want], location[other] = k, cur
    return moves


# ---------------------------------------------------------------------------
# Common generators (fixing a shared boundary wedge).


@dataclass(frozen=True)
class IsoWitness:
    """Claimed mutually inverse generator images: each second-presentation
    generator as a word in the first's generators and vice versa.  Validity
    is certified downstream by the produced scripts replaying correctly."""

    y_in_x: tuple  # tuple[Word, ...]
    x_in_y: tuple  # tuple[Word, ...]

    @classmethod
    def identity(cls, rank: int) -> "IsoWitness":
        imgs = tuple((i + 1,) for i in range(rank))
        return cls(imgs, imgs)

    def is_identity(self) -> bool:
        return (self.y_in_x == tuple((i + 1,) for i in range(len(self.y_in_x)))
                and self.x_in_y == tuple((i + 1,) for i in range(len(self.x_in_y))))


@dataclass(frozen=True)
class CommonGeneratorsResult:
    p_prime: Presentation
    q_prime: Presentation
    script_p: MoveScript
    script_q: MoveScript
    correspondence: tuple  # shared position -> (origin, original index)


def common_generators(p: Presentation, q: Presentation,
                      witness: IsoWitness) -> CommonGeneratorsResult:
    """Rewrite both presentations over one generator tuple of rank a+c.

    The first presentation's generators come first; each added generator
    carries a linking relator equating it with the witness image.  Both
    scripts use only generator-level moves and their composites, so they
    are 2-deformations.  When the generator tuples already coincide and
    the witness is the identity, both presentations are returned as they
    are with empty scripts.
    """
    a, c = p.rank, q.rank
    if len(witness.y_in_x) != c or len(witness.x_in_y) != a:
        raise WitnessError(
            f"witness dimensions {len(witness.y_in_x)}/{len(witness.x_in_y)} "
            f"do not match ranks {c}/{a}")
    for w in witness.y_in_x:
        if any(abs(x) > a for x in w):
            raise WitnessError("y_in_x image outside the first context")
    for w in witness.x_in_y:
        if any(abs(x) > c for x in w):
            raise WitnessError("x_in_y image outside the second context")

    if p.gens == q.gens and witness.is_identity():
        empty = MoveScript((), "full")
        corr = tuple(("both", i) for i in range(a))
        return CommonGeneratorsResult(p, q, empty, empty, corr)

    moves_p = []
    taken = set(p.gens)
    for idx in range(c):
        name = q.gens[idx] if q.gens[idx] not in taken else fresh_name(taken, a + idx)
        taken.add(name)
        moves_p.append(AddGen(name))
        moves_p.extend(append_word_moves(a + idx, invert(reduce(witness.y_in_x[idx]))))
    script_p = MoveScript(tuple(moves_p), "full")
    p_prime = replay(p, script_p)

    moves_q = []
    taken = set(q.gens)
    for idx in range(a):
        name = p.gens[idx] if p.gens[idx] not in taken else fresh_name(taken, c + idx)
        taken.add(name)
        moves_q.append(AddGen(name))
        moves_q.extend(append_word_moves(c + idx, invert(reduce(witness.x_in_y[idx]))))
    # Reorder the roles so position k means: k < a the k-th first-presentation
    # generator, k >= a the (k-a)-th second-presentation generator.
    perm = [c + i for i in range(a)] + list(range(c))
    moves_q.extend(permutation_moves(perm))
    script_q = MoveScript(tuple(moves_q), "full")
    q_prime = replay(q, script_q)

    corr = tuple((("p", i) for i in range(a))) + tuple(("q", i) for i in range(c))
    return CommonGeneratorsResult(p_prime, q_prime, script_p, script_q, corr)


# ---------------------------------------------------------------------------
# Normal closure witnesses and product stabilization.


@dataclass(frozen=True)
class NormalClosureWitness:
    """target = prod over factors (g, r_index, sign) of g^-1 R^sign g,
    exactly in the free group.  Checked, never assumed."""

    target: Word
    factors: tuple  # tuple[(Word, int, int), ...]

    def __post_init__(self):
        object.__setattr__(self, "target", reduce(self.target))
        object.__setattr__(self, "factors", tuple(
            (reduce(g), k, s) for (g, k, s) in self.factors))
        for _, _, s in self.factors:
            if s not in (1, -1):
                raise WitnessError(f"bad factor sign {s}")

    def product_word(self, relators: Sequence[Word]) -> Word:
        out: Word = EMPTY
        for g, k, s in self.factors:
            if not 0 <= k < len(relators):
                raise WitnessError(f"factor relator index {k} out of range")
            rel = relators[k] if s > 0 else invert(relators[k])
            out = multiply(out, multiply(multiply(invert(g), rel), g))
        return out

    def verify(self, relators: Sequence[Word]) -> bool:
        return self.product_word(relators) == self.target


def witness_to_json(wit: NormalClosureWitness, names: Sequence[str]) -> dict:
    return {
        "target": format_word(wit.target, names),
        "factors": [{"g": format_word(g, names), "r_index": k + 1, "sign": s}
                    for g, k, s in wit.factors],
    }


def witness_from_json(data, names: Sequence[str]) -> NormalClosureWitness:
    return NormalClosureWitness(
        parse_word(data["target"], names),
        tuple((parse_word(f["g"], names), f["r_index"] - 1, f["sign"])
              for f in data["factors"]))


def _factor_removal_moves(j: int, k: int, g: Word, sign: int) -> list:
    """Left-multiply relator j by (g^-1 R_k^sign g)^-1 with type-(i) moves."""
    moves = []
    if g != EMPTY:
        moves.append(ConjRel(k, invert(g)))
    if sign > 0:
        moves.append(InvRel(k))
    moves.append(SlideRel(j, k, "left"))
    if sign > 0:
        moves.append(InvRel(k))
    if g != EMPTY:
        moves.append(ConjRel(k, g))
    return moves


def stabilization_moves(target_positions: Sequence[int], base_positions: Sequence[int],
                        witnesses: Sequence[NormalClosureWitness]) -> list:
    """Moves clearing each target relator via its witness over the base block."""
    moves = []
    for j, wit in zip(target_positions, witnesses):
        for g, k, s in wit.factors:
            moves.extend(_factor_removal_moves(j, base_positions[k], g, s))
    return moves


def product_stabilization(l1: Presentation, l2: Presentation,
                          witnesses: Sequence[NormalClosureWitness]) -> MoveScript:
    """Script replaying l1*l2 to l1 with one trivial relator per l2 relator.

    One witness per relator of l2, each expressing it over l1's relators;
    witnesses are verified in the free group before any move is emitted.
    The script touches only relators (conjugate/invert/slide composites),
    never the skeleton.
    """
    if l1.rank != l2.rank:
        raise ValueError("presentations do not share a boundary")
    if len(witnesses) != len(l2.relators):
        raise WitnessError(f"need {len(l2.relators)} witnesses, got {len(witnesses)}")
    for idx, (rel, wit) in enumerate(zip(l2.relators, witnesses)):
        if reduce(wit.target) != rel:
            raise WitnessError(f"witness {idx} targets the wrong word")
        if not wit.verify(l1.relators):
            raise WitnessError(f"witness {idx} fails free-group verification")
    base = len(l1.relators)
    targets = [base + i for i in range(len(l2.relators))]
    script = MoveScript(tuple(stabilization_moves(targets, range(base), witnesses)),
                        "full")
    start = product(l1, l2)
    result = replay(start, script)
    expected = wedge_s2(l1, len(l2.relators))
    if canonical_key(result) != canonical_key(expected):
        raise WitnessError("stabilization replay mismatch")
    return script


# ---------------------------------------------------------------------------
# Witness search: bidirectional BFS over relator insertions.


def _insertions(word: Word, relators, max_pos: int, max_len: int):
    """Deterministic successor list: insert a relator or its inverse at a
    prefix position and reduce.  Yields (new word, (position, k, sign))."""
    limit = min(max_pos, len(word))
    for pos in range(limit + 1):
        prefix = word[:pos]
        suffix = word[pos:]
        for k, rel in enumerate(relators):
            if not rel:
                continue
            for sign, body in ((1, rel), (-1, invert(rel))):
                merged = multiply(multiply(prefix, body), suffix)
                if len(merged) <= max_len:
                    yield merged, (pos, k, sign)


def search_normal_closure_witness(target: Word, relators: Sequence[Word],
                                  max_factors: int = 8,
                                  max_conjugator_length: int = 4,
                                  max_states: int = 20000,
                                  max_word_length: int | None = None):
    """Bounded bidirectional search for a normal closure witness.

    Returns a verified NormalClosureWitness or None on exhaustion (which
    claims nothing).  Factors are explored through relator insertions at
    prefix positions up to the conjugator bound, so any returned witness
    has conjugators no longer than max_conjugator_length letters.
    """
    target = reduce(target)
    relators = [reduce(r) for r in relators]
    if max_word_length is None:
        longest = max((len(r) for r in relators), default=0)
        max_word_length = len(target) + 2 * longest + 2 * max_conjugator_length

    if not target:
        return NormalClosureWitness(target, ())

    # forward: strip factors off the front of the remaining word (from target),
    # backward: build the suffix product up from the empty word.
    fwd = {target: None}
    bwd = {EMPTY: None}
    fwd_frontier = [target]
    bwd_frontier = [EMPTY]
    fwd_depth = bwd_depth = 0

    def forward_factors(word):
        # Edge (pos,k,sign) at word w: w' = p rel^sign v, i.e. the stripped
        # factor is F = p rel^-sign p^-1 = g^-1 R^-sign g with g = p^-1.
        out = []
        while fwd[word] is not None:
            parent, (pos, k, sign) = fwd[word]
            prefix = parent[:pos]
            out.append((invert(prefix), k, -sign))
            word = parent
        return out

    def backward_factors(word):
        # Edge at suffix v: v' = p rel^sign rest = (p rel^sign p^-1) v,
        # prepending the factor g^-1 R^sign g with g = p^-1.
        out = []
        while bwd[word] is not None:
            parent, (pos, k, sign) = bwd[word]
            prefix = parent[:pos]
            out.append((invert(prefix), k, sign))
            word = parent
        return out

    def meet(word):
        factors = forward_factors(word) + backward_factors(word)
        wit = NormalClosureWitness(target, tuple(factors))
        if not wit.verify(relators):
            raise AssertionError("witness reconstruction failed verification")
        return wit

    if EMPTY in fwd:
        return meet(EMPTY)

    while fwd_frontier or bwd_frontier:
        expand_fwd = bool(fwd_frontier) and (
            not bwd_frontier or len(fwd_frontier) <= len(bwd_frontier))
        if fwd_depth + bwd_depth >= max_factors:
            return None
        if expand_fwd:
            new_frontier = []
            for word in fwd_frontier:
                for nxt, edge in _insertions(word, relators,
                                             max_conjugator_length,
                                             max_word_length):
                    if nxt in fwd:
                        continue
                    fwd[nxt] = (word, edge)
                    if nxt in bwd:
                        return meet(nxt)
                    new_frontier.append(nxt)
                    if len(fwd) + len(bwd) > max_states:
                        return None
            fwd_frontier = new_frontier
            fwd_depth += 1
        else:
            new_frontier = []
            for word in bwd_frontier:
                for nxt, edge in _insertions(word, relators,
                                             max_conjugator_length,
                                             max_word_length):
                    if nxt in bwd:
                        continue
                    bwd[nxt] = (word, edge)
                    if nxt in fwd:
                        return meet(nxt)
                    new_frontier.append(nxt)
                    if len(fwd) + len(bwd) > max_states:
                        return None
            bwd_frontier = new_frontier
            bwd_depth += 1
    return None


# ---------------------------------------------------------------------------
# The certified null-vector pipeline.


@dataclass(frozen=True)
class WitnessBudget:
    max_factors: int = 8
    max_conjugator_length: int = 4
    max_states: int = 20000


@dataclass(frozen=True)
class PipelineResult:
    x: FormalSum
    certificates: tuple
    p1: Presentation
    p2: Presentation
    stabilizations: int
    unknown: tuple  # labels of witnesses the search could not find

    @property
    def complete(self) -> bool:
        return not self.unknown


def _search_one(args):
    target, relators, budget = args
    return search_normal_closure_witness(
        target, relators, budget.max_factors, budget.max_conjugator_length,
        budget.max_states)


def _collect_witnesses(targets, base, budget, supplied, label, jobs):
    """One witness per target word over the base relators; supplied entries
    are verified, missing ones searched."""
    found: dict = {}
    missing = []
    for i, word in enumerate(targets):
        if supplied is not None and i < len(supplied) and supplied[i] is not None:
            wit = supplied[i]
            if reduce(wit.target) != word:
                raise WitnessError(f"{label}[{i}]: supplied witness targets the wrong word")
            if not wit.verify(base):
                raise WitnessError(f"{label}[{i}]: supplied witness fails verification")
            found[i] = wit
        else:
            missing.append(i)
    if missing:
        tasks = [(targets[i], list(base), budget) for i in missing]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_search_one, tasks))
        else:
            results = [_search_one(t) for t in tasks]
        for i, wit in zip(missing, results):
            if wit is not None:
                found[i] = wit
    witnesses = [found.get(i) for i in range(len(targets))]
    unknown = [f"{label}[{i}]" for i, w in enumerate(witnesses) if w is None]
    return witnesses, unknown


def null_vector_pipeline(l1: Presentation, l2: Presentation, witness: IsoWitness,
                         budget: WitnessBudget = WitnessBudget(),
                         witnesses_second_over_first=None,
                         witnesses_first_over_second=None,
                         jobs: int = 1) -> PipelineResult:
    """Certified null vector from two presentations of the same group with
    equal Euler characteristic.

    Runs the common-generator normalization, then builds four certificates
    identifying both self-products and the cross product with the common
    stabilization, and returns x = first - second together with the
    certificates.  Witnesses may be supplied per relator; otherwise they
    are searched within the budget.  On search exhaustion the result
    carries Unknown markers and whatever certificates are still justified;
    nothing unverified is ever emitted.
    """
    if euler_char(l1) != euler_char(l2):
        raise ValueError(
            f"Euler characteristics differ: {euler_char(l1)} vs {euler_char(l2)}")
    common = common_generators(l1, l2, witness)
    p1, p2 = common.p_prime, common.q_prime
    n = p1.rank
    m = euler_char(l1) - 1 + n
    assert m == len(p1.relators) == len(p2.relators)

    wits12, unknown12 = _collect_witnesses(
        p2.relators, p1.relators, budget, witnesses_second_over_first,
        "second_over_first", jobs)
    wits21, unknown21 = _collect_witnesses(
        p1.relators, p2.relators, budget, witnesses_first_over_second,
        "first_over_second", jobs)
    unknown = tuple(unknown12 + unknown21)

    x = FormalSum.of_presentation(p1) - FormalSum.of_presentation(p2)
    certs = []

    self1 = [NormalClosureWitness(r, ((EMPTY, i, 1),))
             for i, r in enumerate(p1.relators)]
    certs.append(EquivalenceCertificate(
        product(p1, p1), wedge_s2(p1, m),
        product_stabilization(p1, p1, self1), "first_self"))

    self2 = [NormalClosureWitness(r, ((EMPTY, i, 1),))
             for i, r in enumerate(p2.relators)]
    certs.append(EquivalenceCertificate(
        product(p2, p2), wedge_s2(p2, m),
        product_stabilization(p2, p2, self2), "second_self"))

    if not unknown12:
        certs.append(EquivalenceCertificate(
            product(p1, p2), wedge_s2(p1, m),
            product_stabilization(p1, p2, wits12), "cross"))

    if not unknown12 and not unknown21:
        # Stabilization bridge: undo the (second, first) stabilization, then
        # clear the second block inside the product over the first block.
        stab21 = product_stabilization(p2, p1, wits21)
        bridge_moves = list(invert_script(stab21).moves)
        bridge_moves.extend(stabilization_moves(
            range(m), [m + i for i in range(m)], wits12))
        bridge = MoveScript(tuple(bridge_moves), "full")
        certs.append(EquivalenceCertificate(
            wedge_s2(p2, m), wedge_s2(p1, m), bridge, "stabilized_bridge"))

    result = PipelineResult(x, tuple(certs), p1, p2, m, unknown)
    if result.complete:
        report = verify_null(x, certs)
        if not report.null:
            raise WitnessError("pipeline produced certificates that do not "
                               "cancel the self-product")
    return result


# ---------------------------------------------------------------------------
# Lustig family and restricted-regime certificates.


def lustig(i: int) -> Presentation:
    """Generators r, s, t with relators s^2 t^-3, [r^2, s^(2i+1)], [r^2, t^(3i+1)]
    (relations written as equalities convert by the left-times-right-inverse
    rule)."""
    if i < 1:
        raise ValueError("index must be a positive integer")
    names = ("r", "s", "t")
    r, s, t = (1,), (2,), (3,)
    rel1 = multiply(power(s, 2), power(t, -3))
    rel2 = commutator(power(r, 2), power(s, 2 * i + 1))
    rel3 = commutator(power(r, 2), power(t, 3 * i + 1))
    return Presentation(names, (rel1, rel2, rel3))


def verify_smove_certificates(l1: Presentation, l2: Presentation,
                              to_first: Sequence[MoveScript],
                              to_second: Sequence[MoveScript]) -> tuple:
    """Check restricted-regime scripts equating l1*l2 with both self-products.

    Each script must be declared k_prime (the stabilized flag is allowed);
    a raw slide anywhere is a regime violation.  The to_first scripts,
    composed in order, must take l1*l2 to the key of l1*l1, and the
    to_second scripts to the key of l2*l2.  On success both equivalence
    certificates are returned, usable for null-vector verification of
    l1 - l2 in the restricted setting.
    """
    if l1.rank != l2.rank:
        raise ValueError("presentations do not share a boundary")
    if len(l1.relators) != len(l2.relators):
        raise ValueError("presentations must have the same relator count")
    for script in list(to_first) + list(to_second):
        if script.regime != "k_prime":
            raise RegimeError("scripts must be declared k_prime")

    def compose(scripts):
        moves = []
        stabilized = False
        for s in scripts:
            moves.extend(s.moves)
            stabilized = stabilized or s.stabilized
        return MoveScript(tuple(moves), "k_prime", stabilized)

    start = product(l1, l2)
    certs = []
    for scripts, rhs, label in ((to_first, product(l1, l1), "to_first_self"),
                                (to_second, product(l2, l2), "to_second_self")):
        script = compose(scripts)
        result = replay(start, script)  # raises RegimeError on violations
        if canonical_key(result) != canonical_key(rhs):
            raise WitnessError(f"{label}: replay does not reach the claimed key")
        certs.append(EquivalenceCertificate(start, rhs, script, label))
    return tuple(certs)
