import random

import pytest

from acpair.words import (EMPTY, commutator, compose_nielsen, conjugate,
                          cyclic_canonical, cyclically_reduce, exponent_sum,
                          format_word, invert, multiply, parse_word, power,
                          reduce, substitute, word_key)

X, Y = (1,), (2,)
NAMES = ("x", "y")


def w(text):
    return parse_word(text, NAMES)


def random_word(rng, rank=4, max_len=32):
    letters = []
    for _ in range(rng.randint(0, max_len)):
        g = rng.randint(1, rank)
        letters.append(g if rng.random() < 0.5 else -g)
    return reduce(letters)


def test_reduce_examples():
    assert reduce([1, -1, 2]) == (2,)
    assert reduce([]) == ()
    assert reduce([1, 2, -2, -1]) == ()


def test_reduce_idempotent():
    rng = random.Random(0)
    for _ in range(200):
        letters = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(0, 24))]
        once = reduce(letters)
        assert reduce(once) == once


def test_reduce_rejects_zero():
    with pytest.raises(ValueError):
        reduce([1, 0])


def test_multiply_examples():
    assert multiply(w("x y"), w("y^-1 x")) == w("x x")
    assert multiply(w("x y"), EMPTY) == w("x y")
    assert multiply(X, invert(X)) == EMPTY


def test_group_laws_random():
    rng = random.Random(1)
    for _ in range(300):
        a, b, c = (random_word(rng) for _ in range(3))
        assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
        assert multiply(a, EMPTY) == a == multiply(EMPTY, a)
        assert multiply(a, invert(a)) == EMPTY
        assert invert(invert(a)) == a


def test_invert_examples():
    assert invert(w("x y")) == w("y^-1 x^-1")
    assert invert(EMPTY) == EMPTY
    assert invert(w("x^-1")) == X


def test_conjugate_examples():
    assert conjugate(X, Y) == w("y x y^-1")
    assert conjugate(X, X) == X
    assert conjugate(EMPTY, w("x y")) == EMPTY


def test_commutator_examples():
    assert commutator(X, Y) == w("x y x^-1 y^-1")
    assert commutator(X, X) == EMPTY
    assert commutator(EMPTY, Y) == EMPTY


def test_exponent_sum():
    assert exponent_sum(commutator(X, Y), 0) == 0
    assert exponent_sum(w("x^2"), 0) == 2
    assert exponent_sum(w("x y"), 1) == 1


def test_exponent_sum_additive():
    rng = random.Random(2)
    for _ in range(200):
        a, b = random_word(rng), random_word(rng)
        for g in range(4):
            assert (exponent_sum(multiply(a, b), g)
                    == exponent_sum(a, g) + exponent_sum(b, g))


def test_substitute_examples():
    assert substitute(w("x y"), {0: X, 1: invert(X)}) == EMPTY
    assert substitute(X, {0: X}) == X
    assert substitute(w("x^2"), {0: (2, 3)}) == (2, 3, 2, 3)


def test_substitute_missing_image():
    with pytest.raises(ValueError):
        substitute(w("x y"), {0: X})


def test_substitute_is_homomorphism():
    rng = random.Random(3)
    images = {0: (2,), 1: (1, 2), 2: (-3,), 3: (1, -2, 1)}
    for _ in range(200):
        a, b = random_word(rng), random_word(rng)
        assert (substitute(multiply(a, b), images)
                == multiply(substitute(a, images), substitute(b, images)))
        assert substitute(invert(a), images) == invert(substitute(a, images))


def test_cyclic_canonical_examples():
    assert cyclic_canonical(w("y x y^-1")) == X
    assert cyclic_canonical(w("x^-1")) == X
    assert cyclic_canonical(EMPTY) == EMPTY


def brute_class(u, conjugators):
    """Conjugacy-and-inversion class by direct enumeration (oracle)."""
    out = set()
    for v in (u, invert(u)):
        for c in conjugators:
            out.add(conjugate(v, c))
    return out


def all_words(rank, length):
    layer = [EMPTY]
    out = [EMPTY]
    for _ in range(length):
        nxt = []
        for word in layer:
            for letter in (1, -1, 2, -2)[:2 * rank]:
                if word and word[-1] == -letter:
                    continue
                nxt.append(word + (letter,))
        out.extend(nxt)
        layer = nxt
    return out


def test_cyclic_canonical_is_class_invariant():
    # Oracle: brute-force conjugation over all short conjugators, words of
    # length <= 6 over two generators.
    short = all_words(2, 3)
    rng = random.Random(4)
    candidates = [u for u in all_words(2, 6) if len(u) >= 1]
    for u in rng.sample(candidates, 120):
        canon = cyclic_canonical(u)
        for v in brute_class(u, short):
            assert cyclic_canonical(v) == canon
        # the canonical form is itself in the class, up to conjugation
        assert cyclically_reduce(canon) == canon


def test_cyclic_canonical_least_in_letter_order():
    # + sorts before -, lower index before higher
    assert cyclic_canonical(w("x^-1 y")) == w("x y^-1")  # rotation of inverse
    assert cyclic_canonical(w("y^-1 x^-1")) == w("x y")
    assert word_key(w("x")) < word_key(w("x^-1")) < word_key(w("y"))


def test_power():
    assert power(X, 3) == (1, 1, 1)
    assert power(X, -2) == (-1, -1)
    assert power(w("x y"), 0) == EMPTY


def test_parse_format_roundtrip():
    rng = random.Random(5)
    for _ in range(200):
        u = random_word(rng, rank=2)
        assert parse_word(format_word(u, NAMES), NAMES) == u
    assert parse_word("1", NAMES) == EMPTY
    assert format_word(EMPTY, NAMES) == "1"
    assert parse_word("x^2 y^-3", NAMES) == (1, 1, -2, -2, -2)


def test_parse_word_errors():
    with pytest.raises(ValueError):
        parse_word("z", NAMES)
    with pytest.raises(ValueError):
        parse_word("x^0", NAMES)
    with pytest.raises(ValueError):
        parse_word("x^q", NAMES)


def test_compose_nielsen_inverse_pair():
    # g0 -> g0 g1 then g0 -> g0 g1^-1 is the identity map
    steps = [("mul", 0, 1, "right")]
    imgs = compose_nielsen(steps, 2)
    assert imgs == [(1, 2), (2,)]
    undone = compose_nielsen(steps + [("mul", 0, 1, "right")], 2)
    assert undone == [(1, 2, 2), (2,)]
    # composing with the inverse map directly
    back = [substitute(im, {0: (1, -2), 1: (2,)}) for im in imgs]
    assert back == [(1,), (2,)]
