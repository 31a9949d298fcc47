import json
import random
from fractions import Fraction

import pytest

from acpair.constructions import lustig
from acpair.moves import ConjRel, MoveScript
from acpair.pairing import (CertificateError, EquivalenceCertificate,
                            FormalSum, certificate_from_json,
                            certificate_to_json, reduce_by_certificates,
                            sum_from_json, sum_to_json, verify_null)
from acpair.presentations import (canonical_key, forget_boundary,
                                  make_presentation, unit_presentation)


def pres(gens, *rels):
    return make_presentation(gens, rels)


def fs(p, c=1):
    return FormalSum.of_presentation(p, c)


def test_add_scale_examples():
    p = fs(pres("x", "x"))
    assert (p - p).is_zero()
    assert p.scale(0).is_zero()
    assert fs(pres("x", "x"), 2) + fs(pres("x", "x"), 3) == fs(pres("x", "x"), 5)


def test_rank_mismatch():
    with pytest.raises(ValueError):
        fs(pres("x", "x")) + fs(pres("x y", "x"))
    with pytest.raises(ValueError):
        fs(pres("x", "x")).dot(fs(pres("x y", "x")))


def test_rational_coefficients():
    half = fs(pres("x", "x"), Fraction(1, 2))
    assert (half + half) == fs(pres("x", "x"))
    with pytest.raises(TypeError):
        fs(pres("x", "x"), 0.5)


def test_dot_unit_and_matches_product():
    p = pres("x", "x^2")
    unit = unit_presentation(1, ("x",))
    assert fs(p).dot(fs(unit)) == fs(p)
    from acpair.presentations import product
    q = pres("x", "x^3 x^-1")
    assert fs(p).dot(fs(q)) == fs(product(p, q))


def test_dot_bilinear_square():
    p, q = pres("x y", "x"), pres("x y", "y x y")
    x = fs(p) - fs(q)
    sq = x.dot(x)
    pp = fs(p).dot(fs(p))
    pq = fs(p).dot(fs(q))
    qq = fs(q).dot(fs(q))
    assert sq == pp - pq.scale(2) + qq


def test_dot_lustig_expansion():
    x = fs(lustig(1)) - fs(lustig(2))
    sq = x.dot(x)
    assert len(sq.support) == 3
    coeffs = sorted(c for _, c in sq.items())
    assert coeffs == [-2, 1, 1]


def test_random_algebra_laws():
    rng = random.Random(31)
    basis = [pres("x y", "x"), pres("x y", "y"), pres("x y", "x y"),
             pres("x y", "x^2"), unit_presentation(2, ("x", "y"))]

    def random_sum():
        out = FormalSum.zero(2)
        for p in rng.sample(basis, rng.randint(0, 3)):
            out = out + fs(p, rng.randint(-3, 3))
        return out

    for _ in range(200):
        x, y, z = random_sum(), random_sum(), random_sum()
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        assert (x.scale(a) + y.scale(b)).dot(z) == \
            x.dot(z).scale(a) + y.dot(z).scale(b)
        assert x.dot(y) == y.dot(x)
        assert x.dot(y.dot(z)) == x.dot(y).dot(z)
        assert x.bracket(y) == y.bracket(x)


def test_bracket():
    p = pres("x", "x")
    unit = unit_presentation(1, ("x",))
    assert FormalSum.zero(1).bracket(fs(p)).is_zero()
    br = fs(p).bracket(fs(unit))
    assert br.coefficient(forget_boundary(p)) == 1
    assert len(list(br.items())) == 1


def test_bracket_linear():
    p, q = pres("x", "x"), pres("x", "x^2")
    x = fs(p) - fs(q)
    br = x.bracket(x)
    total = sum(c for _, c in br.items())
    assert total == 0  # coefficients always sum to zero for a difference squared


def test_reduce_by_certificates():
    a = pres("x", "x", "x^2")
    from acpair.moves import SlideRel, replay
    script = MoveScript((SlideRel(1, 0, "right"),))
    target = replay(a, script)
    cert = EquivalenceCertificate(a, target, script, "slide")
    x = fs(a) - fs(target)
    assert not x.is_zero()
    assert reduce_by_certificates(x, [cert]).is_zero()
    assert reduce_by_certificates(x, []) == x


def test_reduce_reports_bad_certificate():
    a = pres("x", "x")
    b = pres("x", "x^2")
    bad = EquivalenceCertificate(a, b, MoveScript(()), "bogus")
    with pytest.raises(CertificateError) as err:
        reduce_by_certificates(fs(a), [bad])
    assert "bogus" in str(err.value)


def test_reduce_preserves_total_coefficient():
    rng = random.Random(32)
    a = pres("x y", "x", "y")
    from acpair.moves import SlideRel, replay
    script = MoveScript((SlideRel(0, 1, "right"),))
    b = replay(a, script)
    cert = EquivalenceCertificate(a, b, script, "s")
    for _ in range(50):
        x = fs(a, rng.randint(-4, 4)) + fs(b, rng.randint(-4, 4))
        red = reduce_by_certificates(x, [cert])
        assert sum(c for _, c in red.items()) == sum(c for _, c in x.items())


def test_verify_null_trivial_cases():
    zero = FormalSum.zero(1)
    report = verify_null(zero, [])
    assert report.null
    single = fs(pres("x", "x"))
    report = verify_null(single, [])
    assert not report.null
    assert not report.residue.is_zero()


def test_verify_null_failed_certificate_forces_false():
    a = pres("x", "x")
    bad = EquivalenceCertificate(a, pres("x", "x^2"), MoveScript(()), "bad")
    report = verify_null(FormalSum.zero(1), [bad])
    assert not report.null
    assert report.certificate_status[0][1] is False
    assert "bad" in report.as_text()


def test_sum_json_roundtrip():
    p, q = pres("x y", "x"), pres("x y", "x y^2")
    x = fs(p, 2) - fs(q, 3)
    reps = {canonical_key(p): p, canonical_key(q): q}
    data = sum_to_json(x, reps)
    loaded, loaded_reps = sum_from_json(json.loads(json.dumps(data)))
    assert loaded == x
    assert set(loaded_reps) == set(reps)


def test_certificate_json_roundtrip():
    a = pres("x y", "x", "y")
    from acpair.moves import SlideRel, replay
    script = MoveScript((SlideRel(0, 1, "right"), ConjRel(1, (1, 2))))
    cert = EquivalenceCertificate(a, replay(a, script), script, "rt")
    data = json.loads(json.dumps(certificate_to_json(cert)))
    loaded = certificate_from_json(data)
    assert loaded == cert
    ok, msg = loaded.verify()
    assert ok, msg
