"""Formal sums of presentation classes, the bilinear product, and the
pairing into closed complexes, with certificate-backed cancellation.

Coefficients are exact: Python ints by default, fractions.Fraction when a
caller wants rationals.  No floating point anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .moves import MoveScript, MoveError, replay, script_from_json, script_to_json
from .presentations import (CanonicalKey, ClosedComplex, Presentation,
                            canonical_key, format_presentation,
                            parse_presentation, serialize_key)
from .words import word_key


class CertificateError(ValueError):
    pass


def _check_scalar(c):
    if not isinstance(c, Rational):
        raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")
    return c


class FormalSum:
    """Finitely supported map from canonical keys to exact coefficients."""

    __slots__ = ("rank", "_terms")

    def __init__(self, rank: int, terms=()):
        self.rank = rank
        data = dict(terms) if not isinstance(terms, dict) else dict(terms)
        for key, coeff in data.items():
            if key.rank != rank:
                raise ValueError(f"key of rank {key.rank} in a sum of rank {rank}")
            _check_scalar(coeff)
        self._terms = {k: c for k, c in data.items() if c != 0}

    @classmethod
    def zero(cls, rank: int) -> "FormalSum":
        return cls(rank)

    @classmethod
    def of_presentation(cls, p: Presentation, coeff=1) -> "FormalSum":
        return cls(p.rank, {canonical_key(p): coeff})

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, key: CanonicalKey):
        return self._terms.get(key, 0)

    @property
    def support(self):
        return frozenset(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return (isinstance(other, FormalSum) and self.rank == other.rank
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.rank, frozenset(self._terms.items())))

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} and {other.rank}")
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return FormalSum(self.rank, out)

    def __neg__(self):
        return FormalSum(self.rank, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormalSum":
        _check_scalar(c)
        return FormalSum(self.rank, {k: c * v for k, v in self._terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def dot(self, other: "FormalSum") -> "FormalSum":
        """Bilinear extension of the presentation product.

        At the key level the product of two classes is the merged relator
        class multiset on the common boundary, which is exactly the key of
        the product of any two representatives.
        """
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} and {other.rank}")
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                merged = CanonicalKey(self.rank, tuple(
                    sorted(k1.classes + k2.classes, key=word_key)))
                out[merged] = out.get(merged, 0) + c1 * c2
        return FormalSum(self.rank, out)

    def bracket(self, other: "FormalSum") -> "ClosedSum":
        """Product followed by forgetting the boundary graph."""
        prod = self.dot(other)
        out: dict = {}
        for key, coeff in prod._terms.items():
            closed = ClosedComplex((key,))
            out[closed] = out.get(closed, 0) + coeff
        return ClosedSum(out)

    def __repr__(self):
        if not self._terms:
            return f"FormalSum(rank={self.rank}, 0)"
        bits = [f"{c}*[{len(k.classes)} rel]" for k, c in self.items()]
        return f"FormalSum(rank={self.rank}, {' + '.join(bits)})"


class ClosedSum:
    """Formal sum over closed complexes (boundary forgotten)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        data = dict(terms)
        for coeff in data.values():
            _check_scalar(coeff)
        self._terms = {k: c for k, c in data.items() if c != 0}

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, key: ClosedComplex):
        return self._terms.get(key, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return isinstance(other, ClosedSum) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return ClosedSum(out)


@dataclass(frozen=True)
class EquivalenceCertificate:
    """A claimed equivalence, checkable by replay: script takes lhs to a
    presentation with the canonical key of rhs."""

    lhs: Presentation
    rhs: Presentation
    script: MoveScript
    label: str = ""

    def verify(self) -> tuple:
        """(ok, message).  Never raises for replay failures."""
        if self.lhs.rank != self.rhs.rank:
            return False, "endpoint ranks differ"
        try:
            result = replay(self.lhs, self.script)
        except MoveError as e:
            return False, f"replay failed: {e}"
        if canonical_key(result) != canonical_key(self.rhs):
            return False, "replay does not reach the right-hand key"
        return True, "ok"


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, key):
        self.parent.setdefault(key, key)

    def find(self, key):
        self.add(key)
        root = key
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[key] != root:
            self.parent[key], key = root, self.parent[key]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # Least key in serialization order becomes the representative.
        keep, drop = (ra, rb) if ra.sort_key() <= rb.sort_key() else (rb, ra)
        self.parent[drop] = keep


def reduce_by_certificates(x: FormalSum, certs) -> FormalSum:
    """Sum coefficients over the key classes generated by verified
    certificates.  A failing certificate is an error naming the offender."""
    uf = _UnionFind()
    for idx, cert in enumerate(certs):
        ok, msg = cert.verify()
        if not ok:
            name = cert.label or f"certificate {idx}"
            raise CertificateError(f"{name}: {msg}")
        if cert.lhs.rank != x.rank:
            raise ValueError("certificate endpoints have the wrong rank")
        uf.union(canonical_key(cert.lhs), canonical_key(cert.rhs))
    out: dict = {}
    for key, coeff in x._terms.items():
        rep = uf.find(key)
        out[rep] = out.get(rep, 0) + coeff
    return FormalSum(x.rank, out)


@dataclass(frozen=True)
class NullVectorReport:
    null: bool
    certificate_status: tuple  # tuple[(label, ok, message), ...]
    residue: FormalSum

    def as_text(self) -> str:
        lines = []
        for label, ok, msg in self.certificate_status:
            lines.append(f"certificate {label}: {'ok' if ok else 'FAILED - ' + msg}")
        if self.residue.is_zero():
            lines.append("reduced self-product: 0")
        else:
            lines.append("surviving terms:")
            for key, coeff in self.residue.items():
                head = serialize_key(key).replace("\n", " | ")
                lines.append(f"  {coeff} * ({head})")
        lines.append(f"null vector: {'yes' if self.null else 'NO'}")
        return "\n".join(lines)

    def as_json(self) -> dict:
        return {
            "null": self.null,
            "certificates": [{"label": l, "ok": ok, "message": m}
                             for l, ok, m in self.certificate_status],
            "surviving_terms": [{"coeff": str(c), "key": serialize_key(k)}
                                for k, c in self.residue.items()],
        }


def verify_null(x: FormalSum, certs) -> NullVectorReport:
    """True iff the certificate-reduced self-product x.x is the empty sum.

    Certificate failures are reported, excluded from the reduction, and
    force the verdict to False.
    """
    certs = list(certs)
    status = []
    good = []
    for idx, cert in enumerate(certs):
        ok, msg = cert.verify()
        if ok and cert.lhs.rank != x.rank:
            ok, msg = False, "certificate rank differs from the sum"
        label = cert.label or str(idx)
        status.append((label, ok, msg))
        if ok:
            good.append(cert)
    square = x.dot(x)
    residue = reduce_by_certificates(square, good)
    null = residue.is_zero() and all(ok for _, ok, _ in status)
    return NullVectorReport(null, tuple(status), residue)


# ---------------------------------------------------------------------------
# Files: formal sums as JSON arrays of {coeff, presentation}; certificates
# as JSON with presentation blocks and a move script.


def sum_to_json(x: FormalSum, representatives) -> list:
    """Serialize with caller-chosen representatives (key -> Presentation)."""
    out = []
    for key, coeff in x.items():
        pres = representatives[key]
        if canonical_key(pres) != key:
            raise ValueError("representative does not match its key")
        if isinstance(coeff, Fraction) and coeff.denominator != 1:
            coeff_repr = str(coeff)
        else:
            coeff_repr = int(coeff)
        out.append({"coeff": coeff_repr, "presentation": format_presentation(pres)})
    return out


def sum_from_json(data) -> tuple:
    """Returns (FormalSum, {key: Presentation})."""
    terms: dict = {}
    reps: dict = {}
    rank = None
    for item in data:
        pres = parse_presentation(item["presentation"])
        coeff = item["coeff"]
        coeff = Fraction(coeff) if isinstance(coeff, str) else coeff
        if coeff == int(coeff):
            coeff = int(coeff)
        key = canonical_key(pres)
        if rank is None:
            rank = pres.rank
        elif pres.rank != rank:
            raise ValueError("mixed ranks in formal sum file")
        terms[key] = terms.get(key, 0) + coeff
        reps.setdefault(key, pres)
    if rank is None:
        raise ValueError("empty formal sum file has no rank")
    return FormalSum(rank, terms), reps


def certificate_to_json(cert: EquivalenceCertificate) -> dict:
    return {
        "label": cert.label,
        "lhs": format_presentation(cert.lhs),
        "rhs": format_presentation(cert.rhs),
        "script": script_to_json(cert.script, cert.lhs.gens),
    }


def certificate_from_json(data) -> EquivalenceCertificate:
    lhs = parse_presentation(data["lhs"])
    rhs = parse_presentation(data["rhs"])
    script = script_from_json(data["script"], lhs.gens)
    return EquivalenceCertificate(lhs, rhs, script, data.get("label", ""))


def load_certificate(path: str) -> EquivalenceCertificate:
    with open(path) as fh:
        return certificate_from_json(json.load(fh))
