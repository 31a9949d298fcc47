"""Exact integer linear algebra and chain-level homology over group rings.

Matrices are plain lists of lists of ints.  Smith normal form is computed
with unimodular row/column transforms, pivoting on least absolute value to
keep intermediate entries small at desk scale.

Group-ring matrices follow the row-vector convention: a matrix with
``rows`` = rank of the domain and ``cols`` = rank of the codomain
represents a left-ZG-linear map via v -> v*M, and composites multiply as
``mul(d_k, d_{k-1})``.  With this convention the Fox-derivative matrices
of a presentation satisfy the boundary condition as written.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

# ---------------------------------------------------------------------------
# Finite groups as explicit multiplication tables.


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple  # tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple  # tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    @classmethod
    def from_table(cls, rows: Sequence[Sequence[int]], check_assoc_limit: int = 64,
                   samples: int = 4096, seed: int = 0) -> "FiniteGroup":
        n = len(rows)
        table = tuple(tuple(r) for r in rows)
        if any(len(r) != n for r in table):
            raise ValueError("multiplication table must be square")
        for r in table:
            for x in r:
                if not 0 <= x < n:
                    raise ValueError("table entry out of range")
        identity = None
        for e in range(n):
            if all(table[e][x] == x and table[x][e] == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise ValueError("table has no identity element")
        inverses = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == identity and table[b][a] == identity]
            if len(inv) != 1:
                raise ValueError(f"element {a} has no unique inverse")
            inverses.append(inv[0])
        # Associativity: exhaustive at small orders, sampled above.
        if n <= check_assoc_limit:
            triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            rng = random.Random(seed)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(samples))
        for a, b, c in triples:
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError(f"table not associative at ({a},{b},{c})")
        return cls(table, identity, tuple(inverses))

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(((0,),), 0, (0,))

    @classmethod
    def cyclic(cls, m: int) -> "FiniteGroup":
        if m < 1:
            raise ValueError("order must be positive")
        rows = [[(a + b) % m for b in range(m)] for a in range(m)]
        return cls.from_table(rows)

    @classmethod
    def from_permutations(cls, perms: Sequence[Sequence[int]]) -> "FiniteGroup":
        """Group generated by the given permutations (as mapping tuples)."""
        deg = len(perms[0])
        ident = tuple(range(deg))
        elems = [ident]
        seen = {ident}
        frontier = [ident]
        gens = [tuple(p) for p in perms]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(p[g[i]] for i in range(deg))
                    if q not in seen:
                        seen.add(q)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        index = {p: i for i, p in enumerate(elems)}
        rows = []
        for p in elems:
            rows.append([index[tuple(p[q[i]] for i in range(deg))] for q in elems])
        return cls.from_table(rows)


def symmetric_group_3() -> FiniteGroup:
    return FiniteGroup.from_permutations([(1, 2, 0), (1, 0, 2)])


# ---------------------------------------------------------------------------
# Sparse group-ring elements: dict {element index: integer coefficient}.


def gr_add(a: Mapping[int, int], b: Mapping[int, int]) -> dict:
    out = dict(a)
    for g, c in b.items():
        out[g] = out.get(g, 0) + c
        if out[g] == 0:
            del out[g]
    return out


def gr_mul(a: Mapping[int, int], b: Mapping[int, int], group: FiniteGroup) -> dict:
    out: dict = {}
    for g, c in a.items():
        for h, d in b.items():
            k = group.mul(g, h)
            out[k] = out.get(k, 0) + c * d
            if out[k] == 0:
                del out[k]
    return out


def gr_scale(a: Mapping[int, int], c: int) -> dict:
    return {} if c == 0 else {g: c * v for g, v in a.items()}


@dataclass(frozen=True)
class GroupRingMatrix:
    rows: int
    cols: int
    entries: tuple  # tuple[((r, c), tuple[(elem, coeff), ...]), ...] sorted

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Mapping[tuple, Mapping[int, int]]) -> "GroupRingMatrix":
        norm = []
        for (r, c), elem in sorted(entries.items()):
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry position {(r, c)} out of range")
            cell = tuple(sorted((g, v) for g, v in elem.items() if v != 0))
            if cell:
                norm.append(((r, c), cell))
        return cls(rows, cols, tuple(norm))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "GroupRingMatrix":
        return cls(rows, cols, ())

    def entry(self, r: int, c: int) -> dict:
        for (rr, cc), cell in self.entries:
            if (rr, cc) == (r, c):
                return dict(cell)
        return {}

    def as_dict(self) -> dict:
        return {(r, c): dict(cell) for (r, c), cell in self.entries}

    def check_elements(self, group: FiniteGroup) -> None:
        for _, cell in self.entries:
            for g, _ in cell:
                if not 0 <= g < group.order:
                    raise ValueError(f"group element index {g} out of range")


def gr_mat_mul(a: GroupRingMatrix, b: GroupRingMatrix, group: FiniteGroup) -> GroupRingMatrix:
    if a.cols != b.rows:
        raise ValueError("shape mismatch")
    left = a.as_dict()
    right: dict = {}
    for (r, c), cell in b.entries:
        right.setdefault(r, []).append((c, dict(cell)))
    out: dict = {}
    for (r, j), cell in left.items():
        for c, other in right.get(j, ()):
            prod = gr_mul(cell, other, group)
            if prod:
                out[(r, c)] = gr_add(out.get((r, c), {}), prod)
    out = {pos: cell for pos, cell in out.items() if cell}
    return GroupRingMatrix.from_entries(a.rows, b.cols, out)


def gr_stack(a: GroupRingMatrix, b: GroupRingMatrix) -> GroupRingMatrix:
    """Stack two maps with the same codomain (domain rows concatenate)."""
    if a.cols != b.cols:
        raise ValueError("codomain mismatch")
    entries = a.as_dict()
    for (r, c), cell in b.as_dict().items():
        entries[(r + a.rows, c)] = cell
    return GroupRingMatrix.from_entries(a.rows + b.rows, a.cols, entries)


def restrict_scalars(m: GroupRingMatrix, group: FiniteGroup) -> list:
    """Integer matrix of the map on the underlying Z-module.

    Each ZG entry x becomes the |G| x |G| regular-representation block
    B[g][h] = coefficient of h in g*x, so restriction is multiplicative
    for composites taken in the row-vector convention.
    """
    m.check_elements(group)
    n = group.order
    out = [[0] * (m.cols * n) for _ in range(m.rows * n)]
    for (r, c), cell in m.entries:
        for g in range(n):
            row = out[r * n + g]
            for elem, coeff in cell:
                row[c * n + group.mul(g, elem)] += coeff
    return out


# ---------------------------------------------------------------------------
# Exact integer matrices.


def int_matrix(rows: int, cols: int) -> list:
    return [[0] * cols for _ in range(rows)]


def identity_matrix(n: int) -> list:
    out = int_matrix(n, n)
    for i in range(n):
        out[i][i] = 1
    return out


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rational_rank(a: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction elimination; independent oracle for SNF ranks."""
    m = [[Fraction(x) for x in row] for row in a]
    rank = 0
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivot_row = 0
    for col in range(cols):
        sel = None
        for r in range(pivot_row, rows):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        m[pivot_row], m[sel] = m[sel], m[pivot_row]
        pv = m[pivot_row][col]
        for r in range(rows):
            if r != pivot_row and m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [x - factor * y for x, y in zip(m[r], m[pivot_row])]
        pivot_row += 1
        rank += 1
        if pivot_row == rows:
            break
    return rank


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple:
    """Smith normal form with transforms: returns (d, u, v) with u*a*v = d.

    d is diagonal with d1 | d2 | ..., u and v unimodular.  Pivots on the
    least nonzero absolute value, which keeps coefficient growth tame for
    desk-scale inputs.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [list(map(int, row)) for row in a]
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def row_op(i, j, q):  # row_i -= q * row_j
        d[i] = [x - q * y for x, y in zip(d[i], d[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            d[r][i] -= q * d[r][j]
        for r in range(cols):
            v[r][i] -= q * v[r][j]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(rows):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # Least-absolute-value pivot in the trailing block.
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        i, j = pivot
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        dirty = False
        for i in range(t + 1, rows):
            if d[i][t] != 0:
                q = d[i][t] // d[t][t]
                row_op(i, t, q)
                if d[i][t] != 0:
                    dirty = True
        for j in range(t + 1, cols):
            if d[t][j] != 0:
                q = d[t][j] // d[t][t]
                col_op(j, t, q)
                if d[t][j] != 0:
                    dirty = True
        if dirty:
            continue  # smaller remainders appeared; re-pick the pivot
        # Divisibility: pivot must divide the whole trailing block.
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if d[i][j] % d[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            # Fold the offending row into row t and redo this pivot.
            d[t] = [x + y for x, y in zip(d[t], d[offender])]
            u[t] = [x + y for x, y in zip(u[t], u[offender])]
            continue
        t += 1
    return d, u, v


def diagonal_of(d: Sequence[Sequence[int]]) -> list:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def invariant_factors(a: Sequence[Sequence[int]]) -> list:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    d, _, _ = smith_normal_form(a)
    return [x for x in diagonal_of(d) if x != 0]


def matrix_rank(a: Sequence[Sequence[int]]) -> int:
    return len(invariant_factors(a))


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion: tuple  # tuple[int, ...], each > 1, d_i | d_{i+1}

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(t <= 1 for t in self.torsion):
            raise ValueError("torsion coefficients must exceed 1")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"C{t}" for t in self.torsion)
        return " x ".join(parts) if parts else "0"


def cokernel_invariants(a: Sequence[Sequence[int]], ambient_rank: int) -> AbelianGroup:
    """Z^ambient_rank modulo the row span of a."""
    factors = invariant_factors(a) if a else []
    if len(factors) > ambient_rank:
        raise ValueError("row span exceeds ambient rank")
    return AbelianGroup(ambient_rank - len(factors),
                        tuple(f for f in factors if f != 1))


# ---------------------------------------------------------------------------
# Chain complexes over ZG.


@dataclass(frozen=True)
class ChainComplexData:
    group: FiniteGroup
    ranks: tuple  # tuple[int, ...], ranks[k] = number of k-cells over ZG
    boundaries: tuple  # boundaries[k-1] = d_k: ranks[k] x ranks[k-1]

    def __post_init__(self):
        if not self.ranks or self.ranks[0] < 1:
            raise ValueError("need rank_0 >= 1")
        if len(self.boundaries) != len(self.ranks) - 1:
            raise ValueError("need one boundary map per dimension 1..n")
        for k, b in enumerate(self.boundaries, start=1):
            if (b.rows, b.cols) != (self.ranks[k], self.ranks[k - 1]):
                raise ValueError(f"boundary {k} has shape {(b.rows, b.cols)}, "
                                 f"expected {(self.ranks[k], self.ranks[k - 1])}")
            b.check_elements(self.group)
        for k in range(2, len(self.ranks)):
            prod = gr_mat_mul(self.boundaries[k - 1], self.boundaries[k - 2], self.group)
            if prod.entries:
                raise ValueError(f"boundary condition fails: d_{k-1} o d_{k} != 0")

    @property
    def top_dim(self) -> int:
        return len(self.ranks) - 1

    def boundary(self, k: int) -> GroupRingMatrix:
        return self.boundaries[k - 1]


def homology_at(c: ChainComplexData, k: int) -> AbelianGroup:
    """Homology of the restricted-scalars integer complex at position k."""
    n = c.top_dim
    if not 0 <= k <= n:
        raise ValueError(f"position {k} outside 0..{n}")
    g = c.group.order
    ambient = c.ranks[k] * g
    rank_out = matrix_rank(restrict_scalars(c.boundary(k), c.group)) if k >= 1 else 0
    if k < n:
        incoming = restrict_scalars(c.boundary(k + 1), c.group)
        factors = invariant_factors(incoming)
    else:
        factors = []
    free = ambient - rank_out - len(factors)
    if free < 0:
        raise ValueError("inconsistent chain data (is d o d = 0?)")
    return AbelianGroup(free, tuple(f for f in factors if f != 1))


def glue_product(c1: ChainComplexData, c2: ChainComplexData) -> ChainComplexData:
    """Union of two complexes along the common codimension-1 skeleton.

    Both complexes must agree in ranks 0..n-1 and boundaries 1..n-1; the
    top boundaries stack.
    """
    if c1.group != c2.group:
        raise ValueError("complexes over different groups")
    if c1.top_dim != c2.top_dim:
        raise ValueError("dimension mismatch")
    n = c1.top_dim
    if c1.ranks[:n] != c2.ranks[:n]:
        raise ValueError("lower skeleton rank mismatch")
    if c1.boundaries[:n - 1] != c2.boundaries[:n - 1]:
        raise ValueError("lower skeleton boundary mismatch")
    top = gr_stack(c1.boundary(n), c2.boundary(n))
    return ChainComplexData(c1.group,
                            c1.ranks[:n] + (c1.ranks[n] + c2.ranks[n],),
                            c1.boundaries[:n - 1] + (top,))


def euler_char_chain(c: ChainComplexData) -> int:
    return sum((-1) ** k * r for k, r in enumerate(c.ranks))


def product_euler(c1: ChainComplexData, c2: ChainComplexData) -> int:
    """Euler characteristic of the glued complex, via the cell count identity."""
    if c1.group != c2.group or c1.top_dim != c2.top_dim:
        raise ValueError("complexes not gluable")
    n = c1.top_dim
    return euler_char_chain(c1) + (-1) ** n * c2.ranks[n]


def check_dyer_bound(c1: ChainComplexData, c2: ChainComplexData,
                     c0: ChainComplexData) -> bool:
    """Arithmetic hypothesis test: equal signed Euler characteristics sitting
    at least 2 above a reference complex."""
    if not (c1.group == c2.group == c0.group and c1.top_dim == c2.top_dim == c0.top_dim):
        raise ValueError("complexes not comparable")
    n = c1.top_dim
    s = (-1) ** n
    return (s * euler_char_chain(c1) == s * euler_char_chain(c2)
            and s * euler_char_chain(c1) >= 2 + s * euler_char_chain(c0))


# ---------------------------------------------------------------------------
# File formats.


def load_group_csv(text: str) -> FiniteGroup:
    """Group file: first row `order,identity`, then `order` table rows."""
    reader = csv.reader(io.StringIO(text.strip()))
    rows = [[int(x) for x in row] for row in reader if row]
    if not rows or len(rows[0]) != 2:
        raise ValueError("group file must start with 'order,identity'")
    order, identity = rows[0]
    table = rows[1:]
    if len(table) != order:
        raise ValueError(f"expected {order} table rows, got {len(table)}")
    group = FiniteGroup.from_table(table)
    if group.identity != identity:
        raise ValueError("declared identity disagrees with the table")
    return group


def dump_group_csv(group: FiniteGroup) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow([group.order, group.identity])
    for row in group.table:
        writer.writerow(row)
    return out.getvalue()


def chain_to_json(c: ChainComplexData) -> dict:
    entries = []
    for k, b in enumerate(c.boundaries, start=1):
        for (r, col), cell in b.entries:
            for elem, coeff in cell:
                entries.append([k, r, col, elem, coeff])
    return {
        "group": {"order": c.group.order, "identity": c.group.identity,
                  "table": [list(r) for r in c.group.table]},
        "n": c.top_dim,
        "ranks": list(c.ranks),
        "entries": entries,
    }


def chain_from_json(data: Mapping, group: FiniteGroup | None = None,
                    base_dir: str = ".") -> ChainComplexData:
    if group is None:
        g = data["group"]
        if isinstance(g, str):
            # reference to a CSV group file, relative to the chain file
            import os
            with open(os.path.join(base_dir, g)) as fh:
                group = load_group_csv(fh.read())
        else:
            group = FiniteGroup.from_table(g["table"])
            if group.identity != g.get("identity", group.identity):
                raise ValueError("declared identity disagrees with the table")
    n = data["n"]
    ranks = tuple(data["ranks"])
    if len(ranks) != n + 1:
        raise ValueError("ranks must list dimensions 0..n")
    cells: dict = {k: {} for k in range(1, n + 1)}
    for k, r, col, elem, coeff in data["entries"]:
        if not 1 <= k <= n:
            raise ValueError(f"boundary index {k} out of range")
        cell = cells[k].setdefault((r, col), {})
        cell[elem] = cell.get(elem, 0) + coeff
    boundaries = tuple(
        GroupRingMatrix.from_entries(ranks[k], ranks[k - 1], cells[k])
        for k in range(1, n + 1))
    return ChainComplexData(group, ranks, boundaries)


def load_chain_file(path: str) -> ChainComplexData:
    import os
    with open(path) as fh:
        return chain_from_json(json.load(fh), base_dir=os.path.dirname(path) or ".")
