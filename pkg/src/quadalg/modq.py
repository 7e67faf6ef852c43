"""Matrices over a square ring, with tracks and obstruction cocycles.

A morphism ``y -> x`` over a square ring ``Q`` is an ``x`` by ``y``
matrix of ring elements together with a strictly upper-triangular layer
of quadratic entries recording how the rows of each column interfere.
Composition has a closed form whose correction terms are forced by the
ring axioms. An independent route evaluates the same composite by
substituting columns into free-module arithmetic, using only the
element-level operations, so the two can be compared on random input.

Tracks are homotopies between parallel morphisms through a crossed
extension of the ring. They compose vertically, whisker on both sides,
and the automorphism tracks of any morphism form a group isomorphic to
a matrix group over the extension's kernel module. For a finite
extension, choosing lifts of the quotient matrices produces a
degree-three obstruction cocycle on the quotient's matrix category.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

from .abelian import AbMap, FgAbGroup
from .bwcoh import FinCat, NatSystem
from .crossed import CrossedExtension
from .errors import (
    BoundaryMismatch,
    NotFinite,
    SectionInvalid,
    ShapeMismatch,
    TooLarge,
)
from .nil2 import DEFAULT_ENUM_BOUND
from .reports import Report
from .sqring import SquareRing


# ---------------------------------------------------------------------------
# Free-module elements
# ---------------------------------------------------------------------------

@dataclass
class FreeModElement:
    """An element of the rank-``n`` free module over a square ring.

    ``coords[i]`` are the coordinates; ``pairs[(i, j)]`` for ``i < j``
    are quadratic cross terms between coordinates. Addition is twisted
    by the cross effect of the ring, so the module is a square group
    rather than a plain abelian group.
    """

    ring: SquareRing
    rank: int
    coords: tuple
    pairs: dict

    def __post_init__(self):
        if len(self.coords) != self.rank:
            raise ShapeMismatch(f"{len(self.coords)} coordinates for rank {self.rank}")
        ee = self.ring.ee
        clean = {}
        for (i, j), v in self.pairs.items():
            if not (0 <= i < j < self.rank):
                raise ShapeMismatch(f"pair index {(i, j)} out of range for rank {self.rank}")
            if v != ee.zero():
                clean[(i, j)] = v
        self.pairs = clean

    @classmethod
    def zero(cls, ring: SquareRing, rank: int) -> "FreeModElement":
        return cls(ring, rank, tuple(ring.e.zero() for _ in range(rank)), {})

    def pair(self, i: int, j: int):
        return self.pairs.get((i, j), self.ring.ee.zero())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeModElement)
            and self.rank == other.rank
            and self.coords == other.coords
            and self.pairs == other.pairs
        )

    def add(self, other: "FreeModElement") -> "FreeModElement":
        if other.rank != self.rank:
            raise ShapeMismatch("rank mismatch in module addition")
        Q, e, ee = self.ring, self.ring.e, self.ring.ee
        h2 = Q.H(Q.two())
        coords = tuple(e.add(a, b) for a, b in zip(self.coords, other.coords))
        pairs = {}
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                v = ee.add(self.pair(i, j), other.pair(i, j))
                v = ee.add(v, Q.act_pair(other.coords[i], self.coords[j], h2))
                pairs[(i, j)] = v
        return FreeModElement(Q, self.rank, coords, pairs)

    def neg(self) -> "FreeModElement":
        Q, e, ee = self.ring, self.ring.e, self.ring.ee
        h2 = Q.H(Q.two())
        coords = tuple(e.neg(a) for a in self.coords)
        pairs = {}
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                v = ee.neg(self.pair(i, j))
                v = ee.add(v, Q.act_pair(self.coords[i], self.coords[j], h2))
                pairs[(i, j)] = v
        return FreeModElement(Q, self.rank, coords, pairs)

    def sub(self, other: "FreeModElement") -> "FreeModElement":
        return self.add(other.neg())

    def act(self, x) -> "FreeModElement":
        """The right action of a ring element."""
        Q, ee = self.ring, self.ring.ee
        hx = Q.H(x)
        coords = tuple(Q.mul(a, x) for a in self.coords)
        pairs = {}
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                v = Q.act_right(self.pair(i, j), x)
                v = ee.add(v, Q.act_pair(self.coords[i], self.coords[j], hx))
                pairs[(i, j)] = v
        return FreeModElement(Q, self.rank, coords, pairs)

    def bracket(self, other: "FreeModElement", a) -> "FreeModElement":
        """The pairing ``[self, other]_a`` for a quadratic entry ``a``.

        Off-diagonal contributions land in the cross-term layer; the
        diagonal ones are central, so the result adds to any element
        without further corrections.
        """
        if other.rank != self.rank:
            raise ShapeMismatch("rank mismatch in module bracket")
        Q, e, ee = self.ring, self.ring.e, self.ring.ee
        tmap = Q.square_group().tmap
        coords = [e.zero() for _ in range(self.rank)]
        pairs: dict = {}
        for i in range(self.rank):
            for j in range(self.rank):
                b = Q.act_pair(self.coords[i], other.coords[j], a)
                if i < j:
                    pairs[(i, j)] = ee.add(pairs.get((i, j), ee.zero()), b)
                elif i > j:
                    pairs[(j, i)] = ee.add(pairs.get((j, i), ee.zero()), tmap(b))
                else:
                    coords[i] = e.add(coords[i], Q.P(b))
        return FreeModElement(Q, self.rank, tuple(coords), pairs)


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

@dataclass
class ModQMor:
    """A morphism ``ncols -> nrows`` in the matrix category of ``ring``.

    ``fi[i][k]`` is the ring entry in row ``i``, column ``k``;
    ``fij[(i, j)][k]`` for ``i < j`` is the quadratic entry of column
    ``k`` between rows ``i`` and ``j``.
    """

    ring: SquareRing
    nrows: int
    ncols: int
    fi: tuple
    fij: dict

    def __post_init__(self):
        if len(self.fi) != self.nrows or any(len(row) != self.ncols for row in self.fi):
            raise ShapeMismatch(
                f"entry matrix is not {self.nrows} by {self.ncols}"
            )
        ee = self.ring.ee
        zero_col = tuple(ee.zero() for _ in range(self.ncols))
        clean = {}
        for (i, j), col in self.fij.items():
            if not (0 <= i < j < self.nrows):
                raise ShapeMismatch(f"pair index {(i, j)} out of range for {self.nrows} rows")
            if len(col) != self.ncols:
                raise ShapeMismatch(f"pair row {(i, j)} has {len(col)} columns, wanted {self.ncols}")
            col = tuple(col)
            if col != zero_col:
                clean[(i, j)] = col
        self.fij = clean

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModQMor)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.fi == other.fi
            and self.fij == other.fij
        )

    def pair_entry(self, i: int, j: int, k: int):
        col = self.fij.get((i, j))
        return col[k] if col is not None else self.ring.ee.zero()

    @classmethod
    def zero(cls, ring: SquareRing, nrows: int, ncols: int) -> "ModQMor":
        row = tuple(ring.e.zero() for _ in range(ncols))
        return cls(ring, nrows, ncols, tuple(row for _ in range(nrows)), {})

    @classmethod
    def identity(cls, ring: SquareRing, n: int) -> "ModQMor":
        fi = tuple(
            tuple(ring.one if i == k else ring.e.zero() for k in range(n))
            for i in range(n)
        )
        return cls(ring, n, n, fi, {})

    @classmethod
    def from_columns(cls, ring: SquareRing, nrows: int, cols) -> "ModQMor":
        cols = list(cols)
        for c in cols:
            if c.rank != nrows:
                raise ShapeMismatch("column rank does not match the row count")
        fi = tuple(tuple(c.coords[i] for c in cols) for i in range(nrows))
        fij: dict = {}
        for k, c in enumerate(cols):
            for (i, j), v in c.pairs.items():
                col = fij.setdefault(
                    (i, j), [ring.ee.zero() for _ in range(len(cols))]
                )
                col[k] = v
        return cls(ring, nrows, len(cols), fi, {k: tuple(v) for k, v in fij.items()})

    def column(self, k: int) -> FreeModElement:
        coords = tuple(self.fi[i][k] for i in range(self.nrows))
        pairs = {key: col[k] for key, col in self.fij.items() if col[k] != self.ring.ee.zero()}
        return FreeModElement(self.ring, self.nrows, coords, pairs)

    def columns(self) -> list[FreeModElement]:
        return [self.column(k) for k in range(self.ncols)]

    def add(self, other: "ModQMor") -> "ModQMor":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch("sum of morphisms with different shapes")
        return ModQMor.from_columns(
            self.ring, self.nrows,
            (a.add(b) for a, b in zip(self.columns(), other.columns())),
        )

    def neg(self) -> "ModQMor":
        return ModQMor.from_columns(self.ring, self.nrows, (c.neg() for c in self.columns()))


def random_morphism(ring: SquareRing, nrows: int, ncols: int, rng, pair_chance: float = 0.8) -> ModQMor:
    fi = tuple(tuple(ring.e.sample(rng) for _ in range(ncols)) for _ in range(nrows))
    fij = {}
    for i in range(nrows):
        for j in range(i + 1, nrows):
            if rng.random() < pair_chance:
                fij[(i, j)] = tuple(ring.ee.sample(rng) for _ in range(ncols))
    return ModQMor(ring, nrows, ncols, fi, fij)


# ---------------------------------------------------------------------------
# Composition: closed form and substitution oracle
# ---------------------------------------------------------------------------

def modq_compose(f: ModQMor, g: ModQMor, mode: str = "closed") -> ModQMor:
    """The composite ``f . g`` (``g`` first), by either route.

    ``closed`` expands every correction term explicitly; ``oracle``
    substitutes the columns of ``f`` into module arithmetic and never
    touches the closed formula. Both return the same morphism.
    """
    if f.ncols != g.nrows:
        raise ShapeMismatch(
            f"cannot compose {f.nrows}x{f.ncols} with {g.nrows}x{g.ncols}"
        )
    if mode == "closed":
        return _compose_closed(f, g)
    if mode == "oracle":
        return _compose_oracle(f, g)
    raise ValueError(f"unknown composition mode: {mode!r}")


def _compose_closed(f: ModQMor, g: ModQMor) -> ModQMor:
    Q = f.ring
    e, ee = Q.e, Q.ee
    tmap = Q.square_group().tmap
    h2 = Q.H(Q.two())
    x, y, z = f.nrows, f.ncols, g.ncols
    g_pairs = sorted(g.fij.items())

    fi = []
    for i in range(x):
        row = []
        for s in range(z):
            acc = e.zero()
            for k in range(y):
                acc = e.add(acc, Q.mul(f.fi[i][k], g.fi[k][s]))
            for (k, l), col in g_pairs:
                acc = e.add(acc, Q.P(Q.act_pair(f.fi[i][k], f.fi[i][l], col[s])))
            row.append(acc)
        fi.append(tuple(row))

    fij = {}
    for i in range(x):
        for j in range(i + 1, x):
            col_out = []
            for s in range(z):
                acc = ee.zero()
                for k in range(y):
                    acc = ee.add(acc, Q.act_right(f.pair_entry(i, j, k), g.fi[k][s]))
                    acc = ee.add(
                        acc, Q.act_pair(f.fi[i][k], f.fi[j][k], Q.H(g.fi[k][s]))
                    )
                for (k, l), col in g_pairs:
                    acc = ee.add(acc, Q.act_pair(f.fi[i][k], f.fi[j][l], col[s]))
                    acc = ee.add(acc, Q.act_pair(f.fi[i][l], f.fi[j][k], tmap(col[s])))
                for k in range(y):
                    for l in range(k + 1, y):
                        acc = ee.add(
                            acc,
                            Q.act_pair(
                                Q.mul(f.fi[i][l], g.fi[l][s]),
                                Q.mul(f.fi[j][k], g.fi[k][s]),
                                h2,
                            ),
                        )
                col_out.append(acc)
            fij[(i, j)] = tuple(col_out)
    return ModQMor(Q, x, z, tuple(fi), fij)


def _compose_oracle(f: ModQMor, g: ModQMor) -> ModQMor:
    cols_f = f.columns()
    out = []
    for s in range(g.ncols):
        acc = FreeModElement.zero(f.ring, f.nrows)
        for k in range(g.nrows):
            acc = acc.add(cols_f[k].act(g.fi[k][s]))
        for (k, l), col in sorted(g.fij.items()):
            acc = acc.add(cols_f[k].bracket(cols_f[l], col[s]))
        out.append(acc)
    return ModQMor.from_columns(f.ring, f.nrows, out)


def composition_report(
    ring: SquareRing,
    samples: int = 200,
    seed: int = 0,
    max_dim: int = 3,
    associativity: bool = True,
) -> Report:
    """Random agreement of the two composition routes, plus category laws."""
    import random as _random

    rng = _random.Random(seed)
    r = Report(title=f"matrix category over {ring.name}", samples=samples, seed=seed)

    ok, witness = True, None
    for trial in range(samples):
        x, y, z = (rng.randint(1, max_dim) for _ in range(3))
        f = random_morphism(ring, x, y, rng)
        g = random_morphism(ring, y, z, rng)
        if modq_compose(f, g, "closed") != modq_compose(f, g, "oracle"):
            ok, witness = False, f"trial {trial}: shapes {x}x{y}, {y}x{z}"
            break
    r.add("closed composition matches the substitution route", ok, witness)

    ok, witness = True, None
    for trial in range(samples):
        x, y = rng.randint(1, max_dim), rng.randint(1, max_dim)
        f = random_morphism(ring, x, y, rng)
        if modq_compose(ModQMor.identity(ring, x), f) != f:
            ok, witness = False, f"trial {trial}: left identity"
            break
        if modq_compose(f, ModQMor.identity(ring, y)) != f:
            ok, witness = False, f"trial {trial}: right identity"
            break
    r.add("identity morphisms are neutral", ok, witness)

    if associativity:
        ok, witness = True, None
        for trial in range(samples):
            x, y, z, w = (rng.randint(1, max_dim) for _ in range(4))
            f = random_morphism(ring, x, y, rng)
            g = random_morphism(ring, y, z, rng)
            h = random_morphism(ring, z, w, rng)
            if modq_compose(modq_compose(f, g), h) != modq_compose(f, modq_compose(g, h)):
                ok, witness = False, f"trial {trial}: shapes {x},{y},{z},{w}"
                break
        r.add("composition is associative", ok, witness)

    ok, witness = True, None
    for trial in range(samples):
        x, y = rng.randint(1, max_dim), rng.randint(1, max_dim)
        m = random_morphism(ring, x, y, rng)
        n = random_morphism(ring, x, y, rng)
        p = random_morphism(ring, x, y, rng)
        if m.add(n).add(p) != m.add(n.add(p)):
            ok, witness = False, f"trial {trial}: addition associativity"
            break
        if m.add(m.neg()).fi != ModQMor.zero(ring, x, y).fi or m.add(m.neg()).fij:
            ok, witness = False, f"trial {trial}: inverse"
            break
    r.add("morphism addition is a group", ok, witness)

    ok, witness = True, None
    for trial in range(samples):
        x, y = rng.randint(1, max_dim), rng.randint(1, max_dim)
        m = random_morphism(ring, x, y, rng)
        n = random_morphism(ring, x, y, rng)
        v = ring.e.sample(rng)
        lhs = m.add(n).columns()
        rhs = [
            a.act(v).add(b.act(v)).add(a.bracket(b, ring.H(v)))
            for a, b in zip(m.columns(), n.columns())
        ]
        for a2, b2 in zip(lhs, rhs):
            if a2.act(v) != b2:
                ok, witness = False, f"trial {trial}: action on a sum"
                break
        if not ok:
            break
    r.add("module action distributes with the bracket correction", ok, witness)
    return r


# ---------------------------------------------------------------------------
# Quotient functor
# ---------------------------------------------------------------------------

def quotient_matrix(ext: CrossedExtension, f: ModQMor) -> tuple:
    """Entrywise image of a morphism in the quotient ring."""
    q = ext.quot.q
    return tuple(tuple(q(v) for v in row) for row in f.fi)


def quotient_matmul(ext: CrossedExtension, A: tuple, B: tuple) -> tuple:
    car, mul = ext.quot.carrier, ext.quot.mul
    return tuple(
        tuple(
            car.sum(mul(A[i][k], B[k][s]) for k in range(len(B)))
            for s in range(len(B[0]) if B else 0)
        )
        for i in range(len(A))
    )


def homotopic(ext: CrossedExtension, f: ModQMor, g: ModQMor) -> bool:
    """Whether a track ``f => g`` exists: the quotients must agree."""
    return quotient_matrix(ext, f) == quotient_matrix(ext, g)


# ---------------------------------------------------------------------------
# Tracks
# ---------------------------------------------------------------------------

@dataclass
class Track:
    """A homotopy ``f0 => f1`` through the extension's degree one.

    ``h[i][k]`` bounds the difference of the ring entries; the
    quadratic layers of ``f0`` and ``f1`` are not constrained. The
    constructor checks every boundary, so any operation that builds a
    track re-certifies its own correction terms.
    """

    ext: CrossedExtension
    f0: ModQMor
    f1: ModQMor
    h: tuple

    def __post_init__(self):
        if (self.f0.nrows, self.f0.ncols) != (self.f1.nrows, self.f1.ncols):
            raise ShapeMismatch("track between morphisms of different shapes")
        x, y = self.f0.nrows, self.f0.ncols
        if len(self.h) != x or any(len(row) != y for row in self.h):
            raise ShapeMismatch(f"track matrix is not {x} by {y}")
        c0 = self.ext.c0
        for i in range(x):
            for k in range(y):
                want = c0.sub(self.f0.fi[i][k], self.f1.fi[i][k])
                got = self.ext.boundary(self.h[i][k])
                if got != want:
                    raise BoundaryMismatch(
                        f"entry ({i}, {k}): boundary {got!r} does not bound the "
                        f"difference {want!r}"
                    )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.f0.nrows, self.f0.ncols)


def track_vcomp(first: Track, second: Track) -> Track:
    """Paste ``first: f => g`` with ``second: g => e``."""
    if first.f1 != second.f0:
        raise ShapeMismatch("vertical composition needs matching middle morphisms")
    c1 = first.ext.c1
    h = tuple(
        tuple(c1.add(a, b) for a, b in zip(ra, rb))
        for ra, rb in zip(first.h, second.h)
    )
    return Track(first.ext, first.f0, second.f1, h)


def track_invert(t: Track) -> Track:
    c1 = t.ext.c1
    h = tuple(tuple(c1.neg(v) for v in row) for row in t.h)
    return Track(t.ext, t.f1, t.f0, h)


def _pair_keys(f: ModQMor, g: ModQMor):
    return sorted(set(f.fij) | set(g.fij))


def track_left_whisker(u: ModQMor, t: Track) -> Track:
    """The track ``u . f0 => u . f1`` induced on composites.

    The main term pushes the homotopy through the left action; the
    correction collects the quadratic entries of the two targets and
    the cross effects produced by reordering the entrywise differences.
    """
    if u.ncols != t.f0.nrows:
        raise ShapeMismatch("whiskering morphism does not compose")
    ext, Q = t.ext, t.ext.ring
    c1, ee = ext.c1, Q.ee
    cross = Q.square_group().cross
    x2, x, y = u.nrows, u.ncols, t.f0.ncols
    h = []
    for i in range(x2):
        row = []
        for s in range(y):
            main = c1.sum(ext.act_left(u.fi[i][k], t.h[k][s]) for k in range(x))
            corr = ee.zero()
            for (k, l) in _pair_keys(t.f0, t.f1):
                diff = ee.sub(t.f0.pair_entry(k, l, s), t.f1.pair_entry(k, l, s))
                corr = ee.add(corr, ext.ee_pair(u.fi[i][k], u.fi[i][l], diff))
            for k in range(x):
                for l in range(k + 1, x):
                    d_l = ext.boundary(ext.act_left(u.fi[i][l], t.h[l][s]))
                    b_k = Q.mul(u.fi[i][k], t.f1.fi[k][s])
                    corr = ee.sub(corr, cross(d_l, b_k))
            row.append(c1.add(main, ext.P(corr)))
        h.append(tuple(row))
    return Track(ext, modq_compose(u, t.f0), modq_compose(u, t.f1), tuple(h))


def track_right_whisker(t: Track, g: ModQMor) -> Track:
    """The track ``f0 . g => f1 . g`` induced on composites."""
    if t.f0.ncols != g.nrows:
        raise ShapeMismatch("whiskering morphism does not compose")
    ext, Q = t.ext, t.ext.ring
    c1, ee = ext.c1, Q.ee
    cross = Q.square_group().cross
    x, y, z = t.f0.nrows, t.f0.ncols, g.ncols
    g_pairs = sorted(g.fij.items())
    h = []
    for i in range(x):
        row = []
        for s in range(z):
            main = c1.sum(ext.act_right(t.h[i][k], g.fi[k][s]) for k in range(y))
            corr = ee.zero()
            for (k, l), col in g_pairs:
                corr = ee.add(corr, ext.ee_pair(t.f0.fi[i][k], t.f0.fi[i][l], col[s]))
                corr = ee.sub(corr, ext.ee_pair(t.f1.fi[i][k], t.f1.fi[i][l], col[s]))
            for k in range(y):
                corr = ee.add(
                    corr,
                    ext.ee_pair(
                        ext.boundary(t.h[i][k]), t.f1.fi[i][k], Q.H(g.fi[k][s])
                    ),
                )
            for k in range(y):
                for l in range(k + 1, y):
                    d_l = ext.boundary(ext.act_right(t.h[i][l], g.fi[l][s]))
                    b_k = Q.mul(t.f1.fi[i][k], g.fi[k][s])
                    corr = ee.sub(corr, cross(d_l, b_k))
            row.append(c1.add(main, ext.P(corr)))
        h.append(tuple(row))
    return Track(ext, modq_compose(t.f0, g), modq_compose(t.f1, g), tuple(h))


def track_hcomp(alpha: Track, beta: Track) -> Track:
    """Horizontal composite ``alpha . beta`` along the first route.

    The second route (whisker the other way first) gives the same
    track; the interchange comparison lives in the test suite.
    """
    return track_vcomp(track_right_whisker(alpha, beta.f0), track_left_whisker(alpha.f1, beta))


def track_tau(ext: CrossedExtension, f: ModQMor, m: tuple) -> Track:
    """The automorphism track of ``f`` attached to a kernel-module matrix."""
    x, y = f.nrows, f.ncols
    if len(m) != x or any(len(row) != y for row in m):
        raise ShapeMismatch(f"module matrix is not {x} by {y}")
    h = tuple(tuple(ext.include(v) for v in row) for row in m)
    return Track(ext, f, f, h)


def track_tau_inv(t: Track, bound: int = DEFAULT_ENUM_BOUND) -> tuple:
    """The kernel-module matrix of an automorphism track."""
    if t.f0 != t.f1:
        raise ValueError("only automorphism tracks carry module values")
    table = {t.ext.include(m): m for m in t.ext.module.elements(bound)}
    out = []
    for row in t.h:
        vals = []
        for v in row:
            if v not in table:
                raise ValueError(f"track entry {v!r} is not in the kernel module image")
            vals.append(table[v])
        out.append(tuple(vals))
    return tuple(out)


def first_track(
    ext: CrossedExtension, f: ModQMor, g: ModQMor, bound: int = DEFAULT_ENUM_BOUND
) -> Track | None:
    """The first track ``f => g`` in enumeration order, or ``None``.

    Requires the degree-one carrier to be finite; a track exists
    exactly when the quotient matrices agree.
    """
    if (f.nrows, f.ncols) != (g.nrows, g.ncols):
        raise ShapeMismatch("parallel morphisms needed")
    table: dict = {}
    for c in ext.c1.elements(bound):
        table.setdefault(ext.boundary(c), c)
    c0 = ext.c0
    h = []
    for i in range(f.nrows):
        row = []
        for k in range(f.ncols):
            diff = c0.sub(f.fi[i][k], g.fi[i][k])
            if diff not in table:
                return None
            row.append(table[diff])
        h.append(tuple(row))
    return Track(ext, f, g, tuple(h))


# ---------------------------------------------------------------------------
# Track extensions and the obstruction cocycle
# ---------------------------------------------------------------------------

class CyclicTrackExtension:
    """Lifting problem for ``Z/m`` over its boundary-``d`` quotient.

    The base is the multiplicative monoid of ``Z/g`` with
    ``g = gcd(d, m)`` as a one-object category; lifts are residues mod
    ``m`` and tracks between lifts are boundary certificates. This is
    written directly on integers, independent of the matrix machinery.
    """

    def __init__(self, m: int, d: int):
        if m < 2:
            raise ValueError("the total ring needs order at least 2")
        self.m = m
        self.d = d % m
        self.g = math.gcd(self.d, m) if self.d else m
        self.stride = m // self.g
        self.base = FinCat.from_monoid(
            tuple(range(self.g)),
            lambda a, b: (a * b) % self.g,
            1 % self.g,
            name=f"Z/{self.g} multiplicative",
        )
        if self.g > 1:
            block = FgAbGroup((self.g,))
        else:
            block = FgAbGroup.trivial()

        def act(nu, alpha, psi):
            scale = (psi * nu) % self.g if self.g > 1 else 0
            return AbMap(block, block, [[scale]] if self.g > 1 else [])

        self.system = NatSystem(
            cat=self.base,
            group=lambda alpha: block,
            act=act,
            name=f"kernel Z/{self.g} with two-sided multiplication",
        )

    def section(self, phi: int) -> int:
        return phi % self.m

    def second_section(self, phi: int) -> int:
        return (phi + self.m - self.g) % self.m

    def compose_lifts(self, u: int, v: int) -> int:
        return (u * v) % self.m

    def first_track(self, F: int, G: int) -> "CycTrack":
        for r in range(self.m):
            if (self.d * r - (F - G)) % self.m == 0:
                return CycTrack(self.m, self.d, F, G, r)
        raise SectionInvalid(f"no track from {F} to {G} mod {self.m}")

    def vcomp(self, t1: "CycTrack", t2: "CycTrack") -> "CycTrack":
        if t1.f1 != t2.f0:
            raise ShapeMismatch("vertical composition needs matching middles")
        return CycTrack(self.m, self.d, t1.f0, t2.f1, (t1.r + t2.r) % self.m)

    def invert(self, t: "CycTrack") -> "CycTrack":
        return CycTrack(self.m, self.d, t.f1, t.f0, (-t.r) % self.m)

    def left_whisker(self, u: int, t: "CycTrack") -> "CycTrack":
        return CycTrack(
            self.m, self.d, (u * t.f0) % self.m, (u * t.f1) % self.m, (u * t.r) % self.m
        )

    def right_whisker(self, t: "CycTrack", v: int) -> "CycTrack":
        return CycTrack(
            self.m, self.d, (t.f0 * v) % self.m, (t.f1 * v) % self.m, (t.r * v) % self.m
        )

    def value(self, t: "CycTrack") -> tuple:
        if t.f0 != t.f1:
            raise ValueError("only automorphism tracks carry module values")
        if t.r % self.stride:
            raise ValueError(f"track value {t.r} is not in the kernel module image")
        return ((t.r // self.stride) % self.g,) if self.g > 1 else ()


@dataclass(frozen=True)
class CycTrack:
    m: int
    d: int
    f0: int
    f1: int
    r: int

    def __post_init__(self):
        if (self.d * self.r - (self.f0 - self.f1)) % self.m:
            raise BoundaryMismatch(
                f"{self.d} * {self.r} does not bound {self.f0} - {self.f1} mod {self.m}"
            )


class ModQTrackExtension:
    """Lifting problem for the matrix category of a finite extension.

    The base is the matrix category of the quotient ring up to
    ``max_rank``; lifts are matrix morphisms over the total ring with
    entrywise preimages and no quadratic layer, and tracks come from
    the extension's degree one.
    """

    def __init__(
        self,
        ext: CrossedExtension,
        max_rank: int = 1,
        enum_bound: int = DEFAULT_ENUM_BOUND,
        max_morphisms: int = 2000,
    ):
        if not isinstance(ext.ring, SquareRing):
            raise TypeError("matrix tracks need a square-ring extension")
        self.ext = ext
        self.ring = ext.ring
        relems = ext.quot.carrier.elements(enum_bound)
        count = sum(
            len(relems) ** (x * y)
            for x in range(max_rank + 1)
            for y in range(max_rank + 1)
        )
        if count > max_morphisms:
            raise TooLarge(
                f"{count} quotient matrices up to rank {max_rank} exceed the cap {max_morphisms}"
            )
        self.base = _matrix_category(ext, relems, max_rank)

        self._pre: dict = {}
        for v in ext.c0.elements(enum_bound):
            self._pre.setdefault(ext.quot.q(v), []).append(v)
        for rv in relems:
            if rv not in self._pre:
                raise SectionInvalid(f"quotient element {rv!r} has no ring preimage")
        self._bnd: dict = {}
        for c in ext.c1.elements(enum_bound):
            self._bnd.setdefault(ext.boundary(c), c)

        mg = ext.module.group
        if not mg.is_finite():
            raise NotFinite("the kernel module must be finite for track values")
        self._mg = mg
        self._inc = {ext.include(m): m for m in ext.module.elements(enum_bound)}
        self._mleft = {rv: self._module_action(rv, left=True) for rv in relems}
        self._mright = {rv: self._module_action(rv, left=False) for rv in relems}
        blocks: dict = {}

        def group(alpha):
            x, y, _ = alpha
            cells = x * y
            if cells not in blocks:
                factors = tuple(d for d in mg.invariant_factors for _ in range(cells))
                blocks[cells] = FgAbGroup(factors) if factors else FgAbGroup.trivial()
            return blocks[cells]

        def act(nu, alpha, psi):
            return self._system_map(group, nu, alpha, psi)

        self.system = NatSystem(
            cat=self.base,
            group=group,
            act=act,
            name=f"kernel module matrices over {ext.name}",
        )

    def _module_action(self, rv, left: bool):
        lift = self._pre[rv][0]
        ext, mg = self.ext, self._mg
        cols = []
        for j in range(mg.ngens):
            gen = mg.generator(j)
            c = ext.include(gen)
            c = ext.act_left(lift, c) if left else ext.act_right(c, lift)
            cols.append(self._inc[c])
        return AbMap.from_columns(mg, mg, cols)

    def _system_map(self, group, nu, alpha, psi) -> AbMap:
        x, y, _ = alpha
        yn, y2, nmat = nu
        x2, xp, pmat = psi
        if yn != y or xp != x:
            raise ValueError("action factors do not align with the morphism")
        src = group(alpha)
        dst = group((x2, y2, None))
        mg = self._mg
        nfac = mg.ngens
        cols = []
        for i in range(x):
            for k in range(y):
                for j in range(nfac):
                    col = [0] * dst.ngens
                    base = mg.generator(j)
                    for p in range(x2):
                        for q in range(y2):
                            v = self._mright[nmat[k][q]].apply(base)
                            v = self._mleft[pmat[p][i]].apply(v)
                            cell = p * y2 + q
                            for jj in range(nfac):
                                col[jj * (x2 * y2) + cell] += v[jj]
                    cols.append(dst.reduce(col))
        order = [
            j * (x * y) + (i * y + k)
            for i in range(x)
            for k in range(y)
            for j in range(nfac)
        ]
        arranged = [None] * src.ngens
        for pos, target in enumerate(order):
            arranged[target] = cols[pos]
        return AbMap.from_columns(src, dst, arranged)

    def section(self, phi) -> ModQMor:
        return self._lift(phi, 0)

    def second_section(self, phi) -> ModQMor:
        return self._lift(phi, -1)

    def _lift(self, phi, which: int) -> ModQMor:
        x, y, rows = phi
        fi = tuple(tuple(self._pre[rows[i][k]][which] for k in range(y)) for i in range(x))
        return ModQMor(self.ring, x, y, fi, {})

    def compose_lifts(self, F: ModQMor, G: ModQMor) -> ModQMor:
        return modq_compose(F, G)

    def first_track(self, F: ModQMor, G: ModQMor) -> Track:
        c0 = self.ext.c0
        h = []
        for i in range(F.nrows):
            row = []
            for k in range(F.ncols):
                diff = c0.sub(F.fi[i][k], G.fi[i][k])
                if diff not in self._bnd:
                    raise SectionInvalid(f"no track at entry ({i}, {k})")
                row.append(self._bnd[diff])
            h.append(tuple(row))
        return Track(self.ext, F, G, tuple(h))

    def vcomp(self, t1: Track, t2: Track) -> Track:
        return track_vcomp(t1, t2)

    def invert(self, t: Track) -> Track:
        return track_invert(t)

    def left_whisker(self, F: ModQMor, t: Track) -> Track:
        return track_left_whisker(F, t)

    def right_whisker(self, t: Track, G: ModQMor) -> Track:
        return track_right_whisker(t, G)

    def value(self, t: Track) -> tuple:
        if t.f0 != t.f1:
            raise ValueError("only automorphism tracks carry module values")
        x, y = t.f0.nrows, t.f0.ncols
        cells = x * y
        coords = [0] * (self._mg.ngens * cells)
        for i in range(x):
            for k in range(y):
                v = t.h[i][k]
                if v not in self._inc:
                    raise ValueError(f"track entry {v!r} is not in the kernel module image")
                m = self._inc[v]
                for j in range(self._mg.ngens):
                    coords[j * cells + (i * y + k)] = m[j]
        block = self.system.group_at((x, y, None))
        return block.reduce(coords)


def _matrix_category(ext: CrossedExtension, relems, max_rank: int) -> FinCat:
    car, mul = ext.quot.carrier, ext.quot.mul
    one, zero = ext.quot.one, car.zero()
    objects = tuple(range(max_rank + 1))
    morphisms = []
    for x in objects:
        for y in objects:
            for flat in itertools.product(relems, repeat=x * y):
                rows = tuple(tuple(flat[i * y + k] for k in range(y)) for i in range(x))
                morphisms.append((x, y, rows))
    table = {}
    for x, y, a in morphisms:
        for y2, z, b in morphisms:
            if y2 != y:
                continue
            rows = tuple(
                tuple(car.sum(mul(a[i][k], b[k][j]) for k in range(y)) for j in range(z))
                for i in range(x)
            )
            table[((x, y, a), (y, z, b))] = (x, z, rows)
    ids = {
        x: (x, x, tuple(tuple(one if i == j else zero for j in range(x)) for i in range(x)))
        for x in objects
    }
    return FinCat(
        objects=objects,
        morphisms=tuple(morphisms),
        dom={m: m[1] for m in morphisms},
        cod={m: m[0] for m in morphisms},
        table=table,
        ids=ids,
        name=f"matrices over the quotient of {ext.name}",
    )


def obstruction_cocycle(te, section: Callable | None = None) -> dict:
    """The degree-three obstruction of a section of the lifting problem.

    For each base morphism a lift is chosen (the extension's own
    section unless one is passed in), and for each composable pair a
    first track from the composed lifts to the lifted composite. The
    two ways of rebracketing a triple then differ by an automorphism
    track whose value is the cochain. Missing keys are zero.
    """
    C = te.base
    s = {phi: (section(phi) if section else te.section(phi)) for phi in C.morphisms}
    mu = {}
    for phi in C.morphisms:
        for psi in C.morphisms:
            if C.dom[phi] != C.cod[psi]:
                continue
            prod = te.compose_lifts(s[phi], s[psi])
            mu[(phi, psi)] = te.first_track(prod, s[C.compose(phi, psi)])
    out = {}
    for T in C.composable_tuples(3):
        phi, psi, chi = T
        phipsi = C.compose(phi, psi)
        psichi = C.compose(psi, chi)
        route1 = te.vcomp(te.right_whisker(mu[(phi, psi)], s[chi]), mu[(phipsi, chi)])
        route2 = te.vcomp(te.left_whisker(s[phi], mu[(psi, chi)]), mu[(phi, psichi)])
        coords = te.value(te.vcomp(te.invert(route2), route1))
        if any(coords):
            out[T] = coords
    return out
