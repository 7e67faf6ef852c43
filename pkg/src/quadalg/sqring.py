"""Square rings and quadratic rings over class-two groups.

A square ring is a square group ``(e, ee, H, P)`` whose ``e`` carries a
monoid structure and whose ``ee`` carries a ring structure together with
a three-slot action ``(x | y) . a . z`` through the abelianized
multiplicative monoid. A quadratic ring replaces the action by the ring
product on ``ee`` using the cross effect and the additive map ``Delta``.

The integral models live here too: the initial object ``znil`` with
``H(x) = x(x-1)/2`` on the integers, and its monoid extension on free
words where the quadratic part is spanned by ordered pairs of words.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .abelian import FgAbGroup
from .errors import (
    IllDefinedMultiplication,
    NotAQuadraticRing,
    NotFinite,
    TooLarge,
)
from .nil2 import (
    AbelianCarrier,
    Carrier,
    FreeNil2Carrier,
    FreePairsCarrier,
    Nil2Element,
    SquareGroup,
    _tuples,
    square_group_verify,
)
from .reports import Report


def _comb2(n: int) -> int:
    """``n (n - 1) / 2`` for any integer, the quadratic binomial weight."""
    return n * (n - 1) // 2


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------

@dataclass
class SquareRing:
    """A square group with a multiplicative monoid and a pair action.

    ``act_pair(x, y, a)`` is the left action ``(x | y) . a`` and
    ``act_right(a, z)`` the right action ``a . z``; both only depend on
    the multiplicative arguments through the abelianized quotient.
    """

    e: Carrier
    ee: Carrier
    H: Callable
    P: Callable
    one: object
    mul: Callable
    eemul: Callable
    act_pair: Callable
    act_right: Callable
    name: str = "square ring"

    def square_group(self) -> SquareGroup:
        return SquareGroup(e=self.e, ee=self.ee, H=self.H, P=self.P, name=self.name)

    def tri(self, x, y, a, z):
        """The full three-slot action ``(x | y) . a . z``."""
        return self.act_right(self.act_pair(x, y, a), z)

    def two(self):
        return self.e.add(self.one, self.one)


@dataclass
class QuadraticRing:
    """A square group with a monoid on ``e`` and a ring on ``ee``."""

    e: Carrier
    ee: Carrier
    H: Callable
    P: Callable
    one: object
    mul: Callable
    eemul: Callable
    name: str = "quadratic ring"

    def square_group(self) -> SquareGroup:
        return SquareGroup(e=self.e, ee=self.ee, H=self.H, P=self.P, name=self.name)

    def two(self):
        return self.e.add(self.one, self.one)


def forget_U(Q: QuadraticRing, samples: int = 200, seed: int = 0) -> SquareRing:
    """The square ring underlying a quadratic ring.

    The pair action becomes ``(x | y) . a = (y | x)_H a`` and the right
    action ``a . z = a Delta(z)``. The quadratic-ring laws are sampled
    first; a failure raises ``NotAQuadraticRing``.
    """
    if samples:
        report = verify_ring(Q, samples=samples, seed=seed)
        if not report.passed:
            failure = report.first_failure()
            raise NotAQuadraticRing(f"{failure.name}: {failure.witness or 'failed'}")
    sg = Q.square_group()
    return SquareRing(
        e=Q.e,
        ee=Q.ee,
        H=Q.H,
        P=Q.P,
        one=Q.one,
        mul=Q.mul,
        eemul=Q.eemul,
        act_pair=lambda x, y, a: Q.eemul(sg.cross(y, x), a),
        act_right=lambda a, z: Q.eemul(a, sg.delta(z)),
        name=f"{Q.name} (underlying square ring)",
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def verify_ring(R, samples: int = 1000, seed: int = 0) -> Report:
    """Check all square-ring or quadratic-ring laws on ``R``.

    Dispatches on the structure type. Small finite carriers are checked
    exhaustively, infinite ones by seeded sampling.
    """
    if isinstance(R, SquareRing):
        return _verify_square_ring(R, samples, seed)
    if isinstance(R, QuadraticRing):
        return _verify_quadratic_ring(R, samples, seed)
    raise TypeError(f"expected a SquareRing or QuadraticRing, got {type(R).__name__}")


def _verify_monoid(R, r: Report, samples: int, rng: random.Random) -> None:
    e = R.e
    for x, y, z in _tuples([e, e, e], samples, rng):
        if R.mul(R.mul(x, y), z) != R.mul(x, R.mul(y, z)):
            r.add("multiplication associative", False, f"x={x!r} y={y!r} z={z!r}")
            break
    else:
        r.add("multiplication associative", True)
    for (x,) in _tuples([e], samples, rng):
        if R.mul(R.one, x) != x or R.mul(x, R.one) != x:
            r.add("one is a unit", False, f"x={x!r}")
            break
    else:
        r.add("one is a unit", True)


def _verify_ee_ring(R, r: Report, samples: int, rng: random.Random) -> None:
    ee = R.ee
    for a, b, c in _tuples([ee, ee, ee], samples, rng):
        if R.eemul(R.eemul(a, b), c) != R.eemul(a, R.eemul(b, c)):
            r.add("ee product associative", False, f"a={a!r} b={b!r} c={c!r}")
            break
    else:
        r.add("ee product associative", True)
    for a, b, c in _tuples([ee, ee, ee], samples, rng):
        left = R.eemul(a, ee.add(b, c)) == ee.add(R.eemul(a, b), R.eemul(a, c))
        right = R.eemul(ee.add(a, b), c) == ee.add(R.eemul(a, c), R.eemul(b, c))
        if not (left and right):
            r.add("ee product bilinear", False, f"a={a!r} b={b!r} c={c!r}")
            break
    else:
        r.add("ee product bilinear", True)


def _verify_square_ring(R: SquareRing, samples: int, seed: int) -> Report:
    rng = random.Random(seed)
    r = Report(title=f"square ring: {R.name}", samples=samples, seed=seed)
    r.extend(square_group_verify(R.square_group(), samples, seed), prefix="additive: ")
    _verify_monoid(R, r, samples, rng)
    _verify_ee_ring(R, r, samples, rng)
    e, ee, sg = R.e, R.ee, R.square_group()

    for x, y, a, b in _tuples([e, e, ee, ee], samples, rng):
        if R.act_pair(x, y, ee.add(a, b)) != ee.add(R.act_pair(x, y, a), R.act_pair(x, y, b)):
            r.add("pair action additive in ee", False, f"x={x!r} y={y!r} a={a!r} b={b!r}")
            break
    else:
        r.add("pair action additive in ee", True)

    for x, u, y, a in _tuples([e, e, e, ee], samples, rng):
        first = R.act_pair(e.add(x, u), y, a) == ee.add(R.act_pair(x, y, a), R.act_pair(u, y, a))
        second = R.act_pair(y, e.add(x, u), a) == ee.add(R.act_pair(y, x, a), R.act_pair(y, u, a))
        if not (first and second):
            r.add("pair action biadditive in e", False, f"x={x!r} u={u!r} y={y!r} a={a!r}")
            break
    else:
        r.add("pair action biadditive in e", True)

    for x, y, a, c in _tuples([e, e, ee, ee], samples, rng):
        first = R.act_pair(e.add(x, R.P(c)), y, a) == R.act_pair(x, y, a)
        second = R.act_pair(x, e.add(y, R.P(c)), a) == R.act_pair(x, y, a)
        if not (first and second):
            r.add("pair action kills P images", False, f"x={x!r} y={y!r} a={a!r} c={c!r}")
            break
    else:
        r.add("pair action kills P images", True)

    for a, b, z in _tuples([ee, ee, e], samples, rng):
        if R.act_right(ee.add(a, b), z) != ee.add(R.act_right(a, z), R.act_right(b, z)):
            r.add("right action additive in ee", False, f"a={a!r} b={b!r} z={z!r}")
            break
    else:
        r.add("right action additive in ee", True)

    for a, z, w, c in _tuples([ee, e, e, ee], samples, rng):
        additive = R.act_right(a, e.add(z, w)) == ee.add(R.act_right(a, z), R.act_right(a, w))
        kills = R.act_right(a, e.add(z, R.P(c))) == R.act_right(a, z)
        if not (additive and kills):
            r.add("right action additive through the quotient", False,
                  f"a={a!r} z={z!r} w={w!r} c={c!r}")
            break
    else:
        r.add("right action additive through the quotient", True)

    for x, y, u, v, a in _tuples([e, e, e, e, ee], samples, rng):
        lhs = R.act_pair(x, y, R.act_pair(u, v, a))
        rhs = R.act_pair(R.mul(x, u), R.mul(y, v), a)
        if lhs != rhs:
            r.add("pair action multiplicative", False, f"x={x!r} y={y!r} u={u!r} v={v!r} a={a!r}")
            break
    else:
        r.add("pair action multiplicative", True)

    for a, y, z in _tuples([ee, e, e], samples, rng):
        if R.act_right(R.act_right(a, y), z) != R.act_right(a, R.mul(y, z)):
            r.add("right action multiplicative", False, f"a={a!r} y={y!r} z={z!r}")
            break
    else:
        r.add("right action multiplicative", True)

    for x, y, a, z in _tuples([e, e, ee, e], samples, rng):
        if R.act_pair(x, y, R.act_right(a, z)) != R.act_right(R.act_pair(x, y, a), z):
            r.add("pair and right actions commute", False, f"x={x!r} y={y!r} a={a!r} z={z!r}")
            break
    else:
        r.add("pair and right actions commute", True)

    for x, y, z in _tuples([e, e, e], samples, rng):
        if R.mul(x, e.add(y, z)) != e.add(R.mul(x, y), R.mul(x, z)):
            r.add("(i) left distributive", False, f"x={x!r} y={y!r} z={z!r}")
            break
    else:
        r.add("(i) left distributive", True)

    for x, y, z in _tuples([e, e, e], samples, rng):
        lhs = R.mul(e.add(x, y), z)
        rhs = e.add(e.add(R.mul(x, z), R.mul(y, z)), R.P(R.act_pair(x, y, R.H(z))))
        if lhs != rhs:
            r.add("(ii) right distributive with correction", False, f"x={x!r} y={y!r} z={z!r}")
            break
    else:
        r.add("(ii) right distributive with correction", True)

    htwo = R.H(R.two())
    for x, y in _tuples([e, e], samples, rng):
        if sg.cross(x, y) != R.act_pair(y, x, htwo):
            r.add("(iii) cross effect from H(2)", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("(iii) cross effect from H(2)", True)

    for x, y, a, z in _tuples([e, e, ee, e], samples, rng):
        if sg.tmap(R.tri(x, y, a, z)) != R.tri(y, x, sg.tmap(a), z):
            r.add("(iv) T twists the pair action", False, f"x={x!r} y={y!r} a={a!r} z={z!r}")
            break
    else:
        r.add("(iv) T twists the pair action", True)

    for a, x in _tuples([ee, e], samples, rng):
        if R.P(R.act_right(a, x)) != R.mul(R.P(a), x):
            r.add("(v) P respects the right action", False, f"a={a!r} x={x!r}")
            break
    else:
        r.add("(v) P respects the right action", True)

    for x, a in _tuples([e, ee], samples, rng):
        if R.P(R.act_pair(x, x, a)) != R.mul(x, R.P(a)):
            r.add("(vi) P respects the diagonal action", False, f"x={x!r} a={a!r}")
            break
    else:
        r.add("(vi) P respects the diagonal action", True)

    for x, y in _tuples([e, e], samples, rng):
        lhs = R.H(R.mul(x, y))
        rhs = ee.add(R.act_pair(x, x, R.H(y)), R.act_right(R.H(x), y))
        if lhs != rhs:
            r.add("(vii) H is multiplicative with correction", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("(vii) H is multiplicative with correction", True)
    return r


def _verify_quadratic_ring(R: QuadraticRing, samples: int, seed: int) -> Report:
    rng = random.Random(seed)
    r = Report(title=f"quadratic ring: {R.name}", samples=samples, seed=seed)
    r.extend(square_group_verify(R.square_group(), samples, seed), prefix="additive: ")
    _verify_monoid(R, r, samples, rng)
    _verify_ee_ring(R, r, samples, rng)
    e, ee, sg = R.e, R.ee, R.square_group()

    for x, y, z in _tuples([e, e, e], samples, rng):
        if R.mul(x, e.add(y, z)) != e.add(R.mul(x, y), R.mul(x, z)):
            r.add("(i) left distributive", False, f"x={x!r} y={y!r} z={z!r}")
            break
    else:
        r.add("(i) left distributive", True)

    for x, y, z in _tuples([e, e, e], samples, rng):
        lhs = R.mul(e.add(x, y), z)
        rhs = e.add(e.add(R.mul(x, z), R.mul(y, z)), R.P(R.eemul(sg.cross(y, x), R.H(z))))
        if lhs != rhs:
            r.add("(ii) right distributive with correction", False, f"x={x!r} y={y!r} z={z!r}")
            break
    else:
        r.add("(ii) right distributive with correction", True)

    for x, y, u, v in _tuples([e, e, e, e], samples, rng):
        lhs = R.eemul(sg.cross(x, y), sg.cross(u, v))
        rhs = sg.cross(R.mul(x, u), R.mul(y, v))
        if lhs != rhs:
            r.add("(iii) cross effects multiply", False, f"x={x!r} y={y!r} u={u!r} v={v!r}")
            break
    else:
        r.add("(iii) cross effects multiply", True)

    for a, b in _tuples([ee, ee], samples, rng):
        if sg.tmap(R.eemul(a, b)) != ee.neg(R.eemul(sg.tmap(a), sg.tmap(b))):
            r.add("(iv) T is anti multiplicative", False, f"a={a!r} b={b!r}")
            break
    else:
        r.add("(iv) T is anti multiplicative", True)

    for a, x in _tuples([ee, e], samples, rng):
        if R.P(R.eemul(a, sg.delta(x))) != R.mul(R.P(a), x):
            r.add("(v) P respects Delta on the right", False, f"a={a!r} x={x!r}")
            break
    else:
        r.add("(v) P respects Delta on the right", True)

    for x, a in _tuples([e, ee], samples, rng):
        if R.P(R.eemul(sg.cross(x, x), a)) != R.mul(x, R.P(a)):
            r.add("(vi) P respects the diagonal cross effect", False, f"x={x!r} a={a!r}")
            break
    else:
        r.add("(vi) P respects the diagonal cross effect", True)

    for x, y in _tuples([e, e], samples, rng):
        lhs = R.H(R.mul(x, y))
        rhs = ee.add(R.eemul(sg.cross(x, x), R.H(y)), R.eemul(R.H(x), sg.delta(y)))
        if lhs != rhs:
            r.add("(vii) H is multiplicative with correction", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("(vii) H is multiplicative with correction", True)
    return r


# ---------------------------------------------------------------------------
# The initial square ring on the integers
# ---------------------------------------------------------------------------

def znil(kind: str = "square"):
    """The integers with ``H(x) = x (x - 1) / 2``, ``P = 0``.

    ``kind`` selects the square-ring or the quadratic-ring packaging of
    the same data; the two agree because the pair action factors through
    the cross effect here.

    >>> R = znil()
    >>> R.H((4,))
    (6,)
    >>> R.mul((3,), (5,))
    (15,)
    """
    if kind not in ("square", "quadratic"):
        raise ValueError(f"unknown ring kind: {kind!r}")
    common = dict(
        e=AbelianCarrier(FgAbGroup.free(1)),
        ee=AbelianCarrier(FgAbGroup.free(1)),
        H=lambda x: (_comb2(x[0]),),
        P=lambda a: (0,),
        one=(1,),
        mul=lambda x, y: (x[0] * y[0],),
        eemul=lambda a, b: (a[0] * b[0],),
    )
    if kind == "quadratic":
        return QuadraticRing(name="znil", **common)
    return SquareRing(
        act_pair=lambda x, y, a: (x[0] * y[0] * a[0],),
        act_right=lambda a, z: (a[0] * z[0],),
        name="znil",
        **common,
    )


def cyclic_ring(n: int, kind: str = "square"):
    """The ring of integers mod ``n`` with trivial quadratic part.

    Any ordinary ring is a square ring (and a quadratic ring) whose
    ``ee`` is the zero group and whose ``H`` and ``P`` vanish.

    >>> R = cyclic_ring(4)
    >>> R.mul((3,), (3,))
    (1,)
    """
    if n < 1:
        raise ValueError("modulus must be positive")
    if kind not in ("square", "quadratic"):
        raise ValueError(f"unknown ring kind: {kind!r}")
    e = AbelianCarrier(FgAbGroup((n,)) if n > 1 else FgAbGroup.trivial())
    ee = AbelianCarrier(FgAbGroup.trivial())
    zero_ee = ee.zero()
    common = dict(
        e=e,
        ee=ee,
        H=lambda x: zero_ee,
        P=lambda a: e.zero(),
        one=e.group.reduce((1,)) if n > 1 else e.zero(),
        mul=lambda x, y: e.group.reduce((x[0] * y[0],)) if n > 1 else e.zero(),
        eemul=lambda a, b: zero_ee,
        name=f"Z/{n}",
    )
    if kind == "quadratic":
        return QuadraticRing(**common)
    return SquareRing(
        act_pair=lambda x, y, a: zero_ee,
        act_right=lambda a, z: zero_ee,
        **common,
    )


# ---------------------------------------------------------------------------
# The monoid extension on free words
# ---------------------------------------------------------------------------

def _shortlex_words(symbols: Sequence[Hashable], length_bound: int) -> list[tuple]:
    out: list[tuple] = [()]
    layer: list[tuple] = [()]
    for _ in range(length_bound):
        layer = [w + (s,) for w in layer for s in symbols]
        out.extend(layer)
    return out


class _MonoidRing:
    """Shared machinery for the group-ring-like model on free words."""

    def __init__(self, symbols: Sequence[Hashable], length_bound: int, sample_length: int):
        if not symbols:
            raise ValueError("at least one symbol is required")
        self.symbols = list(symbols)
        self.length_bound = length_bound
        self.words = _shortlex_words(self.symbols, length_bound)
        self.e = FreeNil2Carrier(self.words)
        self.ee = FreePairsCarrier(self.words)
        self._install_samplers(sample_length)

    def _install_samplers(self, sample_length: int) -> None:
        pool = [w for w in self.words if len(w) <= sample_length]
        e, ee = self.e, self.ee

        def sample_e(rng: random.Random):
            lin = {}
            for w in rng.sample(pool, min(len(pool), rng.randint(0, 3))):
                lin[w] = rng.randint(-3, 3)
            cm = {}
            if len(pool) >= 2:
                for _ in range(rng.randint(0, 2)):
                    u, v = sorted(rng.sample(pool, 2), key=e._rank.get)
                    cm[(u, v)] = rng.randint(-3, 3)
            return e.make(lin, cm)

        def sample_ee(rng: random.Random):
            out = {}
            for _ in range(rng.randint(0, 3)):
                u = rng.choice(pool)
                v = rng.choice(pool)
                out[(u, v)] = out.get((u, v), 0) + rng.randint(-3, 3)
            return ee.make(out)

        e.sample = sample_e
        ee.sample = sample_ee

    def concat(self, u: tuple, v: tuple) -> tuple:
        w = u + v
        if len(w) > self.length_bound:
            raise TooLarge(
                f"product word of length {len(w)} exceeds the bound {self.length_bound}"
            )
        return w

    # -- structure maps ----------------------------------------------------

    def H(self, x: Nil2Element):
        lin = x.linear
        out: dict = {}
        for s, n in lin:
            out[(s, s)] = out.get((s, s), 0) + _comb2(n)
        for i in range(len(lin)):
            for j in range(i + 1, len(lin)):
                s, n = lin[i]
                t, m = lin[j]
                out[(t, s)] = out.get((t, s), 0) + n * m
        for (s, t), c in x.comm:
            out[(s, t)] = out.get((s, t), 0) + c
            out[(t, s)] = out.get((t, s), 0) - c
        return self.ee.make(out)

    def P(self, a) -> Nil2Element:
        cm: dict = {}
        rank = self.e._rank
        for (u, v), c in a:
            if u == v:
                continue
            if rank[u] < rank[v]:
                cm[(u, v)] = cm.get((u, v), 0) + c
            else:
                cm[(v, u)] = cm.get((v, u), 0) - c
        return self.e.make({}, cm)

    # -- multiplicative structure -------------------------------------------

    def eemul(self, a, b):
        out: dict = {}
        for (p, q), c in a:
            for (r, s), d in b:
                key = (self.concat(p, r), self.concat(q, s))
                out[key] = out.get(key, 0) + c * d
        return self.ee.make(out)

    def act_pair(self, x: Nil2Element, y: Nil2Element, a):
        out: dict = {}
        for u, n in x.linear:
            for v, m in y.linear:
                for (p, q), c in a:
                    key = (self.concat(u, p), self.concat(v, q))
                    out[key] = out.get(key, 0) + n * m * c
        return self.ee.make(out)

    def act_right(self, a, z: Nil2Element):
        out: dict = {}
        for w, m in z.linear:
            for (p, q), c in a:
                key = (self.concat(p, w), self.concat(q, w))
                out[key] = out.get(key, 0) + m * c
        return self.ee.make(out)

    def mul(self, x: Nil2Element, y: Nil2Element) -> Nil2Element:
        """Fold the left factor through the twisted right distributivity."""
        if not x.linear:
            # a purely central element P(c) multiplies by the right action
            c = self.ee.make({(u, v): n for (u, v), n in x.comm})
            return self.P(self.act_right(c, y))
        (s, n), rest_linear = x.linear[0], x.linear[1:]
        head = self.e.make({s: n})
        rest = Nil2Element(rest_linear, x.comm)
        hy = self.H(y)
        out = self._mul_single(s, n, y)
        out = self.e.add(out, self.mul(rest, y))
        return self.e.add(out, self.P(self.act_pair(head, rest, hy)))

    def _mul_single(self, s: tuple, n: int, y: Nil2Element) -> Nil2Element:
        base = self._mul_word(s, y)
        out = self.e.scalar(n, base)
        if n:
            diag = self.act_pair(self.e.atom(s), self.e.atom(s), self.H(y))
            out = self.e.add(out, self.P(self.ee.make({k: _comb2(n) * v for k, v in diag})))
        return out

    def _mul_word(self, s: tuple, y: Nil2Element) -> Nil2Element:
        lin = {}
        for t, m in y.linear:
            w = self.concat(s, t)
            lin[w] = lin.get(w, 0) + m
        out = self.e.make(lin)
        if y.comm:
            c = self.ee.make({(u, v): m for (u, v), m in y.comm})
            shifted = self.act_pair(self.e.atom(s), self.e.atom(s), c)
            out = self.e.add(out, self.P(shifted))
        return out


def znil_monoid(
    symbols: Sequence[Hashable],
    length_bound: int = 6,
    kind: str = "square",
    sample_length: int = 2,
):
    """Words over ``symbols`` with the class-two group on all words.

    The additive group of degree zero is free of class two on every word
    up to ``length_bound`` (the empty word is the unit); the quadratic
    part is free abelian on ordered pairs of words. ``H`` vanishes on the
    word generators and ``P`` sends a pair to the commutator of its two
    words in reverse order. Products whose words overflow the length
    bound raise ``TooLarge``. Random sampling only draws words up to
    ``sample_length`` so that sampled triple products stay inside the
    bound.

    >>> R = znil_monoid(["s", "t"], length_bound=4)
    >>> x = R.e.atom(("s",)); y = R.e.atom(("t",))
    >>> R.mul(x, y) == R.e.atom(("s", "t"))
    True
    >>> R.square_group().cross(x, y) == R.ee.pair(("t",), ("s",))
    True
    """
    if kind not in ("square", "quadratic"):
        raise ValueError(f"unknown ring kind: {kind!r}")
    if 3 * sample_length > length_bound:
        raise ValueError("sampled triple products would overflow the length bound")
    core = _MonoidRing(symbols, length_bound, sample_length)
    common = dict(
        e=core.e,
        ee=core.ee,
        H=core.H,
        P=core.P,
        one=core.e.atom(()),
        mul=core.mul,
        eemul=core.eemul,
        name=f"znil[{', '.join(map(str, symbols))}]",
    )
    if kind == "quadratic":
        return QuadraticRing(**common)
    return SquareRing(act_pair=core.act_pair, act_right=core.act_right, **common)


# ---------------------------------------------------------------------------
# Linear elements and the abelianized quotient ring
# ---------------------------------------------------------------------------

def linear_elements(R, bound: int = 4096) -> list:
    """Elements with vanishing ``H``.

    Finite carriers are enumerated; the free word model reports its word
    generators, and the integer model reports ``0`` and ``1``.
    """
    try:
        pool = R.e.elements(bound)
    except (NotFinite, TooLarge):
        if isinstance(R.e, FreeNil2Carrier):
            pool = [R.e.atom(s) for s in R.e.symbols]
        elif isinstance(R.e, AbelianCarrier):
            pool = [R.e.group.reduce(tuple(v)) for v in _small_box(R.e.group.ngens, 4)]
        else:
            raise
    return [x for x in pool if R.ee.is_zero(R.H(x))]


def _small_box(n: int, radius: int):
    if n == 0:
        yield ()
        return
    for rest in _small_box(n - 1, radius):
        for v in range(-radius, radius + 1):
            yield (v,) + rest


@dataclass
class AdRing:
    """The quotient of the multiplicative level by the ``P`` images."""

    representatives: list
    add: Callable
    mul: Callable
    one: object
    zero: object


def ad_ring(R, bound: int = 4096) -> AdRing:
    """Quotient ring ``e / P(ee)`` for finite carriers.

    Raises ``IllDefinedMultiplication`` when the induced product depends
    on the chosen representatives, which happens exactly when the input
    fails the square-ring laws tying ``P`` to the multiplication.
    """
    elements = R.e.elements(bound)
    index = {x: i for i, x in enumerate(elements)}
    image = {R.P(a) for a in R.ee.elements(bound)}
    label: dict = {}
    for x in elements:
        rep = min((R.e.add(x, w) for w in image), key=lambda v: index[v])
        label[x] = rep
    reps = sorted(set(label.values()), key=lambda v: index[v])
    for x in reps:
        for y in reps:
            base = label[R.mul(x, y)]
            for w in image:
                for v in image:
                    other = label[R.mul(R.e.add(x, w), R.e.add(y, v))]
                    if other != base:
                        raise IllDefinedMultiplication(
                            f"product of classes of {x!r} and {y!r} depends on representatives"
                        )
    return AdRing(
        representatives=reps,
        add=lambda x, y: label[R.e.add(x, y)],
        mul=lambda x, y: label[R.mul(x, y)],
        one=label[R.one],
        zero=label[R.e.zero()],
    )
