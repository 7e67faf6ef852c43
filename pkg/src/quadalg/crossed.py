"""Crossed extensions of rings by bimodules with quadratic structure.

A crossed extension is an exact sequence

    0 -> M -> C1 -(boundary)-> C0 -(q)-> R -> 0

where ``C0`` is the multiplicative level of a square or quadratic ring
with quadratic part ``Cee``, ``C1`` carries compatible maps
``P: Cee -> C1`` and a two-sided ``C0`` action, and ``R`` inherits the
ring structure. The three kinds differ in how ``Cee`` acts:

* ``qpa``: the quadratic-ring laws through cross effects and ``Delta``,
* ``csr``: the square-ring laws through the pair action,
* ``ring``: trivial quadratic part (an ordinary crossed ring extension).

The degree of symmetry of the quotient construction ``ztilde`` and the
invariant ``nu = P(H(2))`` live here as well.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .abelian import (
    FgAbGroup,
    finite_abelian_invariants,
    from_columns,
    identity,
    in_lattice,
    lattice_basis,
    mat_hstack,
    mat_vec,
    quotient_presentation,
    zeros,
)
from .errors import (
    NotASquareRing,
    NotFinite,
    NotInKernel,
    NotSurjective,
    PullbackDegenerate,
    TooLarge,
)
from .nil2 import (
    AbelianCarrier,
    Carrier,
    FreeAbelianCarrier,
    FreeNil2Carrier,
    FreePairsCarrier,
    Qpm,
    SgMorphism,
    SquareGroup,
    _finite_elements,
    _tuples,
    square_group_verify,
)
from .reports import Report
from .sqring import QuadraticRing, SquareRing, linear_elements, verify_ring

DEFAULT_ENUM_BOUND = 4096


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------

@dataclass
class QuotientRing:
    """The quotient ring ``R`` together with the projection ``q``."""

    carrier: Carrier
    mul: Callable
    one: object
    q: Callable


@dataclass
class CrossedExtension:
    """A crossed extension; ``ring`` is the degree-zero structure.

    ``ring.P`` must already be the induced map ``boundary . P``, so the
    ring is a self-contained square or quadratic ring.
    """

    kind: str
    ring: object
    c1: Carrier
    P: Callable
    boundary: Callable
    act_left: Callable
    act_right: Callable
    module: Carrier
    include: Callable
    quot: QuotientRing
    name: str = "crossed extension"

    def __post_init__(self):
        if self.kind not in ("qpa", "csr", "ring"):
            raise ValueError(f"unknown crossed extension kind: {self.kind!r}")
        expected = QuadraticRing if self.kind == "qpa" else SquareRing
        if not isinstance(self.ring, expected):
            raise TypeError(
                f"kind {self.kind!r} needs a {expected.__name__}, got {type(self.ring).__name__}"
            )

    @property
    def c0(self) -> Carrier:
        return self.ring.e

    @property
    def cee(self) -> Carrier:
        return self.ring.ee

    @property
    def H(self) -> Callable:
        return self.ring.H

    def ee_pair(self, x, y, a):
        """The action ``(x (x) y) . a`` in the kind's own language."""
        if self.kind == "qpa":
            sg = self.ring.square_group()
            return self.ring.eemul(sg.cross(y, x), a)
        return self.ring.act_pair(x, y, a)

    def ee_right(self, a, z):
        if self.kind == "qpa":
            return self.ring.eemul(a, self.ring.square_group().delta(z))
        return self.ring.act_right(a, z)

    def fibre(self) -> SquareGroup:
        return SquareGroup(
            e=self.c1,
            ee=self.cee,
            H=lambda r: self.H(self.boundary(r)),
            P=self.P,
            name=f"{self.name} fibre",
        )

    def qpm(self) -> Qpm:
        return Qpm(
            c0=self.c0,
            c1=self.c1,
            cee=self.cee,
            H=self.H,
            P=self.P,
            boundary=self.boundary,
            name=self.name,
        )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def verify_crossed(ext: CrossedExtension, samples: int = 500, seed: int = 0) -> Report:
    """Check the full axiom list for the extension's kind.

    Finite carriers are checked exhaustively, including both exactness
    conditions; on infinite carriers exactness degrades to the inclusion
    checks plus a note.
    """
    rng = random.Random(seed)
    r = Report(title=f"crossed extension ({ext.kind}): {ext.name}", samples=samples, seed=seed)
    r.extend(verify_ring(ext.ring, samples, seed), prefix="base: ")
    r.extend(square_group_verify(ext.fibre(), samples, seed), prefix="fibre: ")

    c0, c1, cee = ext.c0, ext.c1, ext.cee
    mul, d = ext.ring.mul, ext.boundary

    for x, y in _tuples([c1, c1], samples, rng):
        if d(c1.add(x, y)) != c0.add(d(x), d(y)):
            r.add("boundary additive", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("boundary additive", True)

    for x, s, y in _tuples([c0, c1, c0], samples, rng):
        if ext.act_right(ext.act_left(x, s), y) != ext.act_left(x, ext.act_right(s, y)):
            r.add("left and right actions commute", False, f"x={x!r} s={s!r} y={y!r}")
            break
    else:
        r.add("left and right actions commute", True)

    for x, y, s in _tuples([c0, c0, c1], samples, rng):
        left = ext.act_left(mul(x, y), s) == ext.act_left(x, ext.act_left(y, s))
        right = ext.act_right(s, mul(x, y)) == ext.act_right(ext.act_right(s, x), y)
        if not (left and right):
            r.add("actions associate with multiplication", False, f"x={x!r} y={y!r} s={s!r}")
            break
    else:
        r.add("actions associate with multiplication", True)

    for (s,) in _tuples([c1], samples, rng):
        if ext.act_left(ext.ring.one, s) != s or ext.act_right(s, ext.ring.one) != s:
            r.add("actions unital", False, f"s={s!r}")
            break
    else:
        r.add("actions unital", True)

    for x, a, y in _tuples([c0, cee, c0], samples, rng):
        lhs = ext.P(ext.ee_right(ext.ee_pair(x, x, a), y))
        rhs = ext.act_right(ext.act_left(x, ext.P(a)), y)
        if lhs != rhs:
            r.add("(i) P conjugates the quadratic action", False, f"x={x!r} a={a!r} y={y!r}")
            break
    else:
        r.add("(i) P conjugates the quadratic action", True)

    for x, a in _tuples([c0, cee], samples, rng):
        if ext.act_left(x, ext.P(a)) != ext.P(ext.ee_pair(x, x, a)):
            r.add("left action on P images", False, f"x={x!r} a={a!r}")
            break
    else:
        r.add("left action on P images", True)

    for a, y in _tuples([cee, c0], samples, rng):
        if ext.act_right(ext.P(a), y) != ext.P(ext.ee_right(a, y)):
            r.add("right action on P images", False, f"a={a!r} y={y!r}")
            break
    else:
        r.add("right action on P images", True)

    for x, s, y in _tuples([c0, c1, c0], samples, rng):
        if d(ext.act_right(ext.act_left(x, s), y)) != mul(mul(x, d(s)), y):
            r.add("(ii) boundary is equivariant", False, f"x={x!r} s={s!r} y={y!r}")
            break
    else:
        r.add("(ii) boundary is equivariant", True)

    for s, t in _tuples([c1, c1], samples, rng):
        if ext.act_left(d(s), t) != ext.act_right(s, d(t)):
            r.add("(iii) crossed symmetry", False, f"s={s!r} t={t!r}")
            break
    else:
        r.add("(iii) crossed symmetry", True)

    for x, s, t in _tuples([c0, c1, c1], samples, rng):
        if ext.act_left(x, c1.add(s, t)) != c1.add(ext.act_left(x, s), ext.act_left(x, t)):
            r.add("(iv) left action additive", False, f"x={x!r} s={s!r} t={t!r}")
            break
    else:
        r.add("(iv) left action additive", True)

    for s, x, y in _tuples([c1, c0, c0], samples, rng):
        lhs = ext.act_right(s, c0.add(x, y))
        rhs = c1.add(ext.act_right(s, x), ext.act_right(s, y))
        if lhs != rhs:
            r.add("(v) right action additive in the ring", False, f"s={s!r} x={x!r} y={y!r}")
            break
    else:
        r.add("(v) right action additive in the ring", True)

    for x, y, s in _tuples([c0, c0, c1], samples, rng):
        lhs = ext.act_left(c0.add(x, y), s)
        rhs = c1.add(
            c1.add(ext.act_left(x, s), ext.act_left(y, s)),
            ext.P(ext.ee_pair(x, y, ext.H(d(s)))),
        )
        if lhs != rhs:
            r.add("(vi) left action crossed on sums", False, f"x={x!r} y={y!r} s={s!r}")
            break
    else:
        r.add("(vi) left action crossed on sums", True)

    for s, t, x in _tuples([c1, c1, c0], samples, rng):
        lhs = ext.act_right(c1.add(s, t), x)
        rhs = c1.add(
            c1.add(ext.act_right(s, x), ext.act_right(t, x)),
            ext.P(ext.ee_pair(d(s), d(t), ext.H(x))),
        )
        if lhs != rhs:
            r.add("(vii) right action crossed on sums", False, f"s={s!r} t={t!r} x={x!r}")
            break
    else:
        r.add("(vii) right action crossed on sums", True)

    # quotient ring
    R, q = ext.quot, ext.quot.q
    for x, y in _tuples([c0, c0], samples, rng):
        if q(c0.add(x, y)) != R.carrier.add(q(x), q(y)):
            r.add("q additive", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("q additive", True)
    for x, y in _tuples([c0, c0], samples, rng):
        if q(mul(x, y)) != R.mul(q(x), q(y)):
            r.add("q multiplicative", False, f"x={x!r} y={y!r}")
            break
    else:
        r.add("q multiplicative", True)
    r.add("q unital", q(ext.ring.one) == R.one, f"q(1)={q(ext.ring.one)!r}")
    for (s,) in _tuples([c1], samples, rng):
        if not R.carrier.is_zero(q(d(s))):
            r.add("q kills boundary images", False, f"s={s!r}")
            break
    else:
        r.add("q kills boundary images", True)

    # module end
    M, inc = ext.module, ext.include
    for m, n in _tuples([M, M], samples, rng):
        if inc(M.add(m, n)) != c1.add(inc(m), inc(n)):
            r.add("include additive", False, f"m={m!r} n={n!r}")
            break
    else:
        r.add("include additive", True)
    for (m,) in _tuples([M], samples, rng):
        if not c0.is_zero(d(inc(m))):
            r.add("boundary kills the module", False, f"m={m!r}")
            break
    else:
        r.add("boundary kills the module", True)
    for m, s in _tuples([M, c1], samples, rng):
        if c1.add(inc(m), s) != c1.add(s, inc(m)):
            r.add("module image central", False, f"m={m!r} s={s!r}")
            break
    else:
        r.add("module image central", True)
    for x, s, m in _tuples([c0, c1, M], samples, rng):
        shifted = c0.add(x, d(s))
        left = ext.act_left(shifted, inc(m)) == ext.act_left(x, inc(m))
        right = ext.act_right(inc(m), shifted) == ext.act_right(inc(m), x)
        if not (left and right):
            r.add("module action descends to R", False, f"x={x!r} s={s!r} m={m!r}")
            break
    else:
        r.add("module action descends to R", True)

    _exactness_checks(ext, r, samples, rng)

    ok, witness = linearly_generated(ext)
    r.add("linearly generated", ok, witness)
    return r


def _exactness_checks(ext: CrossedExtension, r: Report, samples: int, rng: random.Random) -> None:
    c1_pool = _finite_elements(ext.c1, DEFAULT_ENUM_BOUND)
    m_pool = _finite_elements(ext.module, DEFAULT_ENUM_BOUND)
    if c1_pool is not None and m_pool is not None:
        images = {}
        for m in m_pool:
            v = ext.include(m)
            if v in images:
                r.add("include injective", False, f"{m!r} and {images[v]!r} collide")
                break
            images[v] = m
        else:
            r.add("include injective", True)
        kernel = {s for s in c1_pool if ext.c0.is_zero(ext.boundary(s))}
        r.add(
            "kernel of boundary is the module image",
            kernel == set(images),
            None if kernel == set(images) else f"difference {kernel ^ set(images)!r}",
        )
    else:
        for m, n in _tuples([ext.module, ext.module], samples, rng):
            if m != n and ext.include(m) == ext.include(n):
                r.add("include injective (sampled)", False, f"{m!r} and {n!r} collide")
                break
        else:
            r.add("include injective (sampled)", True)
        r.note("kernel of the boundary compared on finite carriers only")

    c0_pool = _finite_elements(ext.c0, DEFAULT_ENUM_BOUND)
    r_pool = _finite_elements(ext.quot.carrier, DEFAULT_ENUM_BOUND)
    if c0_pool is not None and c1_pool is not None and r_pool is not None:
        image = {ext.boundary(s) for s in c1_pool}
        kernel = {x for x in c0_pool if ext.quot.carrier.is_zero(ext.quot.q(x))}
        r.add(
            "kernel of q is the boundary image",
            kernel == image,
            None if kernel == image else f"difference {kernel ^ image!r}",
        )
        hit = {ext.quot.q(x) for x in c0_pool}
        r.add(
            "q surjective",
            hit == set(r_pool),
            None if hit == set(r_pool) else f"missed {set(r_pool) - hit!r}",
        )
    else:
        r.note("exactness at the ring level compared on finite carriers only")


def linearly_generated(ext: CrossedExtension, pool: Sequence | None = None) -> tuple[bool, str | None]:
    """Does the image of the ``H`` kernel generate ``R`` additively?

    ``pool`` optionally supplies the degree-zero elements to probe; by
    default the linear elements found by :func:`linear_elements` are
    used.
    """
    if pool is None:
        try:
            pool = linear_elements(ext.ring)
        except (NotFinite, TooLarge):
            return (False, "no linear element pool available")
    images = [ext.quot.q(x) for x in pool]
    carrier = ext.quot.carrier
    finite = _finite_elements(carrier, DEFAULT_ENUM_BOUND)
    if finite is not None:
        reached = {carrier.zero()}
        frontier = [carrier.zero()]
        while frontier:
            base = frontier.pop()
            for img in images:
                for step in (img, carrier.neg(img)):
                    nxt = carrier.add(base, step)
                    if nxt not in reached:
                        reached.add(nxt)
                        frontier.append(nxt)
        if reached == set(finite):
            return (True, None)
        missing = next(iter(set(finite) - reached))
        return (False, f"element {missing!r} not reached")
    if isinstance(carrier, AbelianCarrier):
        group = carrier.group
        rels = mat_hstack(
            from_columns([list(v) for v in images], group.ngens),
            group.relation_matrix(),
        )
        grp, _, _ = quotient_presentation(group.ngens, rels)
        if grp.is_trivial():
            return (True, None)
        return (False, f"quotient by the image is {grp.describe()}")
    if isinstance(carrier, FreeAbelianCarrier):
        symbols = carrier.symbols
        index = {s: i for i, s in enumerate(symbols)}
        cols = []
        for img in images:
            v = [0] * len(symbols)
            for s, n in img:
                v[index[s]] = n
            cols.append(v)
        matrix = from_columns(cols, len(symbols))
        basis = from_columns(lattice_basis(matrix), len(symbols))
        for s in symbols:
            unit = tuple(1 if t == s else 0 for t in symbols)
            if not in_lattice(basis, unit):
                return (False, f"basis symbol {s!r} not generated")
        return (True, None)
    return (False, f"cannot decide generation for {carrier.describe()}")


# ---------------------------------------------------------------------------
# The invariant nu
# ---------------------------------------------------------------------------

@dataclass
class NuResult:
    """The element ``nu = P(H(2))`` and what is known about it."""

    element: object
    is_zero: bool
    order: int
    is_invariant: bool
    module_factors: tuple[int, ...] | None
    generates_module: bool | None

    def describe(self) -> str:
        if self.is_zero:
            return "nu = 0"
        if self.module_factors is not None:
            module = FgAbGroup(self.module_factors).describe()
            role = "generator" if self.generates_module else "non-generator"
            return f"nu = 1 in {module}: {role}"
        return f"nu has order {self.order}"


def nu_class(
    ext: CrossedExtension,
    samples: int = 300,
    seed: int = 0,
    bound: int = DEFAULT_ENUM_BOUND,
) -> NuResult:
    """Compute ``nu = P(H(1 + 1))`` and locate it inside ``ker boundary``.

    The element always satisfies ``2 nu = 0`` and is fixed by the
    two-sided action; it lands in the kernel of the boundary, or else
    ``NotInKernel`` is raised (which marks broken input, since
    ``boundary(P(H(2)))`` is the commutator of the unit with itself).
    """
    rng = random.Random(seed)
    c1 = ext.c1
    nu = ext.P(ext.H(ext.ring.two()))
    if not ext.c0.is_zero(ext.boundary(nu)):
        raise NotInKernel(f"boundary of nu is {ext.boundary(nu)!r}")
    is_zero = c1.is_zero(nu)
    if not is_zero and not c1.is_zero(c1.add(nu, nu)):
        raise ValueError("nu does not have order dividing two; the input is not a crossed extension")
    invariant = True
    for (x,) in _tuples([ext.c0], samples, rng):
        if ext.act_left(x, nu) != ext.act_right(nu, x):
            invariant = False
            break
    factors = generates = None
    kernel_pool = _finite_elements(ext.c1, bound)
    if kernel_pool is not None:
        kernel = [s for s in kernel_pool if ext.c0.is_zero(ext.boundary(s))]
        factors = finite_abelian_invariants(kernel, c1.add, c1.zero())
        span = {c1.zero()}
        step = nu
        while step not in span:
            span.add(step)
            step = c1.add(step, nu)
        generates = span == set(kernel)
    return NuResult(
        element=nu,
        is_zero=is_zero,
        order=1 if is_zero else 2,
        is_invariant=invariant,
        module_factors=factors,
        generates_module=generates,
    )


# ---------------------------------------------------------------------------
# The symmetric quotient construction
# ---------------------------------------------------------------------------

class ZtildePairsCarrier(Carrier):
    """Word pairs modulo ``a = T(a)`` for the swap-negate involution.

    Classes are ``(offdiag, diag)`` where ``offdiag`` holds integer
    coefficients on strictly ordered pairs and ``diag`` holds the mod-two
    diagonal support as a sorted word tuple.
    """

    def __init__(self, words: Sequence[tuple], rank: dict):
        self.words = list(words)
        self._rank = rank

    def reduce(self, coeffs: dict) -> tuple:
        off: dict = {}
        diag: set = set()
        for (u, v), c in coeffs.items():
            if u == v:
                if c % 2:
                    diag.symmetric_difference_update({u})
            elif self._rank[u] < self._rank[v]:
                off[(u, v)] = off.get((u, v), 0) + c
            else:
                off[(v, u)] = off.get((v, u), 0) - c
        off = {p: c for p, c in off.items() if c}
        return (
            tuple(sorted(off.items(), key=lambda kv: (self._rank[kv[0][0]], self._rank[kv[0][1]]))),
            tuple(sorted(diag, key=self._rank.get)),
        )

    def lift(self, el: tuple) -> dict:
        out = {p: c for p, c in el[0]}
        for w in el[1]:
            out[(w, w)] = 1
        return out

    def zero(self):
        return ((), ())

    def add(self, a, b):
        out = dict(a[0])
        for p, c in b[0]:
            out[p] = out.get(p, 0) + c
        diag = set(a[1]).symmetric_difference(b[1])
        for w in diag:
            out[(w, w)] = out.get((w, w), 0) + 1
        return self.reduce(out)

    def neg(self, a):
        out = {p: -c for p, c in a[0]}
        for w in a[1]:
            out[(w, w)] = 1
        return self.reduce(out)

    def sample(self, rng: random.Random):
        pool = [w for w in self.words if len(w) <= 2]
        out: dict = {}
        for _ in range(rng.randint(0, 3)):
            u, v = rng.choice(pool), rng.choice(pool)
            out[(u, v)] = out.get((u, v), 0) + rng.randint(-3, 3)
        return self.reduce(out)

    def elements(self, bound: int = DEFAULT_ENUM_BOUND) -> list:
        raise NotFinite("pair classes over free words form an infinite group")

    def describe(self) -> str:
        return f"word pairs modulo symmetry on {len(self.words)} words"


class Mod2WordsCarrier(Carrier):
    """The direct sum of order-two groups indexed by words."""

    def __init__(self, words: Sequence[tuple], rank: dict):
        self.words = list(words)
        self._rank = rank

    def zero(self):
        return ()

    def add(self, a, b):
        return tuple(sorted(set(a).symmetric_difference(b), key=self._rank.get))

    def neg(self, a):
        return a

    def sample(self, rng: random.Random):
        pool = [w for w in self.words if len(w) <= 2]
        return tuple(sorted(
            rng.sample(pool, min(len(pool), rng.randint(0, 2))), key=self._rank.get,
        ))

    def elements(self, bound: int = DEFAULT_ENUM_BOUND) -> list:
        if 2 ** len(self.words) > bound:
            raise TooLarge(f"2^{len(self.words)} subsets exceed the bound")
        import itertools as it

        out = []
        for k in range(len(self.words) + 1):
            out.extend(tuple(c) for c in it.combinations(self.words, k))
        return out

    def describe(self) -> str:
        return f"(Z/2)^({len(self.words)})"


def ztilde_construction(R: SquareRing, samples: int = 200, seed: int = 0) -> CrossedExtension:
    """Quotient the quadratic part by ``Id - T`` and read off a boundary.

    ``C1 = ee / (Id - T)`` with projection ``Pt``, boundary induced by
    ``P`` (well defined because ``P T = P``), and actions through the
    diagonal pair action. The input must pass the square-ring checks,
    otherwise ``NotASquareRing`` is raised.
    """
    report = verify_ring(R, samples=samples, seed=seed)
    if not report.passed:
        failure = report.first_failure()
        raise NotASquareRing(f"{failure.name}: {failure.witness or 'failed'}")
    sg = R.square_group()
    if isinstance(R.e, AbelianCarrier) and isinstance(R.ee, AbelianCarrier):
        return _ztilde_abelian(R, sg)
    if isinstance(R.e, FreeNil2Carrier) and isinstance(R.ee, FreePairsCarrier):
        return _ztilde_pairs(R, sg)
    raise ValueError("the quotient construction needs abelian or word-pair carriers")


def _ztilde_abelian(R: SquareRing, sg: SquareGroup) -> CrossedExtension:
    G = R.ee.group
    n = G.ngens
    tmat_cols = [sg.tmap(G.generator(i)) for i in range(n)]
    one_minus_t = [
        [identity(n)[i][j] - tmat_cols[j][i] for j in range(n)] for i in range(n)
    ]
    grp, project, lift = quotient_presentation(
        n, mat_hstack(G.relation_matrix(), one_minus_t)
    )
    c1 = AbelianCarrier(grp)

    def proj(a):
        return grp.reduce(mat_vec(project, a))

    def lift_el(r7):
        return G.reduce(mat_vec(lift, r7))

    def boundary(r7):
        return R.P(lift_el(r7))

    base = R.e.group
    image_cols = [list(boundary(grp.generator(i))) for i in range(grp.ngens)]
    rgrp, rproject, rlift = quotient_presentation(
        base.ngens,
        mat_hstack(base.relation_matrix(), from_columns(image_cols, base.ngens)),
    )
    rcar = AbelianCarrier(rgrp)

    def q(x):
        return rgrp.reduce(mat_vec(rproject, x))

    def rmul(u, v):
        return q(R.mul(base.reduce(mat_vec(rlift, u)), base.reduce(mat_vec(rlift, v))))

    kernel_group, kernel_incl = _abelian_kernel(
        grp, base, from_columns(image_cols, base.ngens)
    )

    return CrossedExtension(
        kind="csr",
        ring=R,
        c1=c1,
        P=proj,
        boundary=boundary,
        act_left=lambda x, r7: proj(R.act_pair(x, x, lift_el(r7))),
        act_right=lambda r7, y: proj(R.act_right(lift_el(r7), y)),
        module=AbelianCarrier(kernel_group),
        include=lambda m: grp.reduce(mat_vec(kernel_incl, m)),
        quot=QuotientRing(carrier=rcar, mul=rmul, one=q(R.one), q=q),
        name=f"ztilde({R.name})",
    )


def _abelian_kernel(src: FgAbGroup, dst: FgAbGroup, matrix) -> tuple[FgAbGroup, list]:
    from .abelian import AbMap

    m = AbMap(src, dst, matrix if matrix else zeros(dst.ngens, src.ngens))
    group, incl = m.kernel()
    return group, incl.matrix


def _ztilde_pairs(R: SquareRing, sg: SquareGroup) -> CrossedExtension:
    words = R.ee.symbols
    rank = R.ee._rank
    for u in words:
        for v in words:
            got = sg.tmap(R.ee.pair(u, v))
            if got != R.ee.pair(v, u, -1):
                raise ValueError(
                    f"the involution does not swap and negate at ({u!r}, {v!r}): {got!r}"
                )
    c1 = ZtildePairsCarrier(words, rank)

    def proj(a):
        return c1.reduce(dict(a))

    def lift_el(r7):
        return R.ee.make(c1.lift(r7))

    def boundary(r7):
        return R.P(lift_el(r7))

    module = Mod2WordsCarrier(words, rank)
    rcar = FreeAbelianCarrier(words)

    def q(x):
        return rcar.make(x.linear_dict())

    def rmul(u, v):
        out: dict = {}
        for s, a in u:
            for t, b in v:
                w = s + t
                if len(w) > len(max(words, key=len)):
                    raise TooLarge(f"product word of length {len(w)} exceeds the carrier")
                out[w] = out.get(w, 0) + a * b
        return rcar.make(out)

    return CrossedExtension(
        kind="csr",
        ring=R,
        c1=c1,
        P=proj,
        boundary=boundary,
        act_left=lambda x, r7: proj(R.act_pair(x, x, lift_el(r7))),
        act_right=lambda r7, y: proj(R.act_right(lift_el(r7), y)),
        module=module,
        include=lambda m: ((), m),
        quot=QuotientRing(carrier=rcar, mul=rmul, one=rcar.atom(()), q=q),
        name=f"ztilde({R.name})",
    )


# ---------------------------------------------------------------------------
# Ready-made finite extensions
# ---------------------------------------------------------------------------

def cyclic_ring_extension(m: int, d: int) -> CrossedExtension:
    """``Z/m`` over itself with boundary multiplication by ``d``.

    The kernel and the quotient are both ``Z/gcd(d, m)``; the quadratic
    part is trivial, so this is a crossed extension of ordinary rings.

    >>> ext = cyclic_ring_extension(4, 2)
    >>> ext.module.describe()
    'Z/2'
    """
    from .sqring import cyclic_ring
    import math

    ring = cyclic_ring(m)
    g = math.gcd(d, m) if d else m
    c1 = AbelianCarrier(FgAbGroup((m,)) if m > 1 else FgAbGroup.trivial())
    mgrp = FgAbGroup((g,)) if g > 1 else FgAbGroup.trivial()
    rgrp = FgAbGroup((g,)) if g > 1 else FgAbGroup.trivial()
    mcar, rcar = AbelianCarrier(mgrp), AbelianCarrier(rgrp)
    stride = m // g

    def q(x):
        return rgrp.reduce((x[0],)) if g > 1 else ()

    return CrossedExtension(
        kind="ring",
        ring=ring,
        c1=c1,
        P=lambda a: c1.zero(),
        boundary=lambda r7: ring.e.group.reduce((d * r7[0],)),
        act_left=lambda x, r7: c1.group.reduce((x[0] * r7[0],)),
        act_right=lambda r7, y: c1.group.reduce((r7[0] * y[0],)),
        module=mcar,
        include=lambda mm: c1.group.reduce((stride * mm[0],)) if g > 1 else c1.zero(),
        quot=QuotientRing(
            carrier=rcar,
            mul=lambda u, v: rgrp.reduce((u[0] * v[0],)) if g > 1 else (),
            one=q(ring.one),
            q=q,
        ),
        name=f"Z/{m} --{d}--> Z/{m}",
    )


# ---------------------------------------------------------------------------
# Pullbacks
# ---------------------------------------------------------------------------

class PullbackCarrier(Carrier):
    """Pairs ``(c, w)`` with matching boundaries, inside a product."""

    def __init__(self, left: Carrier, right: Carrier, matches: Callable, sampler: Callable):
        self.left = left
        self.right = right
        self.matches = matches
        self._sampler = sampler

    def zero(self):
        return (self.left.zero(), self.right.zero())

    def add(self, a, b):
        return (self.left.add(a[0], b[0]), self.right.add(a[1], b[1]))

    def neg(self, a):
        return (self.left.neg(a[0]), self.right.neg(a[1]))

    def sample(self, rng: random.Random):
        return self._sampler(rng)

    def elements(self, bound: int = DEFAULT_ENUM_BOUND) -> list:
        ls = self.left.elements(bound)
        rs = self.right.elements(bound)
        return [(c, w) for c in ls for w in rs if self.matches(c, w)]

    def describe(self) -> str:
        return f"pullback of {self.left.describe()} and {self.right.describe()}"


def pullback_extension(
    ext: CrossedExtension,
    ring_new,
    f: SgMorphism,
    section: Callable,
    samples: int = 300,
    seed: int = 0,
) -> CrossedExtension:
    """Pull the extension back along a ring morphism ``f: new -> old``.

    ``section`` must pick a preimage under ``f.e`` for every degree-zero
    element of the old ring (its failure raises ``NotSurjective``); it is
    used for sampling the pullback and certifies that the new projection
    is onto. Misalignment of ``f`` with the structure maps raises
    ``PullbackDegenerate``.
    """
    rng = random.Random(seed)
    old = ext.ring
    for (c,) in _tuples([old.e], samples, rng):
        if f.e(section(c)) != c:
            raise NotSurjective(f"section misses {c!r}")
    for x, y in _tuples([ring_new.e, ring_new.e], samples, rng):
        if f.e(ring_new.e.add(x, y)) != old.e.add(f.e(x), f.e(y)):
            raise PullbackDegenerate(f"f not additive at ({x!r}, {y!r})")
        if f.e(ring_new.mul(x, y)) != old.mul(f.e(x), f.e(y)):
            raise PullbackDegenerate(f"f not multiplicative at ({x!r}, {y!r})")
    if f.e(ring_new.one) != old.one:
        raise PullbackDegenerate("f does not preserve the unit")
    for (a,) in _tuples([ring_new.ee], samples, rng):
        lhs = ext.boundary(ext.P(f.ee(a)))
        rhs = f.e(ring_new.P(a))
        if lhs != rhs:
            raise PullbackDegenerate(f"P images disagree at {a!r}: {lhs!r} vs {rhs!r}")
    for (x,) in _tuples([ring_new.e], samples, rng):
        if f.ee(ring_new.H(x)) != old.H(f.e(x)):
            raise PullbackDegenerate(f"H images disagree at {x!r}")

    def matches(c, w):
        return ext.boundary(c) == f.e(w)

    def sampler(rng2: random.Random):
        c = ext.c1.sample(rng2)
        w = section(ext.boundary(c))
        noise = ring_new.e.sample(rng2)
        w = ring_new.e.add(w, ring_new.e.sub(noise, section(f.e(noise))))
        return (c, w)

    c1 = PullbackCarrier(ext.c1, ring_new.e, matches, sampler)

    def act_left(x, cw):
        c, w = cw
        return (ext.act_left(f.e(x), c), ring_new.mul(x, w))

    def act_right(cw, y):
        c, w = cw
        return (ext.act_right(c, f.e(y)), ring_new.mul(w, y))

    return CrossedExtension(
        kind=ext.kind,
        ring=ring_new,
        c1=c1,
        P=lambda a: (ext.P(f.ee(a)), ring_new.P(a)),
        boundary=lambda cw: cw[1],
        act_left=act_left,
        act_right=act_right,
        module=ext.module,
        include=lambda m7: (ext.include(m7), ring_new.e.zero()),
        quot=QuotientRing(
            carrier=ext.quot.carrier,
            mul=ext.quot.mul,
            one=ext.quot.one,
            q=lambda w: ext.quot.q(f.e(w)),
        ),
        name=f"pullback of {ext.name}",
    )
