"""Cohomology of finite categories with natural-system coefficients.

A natural system assigns an abelian group to every morphism and a map
``D(alpha) -> D(psi . alpha . nu)`` to every way of extending a morphism
on both sides. Cochains in degree ``n`` are families indexed by
composable ``n``-tuples with values in the group of the composite; the
coboundary pushes through the outer morphisms and merges inner pairs
with alternating signs.

Everything is exact integer arithmetic: cochain levels are presented
groups, differentials are integer matrices, and cohomology comes out of
Smith normal form with certified witnesses.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .abelian import (
    AbMap,
    FgAbGroup,
    HomologyResult,
    from_columns,
    homology_at,
    identity as identity_matrix,
    mat_hstack,
    mat_shape,
    mat_vec,
    matmul,
    quotient_presentation,
    solve_integer,
    zeros,
)
from .errors import (
    DegreeTooHigh,
    InfeasibleSize,
    NotIdentityOnObjects,
    NotSurjective,
    TooLarge,
)
from .reports import Report

MAX_ABSOLUTE_DEGREE = 3
MAX_RELATIVE_DEGREE = 4
DEFAULT_GENERATOR_CAP = 24000


# ---------------------------------------------------------------------------
# Finite categories
# ---------------------------------------------------------------------------

@dataclass
class FinCat:
    """A finite category as explicit tables.

    ``table[(f, g)]`` is the composite ``f . g`` (``g`` applied first),
    defined exactly when ``dom[f] == cod[g]``.
    """

    objects: tuple
    morphisms: tuple
    dom: dict
    cod: dict
    table: dict
    ids: dict
    name: str = "category"

    def identity(self, obj: Hashable):
        return self.ids[obj]

    def is_identity(self, f: Hashable) -> bool:
        return f == self.ids[self.dom[f]]

    def compose(self, f: Hashable, g: Hashable):
        """The composite ``f . g``; ``g`` acts first."""
        if self.dom[f] != self.cod[g]:
            raise ValueError(f"morphisms {f!r} and {g!r} are not composable")
        return self.table[(f, g)]

    def product(self, chain: Sequence) -> Hashable:
        out = chain[0]
        for f in chain[1:]:
            out = self.compose(out, f)
        return out

    def composable_tuples(self, n: int, normalized: bool = False) -> list[tuple]:
        """All chains ``(a_1, ..., a_n)`` with ``dom(a_i) = cod(a_(i+1))``."""
        if n == 0:
            return [() for _ in range(1)]
        pool = [
            f for f in self.morphisms if not (normalized and self.is_identity(f))
        ]
        chains = [(f,) for f in pool]
        for _ in range(n - 1):
            chains = [
                t + (g,) for t in chains for g in pool if self.dom[t[-1]] == self.cod[g]
            ]
        return chains

    def validate(self) -> Report:
        r = Report(title=f"category tables: {self.name}")
        ok, witness = True, None
        for o in self.objects:
            i = self.ids.get(o)
            if i is None or self.dom.get(i) != o or self.cod.get(i) != o:
                ok, witness = False, f"object {o!r}"
                break
        r.add("identities present", ok, witness)
        ok, witness = True, None
        for f in self.morphisms:
            left = self.table.get((f, self.ids[self.dom[f]]))
            right = self.table.get((self.ids[self.cod[f]], f))
            if left != f or right != f:
                ok, witness = False, f"morphism {f!r}"
                break
        r.add("identities neutral", ok, witness)
        pairs = [(f, g) for f in self.morphisms for g in self.morphisms if self.dom[f] == self.cod[g]]
        closed, witness = True, None
        for f, g in pairs:
            h = self.table.get((f, g))
            if h is None or h not in set(self.morphisms) or self.dom[h] != self.dom[g] or self.cod[h] != self.cod[f]:
                closed, witness = False, f"pair ({f!r}, {g!r})"
                break
        r.add("composition closed", closed, witness)
        if not closed:
            r.note("associativity not checked because the table is not closed")
            return r
        if len(pairs) * len(self.morphisms) > 2_000_000:
            raise TooLarge(f"{len(pairs)} composable pairs make associativity checks impractical")
        ok, witness = True, None
        for f, g in pairs:
            for h in self.morphisms:
                if self.dom[g] != self.cod[h]:
                    continue
                if self.compose(self.compose(f, g), h) != self.compose(f, self.compose(g, h)):
                    ok, witness = False, f"triple ({f!r}, {g!r}, {h!r})"
                    break
            if not ok:
                break
        r.add("composition associative", ok, witness)
        return r

    @classmethod
    def from_monoid(cls, elements: Sequence, mul: Callable, unit, name: str = "monoid") -> "FinCat":
        obj = "*"
        elems = tuple(elements)
        table = {(f, g): mul(f, g) for f in elems for g in elems}
        return cls(
            objects=(obj,),
            morphisms=elems,
            dom={f: obj for f in elems},
            cod={f: obj for f in elems},
            table=table,
            ids={obj: unit},
            name=name,
        )

    @classmethod
    def mod_r(cls, modulus: int, max_rank: int, name: str | None = None) -> "FinCat":
        """Objects are ranks ``0..max_rank``; morphisms ``y -> x`` are
        ``x`` by ``y`` matrices over ``Z/modulus``, composed by matrix
        product. A morphism is stored as ``(x, y, rows)``."""
        if modulus < 2:
            raise ValueError("the matrix category needs a modulus of at least 2")
        if modulus ** (max_rank * max_rank) > 4096:
            raise TooLarge(
                f"hom set of size {modulus}^{max_rank * max_rank} is too large to tabulate"
            )
        objects = tuple(range(max_rank + 1))
        morphisms = []
        for x in objects:
            for y in objects:
                for flat in itertools.product(range(modulus), repeat=x * y):
                    rows = tuple(tuple(flat[i * y + k] for k in range(y)) for i in range(x))
                    morphisms.append((x, y, rows))
        table = {}
        for x, y, a in morphisms:
            for y2, z, b in morphisms:
                if y2 != y:
                    continue
                rows = tuple(
                    tuple(sum(a[i][k] * b[k][j] for k in range(y)) % modulus for j in range(z))
                    for i in range(x)
                )
                table[((x, y, a), (y, z, b))] = (x, z, rows)
        ids = {
            x: (x, x, tuple(tuple(int(i == j) for j in range(x)) for i in range(x)))
            for x in objects
        }
        return cls(
            objects=objects,
            morphisms=tuple(morphisms),
            dom={m: m[1] for m in morphisms},
            cod={m: m[0] for m in morphisms},
            table=table,
            ids=ids,
            name=name or f"mod-Z/{modulus} ranks <= {max_rank}",
        )


# ---------------------------------------------------------------------------
# Natural systems
# ---------------------------------------------------------------------------

@dataclass
class NatSystem:
    """Coefficients for category cohomology.

    ``group(alpha)`` is the abelian group at a morphism; ``act(nu,
    alpha, psi)`` is the induced map ``D(alpha) -> D(psi . alpha . nu)``
    for ``nu`` into the source and ``psi`` out of the target.
    """

    cat: FinCat
    group: Callable
    act: Callable
    name: str = "natural system"
    _cache: dict = field(default_factory=dict, repr=False)

    def group_at(self, alpha) -> FgAbGroup:
        if alpha not in self._cache:
            self._cache[alpha] = self.group(alpha)
        return self._cache[alpha]

    def map_for(self, nu, alpha, psi) -> AbMap:
        return self.act(nu, alpha, psi)


def trivial_system(cat: FinCat, group: FgAbGroup, name: str | None = None) -> NatSystem:
    def act(nu, alpha, psi):
        return AbMap(group, group, identity_matrix(group.ngens))

    return NatSystem(
        cat=cat,
        group=lambda alpha: group,
        act=act,
        name=name or f"constant {group.describe()}",
    )


def dm_natural_system(
    modulus: int, max_rank: int, coeff_modulus: int | None = None
) -> tuple[FinCat, NatSystem]:
    """Matrix groups over ``Z/coeff`` as coefficients on the matrix category.

    At a morphism ``alpha: y -> x`` the group is ``(Z/coeff)^(x*y)``;
    extending by ``nu`` and ``psi`` acts by ``a -> psi a nu``. The
    coefficient modulus must divide the matrix modulus so the action is
    independent of entry representatives.
    """
    coeff = modulus if coeff_modulus is None else coeff_modulus
    if modulus % coeff:
        raise ValueError(
            f"coefficient modulus {coeff} must divide the matrix modulus {modulus}"
        )
    cat = FinCat.mod_r(modulus, max_rank)
    groups: dict = {}

    def group(alpha):
        x, y, _ = alpha
        key = x * y
        if key not in groups:
            groups[key] = FgAbGroup((coeff,) * key) if key else FgAbGroup.trivial()
        return groups[key]

    def act(nu, alpha, psi):
        x, y, _ = alpha
        yn, y2, nmat = nu
        x2, xp, pmat = psi
        if yn != y or xp != x:
            raise ValueError("action factors do not align with the morphism")
        src = group(alpha)
        dst = group((x2, y2, None))
        rows = zeros(x2 * y2, x * y)
        for i in range(x):
            for k in range(y):
                col = i * y + k
                for p in range(x2):
                    for q in range(y2):
                        rows[p * y2 + q][col] = (pmat[p][i] * nmat[k][q]) % coeff
        return AbMap(src, dst, rows)

    return cat, NatSystem(cat=cat, group=group, act=act, name=f"bimodule Z/{coeff} matrices")


def natsystem_verify(D: NatSystem, max_pairs: int = 20000) -> Report:
    """Functoriality of a natural system over its category."""
    C = D.cat
    r = Report(title=f"natural system: {D.name}")
    ok, witness = True, None
    for alpha in C.morphisms:
        m = D.map_for(C.identity(C.dom[alpha]), alpha, C.identity(C.cod[alpha]))
        if m.matrix != identity_matrix(D.group_at(alpha).ngens):
            ok, witness = False, f"morphism {alpha!r}"
            break
    r.add("identity extension acts as the identity", ok, witness)
    triples = []
    for alpha in C.morphisms:
        for nu in C.morphisms:
            if C.cod[nu] != C.dom[alpha]:
                continue
            for psi in C.morphisms:
                if C.dom[psi] != C.cod[alpha]:
                    continue
                triples.append((nu, alpha, psi))
    if len(triples) ** 2 > max_pairs ** 2:
        raise TooLarge(f"{len(triples)} extensions exceed the verification cap")
    ok, witness = True, None
    count = 0
    for nu, alpha, psi in triples:
        beta = C.compose(psi, C.compose(alpha, nu))
        for nu2 in C.morphisms:
            if C.cod[nu2] != C.dom[beta]:
                continue
            for psi2 in C.morphisms:
                if C.dom[psi2] != C.cod[beta]:
                    continue
                count += 1
                if count > max_pairs:
                    r.note(f"composition functoriality truncated at {max_pairs} cases")
                    break
                two_step = D.map_for(nu2, beta, psi2).compose(D.map_for(nu, alpha, psi))
                one_step = D.map_for(
                    C.compose(nu, nu2), alpha, C.compose(psi2, psi)
                )
                if two_step.matrix != one_step.matrix:
                    ok, witness = False, f"({nu!r}, {alpha!r}, {psi!r}) then ({nu2!r}, {psi2!r})"
                    break
            if not ok or count > max_pairs:
                break
        if not ok or count > max_pairs:
            break
    r.add("extensions compose functorially", ok, witness)
    return r


# ---------------------------------------------------------------------------
# Cochain levels as presented groups
# ---------------------------------------------------------------------------

@dataclass
class _Level:
    keys: list
    block: dict
    offset: dict
    ngens: int
    rels: list
    grp: FgAbGroup
    proj: list
    lift: list

    def assemble(self, cochain: dict) -> list[int]:
        v = [0] * self.ngens
        for key, val in cochain.items():
            if key not in self.offset:
                raise ValueError(f"unknown cochain index {key!r}")
            block = self.block[key]
            coords = block.reduce(tuple(val))
            off = self.offset[key]
            for i, c in enumerate(coords):
                v[off + i] = c
        return v

    def canonical(self, cochain: dict) -> tuple[int, ...]:
        return self.grp.reduce(mat_vec(self.proj, self.assemble(cochain)))


def _build_level(C: FinCat, D: NatSystem, n: int, normalized: bool, cap: int) -> _Level:
    if n == 0:
        keys = list(C.objects)
        blocks = {o: D.group_at(C.identity(o)) for o in keys}
    else:
        keys = C.composable_tuples(n, normalized)
        blocks = {t: D.group_at(C.product(t)) for t in keys}
    offset, total = {}, 0
    for k in keys:
        offset[k] = total
        total += blocks[k].ngens
        if total > cap:
            raise InfeasibleSize(
                f"cochain level {n} needs at least {total} generators (cap {cap})"
            )
    cols = []
    for k in keys:
        for col in _columns_of(blocks[k].relation_matrix()):
            full = [0] * total
            for i, c in enumerate(col):
                full[offset[k] + i] = c
            cols.append(full)
    rels = from_columns(cols, total) if cols else zeros(total, 0)
    grp, proj, lift = quotient_presentation(total, rels)
    return _Level(
        keys=keys, block=blocks, offset=offset, ngens=total, rels=rels,
        grp=grp, proj=proj, lift=lift,
    )


def _columns_of(M) -> list[list[int]]:
    m, n = mat_shape(M)
    return [[M[i][j] for i in range(m)] for j in range(n)]


def _coboundary_terms(C: FinCat, T: tuple):
    """Faces of the chain ``T``: (argument key, sign, action or None)."""
    n1 = len(T)
    n = n1 - 1
    if n == 0:
        d, c = C.dom[T[0]], C.cod[T[0]]
        yield (d, 1, (C.identity(d), C.identity(d), T[0]))
        yield (c, -1, (T[0], C.identity(c), C.identity(c)))
        return
    rest = T[1:]
    yield (rest, 1, (C.identity(C.dom[T[-1]]), C.product(rest), T[0]))
    for i in range(1, n + 1):
        merged = T[: i - 1] + (C.compose(T[i - 1], T[i]),) + T[i + 1 :]
        yield (merged, (-1) ** i, None)
    front = T[:-1]
    yield (front, (-1) ** n1, (T[-1], C.product(front), C.identity(C.cod[T[0]])))


def _d_presented(C: FinCat, D: NatSystem, src: _Level, tgt: _Level) -> list:
    M = zeros(tgt.ngens, src.ngens)
    for T in tgt.keys:
        row0 = tgt.offset[T]
        for arg, sign, act3 in _coboundary_terms(C, T):
            if arg not in src.offset:
                continue
            col0 = src.offset[arg]
            if act3 is None:
                amat = identity_matrix(src.block[arg].ngens)
            else:
                amat = D.map_for(*act3).matrix
            for i, row in enumerate(amat):
                for j, c in enumerate(row):
                    if c:
                        M[row0 + i][col0 + j] += sign * c
    return M


def _canonical_map(dpres, src: _Level, tgt: _Level) -> AbMap:
    return AbMap(src.grp, tgt.grp, matmul(matmul(tgt.proj, dpres), src.lift))


# ---------------------------------------------------------------------------
# Absolute cohomology
# ---------------------------------------------------------------------------

@dataclass
class CohomologyResult:
    """One cohomology group with enough context to classify cocycles."""

    degree: int
    normalized: bool
    group: FgAbGroup
    hom: HomologyResult
    level: _Level
    d_in: AbMap
    d_out: AbMap

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.group.invariant_factors

    def class_of(self, cochain: dict) -> tuple[int, ...]:
        """Cohomology class of a cocycle given as ``{index: coords}``."""
        return self.hom.express(self.level.canonical(cochain))

    def is_cocycle(self, cochain: dict) -> bool:
        v = self.level.canonical(cochain)
        return self.d_out.target.reduce(self.d_out.apply(v)) == self.d_out.target.zero()


def cohomology(
    C: FinCat,
    D: NatSystem,
    degree: int,
    normalized: bool | None = None,
    max_generators: int = DEFAULT_GENERATOR_CAP,
) -> CohomologyResult:
    """The degree-``n`` cohomology of ``C`` with coefficients in ``D``.

    Degrees up to 3 are supported; above degree 2 the normalized
    subcomplex (chains without identities) is used by default, which
    computes the same groups on far fewer generators.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree > MAX_ABSOLUTE_DEGREE:
        raise DegreeTooHigh(
            f"absolute cohomology is implemented for degree <= {MAX_ABSOLUTE_DEGREE}, got {degree}"
        )
    if normalized is None:
        normalized = degree > 2
    mid = _build_level(C, D, degree, normalized, max_generators)
    nxt = _build_level(C, D, degree + 1, normalized, max_generators)
    d_out = _canonical_map(_d_presented(C, D, mid, nxt), mid, nxt)
    if degree == 0:
        d_in = AbMap.zero_map(FgAbGroup.trivial(), mid.grp)
    else:
        prv = _build_level(C, D, degree - 1, normalized, max_generators)
        d_in = _canonical_map(_d_presented(C, D, prv, mid), prv, mid)
    hom = homology_at(d_in, d_out)
    return CohomologyResult(
        degree=degree, normalized=normalized, group=hom.group, hom=hom,
        level=mid, d_in=d_in, d_out=d_out,
    )


def coboundary(
    C: FinCat, D: NatSystem, degree: int, cochain: dict, normalized: bool = False
) -> dict:
    """Evaluate the coboundary of a degree-``n`` cochain directly.

    The cochain maps chain tuples (objects in degree zero) to
    coordinate tuples in the group of the composite; missing indices
    count as zero. This route never builds matrices, so it doubles as
    an independent check on the matrix differential.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree > MAX_ABSOLUTE_DEGREE:
        raise DegreeTooHigh(
            f"coboundaries are implemented for degree <= {MAX_ABSOLUTE_DEGREE}, got {degree}"
        )
    def value_at(key, group):
        if key in cochain:
            return group.reduce(tuple(cochain[key]))
        return group.zero()

    out = {}
    for T in C.composable_tuples(degree + 1, normalized):
        tgt_group = D.group_at(C.product(T))
        total = tgt_group.zero()
        for arg, sign, act3 in _coboundary_terms(C, T):
            if degree == 0:
                src_group = D.group_at(C.identity(arg))
            else:
                if normalized and any(C.is_identity(f) for f in arg):
                    continue
                src_group = D.group_at(C.product(arg))
            v = value_at(arg, src_group)
            if act3 is not None:
                v = D.map_for(*act3).apply(v)
            total = tgt_group.add(total, tgt_group.scalar(sign, v))
        if any(total):
            out[T] = total
    return out


# ---------------------------------------------------------------------------
# Relative cohomology along a full projection
# ---------------------------------------------------------------------------

def validate_projection(C: FinCat, K: FinCat, p: dict) -> None:
    """``p: K -> C`` must fix objects, be a functor, and hit every morphism."""
    if set(K.objects) != set(C.objects):
        raise NotIdentityOnObjects(
            f"object sets differ: {sorted(map(repr, K.objects))} vs {sorted(map(repr, C.objects))}"
        )
    for f in K.morphisms:
        if f not in p:
            raise ValueError(f"projection undefined on {f!r}")
        if K.dom[f] != C.dom[p[f]] or K.cod[f] != C.cod[p[f]]:
            raise NotIdentityOnObjects(f"projection moves the endpoints of {f!r}")
    for o in K.objects:
        if p[K.identity(o)] != C.identity(o):
            raise ValueError(f"projection sends the identity of {o!r} elsewhere")
    for f in K.morphisms:
        for g in K.morphisms:
            if K.dom[f] != K.cod[g]:
                continue
            if p[K.compose(f, g)] != C.compose(p[f], p[g]):
                raise ValueError(f"projection is not a functor at ({f!r}, {g!r})")
    missing = set(C.morphisms) - set(p.values())
    if missing:
        raise NotSurjective(f"morphisms without preimage: {sorted(map(repr, missing))[:3]}")


def _pulled_system(K: FinCat, D: NatSystem, p: dict) -> NatSystem:
    return NatSystem(
        cat=K,
        group=lambda alpha: D.group_at(p[alpha]),
        act=lambda nu, alpha, psi: D.map_for(p[nu], p[alpha], p[psi]),
        name=f"{D.name} pulled back",
    )


def _rho_presented(levelC: _Level, levelK: _Level, p: dict, degree: int) -> list:
    M = zeros(levelK.ngens, levelC.ngens)
    for t in levelK.keys:
        s = t if degree == 0 else tuple(p[f] for f in t)
        if s not in levelC.offset:
            continue
        r0, c0 = levelK.offset[t], levelC.offset[s]
        for i in range(levelK.block[t].ngens):
            M[r0 + i][c0 + i] = 1
    return M


@dataclass
class _RelativeWindow:
    levelsC: dict
    levelsK: dict
    q_grp: dict
    q_proj: dict
    q_lift: dict
    dC_pres: dict
    dK_pres: dict
    rho: dict

    def dq(self, j: int) -> AbMap:
        mat = matmul(matmul(self.q_proj[j + 1], self.dK_pres[j]), self.q_lift[j])
        return AbMap(self.q_grp[j], self.q_grp[j + 1], mat)


def _relative_window(
    C: FinCat, K: FinCat, p: dict, D: NatSystem,
    lo: int, hi: int, normalized: bool, cap: int,
) -> _RelativeWindow:
    DK = _pulled_system(K, D, p)
    levelsC = {j: _build_level(C, D, j, normalized, cap) for j in range(max(lo, 0), hi + 1)}
    levelsK = {j: _build_level(K, DK, j, normalized, cap) for j in range(max(lo, 0), hi + 1)}
    rho, q_grp, q_proj, q_lift = {}, {}, {}, {}
    for j in range(max(lo, 0), hi + 1):
        rho[j] = _rho_presented(levelsC[j], levelsK[j], p, j)
        grp, proj, lift = quotient_presentation(
            levelsK[j].ngens, mat_hstack(levelsK[j].rels, rho[j])
        )
        q_grp[j], q_proj[j], q_lift[j] = grp, proj, lift
    dC = {j: _d_presented(C, D, levelsC[j], levelsC[j + 1]) for j in range(max(lo, 0), hi)}
    dK = {j: _d_presented(K, DK, levelsK[j], levelsK[j + 1]) for j in range(max(lo, 0), hi)}
    return _RelativeWindow(
        levelsC=levelsC, levelsK=levelsK, q_grp=q_grp, q_proj=q_proj,
        q_lift=q_lift, dC_pres=dC, dK_pres=dK, rho=rho,
    )


def relative_cohomology(
    C: FinCat,
    K: FinCat,
    p: dict,
    D: NatSystem,
    degree: int,
    normalized: bool | None = None,
    max_generators: int = DEFAULT_GENERATOR_CAP,
) -> FgAbGroup:
    """Relative cohomology of ``p: K -> C`` in the given degree.

    The projection must fix objects and be surjective on morphisms; the
    relative groups are the cohomology of the cokernel of the cochain
    restriction, shifted up by one degree so the long exact sequence
    reads ``0 -> H^0(C) -> H^0(K) -> H^1(C,K) -> H^1(C) -> ...``.
    """
    if degree < 1:
        raise ValueError("relative cohomology starts in degree 1")
    if degree > MAX_RELATIVE_DEGREE:
        raise DegreeTooHigh(
            f"relative cohomology is implemented for degree <= {MAX_RELATIVE_DEGREE}, got {degree}"
        )
    if normalized is None:
        normalized = degree - 1 > 2
    validate_projection(C, K, p)
    j = degree - 1
    win = _relative_window(C, K, p, D, j - 1, j + 1, normalized, max_generators)
    d_out = win.dq(j)
    if j == 0:
        d_in = AbMap.zero_map(FgAbGroup.trivial(), win.q_grp[0])
    else:
        d_in = win.dq(j - 1)
    return homology_at(d_in, d_out).group


def les_report(
    C: FinCat,
    K: FinCat,
    p: dict,
    D: NatSystem,
    max_degree: int = 2,
    normalized: bool = False,
    max_generators: int = DEFAULT_GENERATOR_CAP,
) -> Report:
    """Exactness of the long sequence relating ``C``, ``K``, and the pair.

    Builds ``H^j(C) -> H^j(K) -> H^(j+1)(C,K) -> H^(j+1)(C)`` maps from
    explicit cocycle representatives and checks exactness at every node
    up to the requested degree.
    """
    validate_projection(C, K, p)
    r = Report(title=f"long exact sequence: {C.name} relative {K.name}")
    win = _relative_window(C, K, p, D, 0, max_degree + 1, normalized, max_generators)
    DK = _pulled_system(K, D, p)

    def homC(j):
        d_in = (
            AbMap.zero_map(FgAbGroup.trivial(), win.levelsC[0].grp)
            if j == 0
            else _canonical_map(win.dC_pres[j - 1], win.levelsC[j - 1], win.levelsC[j])
        )
        d_out = _canonical_map(win.dC_pres[j], win.levelsC[j], win.levelsC[j + 1])
        return homology_at(d_in, d_out)

    def homK(j):
        d_in = (
            AbMap.zero_map(FgAbGroup.trivial(), win.levelsK[0].grp)
            if j == 0
            else _canonical_map(win.dK_pres[j - 1], win.levelsK[j - 1], win.levelsK[j])
        )
        d_out = _canonical_map(win.dK_pres[j], win.levelsK[j], win.levelsK[j + 1])
        return homology_at(d_in, d_out)

    def homQ(j):
        d_out = win.dq(j)
        d_in = (
            AbMap.zero_map(FgAbGroup.trivial(), win.q_grp[0]) if j == 0 else win.dq(j - 1)
        )
        return homology_at(d_in, d_out)

    HC = {j: homC(j) for j in range(max_degree + 1)}
    HK = {j: homK(j) for j in range(max_degree + 1)}
    HQ = {j: homQ(j) for j in range(max_degree)}

    def induced(hsrc: HomologyResult, hdst: HomologyResult, push: Callable) -> AbMap:
        cols = []
        for i in range(hsrc.group.ngens):
            rep = hsrc.representative(hsrc.group.generator(i))
            cols.append(hdst.express(push(rep)))
        return AbMap.from_columns(hsrc.group, hdst.group, cols)

    def push_a(j):
        lc, lk = win.levelsC[j], win.levelsK[j]
        return lambda rep: lk.grp.reduce(
            mat_vec(lk.proj, mat_vec(win.rho[j], mat_vec(lc.lift, rep)))
        )

    def push_b(j):
        lk = win.levelsK[j]
        return lambda rep: tuple(mat_vec(win.q_proj[j], mat_vec(lk.lift, rep)))

    def push_delta(j):
        lkn, lcn = win.levelsK[j + 1], win.levelsC[j + 1]

        def go(rep):
            v = mat_vec(win.q_lift[j], rep)
            w = mat_vec(win.dK_pres[j], v)
            sol = solve_integer(mat_hstack(win.rho[j + 1], lkn.rels), w)
            if sol is None:
                raise ValueError("boundary of a lifted relative cocycle escapes the image")
            x = sol[: lcn.ngens]
            return lcn.grp.reduce(mat_vec(lcn.proj, x))

        return go

    amaps = {j: induced(HC[j], HK[j], push_a(j)) for j in range(max_degree + 1)}
    bmaps = {j: induced(HK[j], HQ[j], push_b(j)) for j in range(max_degree)}
    dmaps = {j: induced(HQ[j], HC[j + 1], push_delta(j)) for j in range(max_degree)}

    kern, _ = amaps[0].kernel()
    r.add("restriction injective in degree 0", kern.is_trivial(), kern.describe())
    for j in range(max_degree):
        r.add(f"exact at H^{j}(K)", *_exact_pair(amaps[j], bmaps[j]))
        r.add(f"exact at H^{j + 1}(C, K)", *_exact_pair(bmaps[j], dmaps[j]))
        r.add(f"exact at H^{j + 1}(C)", *_exact_pair(dmaps[j], amaps[j + 1]))
    for j in range(max_degree + 1):
        r.note(f"H^{j}(C) = {HC[j].group.describe()}, H^{j}(K) = {HK[j].group.describe()}")
    for j in range(max_degree):
        r.note(f"H^{j + 1}(C, K) = {HQ[j].group.describe()}")
    return r


def _exact_pair(f: AbMap, g: AbMap) -> tuple[bool, str | None]:
    comp = g.compose(f)
    if not comp.is_zero_map():
        return False, "composite is not zero"
    kergrp, incl = g.kernel()
    for i in range(kergrp.ngens):
        v = incl.apply(kergrp.generator(i))
        if f.image_contains(v) is None:
            return False, f"kernel element {v} is not in the image"
    return True, None


# ---------------------------------------------------------------------------
# Bar-complex oracle for one-object cyclic categories
# ---------------------------------------------------------------------------

def bar_cohomology(modulus: int, degree: int) -> FgAbGroup:
    """Cohomology of the cyclic group ``Z/m`` with constant ``Z/m``
    coefficients, straight from the full bar complex.

    Written independently of the category machinery so the two can be
    compared: cochains are plain value tables over group tuples.

    >>> bar_cohomology(2, 2).describe()
    'Z/2'
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree > MAX_ABSOLUTE_DEGREE:
        raise DegreeTooHigh(
            f"the bar oracle is implemented for degree <= {MAX_ABSOLUTE_DEGREE}, got {degree}"
        )
    m = modulus

    def level(n):
        count = m ** n
        return FgAbGroup((m,) * count), list(itertools.product(range(m), repeat=n))

    def d_matrix(n):
        src_grp, src_keys = level(n)
        tgt_grp, tgt_keys = level(n + 1)
        index = {k: i for i, k in enumerate(src_keys)}
        M = zeros(len(tgt_keys), len(src_keys))
        for row, t in enumerate(tgt_keys):
            M[row][index[t[1:]]] += 1
            for i in range(1, n + 1):
                merged = t[: i - 1] + ((t[i - 1] + t[i]) % m,) + t[i + 1 :]
                M[row][index[merged]] += (-1) ** i
            M[row][index[t[:-1]]] += (-1) ** (n + 1)
        return AbMap(src_grp, tgt_grp, M)

    d_out = d_matrix(degree)
    if degree == 0:
        d_in = AbMap.zero_map(FgAbGroup.trivial(), d_out.source)
    else:
        d_in = d_matrix(degree - 1)
    return homology_at(d_in, d_out).group


def one_object_cyclic(m: int) -> FinCat:
    """The additive group ``Z/m`` as a one-object category.

    >>> one_object_cyclic(3).morphisms
    (0, 1, 2)
    """
    if m < 1:
        raise ValueError("the cyclic order must be positive")
    return FinCat.from_monoid(
        tuple(range(m)), lambda a, b: (a + b) % m, 0, name=f"Z/{m} (one object)"
    )
