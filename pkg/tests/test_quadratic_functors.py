"""Tests for the quadratic functor tables against the element-level oracle."""
from __future__ import annotations

import pytest

from quadalg.abelian import (
    FgAbGroup,
    ORACLE_KINDS,
    QUADRATIC_KINDS,
    quadratic_functor,
    quadratic_on_decomposition,
    quadratic_oracle,
    short_exact_checks,
    tensor_sequence,
    whitehead_sequence,
)
from quadalg.errors import TooLarge


def small_groups(max_order: int) -> list[FgAbGroup]:
    groups = []
    for order in range(1, max_order + 1):
        seen = set()
        for parts in _factor_tuples(order):
            g = FgAbGroup.from_factors(list(parts))
            if g.invariant_factors not in seen:
                seen.add(g.invariant_factors)
                groups.append(g)
    return groups


def _factor_tuples(n: int, lo: int = 2):
    if n == 1:
        yield ()
        return
    for d in range(lo, n + 1):
        if n % d == 0:
            for rest in _factor_tuples(n // d, d):
                yield (d,) + rest


class TestTables:
    def test_known_values(self):
        Z = FgAbGroup.free(1)
        Z2 = FgAbGroup((2,))
        Z3 = FgAbGroup((3,))
        Z4 = FgAbGroup((4,))
        assert quadratic_functor("lambda2", Z).is_trivial()
        assert quadratic_functor("lambda2", Z2).is_trivial()
        assert quadratic_functor("sym2", Z) == Z
        assert quadratic_functor("sym2", Z4) == Z4
        assert quadratic_functor("gamma", Z) == Z
        assert quadratic_functor("gamma", Z2).invariant_factors == (4,)
        assert quadratic_functor("gamma", Z3).invariant_factors == (3,)
        assert quadratic_functor("gamma", Z4).invariant_factors == (8,)
        assert quadratic_functor("omega", Z).is_trivial()
        assert quadratic_functor("omega", Z4) == Z4
        assert quadratic_functor("whiteheadP", Z).invariant_factors == (0, 0)
        assert quadratic_functor("whiteheadP", Z2).invariant_factors == (4,)
        assert quadratic_functor("whiteheadP", Z3).invariant_factors == (3, 3)
        assert quadratic_functor("whiteheadP", Z4).invariant_factors == (2, 8)

    def test_rank_two_samples(self):
        g = FgAbGroup((2, 4))
        assert quadratic_functor("lambda2", g).invariant_factors == (2,)
        assert quadratic_functor("sym2", g).invariant_factors == (2, 2, 4)
        assert quadratic_functor("gamma", g).invariant_factors == (2, 4, 8)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            quadratic_functor("cube", FgAbGroup((2,)))


class TestOracleAgreement:
    @pytest.mark.parametrize("kind", ORACLE_KINDS)
    def test_spot_groups(self, kind):
        for factors in [(), (2,), (3,), (4,), (2, 2), (2, 4), (6,), (3, 3)]:
            g = FgAbGroup.from_factors(list(factors))
            assert quadratic_functor(kind, g) == quadratic_oracle(kind, g), (
                kind,
                factors,
            )

    def test_oracle_guards_size(self):
        with pytest.raises(TooLarge):
            quadratic_oracle("gamma", FgAbGroup((128,)), bound=64)
        with pytest.raises(TooLarge):
            quadratic_oracle("gamma", FgAbGroup.free(1))


class TestExactSequences:
    @pytest.mark.parametrize("factors", [(2,), (3,), (4,), (2, 2), (2, 4), (8,)])
    def test_whitehead_sequence(self, factors):
        g = FgAbGroup.from_factors(list(factors))
        f, q = whitehead_sequence(g)
        for name, ok, witness in short_exact_checks(f, q):
            assert ok, (factors, name, witness)

    @pytest.mark.parametrize("factors", [(2,), (3,), (4,), (2, 2), (2, 4), (8,)])
    def test_tensor_sequence(self, factors):
        g = FgAbGroup.from_factors(list(factors))
        f, q = tensor_sequence(g)
        for name, ok, witness in short_exact_checks(f, q):
            assert ok, (factors, name, witness)

    def test_order_accounting(self):
        for g in small_groups(12):
            p = quadratic_functor("whiteheadP", g).order()
            s = quadratic_functor("sym2", g).order()
            assert p == g.order() * s, g.invariant_factors


class TestOmegaInvariance:
    def test_decomposition_independence(self):
        # every multiset of cyclic factors presenting the same group gives
        # the same value, exercised over all orders up to 12 (for example
        # [6] against [2, 3], which present isomorphic groups)
        for order in range(1, 13):
            by_group: dict[tuple[int, ...], set[FgAbGroup]] = {}
            for parts in _factor_tuples(order):
                key = FgAbGroup.from_factors(list(parts)).invariant_factors
                by_group.setdefault(key, set()).add(
                    quadratic_on_decomposition("omega", list(parts))
                )
            for key, values in by_group.items():
                assert len(values) == 1, (order, key)

    def test_matches_invariant_form(self):
        for g in small_groups(12):
            direct = quadratic_on_decomposition("omega", list(g.invariant_factors))
            assert quadratic_functor("omega", g) == direct


class TestKindList:
    def test_registry(self):
        assert set(ORACLE_KINDS) <= set(QUADRATIC_KINDS)
        assert "omega" in QUADRATIC_KINDS and "omega" not in ORACLE_KINDS
