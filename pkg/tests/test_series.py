"""Series engine: arithmetic, expansion, residues, serialization."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexalg.poly import Poly
from vertexalg.series import (
    INF,
    LinearForm,
    LocalizedSeries,
    TruncSeries,
    VarSet,
    coefficient_of_power,
    dumps_series,
    iota_expand,
    loads_series,
    residue,
    series_equal,
    series_exp,
    series_sub_cleared,
    try_divide_by_form,
)

ZW = VarSet(("z", "w"))
Z = VarSet(("z",))


def form(varset, **coeffs):
    f, sign = LinearForm.make(varset, coeffs)
    assert sign == 1
    return f


def poly_of(varset, order, pairs):
    terms = {tuple(e): Fraction(c) for e, c in pairs}
    return LocalizedSeries(TruncSeries(varset, order, terms))


def laurent_dict(x):
    return dict(x.laurent_terms())


class TestAdd:
    def test_additive_inverse_of_pole(self):
        one_over_z = LocalizedSeries.one(Z, 6).with_denominator(form(Z, z=1))
        total = one_over_z + (-one_over_z)
        assert total.num.is_zero()

    def test_common_denominator(self):
        one = LocalizedSeries.one(ZW, 6)
        w_over_z = poly_of(ZW, 6, [((0, 1), 1)]).with_denominator(form(ZW, z=1))
        s = one + w_over_z
        assert s.den == ((form(ZW, z=1), 1),)
        assert s.num.terms == {(1, 0): Fraction(1), (0, 1): Fraction(1)}

    @given(st.integers(0, 2 ** 30 - 1), st.integers(0, 2 ** 30 - 1))
    def test_same_denominator_adds_numerators(self, seed_a, seed_b):
        import random

        den = [(form(ZW, z=1, w=1), 2), (form(ZW, z=1), 1)]
        rng_a, rng_b = random.Random(seed_a), random.Random(seed_b)

        def dense(rng):
            terms = {}
            for i in range(7):
                for j in range(7 - i):
                    c = rng.randint(-5, 5)
                    if c:
                        terms[(i, j)] = Fraction(c)
            return TruncSeries(ZW, 6, terms)

        pa, pb = dense(rng_a), dense(rng_b)
        a = LocalizedSeries(pa, den)
        b = LocalizedSeries(pb, den)
        s = a + b
        assert s.num.terms == (pa + pb).terms


class TestExp:
    def test_exp_zero(self):
        z = TruncSeries.zero(Z, 5)
        assert series_exp(z).terms == {(0,): Fraction(1)}

    def test_formal_group_law(self):
        ez = series_exp(TruncSeries.variable(ZW, "z", 8))
        ew = series_exp(TruncSeries.variable(ZW, "w", 8))
        both = TruncSeries.variable(ZW, "z", 8) + TruncSeries.variable(ZW, "w", 8)
        assert ez * ew == series_exp(both)

    def test_exp_with_polynomial_coefficient(self):
        s1 = Poly.variable("s1")
        zs1 = TruncSeries(ZW, 3, {(1, 0): s1})
        e = series_exp(zs1)
        assert e.terms[(0, 0)] == Fraction(1)
        assert e.terms[(1, 0)] == s1
        assert e.terms[(2, 0)] == s1 * s1 / 2
        assert e.terms[(3, 0)] == s1 * s1 * s1 / 6

    def test_exp_requires_zero_constant(self):
        with pytest.raises(ValueError):
            series_exp(TruncSeries.const(Z, 1, 4))


class TestIota:
    def test_geometric_expansion_of_z_plus_w(self):
        x = LocalizedSeries.one(ZW, 8).with_denominator(form(ZW, z=1, w=1))
        y = iota_expand(x, (("z",), ("w",)), trunc=2)
        assert laurent_dict(y) == {
            (-1, 0): Fraction(1),
            (-2, 1): Fraction(-1),
            (-3, 2): Fraction(1),
        }

    def test_two_expansions_differ_by_mixed_part(self):
        x = LocalizedSeries.one(ZW, 8).with_denominator(form(ZW, z=1, w=-1))
        big_z = iota_expand(x, (("z",), ("w",)), trunc=6)
        big_w = iota_expand(x, (("w",), ("z",)), trunc=6)
        tz = laurent_dict(big_z)
        tw = laurent_dict(big_w)
        diff = dict(tz)
        for e, c in tw.items():
            diff[e] = diff.get(e, Fraction(0)) - c
            if not diff[e]:
                del diff[e]
        assert diff
        for e in diff:
            # the difference is delta-supported: each monomial mixes the two
            # Laurent directions (exactly one negative exponent, total -1)
            assert e[0] + e[1] == -1
            assert (e[0] < 0) != (e[1] < 0)

    def test_deltas_supported_on_antidiagonal(self):
        x = LocalizedSeries.one(ZW, 8).with_denominator(form(ZW, z=1, w=-1))
        big_z = iota_expand(x, (("z",), ("w",)), trunc=6)
        for e, c in big_z.laurent_terms():
            assert e[0] + e[1] == -1
            assert c == Fraction(1)

    def test_pure_pole_unchanged(self):
        x = LocalizedSeries.one(ZW, 8).with_denominator(form(ZW, z=1))
        y = iota_expand(x, (("z", "w"),), trunc=4)
        assert y.den == x.den
        assert y.num.terms == x.num.terms

    def test_single_block_form_kept_inner(self):
        # 1/(w1 - w2) is invertible in the inner ring and must be kept
        vs = VarSet(("z", "w1", "w2"))
        x = LocalizedSeries.one(vs, 6).with_denominator(form(vs, w1=1, w2=-1))
        y = iota_expand(x, (("z",), ("w1", "w2")), trunc=3)
        assert y.den == ((form(vs, w1=1, w2=-1), 1),)

    def test_iota_respects_products(self):
        # expansion is a ring map: iota(xy) = iota(x) iota(y) on the exact region
        x = poly_of(ZW, 8, [((1, 0), 1), ((0, 1), 2)]).with_denominator(
            form(ZW, z=1, w=1)
        )
        y = poly_of(ZW, 8, [((0, 0), 3), ((1, 1), 1)]).with_denominator(
            form(ZW, z=1, w=-1)
        )
        blocks = (("z",), ("w",))
        lhs = iota_expand(x * y, blocks, trunc=3)
        rhs = iota_expand(x, blocks, trunc=3) * iota_expand(y, blocks, trunc=3)
        assert series_equal(lhs, rhs)

    def test_iota_respects_sums(self):
        x = poly_of(ZW, 8, [((1, 0), 1)]).with_denominator(form(ZW, z=1, w=1))
        y = poly_of(ZW, 8, [((0, 1), 5)]).with_denominator(form(ZW, z=1, w=1))
        blocks = (("z",), ("w",))
        lhs = iota_expand(x + y, blocks, trunc=4)
        rhs = iota_expand(x, blocks, trunc=4) + iota_expand(y, blocks, trunc=4)
        assert series_equal(lhs, rhs)

    def test_round_trip_without_denominator(self):
        x = poly_of(ZW, 5, [((2, 1), Fraction(7, 3)), ((0, 0), -2)])
        y = iota_expand(x, (("z",), ("w",)), trunc=5)
        assert y.num.terms == x.num.terms
        assert y.den == ()


class TestResidue:
    def test_simple_pole(self):
        x = LocalizedSeries.one(Z, 6).with_denominator(form(Z, z=1))
        r = residue(x, "z", 0)
        assert r.num.constant_term() == Fraction(1)

    def test_regular_terms_have_no_residue(self):
        for n in range(4):
            x = poly_of(Z, 6, [((n,), 1)])
            assert residue(x, "z", 0).num.is_zero()

    def test_cauchy_formula_at_shifted_center(self):
        # res_{z=w} f(z)/(z-w) = f(w) for polynomial f of degree <= 5
        coeffs = [3, -1, 2, 0, 5, Fraction(1, 2)]
        terms = {(i, 0): Fraction(c) for i, c in enumerate(coeffs) if c}
        x = LocalizedSeries(TruncSeries(ZW, 8, terms)).with_denominator(
            form(ZW, z=1, w=-1)
        )
        r = residue(x, "z", "w")
        expected = {(i,): Fraction(c) for i, c in enumerate(coeffs) if c}
        assert r.num.terms == expected

    def test_negative_center(self):
        # res_{z=-w} 1/(z+w) = 1
        x = LocalizedSeries.one(ZW, 6).with_denominator(form(ZW, z=1, w=1))
        r = residue(x, "z", "-w")
        assert r.num.constant_term() == Fraction(1)

    def test_double_pole_picks_derivative(self):
        # res_{z=w} f(z)/(z-w)^2 = f'(w)
        terms = {(3, 0): Fraction(1)}  # f = z^3
        x = LocalizedSeries(TruncSeries(ZW, 8, terms)).with_denominator(
            form(ZW, z=1, w=-1), mult=2
        )
        r = residue(x, "z", "w")
        assert r.num.terms == {(2,): Fraction(3)}

    def test_residue_theorem_shape(self):
        # dens among {z, z-w, z+w}: global residue = sum of local residues
        num = TruncSeries(
            ZW, 8, {(0, 0): 1, (1, 0): 2, (2, 1): Fraction(1, 3), (0, 2): -1}
        )
        x = LocalizedSeries(num)
        x = x.with_denominator(form(ZW, z=1))
        x = x.with_denominator(form(ZW, z=1, w=-1))
        x = x.with_denominator(form(ZW, z=1, w=1))
        expanded = iota_expand(x, (("z",), ("w",)), trunc=6)
        global_res = coefficient_of_power(expanded, "z", -1)
        local = (
            residue(x, "z", 0, trunc=6)
            + residue(x, "z", "w", trunc=6)
            + residue(x, "z", "-w", trunc=6)
        )
        assert series_equal(global_res, local)

    def test_unknown_center_rejected(self):
        x = LocalizedSeries.one(ZW, 4).with_denominator(form(ZW, z=1))
        with pytest.raises(ValueError):
            residue(x, "z", "q")


class TestDivision:
    def test_difference_of_squares(self):
        num = TruncSeries(ZW, INF, {(2, 0): 1, (0, 2): -1})
        q = try_divide_by_form(num, form(ZW, z=1, w=-1))
        assert q is not None and q.terms == {(1, 0): Fraction(1), (0, 1): Fraction(1)}

    def test_indivisible_returns_none(self):
        num = TruncSeries(ZW, INF, {(1, 0): 1, (0, 0): 1})
        assert try_divide_by_form(num, form(ZW, z=1, w=-1)) is None

    def test_cancel(self):
        num = TruncSeries(ZW, INF, {(2, 0): 1, (0, 2): -1})
        x = LocalizedSeries(num, [(form(ZW, z=1, w=-1), 1), (form(ZW, z=1), 1)])
        c = x.cancel()
        assert c.den == ((form(ZW, z=1), 1),)
        assert c.num.terms == {(1, 0): Fraction(1), (0, 1): Fraction(1)}


class TestEquality:
    def test_cross_multiplied_equality(self):
        # (z^2 - w^2)/(z - w) == z + w
        a = LocalizedSeries(
            TruncSeries(ZW, 8, {(2, 0): 1, (0, 2): -1})
        ).with_denominator(form(ZW, z=1, w=-1))
        b = LocalizedSeries(TruncSeries(ZW, 7, {(1, 0): 1, (0, 1): 1}))
        assert series_equal(a, b)

    def test_inequality(self):
        a = LocalizedSeries.one(ZW, 6)
        b = LocalizedSeries(TruncSeries(ZW, 6, {(1, 0): 1}))
        assert not series_equal(a, b)

    def test_blocks_must_match(self):
        a = iota_expand(
            LocalizedSeries.one(ZW, 6).with_denominator(form(ZW, z=1, w=1)),
            (("z",), ("w",)),
            3,
        )
        b = LocalizedSeries.one(ZW, 6)
        with pytest.raises(ValueError):
            series_sub_cleared(a, b)


class TestSubstitution:
    def test_linear_substitution_on_denominator(self):
        # 1/(z - w) with z -> u + v, w -> v gives 1/u
        uv = VarSet(("u", "v"))
        x = LocalizedSeries.one(ZW, 6).with_denominator(form(ZW, z=1, w=-1))
        y = x.substitute_linear(uv, {"z": {"u": 1, "v": 1}, "w": {"v": 1}})
        assert y.den == ((form(uv, u=1), 1),)

    def test_sign_normalization(self):
        # 1/z with z -> -u gives -1/u
        u = VarSet(("u",))
        x = LocalizedSeries.one(Z, 6).with_denominator(form(Z, z=1))
        y = x.substitute_linear(u, {"z": {"u": -1}})
        assert y.den == ((form(u, u=1), 1),)
        assert y.num.constant_term() == Fraction(-1)

    def test_collapsing_form_rejected(self):
        u = VarSet(("u",))
        x = LocalizedSeries.one(ZW, 6).with_denominator(form(ZW, z=1, w=-1))
        with pytest.raises(ValueError):
            x.substitute_linear(u, {"z": {"u": 1}, "w": {"u": 1}})


class TestJSON:
    def test_round_trip_bits(self):
        x = LocalizedSeries(
            TruncSeries(ZW, 5, {(1, 0): Fraction(-7, 3), (0, 2): 4}),
            [(form(ZW, z=1, w=1), 2)],
        )
        blob = dumps_series(x)
        again = dumps_series(loads_series(blob))
        assert blob == again

    def test_terms_sorted_lexicographically(self):
        x = LocalizedSeries(
            TruncSeries(ZW, 5, {(2, 0): 1, (0, 1): 1, (1, 1): 1})
        )
        d = json.loads(dumps_series(x))
        exps = [tuple(t["exp"]) for t in d["terms"]]
        assert exps == sorted(exps)

    def test_expanded_series_round_trips(self):
        x = LocalizedSeries.one(ZW, 6).with_denominator(form(ZW, z=1, w=1))
        y = iota_expand(x, (("z",), ("w",)), trunc=3)
        blob = dumps_series(y)
        z = loads_series(blob)
        assert dumps_series(z) == blob
        assert z.blocks == y.blocks
        assert z.block_bounds == y.block_bounds


@settings(max_examples=60, deadline=None)
@given(
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)),
        st.fractions(min_value=-5, max_value=5),
        max_size=6,
    ),
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)),
        st.fractions(min_value=-5, max_value=5),
        max_size=6,
    ),
)
def prop_mul_commutes(ta, tb):
    a = TruncSeries(ZW, 6, ta)
    b = TruncSeries(ZW, 6, tb)
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-4, 4)),
        max_size=5,
    )
)
def prop_iota_additive(raw):
    terms = {}
    for i, j, c in raw:
        terms[(i, j)] = terms.get((i, j), 0) + c
    x = LocalizedSeries(TruncSeries(ZW, 8, terms)).with_denominator(
        form(ZW, z=1, w=1)
    )
    blocks = (("z",), ("w",))
    double = iota_expand(x + x, blocks, 4)
    twice = iota_expand(x, blocks, 4) + iota_expand(x, blocks, 4)
    assert series_equal(double, twice)


def test_prop_mul_commutes():
    prop_mul_commutes()


def test_prop_iota_additive():
    prop_iota_additive()
