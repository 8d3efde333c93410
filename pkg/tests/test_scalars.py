import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgalilei.errors import (
    DegenerateInstantiation,
    DivisionByZero,
    ModeMismatch,
    NotAPerfectSquare,
)
from qgalilei.scalars import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussRat,
    MRat,
    MultivariateContext,
    QuadExt,
    TPoly,
    scale_instantiate,
    sqrt_scalar,
)

fractions = st.fractions(min_value=-40, max_value=40, max_denominator=9)
gauss = st.builds(GaussRat, fractions, fractions)


def random_gauss(rng):
    return GaussRat(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                    Fraction(rng.randint(-9, 9), rng.randint(1, 5)))


class TestGaussRat:
    def test_modulus_product(self):
        assert GaussRat(1, 1) * GaussRat(1, -1) == GaussRat(2)

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            GR_ONE / GR_ZERO

    def test_field_axioms_1000_random_triples(self):
        rng = random.Random(1234)
        for _ in range(1000):
            a, b, c = (random_gauss(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert a.conj().conj() == a
            assert (a - a).is_zero()

    @given(gauss, gauss)
    def test_conj_multiplicative(self, a, b):
        assert (a * b).conj() == a.conj() * b.conj()

    def test_render(self):
        assert GaussRat(Fraction(3, 4)).render() == "3/4"
        assert GR_I.render() == "i"
        assert GaussRat(0, -1).render() == "-i"
        assert GaussRat(Fraction(1, 2), 3).render() == "1/2+3*i"


class TestMultivariate:
    def setup_method(self):
        self.ctx = MultivariateContext(("l1", "l2"))
        self.l1 = self.ctx.param("l1")
        self.l2 = self.ctx.param("l2")

    def test_monomial_cancellation(self):
        assert self.l1 / (self.l2 * self.l2) * self.l2 == self.l1 / self.l2

    def test_gcd_reduction(self):
        r = (self.l1 * self.l1 - self.l2 * self.l2) / (self.l1 - self.l2)
        assert r == self.l1 + self.l2

    def test_is_zero_of_difference(self):
        r = (self.l1 + self.l2) / (self.l1 * self.l2)
        assert (r - r).is_zero()

    def test_mode_mismatch(self):
        sc = scale_instantiate(("l1",), {"l1": 2}, 3)
        with pytest.raises(ModeMismatch):
            self.l1 + sc.param("l1")

    def test_field_axioms_random(self):
        rng = random.Random(7)
        vals = [self.l1, self.l2, self.l1 + self.l2, self.l1 / self.l2,
                self.l1 * self.l2 - GR_ONE]
        for _ in range(200):
            a, b, c = (rng.choice(vals) * random_gauss(rng) for _ in range(3))
            assert ((a + b) + c - (a + (b + c))).is_zero()
            assert (a * (b + c) - (a * b + a * c)).is_zero()
            assert (a.conj().conj() - a).is_zero()

    def test_render(self):
        v = self.l1 * self.l1 * GaussRat(Fraction(-1, 6))
        assert v.render(("l1", "l2")) == "-1/6*l1^2"


class TestScaled:
    def test_substitution(self):
        sc = scale_instantiate(("l1", "l2"), {"l1": 2, "l2": 3}, 3)
        assert sc.param("l1") * sc.param("l2") == TPoly({2: GaussRat(6)})

    def test_truncation(self):
        sc = scale_instantiate(("l",), {"l": 1}, 2)
        x = sc.param("l")
        cube = x * x * x
        assert cube.is_zero() and cube.order == 2

    def test_zero_assignment_rejected(self):
        with pytest.raises(DegenerateInstantiation):
            scale_instantiate(("l",), {"l": 0}, 3)

    def test_instantiation_commutes_with_arithmetic(self):
        ctx = MultivariateContext(("l1", "l2"))
        sc = scale_instantiate(("l1", "l2"), {"l1": Fraction(2, 3), "l2": -5}, 4)
        rng = random.Random(99)
        l1, l2 = ctx.param("l1"), ctx.param("l2")
        pool = [l1, l2, l1 * l2 + GR_ONE, l1 * l1 - l2]
        for _ in range(100):
            p = rng.choice(pool) * random_gauss(rng)
            q = rng.choice(pool) * random_gauss(rng)
            lhs = sc.convert(p * q).truncate(4)
            rhs = (sc.convert(p) * sc.convert(q)).truncate(4)
            assert (lhs - rhs).is_zero()

    def test_laurent_inverse_precision(self):
        x = TPoly({1: GaussRat(2), 2: GR_ONE}, 5)
        inv = x.inverse()
        assert inv.order == 3
        assert (x * inv - GR_ONE).is_zero()

    def test_rational_function_conversion(self):
        ctx = MultivariateContext(("l1", "l2"))
        sc = scale_instantiate(("l1", "l2"), {"l1": 2, "l2": 3}, 4)
        v = sc.convert(ctx.param("l1") / ctx.param("l2"))
        assert v.coeff(0) == GaussRat(Fraction(2, 3))

    def test_denominator_vanishes(self):
        ctx = MultivariateContext(("l1", "l2"))
        two_l1_minus_l2 = ctx.param("l1") * GaussRat(2) - ctx.param("l2")
        sc = scale_instantiate(("l1", "l2"), {"l1": 1, "l2": 2}, 4)
        with pytest.raises(DegenerateInstantiation):
            sc.convert(GR_ONE / two_l1_minus_l2)

    def test_render(self):
        v = TPoly({3: GaussRat(2, 1)}, 5)
        assert v.render() == "(2+i)*t^3"


class TestSqrt:
    def test_perfect_squares(self):
        assert sqrt_scalar(TPoly({2: GR_ONE}, 4)) == TPoly({1: GR_ONE})
        got = sqrt_scalar(TPoly({2: GaussRat(Fraction(25, 4))}, 4))
        assert got == TPoly({1: GaussRat(Fraction(5, 2))})

    def test_not_a_square(self):
        with pytest.raises(NotAPerfectSquare):
            sqrt_scalar(TPoly({2: GaussRat(2)}, 4))

    def test_quadext_square(self):
        q = sqrt_scalar(TPoly({2: GaussRat(2)}, 4), allow_quadext=True)
        assert isinstance(q, QuadExt)
        assert q * q == TPoly({2: GaussRat(2)}, 4)

    def test_case15_default_family(self):
        # assignment (1, 3, 2): radicand (9 - 8) t^2 is the square of t
        sc = scale_instantiate(("l1", "l2", "l3"), {"l1": 1, "l2": 3, "l3": 2}, 4)
        ctx = MultivariateContext(("l1", "l2", "l3"))
        l1, l2, l3 = (ctx.param(s) for s in ("l1", "l2", "l3"))
        rad = sc.convert(l2 * l2 - GaussRat(4) * l1 * l3)
        assert sqrt_scalar(rad) == TPoly({1: GR_ONE})

    def test_multivariate_quadext_field_ops(self):
        ctx = MultivariateContext(("l1", "l2", "l3"))
        l1, l2, l3 = (ctx.param(s) for s in ("l1", "l2", "l3"))
        rad = l2 * l2 - GaussRat(4) * l1 * l3
        s = sqrt_scalar(rad, allow_quadext=True)
        assert (s * s - rad).is_zero()
        x = s + l2
        y = x * x - GaussRat(2) * l2 * s
        # (s + l2)^2 - 2 l2 s = rad + l2^2
        assert (y - (rad + l2 * l2)).is_zero()
        inv = GR_ONE / x
        assert ((x * inv) - GR_ONE).is_zero()
        assert (s.conj() - s).is_zero()
