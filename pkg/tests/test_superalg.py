"""Kernel tests: Koszul signs, left derivatives, substitution, filtration."""

from fractions import Fraction

import pytest

from mfc.superalg import (
    EVEN,
    ODD,
    Chart,
    ChartMismatch,
    ParityError,
    SuperSeries,
    Variable,
    deriv,
    embed,
    mul,
    partial,
    set_to_zero,
    shift_down,
    substitute,
    truncate,
)
from mfc.testkit import Generator

ORDER = 6


def make_chart():
    return Chart("M", [Variable("x", EVEN), Variable("y", EVEN),
                       Variable("th", ODD), Variable("et", ODD)])


def var(chart, name):
    return SuperSeries.of_var(chart, name, ORDER)


class TestMul:
    def test_odd_pair_sign(self):
        c = make_chart()
        th, et = var(c, "th"), var(c, "et")
        assert mul(th, et) == SuperSeries.monomial(c, {"th": 1, "et": 1}, 1, ORDER)
        assert mul(et, th) == SuperSeries.monomial(c, {"th": 1, "et": 1}, -1, ORDER)

    def test_odd_square_vanishes(self):
        c = make_chart()
        assert mul(var(c, "th"), var(c, "th")).is_zero()

    def test_even_commutes(self):
        c = make_chart()
        x, y = var(c, "x"), var(c, "y")
        assert mul(x, y) == mul(y, x)

    def test_chart_mismatch(self):
        c = make_chart()
        other = Chart("N", [Variable("z", EVEN)])
        with pytest.raises(ChartMismatch):
            mul(var(c, "x"), SuperSeries.of_var(other, "z", ORDER))

    def test_supercommutativity_random(self):
        gen = Generator(5)
        chart = gen.chart(2, 2)
        for _ in range(40):
            pa = gen.rng.choice([EVEN, ODD])
            pb = gen.rng.choice([EVEN, ODD])
            a = gen.series(chart, ORDER, parity=pa, n_terms=3, max_degree=4)
            b = gen.series(chart, ORDER, parity=pb, n_terms=3, max_degree=4)
            sign = -1 if (pa and pb) else 1
            assert mul(a, b) == mul(b, a).scale(sign)


class TestPartial:
    def test_left_derivative_odd(self):
        c = make_chart()
        thet = mul(var(c, "th"), var(c, "et"))
        assert partial(thet, "th") == var(c, "et")
        assert partial(thet, "et") == -var(c, "th")

    def test_even_power(self):
        c = make_chart()
        a = mul(var(c, "x") ** 2, var(c, "y"))
        assert partial(a, "x") == mul(var(c, "x"), var(c, "y")).scale(2)

    def test_graded_leibniz_random(self):
        gen = Generator(6)
        chart = gen.chart(2, 2)
        for _ in range(30):
            pa = gen.rng.choice([EVEN, ODD])
            a = gen.series(chart, ORDER, parity=pa, n_terms=3, max_degree=3)
            b = gen.series(chart, ORDER, n_terms=3, max_degree=3)
            v = gen.rng.choice(chart.variables)
            lhs = partial(mul(a, b), v.name)
            sign = -1 if (v.parity and pa) else 1
            rhs = mul(partial(a, v.name), b) + mul(a, partial(b, v.name)).scale(sign)
            assert lhs == rhs

    def test_second_derivatives_graded_symmetric(self):
        gen = Generator(7)
        chart = gen.chart(2, 2)
        for _ in range(30):
            a = gen.series(chart, ORDER, n_terms=4, max_degree=4)
            u = gen.rng.choice(chart.variables)
            v = gen.rng.choice(chart.variables)
            sign = -1 if (u.parity and v.parity) else 1
            assert partial(partial(a, u.name), v.name) == \
                partial(partial(a, v.name), u.name).scale(sign)


class TestSubstitute:
    def test_polynomial_shift(self):
        c = Chart("M", [Variable("x", EVEN), Variable("q", EVEN, weight=1)])
        x = SuperSeries.of_var(c, "x", ORDER)
        q = SuperSeries.of_var(c, "q", ORDER)
        out = substitute(x ** 2, {"x": x + q}, chart=c, order=ORDER)
        assert out == x ** 2 + mul(x, q).scale(2) + q ** 2

    def test_identity(self):
        c = make_chart()
        assert substitute(var(c, "th"), {}, chart=c, order=ORDER) == var(c, "th")

    def test_odd_swap_sign(self):
        c = make_chart()
        th, et = var(c, "th"), var(c, "et")
        out = substitute(mul(th, et), {"th": et, "et": th}, chart=c, order=ORDER)
        assert out == -mul(th, et)

    def test_parity_mismatch_rejected(self):
        c = make_chart()
        with pytest.raises(ParityError):
            substitute(var(c, "th"), {"th": var(c, "x")}, chart=c, order=ORDER)

    def test_homomorphism_random(self):
        gen = Generator(8)
        chart = gen.chart(2, 2)
        for _ in range(15):
            images = {v.name: gen.series(chart, ORDER, parity=v.parity,
                                         n_terms=2, max_degree=2)
                      for v in chart}
            a = gen.series(chart, ORDER, n_terms=3, max_degree=2)
            b = gen.series(chart, ORDER, n_terms=3, max_degree=2)
            sub = lambda s: substitute(s, images, chart=chart, order=ORDER)
            assert sub(mul(a, b)) == mul(sub(a), sub(b))
            assert sub(a + b) == sub(a) + sub(b)


class TestFiltration:
    def chart(self):
        return Chart("M", [Variable("x", EVEN),
                           Variable("q", EVEN, weight=1)])

    def test_truncate_drops_high_weight(self):
        c = self.chart()
        q = SuperSeries.of_var(c, "q", ORDER)
        assert truncate(q + q ** 2, 1) == truncate(q, 1)

    def test_truncate_keeps_base(self):
        c = self.chart()
        x = SuperSeries.of_var(c, "x", ORDER)
        xq = mul(x, SuperSeries.of_var(c, "q", ORDER))
        assert truncate(x + xq, 0) == truncate(x, 0)

    def test_truncate_full_order_is_identity(self):
        c = self.chart()
        a = SuperSeries.of_var(c, "x", ORDER) + SuperSeries.of_var(c, "q", ORDER) ** 2
        assert truncate(a, ORDER) == a

    def test_truncation_compatible_with_mul(self):
        gen = Generator(9)
        base = gen.chart(1, 1)
        c = Chart("W", tuple(base.variables) + (Variable("q", EVEN, weight=1),))
        for _ in range(20):
            a = gen.series(c, ORDER, n_terms=4, max_degree=4)
            b = gen.series(c, ORDER, n_terms=4, max_degree=4)
            n = gen.rng.randint(0, 4)
            assert truncate(mul(a, b), n) == \
                truncate(mul(truncate(a, n), truncate(b, n)), n)

    def test_nilpotent_cap(self):
        t = Variable("t", EVEN, weight=0, max_power=1)
        c = Chart("M", [t, Variable("x", EVEN)])
        ts = SuperSeries.of_var(c, "t", ORDER)
        assert mul(ts, ts).is_zero()


class TestHelpers:
    def test_set_to_zero(self):
        c = make_chart()
        a = var(c, "x") + mul(var(c, "x"), var(c, "th"))
        assert set_to_zero(a, ["th"]) == var(c, "x")

    def test_shift_down_exact_division(self):
        c = Chart("M", [Variable("eps", EVEN, weight=1), Variable("x", EVEN)])
        eps = SuperSeries.of_var(c, "eps", ORDER)
        x = SuperSeries.of_var(c, "x", ORDER)
        assert shift_down(mul(eps, x ** 2), "eps") == x ** 2

    def test_deriv_is_graded_derivation(self):
        """An odd derivation built from images satisfies the sign rule."""
        c = make_chart()
        images = {"x": var(c, "th"), "th": var(c, "x")}
        a = var(c, "x") ** 2
        b = mul(var(c, "th"), var(c, "et"))
        lhs = deriv(mul(a, b), images, ODD)
        rhs = mul(deriv(a, images, ODD), b) + mul(a, deriv(b, images, ODD))
        assert lhs == rhs

    def test_embed_preserves_terms(self):
        c = make_chart()
        bigger = Chart("M2", tuple(c.variables) + (Variable("z", EVEN),))
        a = mul(var(c, "th"), var(c, "et")) + var(c, "x")
        moved = embed(a, bigger, ORDER)
        assert set(moved.variables_used()) == {"th", "et", "x"}
