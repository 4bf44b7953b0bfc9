"""Bundle charts, exterior operators, Liouville forms and the six
identification theorems."""

import pytest

from mfc.superalg import (
    EVEN,
    ODD,
    Chart,
    SuperSeries,
    Variable,
    embed,
    mul,
    substitute,
    truncate_base_degree,
)
from mfc.superforms import (
    IDENTIFICATION_CASES,
    PIT,
    PITSTAR,
    StructureError,
    T,
    TSTAR,
    apply_operator,
    de_rham,
    extend_chart,
    extend_d,
    liouville,
    poisson_bracket,
    prolong_coordinate_change,
    verify_identification,
)
from mfc.testkit import Generator

ORDER = 6


def base_chart(n_even=1, n_odd=1):
    evens = [Variable(f"x{i}", EVEN) for i in range(n_even)]
    odds = [Variable(f"xi{i}", ODD) for i in range(n_odd)]
    return Chart("M", evens + odds)


class TestExtensions:
    def test_cotangent_parities(self):
        c = extend_chart(Chart("M", [Variable("x", EVEN)]), TSTAR)
        assert c.var("q_x").parity == EVEN

    def test_anticotangent_flips(self):
        c = extend_chart(Chart("M", [Variable("x", EVEN)]), PITSTAR)
        assert c.var("ys_x").parity == ODD

    def test_iterated_t_after_pitstar(self):
        c = extend_chart(extend_chart(Chart("M", [Variable("x", EVEN)]), PITSTAR), T)
        assert [v.parity for v in c] == [EVEN, ODD, EVEN, ODD]
        assert [v.name for v in c] == ["x", "ys_x", "dot_x", "dot_ys_x"]

    def test_depth_cap(self):
        c = extend_chart(extend_chart(base_chart(), T), PIT)
        with pytest.raises(StructureError):
            extend_chart(c, T)


class TestOperators:
    def chart(self):
        return extend_d(extend_chart(base_chart(2, 2), PIT))

    def test_par_leibniz_example(self):
        c = self.chart()
        x, xi = SuperSeries.of_var(c, "x0", ORDER), SuperSeries.of_var(c, "xi0", ORDER)
        out = apply_operator(mul(x, xi), "par")
        expect = mul(SuperSeries.of_var(c, "par_x0", ORDER), xi) \
            + mul(x, SuperSeries.of_var(c, "par_xi0", ORDER))
        assert out == expect

    def test_squares_vanish(self):
        gen = Generator(3)
        c = self.chart()
        for _ in range(15):
            a = gen.series(c, ORDER, n_terms=4, max_degree=3)
            assert apply_operator(apply_operator(a, "d"), "d").is_zero()
            assert apply_operator(apply_operator(a, "par"), "par").is_zero()

    def test_d_par_anticommute(self):
        gen = Generator(4)
        c = self.chart()
        for _ in range(15):
            a = gen.series(c, ORDER, n_terms=4, max_degree=3)
            dp = apply_operator(apply_operator(a, "par"), "d")
            pd = apply_operator(apply_operator(a, "d"), "par")
            assert dp == -pd

    def test_de_rham_requires_level(self):
        c = base_chart()
        a = SuperSeries.of_var(c, "x0", ORDER)
        with pytest.raises(StructureError):
            de_rham(a, "par")


class TestPoisson:
    def chart(self):
        return extend_chart(base_chart(2, 1), TSTAR)

    def test_darboux(self):
        c = self.chart()
        x = SuperSeries.of_var(c, "x0", ORDER)
        p = SuperSeries.of_var(c, "q_x0", ORDER)
        assert poisson_bracket(x, p) == SuperSeries.const(c, 1, ORDER)
        assert poisson_bracket(x, x).is_zero()

    def test_de_rham_hamiltonian_squares_to_zero(self):
        c = extend_chart(extend_chart(base_chart(2, 1), PIT), TSTAR)
        h = SuperSeries.zero(c, ORDER)
        for v in base_chart(2, 1):
            h = h + mul(SuperSeries.of_var(c, "par_" + v.name, ORDER),
                        SuperSeries.of_var(c, "q_" + v.name, ORDER))
        assert poisson_bracket(h, h).is_zero()

    def test_graded_antisymmetry(self):
        gen = Generator(10)
        c = self.chart()
        for _ in range(20):
            pa = gen.rng.choice([EVEN, ODD])
            pb = gen.rng.choice([EVEN, ODD])
            a = gen.series(c, ORDER, parity=pa, n_terms=3, max_degree=3)
            b = gen.series(c, ORDER, parity=pb, n_terms=3, max_degree=3)
            sign = -1 if (pa and pb) else 1
            assert poisson_bracket(a, b) == poisson_bracket(b, a).scale(-sign)

    def test_jacobi(self):
        gen = Generator(11)
        c = self.chart()
        for _ in range(8):
            ps = [gen.rng.choice([EVEN, ODD]) for _ in range(3)]
            a, b, d = [gen.series(c, ORDER, parity=p, n_terms=2, max_degree=2)
                       for p in ps]
            pb = poisson_bracket
            lhs = pb(a, pb(b, d))
            mid = pb(pb(a, b), d)
            sign = -1 if (ps[0] and ps[1]) else 1
            rhs = mid + pb(b, pb(a, d)).scale(sign)
            assert lhs == rhs

    def test_odd_bracket_darboux(self):
        c = extend_chart(base_chart(1, 1), PITSTAR)
        x = SuperSeries.of_var(c, "x0", ORDER)
        xs = SuperSeries.of_var(c, "ys_x0", ORDER)
        assert poisson_bracket(x, xs, "odd") == SuperSeries.const(c, 1, ORDER)


class TestIdentifications:
    @pytest.mark.parametrize("case", sorted(IDENTIFICATION_CASES))
    @pytest.mark.parametrize("shape", [(1, 0), (1, 1), (2, 1), (2, 2)])
    def test_case_passes(self, case, shape):
        chart = base_chart(*shape)
        report = verify_identification(case, chart, order=4)
        assert report.passed, report.render()

    def test_mx_with_mixed_fiber(self):
        chart = base_chart(1, 1)
        fiber = [Variable("u0", ODD), Variable("u1", EVEN)]
        assert verify_identification("MX", chart, fiber=fiber, order=4).passed
        assert verify_identification("oddMX", chart, fiber=fiber, order=4).passed

    def test_unknown_case_rejected(self):
        with pytest.raises(ValueError):
            verify_identification("bogus", base_chart())


class TestProlongation:
    def test_velocity_scales(self):
        c = Chart("M", [Variable("x", EVEN)])
        f = {"x": SuperSeries.of_var(c, "x", 4).scale(2)}
        chart, sigma = prolong_coordinate_change(f, c, [T], 4)
        assert sigma["dot_x"] == SuperSeries.of_var(chart, "dot_x", sigma["dot_x"].order).scale(2)

    def test_momentum_inverse_jacobian(self):
        c = Chart("M", [Variable("x", EVEN)])
        f = {"x": SuperSeries.of_var(c, "x", 4).scale(2)}
        chart, sigma = prolong_coordinate_change(f, c, [TSTAR], 4)
        from fractions import Fraction
        assert sigma["q_x"] == SuperSeries.of_var(chart, "q_x", sigma["q_x"].order).scale(Fraction(1, 2))

    def test_nonlinear_momentum_law(self):
        c = Chart("M", [Variable("x", EVEN)])
        x = SuperSeries.of_var(c, "x", 4)
        f = {"x": x + x ** 2}
        chart, sigma = prolong_coordinate_change(f, c, [TSTAR], 2)
        xs = SuperSeries.of_var(chart, "x", sigma["q_x"].order)
        p = SuperSeries.of_var(chart, "q_x", sigma["q_x"].order)
        # (1 + 2x)^-1 = 1 - 2x + 4x^2 - ... truncated at base degree 2
        expect = mul(SuperSeries.const(chart, 1, p.order)
                     - xs.scale(2) + (xs ** 2).scale(4), p)
        assert truncate_base_degree(sigma["q_x"] - expect, 2).is_zero()

    def test_singular_change_rejected(self):
        c = Chart("M", [Variable("x", EVEN)])
        f = {"x": SuperSeries.of_var(c, "x", 4) ** 2}
        with pytest.raises(ValueError):
            prolong_coordinate_change(f, c, [TSTAR], 4)


def random_base_change(gen, base, order):
    """Identity plus a higher-degree polynomial perturbation."""
    F = {}
    for v in base:
        pert = gen.series(base, order, parity=v.parity, n_terms=2, max_degree=order)
        pert = SuperSeries(base, {m: c for m, c in pert.terms.items()
                                  if sum(m) >= 2}, order)
        F[v.name] = SuperSeries.of_var(base, v.name, order) + pert
    return F


class TestLiouvilleInvariance:
    @pytest.mark.parametrize("mom_kind,which", [(TSTAR, "theta"), (PITSTAR, "lambda")])
    def test_base_forms_invariant(self, mom_kind, which):
        gen = Generator(21)
        for shape in [(1, 0), (1, 1), (2, 1)]:
            base = base_chart(*shape)
            F = random_base_change(gen, base, 4)
            chart, sigma = prolong_coordinate_change(F, base, [mom_kind], 4)
            th = liouville(chart, which, 4)
            img = substitute(th, sigma, chart=chart,
                             order=max(s.order for s in sigma.values()))
            resid = truncate_base_degree(img - embed(th, chart, img.order), 4)
            assert resid.is_zero()

    @pytest.mark.parametrize("mom_kind,tan_kind,which", [
        (TSTAR, T, "theta_TM"),
        (PITSTAR, T, "lambda_TM"),
        (PITSTAR, PIT, "theta_PiTM"),
        (TSTAR, PIT, "lambda_PiTM"),
    ])
    def test_lifted_forms_invariant(self, mom_kind, tan_kind, which):
        gen = Generator(22)
        for shape in [(1, 0), (1, 1)]:
            base = base_chart(*shape)
            F = random_base_change(gen, base, 4)
            chart, sigma = prolong_coordinate_change(F, base, [mom_kind, tan_kind], 4)
            th = liouville(chart, which, 4)
            img = substitute(th, sigma, chart=chart,
                             order=max(s.order for s in sigma.values()))
            resid = truncate_base_degree(img - embed(th, chart, img.order), 4)
            assert resid.is_zero()
