"""Homological vector fields and thick Q-morphism checks.

A homological field Q on a chart has odd-shifted components Q^a; its
Hamiltonian is the fiberwise-linear function Q^a p_a on the cotangent
chart (even structure) or Q^a x*_a on the anticotangent chart (odd
structure).  A morphism is a thick Q-morphism when the source and
target Hamiltonians agree on its canonical relation, i.e. the
Hamilton-Jacobi residual below vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .report import Report
from .superalg import (
    EVEN,
    ODD,
    Chart,
    ParityError,
    ROLE_PARAM,
    SuperSeries,
    Variable,
    embed,
    flip,
    mul,
    partial,
    shift_down,
    substitute,
    truncate,
)
from .superforms import (
    PITSTAR,
    TSTAR,
    StructureError,
    extend_chart,
    poisson_bracket,
)
from .morphisms import EPS, KIND_EVEN, ThickMorphism, pullback
from .functors import antitangent_lift

# Global sign relating the eps-linearized exterior differential of a
# pulled-back form to the pullback of the differentiated form.  Fixed
# once on classical maps (where pullback and d commute on the nose) and
# frozen; the calibration suite fails loudly if any classical case
# disagrees.
INTERTWINE_SIGN = 1


@dataclass(frozen=True)
class HomologicalField:
    """Odd vector field Q = Q^a d/dx^a given by its components."""
    chart: Chart
    components: Mapping[str, SuperSeries]

    def __post_init__(self):
        for v in self.chart:
            comp = self.components[v.name]
            if not comp.has_parity(flip(v.parity)):
                raise ParityError(f"component for {v.name!r} must be odd-shifted")

    def is_homological(self) -> bool:
        """Q^2 = 0, via {H, H} = 0 for the even-structure Hamiltonian."""
        h = hamiltonian_of_field(self, "even")
        return poisson_bracket(h, h, "even").is_zero()


def de_rham_field(chart: Chart, order: int = 6) -> HomologicalField:
    """The exterior differential as a field on a PiT-extended chart."""
    comps = {}
    found = False
    for v in chart:
        p = "par_" + v.name
        if p in chart and not v.name.startswith("par_"):
            comps[v.name] = SuperSeries.of_var(chart, p, order)
            found = True
        else:
            comps[v.name] = SuperSeries.zero(chart, order)
    if not found:
        raise StructureError(f"chart {chart.name!r} carries no par-level")
    return HomologicalField(chart, comps)


def hamiltonian_of_field(q: HomologicalField, structure: str) -> SuperSeries:
    """H = Q^a p_a (even structure) or Q^a x*_a (odd structure)."""
    if structure not in ("even", "odd"):
        raise ValueError("structure must be 'even' or 'odd'")
    ext = extend_chart(q.chart, TSTAR if structure == "even" else PITSTAR)
    prefix = "q_" if structure == "even" else "ys_"
    order = next(iter(q.components.values())).order
    out = SuperSeries.zero(ext, order)
    for v in q.chart:
        comp = q.components[v.name]
        if comp.is_zero():
            continue
        out = out + mul(embed(comp, ext, order),
                        SuperSeries.of_var(ext, prefix + v.name, order))
    return out


def q_morphism_residual(phi: ThickMorphism, h_source: SuperSeries,
                        h_target: SuperSeries, order: int) -> SuperSeries:
    """H_target on the relation minus H_source on the relation.

    The Hamiltonians live on the canonical (anti)cotangent extensions of
    the source/target charts; target coordinates and momenta and source
    momenta are replaced by the relation series in (x, mu).
    """
    structure = "even" if phi.kind == KIND_EVEN else "odd"
    prefix = "q_" if structure == "even" else "ys_"
    work = phi.chart
    w_order = phi.order
    relations = phi.coordinate_relations()
    tgt_images: Dict[str, SuperSeries] = {}
    for c in phi.conjugates:
        tgt_images[c.coord] = relations[c.coord]
        tgt_images[prefix + c.coord] = SuperSeries.of_var(
            work, c.momentum, w_order).scale(c.sign)
    src_images: Dict[str, SuperSeries] = {
        v.name: SuperSeries.of_var(work, v.name, w_order) for v in phi.source}
    for v in phi.source:
        src_images[prefix + v.name] = partial(phi.S, v.name)
    lhs = substitute(h_target, tgt_images, chart=work, order=w_order)
    rhs = substitute(h_source, src_images, chart=work, order=w_order)
    return truncate(lhs - rhs, min(order, w_order))


def check_antitangent_q(phi: ThickMorphism, order: int,
                        name: str = "antitangent_q") -> Report:
    """The antitangent lift is a thick Q-morphism for the de Rham fields."""
    lifted = antitangent_lift(phi)
    structure = "even" if lifted.kind == KIND_EVEN else "odd"
    q1 = de_rham_field(lifted.source, order=lifted.order)
    q2 = de_rham_field(lifted.target, order=lifted.order)
    h1 = hamiltonian_of_field(q1, structure)
    h2 = hamiltonian_of_field(q2, structure)
    residual = q_morphism_residual(lifted, h1, h2, order)
    report = Report(name)
    report.check_zero(name, residual)
    return report


def _source_de_rham(series: SuperSeries) -> SuperSeries:
    """Exterior differential v -> par_v on the series' own chart."""
    chart = series.chart
    images = {}
    for v in chart:
        p = "par_" + v.name
        if p in chart and not v.name.startswith("par_"):
            images[v.name] = SuperSeries.of_var(chart, p, series.order)
    if not images:
        raise StructureError(f"chart {chart.name!r} carries no par-level")
    from .superalg import deriv
    return deriv(series, images, ODD)


def closedness_check(phi: ThickMorphism, omega: SuperSeries, n_eps: int,
                     name: str = "closedness") -> Report:
    """Pullbacks of closed forms through the antitangent lift stay closed."""
    lifted = antitangent_lift(phi)
    omega = embed(omega, lifted.target, omega.order)
    if not _source_de_rham(omega).is_zero():
        raise ValueError("omega is not closed (precondition)")
    rho = pullback(lifted, omega, n_eps)
    report = Report(name)
    report.check_zero(name, _source_de_rham(rho))
    return report


def derivative_homomorphism_check(phi: ThickMorphism, f: SuperSeries,
                                  g: SuperSeries, h: SuperSeries, n_eps: int,
                                  name: str = "derivative_homomorphism") -> Report:
    """The linearization of the pullback at f multiplies: D[g h]=D[g] D[h]."""
    kind_parity = EVEN if phi.kind == KIND_EVEN else ODD

    def directional(direction: SuperSeries) -> SuperSeries:
        p = direction.parity()
        if p is None:
            if not direction.is_zero():
                raise ParityError("direction must be parity-homogeneous")
            p = EVEN  # zero direction: any parity works, derivative is zero
        t_parity = kind_parity ^ p
        t = Variable("t", t_parity, ROLE_PARAM, 0, max_power=1)
        tgt = Chart("g", (t,) + tuple(phi.target.variables))
        probe = embed(f, tgt, f.order) + mul(SuperSeries.of_var(tgt, "t", f.order),
                                             embed(direction, tgt, f.order))
        result = pullback(phi, probe, n_eps, params=(t,))
        linear = partial(result, "t")
        # strip the eps each direction term carries, then drop t's slot
        stripped = shift_down(linear, EPS)
        out_chart = Chart(stripped.chart.name + "-t",
                          tuple(v for v in stripped.chart if v.name != "t"))
        return substitute(stripped, {}, chart=out_chart, order=n_eps)

    d_g = directional(g)
    d_h = directional(h)
    d_gh = directional(mul(g, h))
    residual = truncate(d_gh - mul(d_g, d_h), n_eps - 1)
    report = Report(name)
    report.check_zero(name, residual)
    return report


def intertwining_check(phi: ThickMorphism, omega: SuperSeries, n_eps: int,
                       name: str = "intertwining") -> Report:
    """The eps-linearized exterior differential commutes with the lifted
    pullback, up to the frozen global sign."""
    lifted = antitangent_lift(phi)
    omega = embed(omega, lifted.target, omega.order)
    d_omega = _source_de_rham(omega)
    tau = Variable("tau", ODD, ROLE_PARAM, 0)
    tgt = Chart("g", (tau,) + tuple(lifted.target.variables))
    probe = embed(omega, tgt, omega.order) + mul(
        SuperSeries.of_var(tgt, "tau", omega.order), embed(d_omega, tgt, omega.order))
    full = pullback(lifted, probe, n_eps, params=(tau,))
    linear = partial(full, "tau")
    plain = pullback(lifted, omega, n_eps)
    expected = embed(_source_de_rham(plain), linear.chart, n_eps)
    report = Report(name)
    report.check_zero(name, linear - expected.scale(INTERTWINE_SIGN))
    return report


def calibrate_intertwining_sign(phi: ThickMorphism, omega: SuperSeries,
                                n_eps: int) -> Optional[int]:
    """Which global sign makes the intertwining identity hold; None if
    neither (or the comparison is degenerate)."""
    lifted = antitangent_lift(phi)
    omega = embed(omega, lifted.target, omega.order)
    d_omega = _source_de_rham(omega)
    tau = Variable("tau", ODD, ROLE_PARAM, 0)
    tgt = Chart("g", (tau,) + tuple(lifted.target.variables))
    probe = embed(omega, tgt, omega.order) + mul(
        SuperSeries.of_var(tgt, "tau", omega.order), embed(d_omega, tgt, omega.order))
    full = pullback(lifted, probe, n_eps, params=(tau,))
    linear = partial(full, "tau")
    plain = pullback(lifted, omega, n_eps)
    expected = embed(_source_de_rham(plain), linear.chart, n_eps)
    if linear.is_zero() and expected.is_zero():
        return None
    if linear == expected:
        return 1
    if linear == -expected:
        return -1
    return 0
