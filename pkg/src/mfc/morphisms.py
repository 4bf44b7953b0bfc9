"""Thick morphisms: validation, base map, relation identity, nonlinear
pullback and composition.

An even morphism M1 => M2 is a generating function S(x; q) on the chart
(source coordinates, target momenta), a formal power series in the
momenta with S(x; 0) constant.  An odd morphism uses antimomenta
``ys_<coord>`` of flipped parity.  The canonical relation is

    w^i = (-1)^{w} dS/dm_i   (even kind; no sign for odd kind),
    p_a = dS/dx^a,

with left derivatives throughout.  Lifted morphisms carry an explicit
conjugacy table (target coordinate, momentum variable, sign) because
the tangent/antitangent identifications swap and sign the pairings.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .report import Report
from .superalg import (
    EVEN,
    ODD,
    Chart,
    ChartMismatch,
    ParityError,
    ROLE_ANTIMOMENTUM,
    ROLE_MOMENTUM,
    ROLE_PARAM,
    SuperSeries,
    Variable,
    embed,
    flip,
    mul,
    partial,
    set_to_zero,
    substitute,
)
from .superforms import apply_operator, extend_d

KIND_EVEN = "even"
KIND_ODD = "odd"


class MorphismError(ValueError):
    """A generating function fails the thick-morphism contract."""


def default_strict() -> bool:
    return os.environ.get("MFC_STRICT", "1") != "0"


def momentum_variable(coord: Variable, kind: str) -> Variable:
    if kind == KIND_EVEN:
        return Variable("q_" + coord.name, coord.parity, ROLE_MOMENTUM, 1,
                        base=coord.name)
    return Variable("ys_" + coord.name, flip(coord.parity), ROLE_ANTIMOMENTUM, 1,
                    base=coord.name)


def combined_chart(source: Chart, target: Chart, kind: str,
                   momenta: Optional[Sequence[Variable]] = None) -> Chart:
    if momenta is None:
        momenta = [momentum_variable(v, kind) for v in target]
    return Chart(f"{source.name}=>{target.name}",
                 tuple(source.variables) + tuple(momenta),
                 depth=max(source.depth, target.depth))


@dataclass(frozen=True)
class Conjugate:
    """Target coordinate paired with (sign * momentum variable)."""
    coord: str
    momentum: str
    sign: int = 1


def canonical_conjugates(target: Chart, kind: str) -> Tuple[Conjugate, ...]:
    prefix = "q_" if kind == KIND_EVEN else "ys_"
    return tuple(Conjugate(v.name, prefix + v.name) for v in target)


@dataclass(frozen=True)
class ThickMorphism:
    source: Chart
    target: Chart
    kind: str
    S: SuperSeries  # on the combined chart
    order: int
    conjugates: Tuple[Conjugate, ...]
    normalized: bool = True  # S(x; 0) constant

    @property
    def chart(self) -> Chart:
        return self.S.chart

    def momentum_names(self):
        return [c.momentum for c in self.conjugates]

    def coordinate_relations(self) -> Dict[str, SuperSeries]:
        """Target coordinates as series in (source coords, momenta)."""
        out = {}
        for c in self.conjugates:
            d = partial(self.S, c.momentum)
            sign = c.sign
            if self.kind == KIND_EVEN and self.target.var(c.coord).parity == ODD:
                sign = -sign
            out[c.coord] = d.scale(sign)
        return out

    def source_momentum_relations(self) -> Dict[str, SuperSeries]:
        """Canonical source momenta p_a = dS/dx^a as series."""
        return {v.name: partial(self.S, v.name) for v in self.source}


def mk_thick(source: Chart, target: Chart, kind: str, S: SuperSeries,
             order: int, conjugates: Optional[Sequence[Conjugate]] = None,
             strict: Optional[bool] = None) -> ThickMorphism:
    """Validate a generating function and build the morphism."""
    if kind not in (KIND_EVEN, KIND_ODD):
        raise ValueError(f"kind must be 'even' or 'odd', got {kind!r}")
    if strict is None:
        strict = default_strict()
    if conjugates is None:
        conjugates = canonical_conjugates(target, kind)
    conjugates = tuple(conjugates)
    momenta = [S.chart.var(c.momentum) if c.momentum in S.chart else None
               for c in conjugates]
    if any(m is None for m in momenta):
        raise MorphismError("generating-function chart lacks a momentum variable")
    expected = Chart("", tuple(source.variables) + tuple(momenta))
    if tuple(S.chart.variables) != expected.variables:
        raise MorphismError(
            "generating function must live on (source coords, target momenta)")
    if S.order != order:
        raise MorphismError(f"S has filtration order {S.order}, expected {order}")
    want = EVEN if kind == KIND_EVEN else ODD
    if not S.has_parity(want):
        raise ParityError(f"{kind} morphism needs a {kind} generating function")
    for c, m in zip(conjugates, momenta):
        coord = target.var(c.coord)
        need = coord.parity if kind == KIND_EVEN else flip(coord.parity)
        if m.parity != need:
            raise ParityError(
                f"momentum {m.name!r} has wrong parity for coordinate {c.coord!r}")
    zero_mom = set_to_zero(S, [m.name for m in momenta])
    normalized = zero_mom == SuperSeries.const(S.chart, zero_mom.constant_term(), order)
    if strict and not normalized:
        raise MorphismError("S at zero momenta must be constant (strict mode)")
    return ThickMorphism(source, target, kind, S, order, conjugates, normalized)


# -- classical maps -------------------------------------------------------


@dataclass(frozen=True)
class ClassicalMap:
    """An ordinary map, one source-chart series per target coordinate."""
    source: Chart
    target: Chart
    components: Mapping[str, SuperSeries]

    def __post_init__(self):
        for v in self.target:
            comp = self.components[v.name]
            if not comp.has_parity(v.parity):
                raise ParityError(f"component for {v.name!r} has wrong parity")

    def compose(self, inner: "ClassicalMap", order: Optional[int] = None) -> "ClassicalMap":
        if order is None:
            order = next(iter(inner.components.values())).order
        comps = {
            name: substitute(comp, {w.name: inner.components[w.name]
                                    for w in self.source},
                             chart=inner.source, order=order)
            for name, comp in self.components.items()
        }
        return ClassicalMap(inner.source, self.target, comps)


def identity_map(chart: Chart, order: int) -> ClassicalMap:
    return ClassicalMap(chart, chart,
                        {v.name: SuperSeries.of_var(chart, v.name, order)
                         for v in chart})


def from_classical(phi: ClassicalMap, kind: str, order: int) -> ThickMorphism:
    """S = phi^i(x) q_i (even kind) or phi^i(x) ys_i (odd kind)."""
    chart = combined_chart(phi.source, phi.target, kind)
    prefix = "q_" if kind == KIND_EVEN else "ys_"
    S = SuperSeries.zero(chart, order)
    for v in phi.target:
        comp = embed(phi.components[v.name], chart, order)
        S = S + mul(comp, SuperSeries.of_var(chart, prefix + v.name, order))
    return mk_thick(phi.source, phi.target, kind, S, order)


def base_map(phi: ThickMorphism) -> ClassicalMap:
    """The underlying ordinary map, from the relation at zero momenta."""
    momenta = phi.momentum_names()
    comps = {}
    for coord, series in phi.coordinate_relations().items():
        at_zero = set_to_zero(series, momenta)
        comps[coord] = substitute(at_zero, {}, chart=phi.source, order=phi.order)
    return ClassicalMap(phi.source, phi.target, comps)


# -- relation identity ------------------------------------------------------


def relation_check(phi: ThickMorphism) -> Report:
    """Residual of d(w^i) m_i - d(x^a) p_a - d(w^i m_i - S), which must
    vanish identically when the relation equations are substituted in."""
    chart = extend_d(phi.chart)
    order = phi.order
    lift = lambda s: embed(s, chart, order)
    var = lambda n: SuperSeries.of_var(chart, n, order)
    S = lift(phi.S)
    action = SuperSeries.zero(chart, order)
    lhs = SuperSeries.zero(chart, order)
    relations = phi.coordinate_relations()
    for c in phi.conjugates:
        w = lift(relations[c.coord])
        m = var(c.momentum).scale(c.sign)
        lhs = lhs + mul(apply_operator(w, "d"), m)
        action = action + mul(w, m)
    for v in phi.source:
        p = lift(partial(phi.S, v.name))
        lhs = lhs - mul(var("d_" + v.name), p)
    residual = lhs - apply_operator(action - S, "d")
    report = Report(f"relation:{phi.chart.name}")
    report.check_zero("relation_identity", residual)
    return report


# -- pullback ----------------------------------------------------------------


EPS = "eps"


def pullback_chart(phi: ThickMorphism, n_eps: int,
                   params: Sequence[Variable] = ()) -> Chart:
    eps = Variable(EPS, EVEN, ROLE_PARAM, 1)
    return Chart(f"{phi.source.name}+eps",
                 (eps,) + tuple(params) + tuple(phi.source.variables),
                 depth=phi.source.depth)


def _solve_relation(phi: ThickMorphism, h: SuperSeries, work: Chart,
                    n_eps: int, sweeps: Optional[int] = None):
    """Fixed point m_i = d h/d w^i(w), w^i from the relation, by sweeps.

    ``h`` lives on (target coords + passive params) and every
    coordinate-dependent term must carry the formal parameter, so each
    sweep gains one parameter order.  Returns (w_series, mu_series).
    """
    if sweeps is None:
        sweeps = n_eps
    order = n_eps
    src_images = {v.name: SuperSeries.of_var(work, v.name, order)
                  for v in phi.source}
    base = base_map(phi)
    w = {v.name: embed(base.components[v.name], work, order) for v in phi.target}
    mu = {c.momentum: SuperSeries.zero(work, order) for c in phi.conjugates}
    dh = {c.coord: partial(h, c.coord) for c in phi.conjugates}
    dS = {c.momentum: partial(phi.S, c.momentum) for c in phi.conjugates}
    for _ in range(sweeps):
        for c in phi.conjugates:
            img = substitute(dh[c.coord], w, chart=work, order=order)
            mu[c.momentum] = img.scale(c.sign)
        for c in phi.conjugates:
            sign = c.sign
            if phi.kind == KIND_EVEN and phi.target.var(c.coord).parity == ODD:
                sign = -sign
            img = substitute(dS[c.momentum], {**src_images, **mu},
                             chart=work, order=order)
            w[c.coord] = img.scale(sign)
    return w, mu


def pullback_series(phi: ThickMorphism, h: SuperSeries, n_eps: int,
                    params: Sequence[Variable] = ()) -> SuperSeries:
    """Pull back a series whose coordinate dependence is O(eps).

    ``h`` lives on (eps, params, target coordinates).  Used directly
    for contravariance checks; ordinary inputs go through ``pullback``.
    """
    work = pullback_chart(phi, n_eps, params)
    h_chart = Chart("h", (work.var(EPS),) + tuple(params) + tuple(phi.target.variables))
    if h.chart != h_chart:
        raise ChartMismatch("series must live on (eps, params, target coords)")
    for m in h.terms:
        if m[0] == 0 and any(m[h_chart.index(v.name)] for v in phi.target):
            raise MorphismError("coordinate-dependent terms must carry eps")
    w, mu = _solve_relation(phi, h, work, n_eps)
    src = {v.name: SuperSeries.of_var(work, v.name, n_eps) for v in phi.source}
    out = substitute(h, w, chart=work, order=n_eps)
    out = out + substitute(phi.S, {**src, **mu}, chart=work, order=n_eps)
    for c in phi.conjugates:
        out = out - mul(w[c.coord], mu[c.momentum].scale(c.sign))
    return out


def pullback(phi: ThickMorphism, g: SuperSeries, n_eps: int,
             params: Sequence[Variable] = ()) -> SuperSeries:
    """Nonlinear pullback of a polynomial target function, as a series in
    the nilpotent grading parameter eps attached to the input."""
    want = EVEN if phi.kind == KIND_EVEN else ODD
    if not g.has_parity(want):
        raise ParityError(f"{phi.kind} morphism pulls back {phi.kind} functions")
    g_chart = Chart("g", tuple(params) + tuple(phi.target.variables))
    if g.chart != g_chart and g.chart == phi.target:
        g = embed(g, g_chart, g.order)
    elif g.chart != g_chart:
        raise ChartMismatch("g must live on (params, target coords)")
    work = pullback_chart(phi, n_eps, params)
    h_chart = Chart("h", (work.var(EPS),) + tuple(params) + tuple(phi.target.variables))
    h = mul(SuperSeries.of_var(h_chart, EPS, n_eps), embed(g, h_chart, n_eps))
    return pullback_series(phi, h, n_eps, params)


# -- composition --------------------------------------------------------------


def compose(outer: ThickMorphism, inner: ThickMorphism, order: int) -> ThickMorphism:
    """Eliminate the middle manifold order by order in the new momenta."""
    if outer.kind != inner.kind:
        raise MorphismError("cannot compose morphisms of different kinds")
    if outer.source != inner.target:
        raise ChartMismatch("outer source chart must equal inner target chart")
    if not (outer.normalized and inner.normalized):
        raise MorphismError("composition requires zero-momentum-normalized factors")
    out_momenta = [outer.chart.var(c.momentum) for c in outer.conjugates]
    work = combined_chart(inner.source, outer.target, outer.kind, out_momenta)
    work_order = order
    src = {v.name: SuperSeries.of_var(work, v.name, work_order) for v in inner.source}
    outm = {m.name: SuperSeries.of_var(work, m.name, work_order) for m in out_momenta}
    base = base_map(inner)
    y = {v.name: embed(base.components[v.name], work, work_order)
         for v in inner.target}
    q = {c.momentum: SuperSeries.zero(work, work_order) for c in inner.conjugates}
    dS1 = {c.momentum: partial(inner.S, c.momentum) for c in inner.conjugates}
    dS2 = {c.coord: partial(outer.S, c.coord) for c in inner.conjugates}
    for _ in range(order + 1):
        for c in inner.conjugates:
            img = substitute(dS2[c.coord], {**y, **outm}, chart=work, order=work_order)
            q[c.momentum] = img.scale(c.sign)
        for c in inner.conjugates:
            sign = c.sign
            if inner.kind == KIND_EVEN and inner.target.var(c.coord).parity == ODD:
                sign = -sign
            img = substitute(dS1[c.momentum], {**src, **q}, chart=work, order=work_order)
            y[c.coord] = img.scale(sign)
    S = substitute(outer.S, {**y, **outm}, chart=work, order=work_order)
    S = S + substitute(inner.S, {**src, **q}, chart=work, order=work_order)
    for c in inner.conjugates:
        S = S - mul(y[c.coord], q[c.momentum].scale(c.sign))
    return mk_thick(inner.source, outer.target, outer.kind, S, order,
                    conjugates=outer.conjugates)
