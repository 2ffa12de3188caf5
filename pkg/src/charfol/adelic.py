"""Local points of chart algebras over F_q((t)), pullback of 1-forms along
them, the nonvanishing test for a family of sections, and point lifting
through a purely inseparable degree-p quotient presentation.

The headline operation is verify_equivalence: on a chart that descends, with
a derivation that descends, it builds the quotient presentation from the
factorization report and confirms over seeded random local points that a
point lifts exactly when every supplied section pulls back to zero.
"""

import random

from . import gf
from .algebra import MultiPoly, FunField
from .series import LaurentSeries, NotSimpleRoot
from .differentials import OneForm
from .descent import descend_algebra, descend_derivation, pth_root_K, NoDescent
from .foliation import _generator_monomials
from ._linalg import solve_span


class NotOnVariety(ValueError):
    def __init__(self, relation_index, valuation, msg):
        super().__init__(msg)
        self.relation_index = relation_index
        self.valuation = valuation


class NoLift(Exception):
    def __init__(self, coordinate, reason):
        super().__init__(f"{coordinate}: {reason}")
        self.coordinate = coordinate
        self.reason = reason


class UnsupportedPresentation(ValueError):
    pass


def _base_field(chart):
    return chart.domain.field if isinstance(chart.domain, FunField) else chart.domain


def _converter(chart, prec):
    if isinstance(chart.domain, FunField):
        return lambda c: LaurentSeries.from_ratfunc(c, prec)
    return lambda c: LaurentSeries.constant(chart.domain, c, prec)


class LocalPoint:
    __slots__ = ("chart", "coords", "prec")

    def __init__(self, chart, coords, prec):
        self.chart = chart
        self.coords = coords
        self.prec = prec

    def coord(self, name):
        return self.coords[name]

    def to_json(self):
        return {v: str(s) for v, s in sorted(self.coords.items())}

    def __repr__(self):
        inner = ", ".join(f"{v}={s}" for v, s in sorted(self.coords.items()))
        return f"<local point {inner}>"


def make_point(chart, coords, N=64):
    """Certify that the coordinates satisfy every chart relation up to N."""
    field = _base_field(chart)
    clean = {}
    for v in chart.vars:
        if v not in coords:
            raise KeyError(f"no value for coordinate {v}")
        s = coords[v]
        if not isinstance(s, LaurentSeries):
            s = LaurentSeries.constant(field, s, N)
        clean[v] = s
    prec = min([N] + [s.prec for s in clean.values()])
    conv = _converter(chart, prec)
    for j, rel in enumerate(chart.relations):
        residual = rel.poly.evaluate(clean, conv)
        horizon = min(prec, residual.prec)
        if residual.nonzero_before(horizon):
            val = residual.val()
            raise NotOnVariety(
                j, val,
                f"relation {j} ({rel.poly}) has residual of valuation {val}",
            )
    return LocalPoint(chart, clean, prec)


def solve_coordinate(chart, coords, name, N=64, initial=None):
    """Complete a partial point by Newton iteration on one designated relation.

    coords must fix every variable except name. The starting residue is
    searched over the field unless given; it must be a simple root of the
    reduced relation.
    """
    rel = next((r for r in chart.relations if r.var == name), None)
    if rel is None:
        raise ValueError(f"{name} is not a designated relation variable")
    field = _base_field(chart)
    conv = _converter(chart, N)
    fixed = {v: s for v, s in coords.items() if v != name}

    def residual(w, F):
        a = dict(fixed)
        a[name] = w
        return F.evaluate(a, conv)

    F = rel.poly
    Fw = F.partial(name)
    if initial is None:
        for a in field.elements():
            w0 = LaurentSeries.constant(field, a, 1)
            r0 = residual(w0, F)
            d0 = residual(w0, Fw)
            if not r0.nonzero_before(min(1, r0.prec)) and d0.nonzero_before(1):
                initial = a
                break
        if initial is None:
            raise NotSimpleRoot(f"no simple starting residue for {name} over F_{field.q}")
    w = LaurentSeries.constant(field, initial, 1)
    k = 1
    while k < N:
        k = min(2 * k, N)
        wk = w._with_prec(k)
        w = (wk - residual(wk, F) / residual(wk, Fw)).truncate(k)
    final = residual(w._with_prec(N), F)
    if final.nonzero_before(min(N, final.prec)):
        raise RuntimeError("Newton completion failed the substitution check")
    full = dict(fixed)
    full[name] = w._with_prec(N)
    return full


def pullback_form(point, form):
    """Coefficient of dt in the pullback: sum a_i(x(t)) x_i'(t) + a_t(x(t))."""
    if form.chart != point.chart:
        raise TypeError("form and point live on different charts")
    conv = _converter(point.chart, point.prec)
    out = None
    for v, a in zip(point.chart.vars, form.comps):
        if a.is_zero():
            continue
        term = a.evaluate(point.coords, conv) * point.coords[v].derivative()
        out = term if out is None else out + term
    if form.t_comp is not None and not form.t_comp.is_zero():
        term = form.t_comp.evaluate(point.coords, conv)
        out = term if out is None else out + term
    if out is None:
        out = LaurentSeries.zero(_base_field(point.chart), point.prec)
    return out


def star_condition(point, sections, horizon=None):
    """True when some section pulls back to a series nonzero before horizon
    (default: half the working precision)."""
    if horizon is None:
        horizon = point.prec // 2
    for w in sections:
        pb = pullback_form(point, w)
        if pb.nonzero_before(min(horizon, pb.prec)):
            return True
    return False


class QuotientPresentation:
    """phi: source -> target, purely inseparable of degree p at chart level.

    images[v] is phi^*(v) as a polynomial on the source chart. Construction
    verifies that every image has degree <= p in each source variable and
    that the p-th power of every source variable lies in the subring the
    images generate (searched up to degree_bound).
    """

    __slots__ = ("source", "target", "images", "degree_bound")

    def __init__(self, source, target, images, degree_bound=None):
        if source.domain != target.domain:
            raise UnsupportedPresentation("source and target have different domains")
        p = source.domain.p
        self.source = source
        self.target = target
        self.images = {}
        for v in target.vars:
            if v not in images:
                raise UnsupportedPresentation(f"no image for target coordinate {v}")
            img = images[v]
            if tuple(img.vars) != source.vars:
                img = img.rename_vars(source.vars) if len(img.vars) == len(source.vars) else img
            if tuple(img.vars) != source.vars:
                raise UnsupportedPresentation(
                    f"image of {v} is not a polynomial on the source chart"
                )
            self.images[v] = source.nf(img)
            for s in source.vars:
                if self.images[v].deg_in(s) > p:
                    raise UnsupportedPresentation(
                        f"image of {v} has degree > p in {s}"
                    )
        self.degree_bound = 3 * p if degree_bound is None else degree_bound
        image_list = list(self.images.values())
        products = _generator_monomials(source, image_list, self.degree_bound)
        vectors = [poly.terms for _, poly in products]
        for s in source.vars:
            target_poly = source.nf(source.var(s) ** p)
            if solve_span(vectors, target_poly.terms) is None:
                raise UnsupportedPresentation(
                    f"{s}^{p} is not visibly in the image subring "
                    f"(degree bound {self.degree_bound})"
                )

    def to_json(self):
        return {
            "source_vars": list(self.source.vars),
            "target_vars": list(self.target.vars),
            "images": {v: str(self.images[v]) for v in self.target.vars},
        }


def _pure_p_power(exp, p):
    j = 0
    m = exp
    while m % p == 0:
        m //= p
        j += 1
    return j if m == 1 else None


def lift_point(point, pres):
    """Solve phi^*(v)(source coords) = v(t) for every target coordinate v.

    Triangular passes: an equation becomes usable once it has exactly one
    term containing exactly one undetermined source variable, raised to a
    power p^j; that variable is then solved by division and j p-th roots.
    Source variables never pinned down default to 0, and every equation is
    re-verified at half precision before the lift is returned.
    """
    if point.chart != pres.target:
        raise TypeError("point does not live on the target chart")
    source = pres.source
    p = source.domain.p
    field = _base_field(source)
    N = point.prec
    half = N // 2
    conv_cache = {}

    def conv(prec):
        if prec not in conv_cache:
            conv_cache[prec] = _converter(source, prec)
        return conv_cache[prec]

    def eval_terms(terms, assigned, prec):
        poly = MultiPoly(source.domain, source.vars, terms)
        if not terms:
            return LaurentSeries.zero(field, prec)
        return poly.evaluate(assigned, conv(prec))

    assigned = {}
    pending = [(v, pres.images[v], point.coords[v]) for v in pres.target.vars]
    while pending:
        progress = False
        for item in list(pending):
            v, img, rhs = item
            open_terms = []
            closed = {}
            for e, c in img.terms.items():
                open_vars = [
                    i for i, k in enumerate(e) if k and source.vars[i] not in assigned
                ]
                if open_vars:
                    open_terms.append((e, c, open_vars))
                else:
                    closed[e] = c
            if not open_terms:
                val = eval_terms(closed, assigned, N)
                diff = val - rhs
                if diff.nonzero_before(min(half, diff.prec)):
                    raise NoLift(v, "inconsistent with already determined coordinates")
                pending.remove(item)
                progress = True
                continue
            if len(open_terms) > 1 or len(open_terms[0][2]) > 1:
                continue
            e, c, (ui,) = open_terms[0]
            svar = source.vars[ui]
            j = _pure_p_power(e[ui], p)
            if j is None:
                continue  # another equation may pin svar down first
            factor_terms = {e[:ui] + (0,) + e[ui + 1 :]: c}
            factor = eval_terms(factor_terms, assigned, N)
            if factor.is_zero():
                continue
            rest = rhs - eval_terms(closed, assigned, N)
            val = rest / factor
            for _ in range(j):
                root = val.pth_root()
                if root is None:
                    raise NoLift(v, f"series for {svar} requires a p-th root that does not exist")
                val = root
            assigned[svar] = val
            pending.remove(item)
            progress = True
        if not progress:
            raise UnsupportedPresentation(
                f"cannot isolate a source variable in the equation for {pending[0][0]}"
            )
    for s in source.vars:
        if s not in assigned:
            assigned[s] = LaurentSeries.zero(field, N)
    prec = min([N] + [s.prec for s in assigned.values()])
    for v in pres.target.vars:
        val = pres.images[v].evaluate(assigned, conv(prec))
        diff = val - point.coords[v]
        if diff.nonzero_before(min(half, diff.prec)):
            raise NoLift(v, "lift verification failed")
    return make_point(source, assigned, prec)


# ---------------------------------------------------------------------------
# randomized point generation and the equivalence run


def _random_free_series(field, rng, N, p_powered):
    p = field.p
    terms = {}
    if p_powered:
        for _ in range(rng.randrange(1, 4)):
            k = p * rng.randrange(0, 3)
            terms[k] = rng.randrange(field.q)
    else:
        k0 = rng.randrange(0, 8)
        while k0 % p == 0:
            k0 = rng.randrange(0, 8)
        terms[k0] = rng.randrange(1, field.q)
        for _ in range(rng.randrange(0, 3)):
            terms[rng.randrange(0, 8)] = rng.randrange(field.q)
    v0 = min(terms) if terms else 0
    coeffs = [field.from_int(0)] * (max(terms) - v0 + 1) if terms else []
    for k, c in terms.items():
        coeffs[k - v0] = _int_to_elem(field, c)
    return LaurentSeries(field, v0, coeffs, N)


def _int_to_elem(field, n):
    # spread ints over all of F_q, not only the prime field
    out = field.zero()
    g = field.gen() if field.e > 1 else field.one()
    k = 0
    while n:
        out = out + field.from_int(n % field.p) * g**k
        n //= field.p
        k += 1
    return out


def _linear_unit_var(chart):
    """A variable some relation determines linearly with a constant unit
    coefficient, together with that relation."""
    for rel in chart.relations:
        for v in chart.vars:
            if rel.poly.deg_in(v) == 1:
                c = rel.poly.coeff_in(v, 1)
                if c.is_constant() and not c.is_zero():
                    others = sum(r.poly.deg_in(v) for r in chart.relations if r is not rel)
                    if others == 0:
                        return v, rel
    return None, None


def random_local_point(chart, rng, N=64, bias=True, max_tries=40):
    """A random point on the chart, each free coordinate a short random
    series that is purely a p-th power with probability 1/2 (when bias is
    on). One relation variable is solved exactly when it appears linearly
    with a unit coefficient; otherwise the designated variable is completed
    by Newton. Retries when the random draw hits a non-simple root."""
    field = _base_field(chart)
    solve_var, rel = _linear_unit_var(chart)
    newton_var = None
    if solve_var is None and chart.relations:
        if len(chart.relations) > 1:
            raise UnsupportedPresentation("random points need at most one relation")
        newton_var = chart.relations[0].var
    for _ in range(max_tries):
        coords = {}
        for v in chart.vars:
            if v in (solve_var, newton_var):
                continue
            coords[v] = _random_free_series(field, rng, N, bias and rng.random() < 0.5)
        if solve_var is not None:
            c = rel.poly.coeff_in(solve_var, 1).constant_value()
            rest = MultiPoly(
                chart.domain,
                chart.vars,
                {
                    e: cc
                    for e, cc in rel.poly.terms.items()
                    if e[chart.vars.index(solve_var)] == 0
                },
            )
            conv = _converter(chart, N)
            val = rest.evaluate({**coords, solve_var: LaurentSeries.zero(field, N)}, conv)
            coords[solve_var] = val * conv(-(c.inverse()))
        elif newton_var is not None:
            try:
                coords = solve_coordinate(chart, coords, newton_var, N)
            except NotSimpleRoot:
                continue
        try:
            return make_point(chart, coords, N)
        except NotOnVariety:
            continue
    raise RuntimeError(f"no random point found on {chart!r} after {max_tries} draws")


def _descend_sections(sections, model):
    out = []
    for w in sections:
        if w.t_comp is not None and not w.t_comp.is_zero():
            raise NoDescent("only relative sections (no dt part) descend here")
        comps = [c.map_coeffs(pth_root_K) for c in w.comps]
        out.append(OneForm(model, comps))
    return out


def _has_unit_section(sections):
    for w in sections:
        for c in w.comps:
            if not c.is_zero() and c.is_constant():
                return True
    return False


def verify_equivalence(
    chart,
    D,
    sections,
    trials=200,
    seed=0,
    N=64,
    assert_generated=False,
    verbose=False,
    factorization_bound=None,
):
    """Check lift-exists == every-section-pulls-back-to-zero on random points.

    The chart and derivation are first descended to their model; the quotient
    presentation comes from the factorization of the descended derivation.
    Points are generated with the p-th-power bias so both outcomes occur.
    The run is marked inconclusive unless some section has a unit
    coefficient or assert_generated is set (the generation hypothesis for
    the section family has no chart-level test).
    """
    from .foliation import frobenius_factorization_check

    pair = descend_algebra(chart)
    model = pair.model
    Dm = descend_derivation(D, pair)
    report_fact = frobenius_factorization_check(Dm, max_total=factorization_bound)
    if report_fact.quotient is None:
        raise UnsupportedPresentation(
            "the constants of the derivation do not present as a chart"
        )
    pres = QuotientPresentation(
        report_fact.quotient, model, report_fact.power_certificates
    )
    model_sections = _descend_sections(sections, model)

    if not sections:
        return {
            "trials": 0,
            "seed": seed,
            "precision": N,
            "model": pair.to_json(),
            "presentation": pres.to_json(),
            "sections": [],
            "lift_exists": 0,
            "lift_fails": 0,
            "star_true": 0,
            "star_false": 0,
            "buckets_ok": False,
            "counterexamples": [],
            "generation_basis": "none",
            "status": "inconclusive",
        }
    if _has_unit_section(model_sections):
        basis = "unit-coefficient-section"
    elif assert_generated:
        basis = "asserted"
    else:
        basis = "none"

    rng = random.Random(seed)
    lift_yes = lift_no = star_yes = star_no = 0
    counterexamples = []
    trial_log = []
    for trial in range(trials):
        point = random_local_point(model, rng, N)
        star = star_condition(point, model_sections)
        lifted = None
        obstruction = None
        try:
            lifted = lift_point(point, pres)
        except NoLift as e:
            obstruction = str(e)
        if lifted is not None:
            lift_yes += 1
        else:
            lift_no += 1
        if star:
            star_yes += 1
        else:
            star_no += 1
        consistent = (lifted is not None) == (not star)
        if not consistent:
            counterexamples.append(
                {
                    "trial": trial,
                    "point": point.to_json(),
                    "star": star,
                    "lift": "ok" if lifted is not None else obstruction,
                }
            )
        if verbose:
            trial_log.append(
                {
                    "trial": trial,
                    "point": point.to_json(),
                    "star": star,
                    "lift": "ok" if lifted is not None else obstruction,
                }
            )
    buckets_ok = (
        trials > 0
        and lift_yes * 10 >= trials * 3
        and lift_no * 10 >= trials * 3
    )
    if counterexamples:
        status = "fail"
    elif basis == "none" or not buckets_ok:
        status = "inconclusive"
    else:
        status = "pass"
    report = {
        "trials": trials,
        "seed": seed,
        "precision": N,
        "model": pair.to_json(),
        "presentation": pres.to_json(),
        "sections": [str(w) for w in model_sections],
        "lift_exists": lift_yes,
        "lift_fails": lift_no,
        "star_true": star_yes,
        "star_false": star_no,
        "buckets_ok": buckets_ok,
        "counterexamples": counterexamples,
        "generation_basis": basis,
        "status": status,
    }
    if verbose:
        report["trial_log"] = trial_log
    return report
