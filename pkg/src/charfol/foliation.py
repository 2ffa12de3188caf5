"""Derivations on chart algebras and the quotient they generate.

A Derivation here is K-linear (it kills the constant field, including t),
stores one image polynomial per chart variable, and is only accepted when it
preserves the relation ideal. On top of that sit the p-th power, the rank-1
p-closedness certificate, 1-form kernels, the ring of constants up to a
degree bound, and a checked presentation of the degree-p quotient.
"""

from .algebra import MultiPoly, ChartAlgebra, Relation
from .differentials import _elimination, reduce_form
from ._linalg import SpanTracker, kernel_basis, solve_span


class DegreeBoundTooSmall(RuntimeError):
    pass


class Derivation:
    __slots__ = ("chart", "coeffs")

    def __init__(self, chart, coeffs):
        if isinstance(coeffs, dict):
            coeffs = [coeffs.get(v, chart.zero()) for v in chart.vars]
        self.chart = chart
        self.coeffs = tuple(
            chart.nf(c if isinstance(c, MultiPoly) else chart.constant(c)) for c in coeffs
        )
        for j, rel in enumerate(chart.relations):
            # the relation must be used unreduced here: nf(rel.poly) is 0
            if not self._apply_reduced(rel.poly).is_zero():
                raise ValueError(
                    f"derivation does not preserve relation {j}: {rel.poly}"
                )

    def coeff(self, name):
        return self.coeffs[self.chart.vars.index(name)]

    def _apply_reduced(self, f):
        out = self.chart.zero()
        for g, v in zip(self.coeffs, self.chart.vars):
            if not g.is_zero():
                out = out + g * f.partial(v)
        return self.chart.nf(out)

    def apply(self, f):
        return self._apply_reduced(self.chart.nf(f))

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def scale(self, g):
        if not isinstance(g, MultiPoly):
            g = self.chart.constant(g)
        return Derivation(self.chart, [c * g for c in self.coeffs])

    def __rmul__(self, g):
        return self.scale(g)

    def __add__(self, other):
        if not isinstance(other, Derivation) or other.chart != self.chart:
            raise TypeError("derivations on different charts")
        return Derivation(self.chart, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.chart == other.chart and self.coeffs == other.coeffs

    def __str__(self):
        parts = []
        for g, v in zip(self.coeffs, self.chart.vars):
            if not g.is_zero():
                gs = str(g)
                if " " in gs:
                    gs = f"({gs})"
                parts.append(f"d/d{v}" if gs == "1" else f"{gs}*d/d{v}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"<derivation {self} on {self.chart!r}>"


def bracket(D, E):
    """[D, E], again a derivation on the same chart."""
    if D.chart != E.chart:
        raise TypeError("derivations on different charts")
    return Derivation(
        D.chart,
        [D.apply(e) - E.apply(d) for d, e in zip(D.coeffs, E.coeffs)],
    )


def p_power(D):
    """D^[p]: its images are D applied p-1 times to the images of D."""
    p = D.chart.domain.p
    imgs = []
    for g in D.coeffs:
        h = g
        for _ in range(p - 1):
            h = D._apply_reduced(h)
        imgs.append(h)
    return Derivation(D.chart, imgs)


def pairing(form, D):
    """<form, D> = sum of form coefficients times variable images, reduced.

    The dt coefficient never contributes because derivations kill t.
    """
    if form.chart != D.chart:
        raise TypeError("form and derivation on different charts")
    out = D.chart.zero()
    for a, g in zip(form.comps, D.coeffs):
        out = out + a * g
    return D.chart.nf(out)


def pairing_checks(form, D):
    """Pair the form with D and with D^[p]; zero values mean compatibility."""
    return {"D": pairing(form, D), "D^[p]": pairing(form, p_power(D))}


def _try_exact_divide(chart, num, den):
    """num/den in the chart algebra, or None; any answer is verified."""
    num, den = chart.nf(num), chart.nf(den)
    if den.is_zero():
        return None
    if num.is_zero():
        return chart.zero()
    q = _free_divide(num, den)
    if q is None:
        bound = num.degree() + sum(r.degree for r in chart.relations) + 2
        monos = chart.reduced_monomials(bound)
        vectors = [chart.nf(MultiPoly(chart.domain, chart.vars, {e: chart.domain.one()}) * den).terms for e in monos]
        combo = solve_span(vectors, num.terms)
        if combo is None:
            return None
        q = chart.zero()
        for i, c in combo.items():
            q = q + MultiPoly(chart.domain, chart.vars, {monos[i]: _as_coeff(chart.domain, c)})
    if not chart.nf(num - q * den).is_zero():
        return None
    return chart.nf(q)


def _free_divide(num, den):
    """Exact single-divisor division in the free ring, grlex leading terms."""
    ed, cd = den.leading()
    r = num
    q = MultiPoly.zero(num.domain, num.vars)
    while not r.is_zero():
        er, cr = r.leading()
        if any(a < b for a, b in zip(er, ed)):
            return None
        e = tuple(a - b for a, b in zip(er, ed))
        term = MultiPoly(num.domain, num.vars, {e: cr / cd})
        q = q + term
        r = r - term * den
    return q


def _as_coeff(domain, c):
    return domain.from_int(c) if isinstance(c, int) else c


def is_p_closed_rank1(D):
    """(True, h) with D^[p] = h*D verified on every image, else (False, None)."""
    chart = D.chart
    Dp = p_power(D)
    g, G = D.coeffs, Dp.coeffs
    n = len(g)
    for i in range(n):
        for j in range(i + 1, n):
            if not chart.nf(g[i] * G[j] - g[j] * G[i]).is_zero():
                return False, None
    if all(c.is_zero() for c in G):
        return True, chart.zero()
    pivot = next((i for i in range(n) if not g[i].is_zero()), None)
    if pivot is None:
        return False, None
    h = _try_exact_divide(chart, G[pivot], g[pivot])
    if h is None:
        return False, None
    for k in range(n):
        if not chart.nf(G[k] - h * g[k]).is_zero():
            return False, None
    return True, h


def kernel_of_form(form):
    """The rank-1 kernel derivation of a 1-form with two relative coordinates.

    Eliminated coordinates get the images the relations force on them. The
    result is normalized: common univariate content is removed and the first
    nonzero image is scaled to leading coefficient 1.
    """
    chart = form.chart
    red = reduce_form(form)
    if red.unreduced_at:
        raise ValueError(
            f"relations {red.unreduced_at} have no unit partial; kernel is not defined here"
        )
    subs, _ = _elimination(chart)
    rel_idx = [i for i in range(len(chart.vars)) if i not in subs]
    if len(rel_idx) != 2:
        raise ValueError(
            f"need exactly two relative coordinates, found {len(rel_idx)}"
        )
    i, j = rel_idx
    a, b = red.comps[i], red.comps[j]
    if a.is_zero() and b.is_zero():
        raise ValueError("the zero form has no rank-1 kernel")
    img_i, img_j = b, -a
    used = set()
    for c in (img_i, img_j):
        for e in c.terms:
            used.update(k for k, x in enumerate(e) if x)
    if len(used) <= 1:
        ga, gb = img_i, img_j
        if used:
            (k,) = used
            from .algebra import uni_gcd, uni_divmod

            name = chart.vars[k]
            to_uni = lambda f: MultiPoly(
                chart.domain, (name,), {(e[k],): c for e, c in f.terms.items()}
            )
            from_uni = lambda f: MultiPoly(
                chart.domain,
                chart.vars,
                {
                    tuple(d[0] if m == k else 0 for m in range(len(chart.vars))): c
                    for d, c in f.terms.items()
                },
            )
            gcd = uni_gcd(to_uni(img_i), to_uni(img_j))
            if gcd.degree() > 0:
                ga = from_uni(uni_divmod(to_uni(img_i), gcd)[0])
                gb = from_uni(uni_divmod(to_uni(img_j), gcd)[0])
        img_i, img_j = ga, gb
    first = img_i if not img_i.is_zero() else img_j
    _, lead = first.leading()
    inv = lead.inverse()
    img_i = img_i.map_coeffs(lambda c: c * inv)
    img_j = img_j.map_coeffs(lambda c: c * inv)
    imgs = {chart.vars[i]: img_i, chart.vars[j]: img_j}
    for elim, (coeffs, _tco) in subs.items():
        img = chart.zero()
        for k, pk in coeffs.items():
            img = img + pk * imgs[chart.vars[k]]
        imgs[chart.vars[elim]] = chart.nf(img)
    return Derivation(chart, imgs)


def ring_of_constants(D, max_total=None):
    """Basis of {f reduced, deg <= bound : D(f) = 0}, ascending leading terms.

    Default bound is 3p, enough to see x^p for every variable of a chart
    whose designated degrees stay below 2p.
    """
    chart = D.chart
    bound = 3 * chart.domain.p if max_total is None else max_total
    monos = chart.reduced_monomials(bound)
    vectors = []
    for e in monos:
        m = MultiPoly(chart.domain, chart.vars, {e: chart.domain.one()})
        vectors.append(D._apply_reduced(m).terms)
    out = []
    for rel in kernel_basis(vectors):
        terms = {monos[i]: _as_coeff(chart.domain, c) for i, c in rel.items()}
        out.append(MultiPoly(chart.domain, chart.vars, terms))
    return out


def _generator_monomials(chart, gens, bound):
    """(exponents, reduced product) for gens-monomials discovered by closure.

    Breadth-first: extend a product by one generator at a time, keep it when
    its reduced degree still fits the bound, and only extend it further when
    it enlarged the span (a dependent product is a linear combination of kept
    ones, so its multiples add nothing to the span). Dependent products stay
    in the output; they are exactly where relations come from.
    """
    zero_exps = (0,) * len(gens)
    out = [(zero_exps, chart.one())]
    tracker = SpanTracker()
    tracker.insert(chart.one().terms, zero_exps)
    seen = {zero_exps}
    work = [(zero_exps, chart.one())]
    while work:
        exps, poly = work.pop(0)
        for k, g in enumerate(gens):
            e2 = exps[:k] + (exps[k] + 1,) + exps[k + 1 :]
            if e2 in seen:
                continue
            seen.add(e2)
            prod = chart.nf(poly * g)
            if prod.degree() > bound:
                continue
            out.append((e2, prod))
            if tracker.insert(prod.terms, e2) is None:
                work.append((e2, prod))
    return out


class FactorizationReport:
    """Outcome of presenting the constants of a derivation as a chart.

    generators: list of (name, expression on the source chart)
    quotient:   ChartAlgebra on the generator names, or None when the found
                relations are not triangular monic
    relations:  every linear dependence among generator monomials within the
                degree bound, as polynomials in the generator names
    power_certificates: per source variable, x^p written in the generators
    generated_up_to_bound: True when every bounded constant lies in the span
    """

    __slots__ = (
        "source",
        "generators",
        "quotient",
        "relations",
        "power_certificates",
        "generated_up_to_bound",
        "degree_bound",
    )

    def __init__(self, source, generators, quotient, relations, certs, generated, bound):
        self.source = source
        self.generators = generators
        self.quotient = quotient
        self.relations = relations
        self.power_certificates = certs
        self.generated_up_to_bound = generated
        self.degree_bound = bound

    def image_of(self, name):
        for n, g in self.generators:
            if n == name:
                return g
        raise KeyError(name)

    def to_json(self):
        return {
            "generators": [{"name": n, "expression": str(g)} for n, g in self.generators],
            "relations": [str(r) for r in self.relations],
            "quotient_chart": (
                None
                if self.quotient is None
                else {
                    "vars": list(self.quotient.vars),
                    "relations": [
                        {"poly": str(r.poly), "monic_in": r.var}
                        for r in self.quotient.relations
                    ],
                }
            ),
            "power_certificates": {
                v: str(c) for v, c in self.power_certificates.items()
            },
            "generated_up_to_bound": self.generated_up_to_bound,
            "degree_bound": self.degree_bound,
        }


def frobenius_factorization_check(D, max_total=None):
    """Present the constants of D as a quotient chart with certificates.

    Raises DegreeBoundTooSmall when some x^p cannot be written in the
    generators within the bound; retry with a larger max_total.
    """
    chart = D.chart
    p = chart.domain.p
    bound = 3 * p if max_total is None else max_total
    constants = ring_of_constants(D, bound)

    gens = []
    tracker = SpanTracker()
    tracker.insert(chart.one().terms, ())
    for cand in constants:
        if cand.degree() == 0:
            continue
        residual, _ = tracker.reduce(cand.terms)
        if not residual:
            continue
        gens.append(cand)
        tracker = SpanTracker()
        for exps, poly in _generator_monomials(chart, gens, bound):
            tracker.insert(poly.terms, exps)
    generated = all(not tracker.reduce(c.terms)[0] for c in constants)

    names = []
    counter = 1
    for g in gens:
        name = None
        if len(g.terms) == 1:
            ((e, c),) = g.terms.items()
            if sum(e) == 1 and c == chart.domain.one():
                name = chart.vars[e.index(1)]
        if name is None or name in names:
            while f"w{counter}" in names or f"w{counter}" in chart.vars:
                counter += 1
            name = f"w{counter}"
            counter += 1
        names.append(name)
    names = tuple(names)

    products = _generator_monomials(chart, gens, bound)
    labels = [exps for exps, _ in products]
    vectors = [poly.terms for _, poly in products]

    relations = []
    for rel in kernel_basis(vectors):
        terms = {labels[i]: _as_coeff(chart.domain, c) for i, c in rel.items()}
        relations.append(MultiPoly(chart.domain, names, terms))

    certs = {}
    for v in chart.vars:
        target = chart.nf(chart.var(v) ** p)
        combo = solve_span(vectors, target.terms)
        if combo is None:
            raise DegreeBoundTooSmall(
                f"{v}^{p} is not a combination of generator monomials of weight <= {bound}"
            )
        terms = {labels[i]: _as_coeff(chart.domain, c) for i, c in combo.items()}
        certs[v] = MultiPoly(chart.domain, names, terms)

    quotient = _chart_from_relations(chart, names, relations)

    return FactorizationReport(
        chart,
        list(zip(names, gens)),
        quotient,
        relations,
        certs,
        generated,
        bound,
    )


def _chart_from_relations(chart, names, relations):
    """ChartAlgebra on the generator names, or None if not triangular monic."""
    if not relations:
        return ChartAlgebra(chart.domain, names, ())
    ordered = sorted(relations, key=lambda r: (r.degree(), sorted(r.terms)))
    chosen = {}
    for r in ordered:
        for v in names:
            if v in chosen:
                continue
            if r.monic_in(v) and r.deg_in(v) >= 1:
                chosen[v] = r
                break
    if not chosen:
        return None
    try:
        quotient = ChartAlgebra(
            chart.domain, names, [(r, v) for v, r in chosen.items()]
        )
        for r in relations:
            if not quotient.nf(r).is_zero():
                return None
    except (ValueError, RuntimeError):
        return None
    return quotient
