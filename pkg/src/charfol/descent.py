"""Descent of coefficients from K = F_q(t) into K^p.

A chart over K whose relation coefficients are p-th powers is the base change
of a chart with rooted coefficients; this module checks membership in K^p,
extracts p-th roots, and descends algebras and derivations, with the
cross-path uniqueness checks built in.
"""

from . import gf
from .algebra import MultiPoly, RatFunc, FunField, ChartAlgebra, Relation


class NotAPthPower(ValueError):
    pass


class NoDescent(ValueError):
    pass


class NoDerivationDescent(ValueError):
    pass


def in_Kp(r):
    """Membership in K^p by exponent residues of the reduced representative.

    F_q is perfect, so a reduced fraction is a p-th power exactly when both
    numerator and denominator have all exponents divisible by p. Independent
    of ratfunc_derivative on purpose; the two are cross-checked in tests.
    """
    p = r.field.p
    return all(k % p == 0 for (k,) in r.num.terms) and all(
        k % p == 0 for (k,) in r.den.terms
    )


def _uni_pth_root(poly):
    p = poly.domain.p
    terms = {}
    for (k,), c in poly.terms.items():
        if k % p:
            raise NotAPthPower(f"exponent {k} in {poly} is not divisible by {p}")
        terms[(k // p,)] = gf.pth_root(c)
    return MultiPoly(poly.domain, poly.vars, terms)


def pth_root_K(r):
    """The unique s in K with s^p = r; NotAPthPower when r is not in K^p."""
    s = RatFunc(_uni_pth_root(r.num), _uni_pth_root(r.den))
    if s ** r.field.p != r:
        raise AssertionError("p-th root postcondition failed")
    return s


def frobenius_K(r):
    """r^(p) computed structurally: t -> t^p with coefficient Frobenius."""
    p = r.field.p

    def expand(poly):
        return MultiPoly(
            poly.domain,
            poly.vars,
            {(k * p,): gf.frobenius(c) for (k,), c in poly.terms.items()},
        )

    return RatFunc(expand(r.num), expand(r.den))


def multipoly_pth_root(f, coeff_root):
    """Root a polynomial that is a p-th power: exponents /p, coefficients rooted."""
    p = f.domain.char
    terms = {}
    for e, c in f.terms.items():
        if any(k % p for k in e):
            raise NotAPthPower(f"monomial exponents {e} not divisible by {p}")
        terms[tuple(k // p for k in e)] = coeff_root(c)
    return MultiPoly(f.domain, f.vars, terms)


class ModelPair:
    """A chart over K with p-th-power coefficients and its rooted model."""

    __slots__ = ("original", "model", "provenance")

    def __init__(self, original, model, provenance):
        self.original = original
        self.model = model
        self.provenance = provenance

    def to_json(self):
        def chart_dict(chart):
            return {
                "vars": list(chart.vars),
                "relations": [
                    {"poly": str(rel.poly), "monic_in": rel.var}
                    for rel in chart.relations
                ],
            }

        return {
            "original": chart_dict(self.original),
            "model": chart_dict(self.model),
            "provenance": self.provenance,
        }

    def __repr__(self):
        return f"<model pair {self.model!r} of {self.original!r}>"


def descend_algebra(A):
    """Root every relation coefficient; NoDescent lists the obstructions.

    Two independent code paths compute the rooted relation (coefficientwise
    root vs whole-polynomial root after scaling exponents by p); they must
    agree or the descent aborts.
    """
    if not isinstance(A.domain, FunField):
        raise ValueError("descent applies to charts over F_q(t)")
    p = A.domain.p
    offenders = []
    for j, rel in enumerate(A.relations):
        for e, c in sorted(rel.poly.terms.items()):
            if not in_Kp(c):
                offenders.append(f"relation {j}: coefficient {c} of monomial {e}")
    if offenders:
        raise NoDescent("coefficients outside K^p: " + "; ".join(offenders))

    rooted = []
    provenance = []
    for rel in A.relations:
        tilde = rel.poly.map_coeffs(pth_root_K)
        # independent path: scale all exponents by p (an honest p-th power),
        # then take the polynomial p-th root
        scaled = MultiPoly(
            A.domain, A.vars, {tuple(k * p for k in e): c for e, c in rel.poly.terms.items()}
        )
        tilde2 = multipoly_pth_root(scaled, pth_root_K)
        if tilde != tilde2:
            raise AssertionError("descent paths disagree; descent is not unique")
        rooted.append((tilde, rel.var))
        provenance.append(
            {
                str(e): {"coefficient": str(c), "root": str(tilde.terms[e])}
                for e, c in sorted(rel.poly.terms.items())
            }
        )
    model = ChartAlgebra(A.domain, A.vars, rooted)
    _roundtrip_check(A, model)
    return ModelPair(A, model, provenance)


def _roundtrip_check(A, model):
    # base change along t -> t^p (with coefficient Frobenius) recovers A
    for rel, mrel in zip(A.relations, model.relations):
        back = mrel.poly.map_coeffs(frobenius_K)
        if back != rel.poly:
            raise AssertionError("base change round trip failed to recover the chart")


def descend_derivation(D, pair):
    """Root the K-coefficients of D; the result must preserve the model ideal."""
    if D.chart != pair.original:
        raise ValueError("derivation does not live on the pair's original chart")
    new_coeffs = []
    for name, g in zip(D.chart.vars, D.coeffs):
        bad = [c for c in g.terms.values() if not in_Kp(c)]
        if bad:
            raise NoDerivationDescent(
                f"coefficient of d/d{name} has entries outside K^p: "
                + ", ".join(str(c) for c in bad)
            )
        new_coeffs.append(pair.model.nf(g.map_coeffs(pth_root_K)))
    return type(D)(pair.model, dict(zip(D.chart.vars, new_coeffs)))
