import random

import pytest

from charfol import gf
from charfol.algebra import ChartAlgebra, FunField, MultiPoly, parse_poly
from charfol.differentials import OneForm
from charfol.foliation import (
    Derivation,
    bracket,
    frobenius_factorization_check,
    is_p_closed_rank1,
    kernel_of_form,
    p_power,
    pairing,
    pairing_checks,
    ring_of_constants,
)

F3 = gf.Field(3)
K = FunField(F3)


def raynaud_chart(p=3, d=2, K=K):
    vars = ("x", "y", "z")
    return ChartAlgebra(K, vars, [(parse_poly(f"z^{d} - y^{p} - x", vars, K), "z")])


def test_derivation_must_preserve_relations():
    C = raynaud_chart()
    Derivation(C, [C.zero(), C.one(), C.zero()])  # d/dy kills z^2 - y^3 - x
    with pytest.raises(ValueError):
        Derivation(C, [C.one(), C.zero(), C.zero()])  # d/dx does not


def test_apply_is_leibniz():
    rng = random.Random(41)
    C = ChartAlgebra(K, ("x", "y"), [])
    D = Derivation(C, [C.poly("y"), C.poly("x^2")])

    def rand_poly():
        terms = {}
        for _ in range(4):
            e = (rng.randrange(3), rng.randrange(3))
            terms[e] = K.from_int(rng.randrange(1, 3))
        return MultiPoly(K, ("x", "y"), terms)

    for _ in range(30):
        f, g = rand_poly(), rand_poly()
        assert D.apply(f * g) == f * D.apply(g) + g * D.apply(f)


def test_bracket_antisymmetry_on_plane():
    C = ChartAlgebra(K, ("x", "y"), [])
    D = Derivation(C, [C.poly("y"), C.one()])
    E = Derivation(C, [C.one(), C.poly("x")])
    B = bracket(D, E)
    B2 = bracket(E, D)
    assert all((a + b).is_zero() for a, b in zip(B.coeffs, B2.coeffs))


def test_p_power_matches_literal_iteration():
    rng = random.Random(42)
    for p in (3, 5):
        field = gf.Field(p)
        Kp = FunField(field)
        C = ChartAlgebra(Kp, ("x", "y"), [])
        for _ in range(30):
            coeffs = []
            for _ in range(2):
                terms = {}
                for _ in range(3):
                    e = (rng.randrange(2), rng.randrange(2))
                    terms[e] = Kp.from_int(rng.randrange(p))
                coeffs.append(MultiPoly(Kp, ("x", "y"), terms))
            D = Derivation(C, coeffs)
            Dp = p_power(D)
            for v in C.vars:
                lit = C.var(v)
                for _ in range(p):
                    lit = D.apply(lit)
                assert Dp.apply(C.var(v)) == lit


def test_p_closed_examples():
    C = ChartAlgebra(K, ("x", "y"), [])
    Dy = Derivation(C, [C.zero(), C.one()])
    closed, h = is_p_closed_rank1(Dy)
    assert closed and h is not None and h.is_zero()

    Dx = Derivation(C, [C.poly("x"), C.zero()])  # x d/dx, D^[p] = D
    closed, h = is_p_closed_rank1(Dx)
    assert closed
    assert h == C.one()

    # x d/dx + d/dy has D^[p] = x d/dx, not proportional
    D = Derivation(C, [C.poly("x"), C.one()])
    closed, _ = is_p_closed_rank1(D)
    assert not closed


def test_pairing_and_checks():
    C = raynaud_chart()
    dz = OneForm.d(C, C.var("z"))
    D = kernel_of_form(dz)
    assert pairing(dz, D).is_zero()
    values = pairing_checks(dz, D)
    assert values["D"].is_zero() and values["D^[p]"].is_zero()


def test_kernel_of_dz_is_dy():
    C = raynaud_chart()
    D = kernel_of_form(OneForm.d(C, C.var("z")))
    assert [str(c) for c in D.coeffs] == ["0", "1", "0"]


def test_kernel_content_removed():
    C = ChartAlgebra(K, ("x", "y"), [])
    w = C.poly("x^2 + x") * OneForm.d(C, C.var("x")) + C.poly("2*x^2 + 2*x") * OneForm.d(
        C, C.var("y")
    )
    D = kernel_of_form(w)
    # (b, -a) = (x^2+x)(2, -1), content removed, then scaled to lead with 1
    assert [str(c) for c in D.coeffs] == ["1", "1"]
    assert pairing(w, D).is_zero()


def test_ring_of_constants_plane():
    C = ChartAlgebra(K, ("x", "y"), [])
    Dy = Derivation(C, [C.zero(), C.one()])
    basis = ring_of_constants(Dy, max_total=4)
    assert all(Dy.apply(b).is_zero() for b in basis)
    strs = {str(b) for b in basis}
    assert "y^3" in strs and "y" not in strs


def test_factorization_plane():
    C = ChartAlgebra(K, ("x", "y"), [])
    Dy = Derivation(C, [C.zero(), C.one()])
    rep = frobenius_factorization_check(Dy)
    assert rep.generated_up_to_bound
    names = [n for n, _ in rep.generators]
    assert names == ["x", "w1"]
    assert rep.quotient is not None and not rep.quotient.relations
    assert str(rep.power_certificates["x"]) == "x^3"
    assert str(rep.power_certificates["y"]) == "w1"
    for _, g in rep.generators:
        assert Dy.apply(g).is_zero()


def test_factorization_raynaud_chart():
    C = raynaud_chart()
    D = kernel_of_form(OneForm.d(C, C.var("z")))
    rep = frobenius_factorization_check(D)
    assert [n for n, _ in rep.generators] == ["z", "x"]
    assert rep.quotient is not None and not rep.quotient.relations
    certs = {v: str(c) for v, c in rep.power_certificates.items()}
    assert certs == {"x": "x^3", "y": "z^2 + 2*x", "z": "z^3"}


def test_factorization_finds_quotient_relation():
    vars = ("x", "z")
    C = ChartAlgebra(K, vars, [(parse_poly("z^2 - x^3", vars, K), "z")])
    Dy_free = Derivation(C, [C.zero(), C.zero()])
    # the zero derivation has everything constant; the quotient re-finds the cusp
    rep = frobenius_factorization_check(Dy_free)
    assert rep.quotient is not None
    rels = [str(r.poly) for r in rep.quotient.relations]
    assert rels == ["x^3 + 2*z^2"]


def test_scaled_kernel_still_pairs_to_zero():
    C = raynaud_chart(5, 2, FunField(gf.Field(5)))
    dz = OneForm.d(C, C.var("z"))
    D = kernel_of_form(dz)
    assert pairing(dz, D).is_zero()
    closed, _ = is_p_closed_rank1(D)
    assert closed
