import random

import pytest

from charfol import gf
from charfol.algebra import ChartAlgebra, FunField, parse_poly
from charfol.differentials import OneForm, reduce_form
from charfol.foliation import Derivation, kernel_of_form
from charfol.series import LaurentSeries
from charfol.adelic import (
    LocalPoint,
    NoLift,
    NotOnVariety,
    QuotientPresentation,
    UnsupportedPresentation,
    lift_point,
    make_point,
    pullback_form,
    random_local_point,
    solve_coordinate,
    star_condition,
    verify_equivalence,
)

F3 = gf.Field(3)
K = FunField(F3)
N = 64


def tango_chart(K=K):
    vars = ("x", "y")
    return ChartAlgebra(K, vars, [(parse_poly("y^6 - y - x^5", vars, K), "y")])


def raynaud_chart(K=K, p=3, d=2):
    vars = ("x", "y", "z")
    return ChartAlgebra(K, vars, [(parse_poly(f"z^{d} - y^{p} - x", vars, K), "z")])


def test_make_point_by_hensel():
    C = tango_chart()
    xt = LaurentSeries.t_power(F3, 1, N)
    coords = solve_coordinate(C, {"x": xt}, "y", N, initial=0)
    pt = make_point(C, coords, N)
    # y = -x^5 + higher: leading term 2t^5
    assert pt.coord("y").val() == 5
    assert pt.coord("y").coeff(5) == F3.from_int(2)


def test_make_point_origin():
    C = tango_chart()
    z = LaurentSeries.zero(F3, N)
    make_point(C, {"x": z, "y": z}, N)


def test_make_point_rejects_off_curve():
    F9 = gf.Field(3, 2)
    K9 = FunField(F9)
    C = tango_chart(K9)
    z = LaurentSeries.zero(F9, N)
    u = LaurentSeries.constant(F9, F9.gen(), N)
    with pytest.raises(NotOnVariety) as info:
        make_point(C, {"x": z, "y": u}, N)
    assert info.value.valuation == 0


def test_solve_coordinate_searches_residue():
    C = tango_chart()
    xt = LaurentSeries.t_power(F3, 1, N)
    coords = solve_coordinate(C, {"x": xt}, "y", N)
    make_point(C, coords, N)


def test_pullback_dx_oracles():
    A1 = ChartAlgebra(K, ("x",), [])
    dx = OneForm.d(A1, A1.var("x"))
    p1 = make_point(A1, {"x": LaurentSeries.t_power(F3, 1, N)}, N)
    assert str(pullback_form(p1, dx)).startswith("1")
    p3 = make_point(A1, {"x": LaurentSeries.t_power(F3, 3, N)}, N)
    assert pullback_form(p3, dx).is_zero()


def test_pullback_matches_chain_rule():
    rng = random.Random(51)
    C = raynaud_chart()
    g = C.nf(C.poly("x*z + y^2"))
    dg = OneForm.d(C, g)
    from charfol.adelic import _converter

    for _ in range(10):
        pt = random_local_point(C, rng, N)
        lhs = pullback_form(pt, dg)
        rhs = g.evaluate(pt.coords, _converter(C, pt.prec)).derivative()
        assert not (lhs - rhs).nonzero_before(min(N // 2, lhs.prec, rhs.prec))


def test_pullback_of_reduced_form_agrees():
    rng = random.Random(52)
    C = raynaud_chart()
    dx = OneForm.d(C, C.var("x"))
    rdx = reduce_form(dx)
    assert str(rdx) == "2*z*dz"
    for _ in range(10):
        pt = random_local_point(C, rng, N)
        a = pullback_form(pt, dx)
        b = pullback_form(pt, rdx)
        assert not (a - b).nonzero_before(min(N // 2, a.prec, b.prec))


def test_star_condition():
    A1 = ChartAlgebra(K, ("x",), [])
    dx = OneForm.d(A1, A1.var("x"))
    p1 = make_point(A1, {"x": LaurentSeries.t_power(F3, 1, N)}, N)
    p3 = make_point(A1, {"x": LaurentSeries.t_power(F3, 3, N)}, N)
    assert star_condition(p1, [dx])
    assert not star_condition(p3, [dx])
    assert not star_condition(p1, [])


def test_presentation_frobenius_on_line():
    S = ChartAlgebra(K, ("u",), [])
    T = ChartAlgebra(K, ("x",), [])
    pres = QuotientPresentation(S, T, {"x": parse_poly("u^3", ("u",), K)})
    good = make_point(T, {"x": LaurentSeries.t_power(F3, 3, N)}, N)
    lifted = lift_point(good, pres)
    assert str(lifted.coord("u")).startswith("t ")
    bad = make_point(T, {"x": LaurentSeries.t_power(F3, 1, N)}, N)
    with pytest.raises(NoLift):
        lift_point(bad, pres)


def test_presentation_rejects_non_inseparable():
    S = ChartAlgebra(K, ("u",), [])
    T = ChartAlgebra(K, ("x",), [])
    with pytest.raises(UnsupportedPresentation):
        # u^2 generates only even powers; u^3 never appears
        QuotientPresentation(S, T, {"x": parse_poly("u^2", ("u",), K)})


def test_lift_on_raynaud_quotient():
    # phi: K[z_s, x_s] -> chart, z -> z_s^3, x -> x_s^3, y -> z_s^2 - x_s
    C = raynaud_chart()
    S = ChartAlgebra(K, ("z", "x"), [])
    images = {
        "x": parse_poly("x^3", ("z", "x"), K),
        "y": parse_poly("z^2 - x", ("z", "x"), K),
        "z": parse_poly("z^3", ("z", "x"), K),
    }
    pres = QuotientPresentation(S, C, images)
    zt = LaurentSeries.t_power(F3, 3, N)
    yt = LaurentSeries.t_power(F3, 1, N)
    xt = zt * zt - yt * yt * yt
    pt = make_point(C, {"x": xt, "y": yt, "z": zt}, N)
    lifted = lift_point(pt, pres)  # z = t^3 is a cube
    assert lifted.coord("z").val() == 1
    bad_z = LaurentSeries.t_power(F3, 1, N)
    bad_x = bad_z * bad_z - yt * yt * yt
    bad = make_point(C, {"x": bad_x, "y": yt, "z": bad_z}, N)
    with pytest.raises(NoLift):
        lift_point(bad, pres)


def test_random_points_live_on_chart_and_bias_works():
    rng = random.Random(53)
    C = raynaud_chart()
    cubes = 0
    for _ in range(40):
        pt = random_local_point(C, rng, N)
        assert isinstance(pt, LocalPoint)
        if pt.coord("z").pth_root() is not None:
            cubes += 1
    assert 5 < cubes < 35  # both sides of the dichotomy get traffic


def test_verify_equivalence_passes_with_unit_section():
    C = raynaud_chart()
    dz = OneForm.d(C, C.var("z"))
    D = kernel_of_form(dz)
    rep = verify_equivalence(C, D, [dz], trials=60, seed=11)
    assert rep["status"] == "pass"
    assert rep["counterexamples"] == []
    assert rep["buckets_ok"]
    assert rep["generation_basis"] == "unit-coefficient-section"


def test_verify_equivalence_inconclusive_paths():
    C = raynaud_chart()
    dz = OneForm.d(C, C.var("z"))
    D = kernel_of_form(dz)
    scaled = C.poly("2*z") * dz
    rep = verify_equivalence(C, D, [scaled], trials=20, seed=3)
    assert rep["status"] == "inconclusive"
    rep = verify_equivalence(C, D, [scaled], trials=20, seed=3, assert_generated=True)
    assert rep["status"] == "pass"
    assert rep["generation_basis"] == "asserted"
    rep = verify_equivalence(C, D, [], trials=20, seed=3)
    assert rep["status"] == "inconclusive"
    assert rep["trials"] == 0


def test_verify_equivalence_deterministic():
    C = ChartAlgebra(K, ("x", "y"), [])
    D = Derivation(C, [C.zero(), C.one()])
    dx = OneForm.d(C, C.var("x"))
    a = verify_equivalence(C, D, [dx], trials=40, seed=9)
    b = verify_equivalence(C, D, [dx], trials=40, seed=9)
    assert a == b


def test_verify_equivalence_verbose_log():
    C = ChartAlgebra(K, ("x", "y"), [])
    D = Derivation(C, [C.zero(), C.one()])
    dx = OneForm.d(C, C.var("x"))
    rep = verify_equivalence(C, D, [dx], trials=5, seed=1, verbose=True)
    assert len(rep["trial_log"]) == 5
