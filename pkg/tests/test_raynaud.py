from fractions import Fraction

import pytest

from charfol.raynaud import (
    DivClass,
    FormulaMismatch,
    HypothesisViolated,
    LatticeMismatch,
    NonPositive,
    SurfaceLattice,
    ample_class_A,
    global_generation_numerics,
    intersect,
    verify_raynaud_formulas,
    verify_ruled_formulas,
)

PARAMS = [(3, 2, 3), (5, 2, 7)]


def test_lattice_products():
    lat = SurfaceLattice("ruled", 3, 2, 3)
    H, F = lat.section(), lat.fiber()
    assert intersect(H, H) == Fraction(6)  # degL = d*degN
    assert intersect(H, F) == Fraction(1)
    assert intersect(F, F) == Fraction(0)


def test_lattice_rejects_mixed_classes():
    a = SurfaceLattice("ruled", 3, 2, 3).section()
    b = SurfaceLattice("raynaud", 3, 2, 3).section()
    with pytest.raises(LatticeMismatch):
        intersect(a, b)


def test_genus_consistency_guard():
    # 2g-2 = 18 for (3,2) but p*d*degN = 24: the lattice refuses to exist
    with pytest.raises(FormulaMismatch):
        SurfaceLattice("raynaud", 3, 2, 4)


def test_ruled_ledger():
    for p, d, degn in PARAMS:
        rep = verify_ruled_formulas(p, d, degn)
        assert rep["ok"]
        assert all(c["pass"] for c in rep["checks"])


def test_raynaud_ledger_and_fiber_invariants():
    rep = verify_raynaud_formulas(3, 2, 3)
    assert rep["ok"]
    assert rep["deg_K_F"] == 0
    assert rep["fiber_arithmetic_genus"] == 1
    rep = verify_raynaud_formulas(5, 2, 7)
    assert rep["ok"]
    assert rep["deg_K_F"] == 2
    assert rep["fiber_arithmetic_genus"] == 2


def test_sigma_section_disjoint():
    for p, d, degn in PARAMS:
        rep = verify_raynaud_formulas(p, d, degn)
        by_name = {c["name"]: c for c in rep["checks"]}
        assert by_name["Sigma, T disjoint"]["pass"]


def test_hypothesis_violated():
    with pytest.raises(HypothesisViolated):
        verify_raynaud_formulas(5, 4, 1)


def test_ample_positivity():
    A, rep = ample_class_A(3, 2, 3)
    assert rep["positivity"] == {"A^2": "9", "A.T": "6", "A.F": "1", "A.Sigma": "9"}
    A, rep = ample_class_A(5, 2, 7)
    assert rep["positivity"]["A^2"] == "21"
    assert rep["positivity"]["A.Sigma"] == "35"


def test_d_equal_1_rejected():
    # A.F = d-1 degenerates to 0
    with pytest.raises(NonPositive):
        ample_class_A(3, 1, 3)


def test_pA_decompositions_coincide():
    for p, d, degn in PARAMS:
        rep = global_generation_numerics(p, d, degn)
        assert rep["ok"]
        names = [c["name"] for c in rep["checks"]]
        assert "p*A = p(d-1)*T + p*degN*F" in names
        assert "p*A = (d-1)*Sigma + p*d*degN*F" in names
        assert len(rep["assumptions_passed_through"]) == 3


def test_exact_rational_arithmetic():
    lat = SurfaceLattice("raynaud", 3, 2, 3)
    half = Fraction(1, 2) * lat.section()
    assert intersect(half, lat.fiber()) == Fraction(1, 2)
