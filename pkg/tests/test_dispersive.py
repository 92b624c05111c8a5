import random

import pytest
import sympy as sp

from gwhier import dispersive as dsp
from gwhier.dispersive import eps
from gwhier.genus0 import build_prepotential, closed_density
from gwhier.jets import E, L, Pv, dx, is_zero, jet, lam, li, v, w

v1, v2 = jet("v", 1), jet("v", 2)
w1, w2, w3 = jet("w", 1), jet("w", 2), jet("w", 3)


def test_lattice_density_leading_term():
    h = dsp.ablowitz_ladik_density(0)
    assert sp.expand(h[0] - (E - 1) * (Pv + 1 / Pv) / 2) == 0


def test_lattice_density_depth_stability():
    # raising the internal truncation depth must not move the coefficients
    a = dsp.ablowitz_ladik_density(2)
    b = dsp.ablowitz_ladik_density(2, depth=4)
    assert set(a) == set(b)
    for k in a:
        assert sp.cancel(a[k] - b[k]) == 0


def test_lattice_density_errors():
    with pytest.raises(ValueError):
        dsp.ablowitz_ladik_density(3)
    with pytest.raises(ValueError):
        dsp.ablowitz_ladik_density(10)
    with pytest.raises(ValueError):
        dsp.ablowitz_ladik_density(4, depth=2)


def test_involution_stock():
    for f in dsp.involution_stock():
        assert dsp.is_involutive(f)
    assert not dsp.is_involutive(v ** 2)
    rng = random.Random(3)
    assert dsp.is_involutive(dsp.random_involutive(rng))


def test_dop_slots_and_basis():
    assert dsp.dop_slots(2) == [(2, 0), (3, 0), (2, 1)]
    assert len(dsp.dop_basis(2)) == 3
    assert len(dsp.dop_basis(3)) == 6
    assert len(dsp.dop_basis(4)) == 10
    with pytest.raises(ValueError):
        dsp.dop_basis(5)
    with pytest.raises(ValueError):
        dsp.dop_basis(2, l=1, m=0)
    with pytest.raises(ValueError):
        dsp.dop_basis(2, l=2)


def test_printed_d2_involutive_exact():
    D2 = dsp.DOperator(dsp.printed_d2())
    assert dsp.dop_verify(D2, 2, mode="exact")


def test_solved_d2_matches_printed():
    solved = dsp.dop_solve(2)
    printed = dsp.DOperator(dsp.printed_d2())
    assert dsp.dop_equiv(solved, printed, 2, samples=4, seed=11)


def test_recorded_d4_structure():
    D4 = dsp.recorded_d4()
    assert set(D4.terms) == {2, 4}
    assert set(D4.terms[4]) == set(dsp.dop_slots(4))
    # the displayed closed forms sit in the (2,0) and (3,0) slots
    assert sp.cancel(D4.terms[4][(2, 0)] - dsp.printed_b4_vv()) == 0
    assert sp.cancel(D4.terms[4][(3, 0)] - dsp.printed_b4_vvv()) == 0


def test_recorded_d4_jet_grading():
    from gwhier.jets import is_homogeneous
    D4 = dsp.recorded_d4()
    for k, slots in D4.terms.items():
        for (l, m), b in slots.items():
            assert is_homogeneous(sp.expand(b), k), (k, l, m)


def test_recorded_d4_involutive():
    D4 = dsp.recorded_d4()
    assert dsp.dop_verify(D4, 4, mode="exact")
    assert dsp.dop_verify(D4, 4, mode="numeric", samples=4, seed=5,
                          digits=64)


def test_dispersive_wave_correction():
    # w_tt along the Novikov-direction flow: the eps^2 correction is an
    # exact x-derivative with the displayed jet structure
    P = build_prepotential("Xk_antidiagonal", k=1)
    h = closed_density(P, "w", 0)
    D2 = dsp.DOperator(dsp.printed_d2())
    wave = dsp.dispersive_wave_tt(D2, h, order=2)
    lead = -lam ** 2 * dx(E / (1 - E) * w1)
    assert is_zero(sp.cancel(sp.together(wave.coeff(eps, 0) - lead)))
    inner = (E / (24 * (-1 + E) ** 4)) * (
        (1 + 4 * E + E ** 2) * lam ** 2 * w1 ** 3
        + (-2 + 2 * E ** 2) * (v1 ** 2 - 2 * lam ** 2 * w2) * w1
        - 2 * (-1 + E) ** 2 * (2 * v1 * v2 - lam ** 2 * w3))
    r = sp.cancel(sp.together(wave.coeff(eps, 2) - lam ** 2 * dx(inner)))
    assert r == 0


def test_quasimiura_rationalization_guard():
    with pytest.raises(AssertionError):
        dsp._rational_kernel(sp.log(jet("v", 1)))


def test_quasimiura_numeric():
    ok, worst = dsp.quasimiura_check(samples=3, digits=50, seed=2,
                                     tol=1e-25)
    assert ok, worst


def test_f1_density_form():
    f1 = dsp.f1_tilde()
    got = sp.expand(f1 - (sp.log(v1 ** 2 + lam ** 2 * E / (1 - E)
                                 * w1 ** 2) / 24 - L / 12))
    assert got == 0
    assert sp.expand(dsp.f1_density() - f1 + w / 24) == 0


def test_poisson_density_antisymmetry_mod_dx():
    from gwhier.jets import variational
    g1 = v * w
    g2 = v ** 2 - 2 * lam ** 2 * li(2)
    br = sp.expand(dsp.poisson_density(g1, g2) + dsp.poisson_density(g2, g1))
    for fld in ("v", "w"):
        assert is_zero(sp.cancel(sp.together(variational(br, fld))))


@pytest.mark.slow
def test_dop_solve_order4_regenerates_recorded():
    solved = dsp.dop_solve(4, seed_printed=True)
    D4 = dsp.recorded_d4()
    for slot in dsp.dop_slots(4):
        assert sp.cancel(sp.together(solved.terms[4][slot]
                                     - D4.terms[4][slot])) == 0, slot
