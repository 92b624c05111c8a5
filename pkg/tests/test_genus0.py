import pytest
import sympy as sp

from gwhier import genus0 as g0
from gwhier.jets import E, dx, is_zero, jet, lam, lam1, lam2, li, v, w
from gwhier.oracle import fg_closed_invariant
from gwhier.scalars import specialize

v1, w1 = jet("v", 1), jet("w", 1)


@pytest.fixture(scope="module")
def P():
    return g0.build_prepotential("conifold_general")


@pytest.fixture(scope="module")
def B(P):
    return g0.flat_basis(P, z_order=4, d_max=6)


def test_wdvv_all_prepotentials():
    for pid, k in (("conifold_general", 1), ("Xk_diagonal", 1),
                   ("Xk_antidiagonal", 2)):
        assert g0.check_wdvv(g0.build_prepotential(pid, k=k))


def test_metric_inverse(P):
    assert sp.simplify(P.eta * P.eta_inv - sp.eye(2)) == sp.zeros(2)


def test_specializations_are_consistent():
    Pg = g0.build_prepotential("conifold_general")
    Pd = g0.build_prepotential("Xk_diagonal")
    Pa = g0.build_prepotential("Xk_antidiagonal", k=1)
    assert sp.simplify(specialize(Pg.F0, "diagonal") - Pd.F0) == 0
    assert sp.simplify(specialize(Pg.F0, "antidiagonal") - Pa.F0) == 0


def test_etrunc():
    x = 1 + 3 * E + v * E ** 2 + E ** 5
    assert g0.etrunc(x, 2) == 1 + 3 * E + v * E ** 2
    assert g0.is_zero_mod_E(E ** 4 - E ** 7, 3)


def _eseries(expr, d_max):
    """Resum closed-form transcendentals (Li_j, L, 1/(1-E)) into a
    polynomial in E mod E^(d_max+1)."""
    from gwhier.jets import L
    subs = {li(j): sum(E ** d / sp.Integer(d) ** j
                       for d in range(1, d_max + 1)) for j in (2, 3)}
    subs[L] = -sum(E ** d / sp.Integer(d) for d in range(1, d_max + 1))
    expr = sp.cancel(expr).subs(subs)
    return sp.expand(sp.series(expr, E, 0, d_max + 1).removeO())


def test_closed_vs_series_densities(B):
    # the two independent constructions of h_{alpha,p} agree mod E^(d+1)
    for alpha in ("v", "w"):
        for p in (0,):
            closed = _eseries(g0.closed_density(B.P, alpha, p), B.d_max)
            series = B.density(alpha, p)
            assert g0.is_zero_mod_E(sp.expand(closed - series), B.d_max), \
                (alpha, p)


def test_closed_density_table_bounds(P):
    with pytest.raises(KeyError):
        g0.closed_density(P, "v", 1)
    Pa = g0.build_prepotential("Xk_antidiagonal", k=1)
    # the anti-diagonal table extends one level further
    g0.closed_density(Pa, "v", 1)
    g0.closed_density(Pa, "w", 1)


def test_principal_flow_closed_vs_series(B):
    for alpha in ("v", "w"):
        fc = g0.principal_flow(B, alpha, 0, closed=True)
        fs = g0.principal_flow(B, alpha, 0, closed=False)
        for a, b in zip(fc, fs):
            assert g0.is_zero_mod_E(
                sp.expand(_eseries(a, B.d_max) - sp.expand(b)), B.d_max)


def test_translation_flow(B):
    # h_{v,0} generates x-translation
    fv, fw = g0.principal_flow(B, "v", 0)
    assert sp.cancel(fv - v1) == 0
    assert sp.cancel(fw - w1) == 0


def test_flows_commute(B):
    # bracket densities of commuting Hamiltonians are total derivatives
    for (a, p, b, q) in (("v", 0, "w", 0), ("v", 1, "w", 0),
                         ("w", 1, "v", 0)):
        br = g0.bracket_density(B, a, p, b, q)
        from gwhier.jets import variational
        for fld in ("v", "w"):
            assert g0.is_zero_mod_E(variational(br, fld), B.d_max), \
                (a, p, b, q)


def test_two_point_symmetry(B):
    for (a, p, b, q) in (("v", 1, "w", 0), ("v", 0, "w", 1),
                         ("w", 1, "w", 0)):
        om = g0.two_point(B, a, p, b, q)
        om2 = g0.two_point(B, b, q, a, p)
        assert g0.is_zero_mod_E(sp.expand(om - om2), B.d_max)


def test_two_point_lowest_is_the_metric_pairing(B):
    # Omega_{v,0;w,0} = d_v d_w F0 up to E-truncation
    om = g0.two_point(B, "v", 0, "w", 0)
    from gwhier.jets import partial_v, partial_w
    want = g0.etrunc(sp.expand(partial_v(partial_w(
        B.P.F0.subs(li(3), sum(E ** d / sp.Integer(d) ** 3
                               for d in range(1, B.d_max + 1)))))), B.d_max)
    assert g0.is_zero_mod_E(sp.expand(om - want), B.d_max)


def test_genus0_trr(B):
    assert g0.check_genus0_trr(B, 1, 0)
    assert g0.check_genus0_trr(B, 2, 1)


def test_genus0_invariants_both_routes(P):
    got = g0.genus0_invariants(P, 8)
    assert got == [sp.Rational(1, d ** 3) for d in range(1, 9)]
    for d in range(1, 9):
        assert got[d - 1] == fg_closed_invariant(0, d)
    with pytest.raises(ValueError):
        g0.genus0_invariants(P, 0)


def test_antidiagonal_k2_sign():
    Pa = g0.build_prepotential("Xk_antidiagonal", k=2)
    assert g0.check_wdvv(Pa)
    assert g0.genus0_invariants(Pa, 4) == [
        -sp.Rational(1, d ** 3) for d in range(1, 5)]


def test_yukawa_Xk():
    q = sp.Symbol("q")
    with pytest.raises(ValueError):
        g0.yukawa_Xk(2, 3)
    Y3 = g0.yukawa_Xk(3, 3, qsym=q)
    n = 4
    # leading behaviour: 1/n - (1/n)(1 + arg/ (n-1) + ...) style series
    assert Y3.coeff(q, 0) == 0
    assert Y3.coeff(q, 1) != 0


def test_xk_first_flow():
    Y = sp.Symbol("Y")
    fv, fw = g0.xk_first_flow(3, Ysym=Y)
    assert fv == Y * w1
    assert fw == v1 + 4 * Y * w1
