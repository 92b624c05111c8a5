import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from gwhier.jets import (E, L, Pv, compile_numeric, dx, eval_numeric, evolve,
                         fsym, graded_part, is_homogeneous, is_zero, jet, lam,
                         li, max_jet_order, partial_v, partial_w,
                         reduce_mod_dx, v, variational, w)

v1, v2, w1, w2 = jet("v", 1), jet("v", 2), jet("w", 1), jet("w", 2)


def test_total_derivative_of_transcendental_generators():
    assert dx(E) == E * w1
    assert sp.cancel(dx(L) + E * w1 / (1 - E)) == 0
    assert dx(li(2)) == -L * w1
    assert dx(Pv) == Pv * v1 / lam
    assert dx(v) == v1
    assert dx(v1) == v2


def test_dx_leibniz():
    f, g = v * w1, E * v1 ** 2
    assert sp.expand(dx(f * g) - dx(f) * g - f * dx(g)) == 0


def test_partials_lower_polylog_weight():
    assert partial_w(li(3)) == li(2)
    assert partial_w(li(2)) == -L
    assert partial_v(li(2)) == 0


def test_dx_commutes_with_partials_on_zero_jets():
    # for a zero-jet density, dx f = f_v v1 + f_w w1
    f = v ** 2 * w + lam ** 2 * li(2)
    assert sp.expand(dx(f) - partial_v(f) * v1 - partial_w(f) * w1) == 0


def test_max_jet_order_and_grading():
    m = v1 * jet("w", 3)
    assert max_jet_order(m) == 3
    assert max_jet_order(m, "v") == 1
    assert is_homogeneous(m, 4)
    assert graded_part(v1 ** 2 + v2 + w1, 2) == v1 ** 2 + v2
    assert graded_part(v1 ** 2 + v2 + w1, 1) == w1


def test_variational_annihilates_exact_terms():
    f = E * v1 * w1 ** 2 + v2 * w
    for fld in ("v", "w"):
        assert is_zero(variational(dx(f), fld))


def test_variational_euler_lagrange():
    # delta/delta v of (1/2) v1^2 is -v2
    assert sp.expand(variational(v1 ** 2 / 2, "v") + v2) == 0


def test_reduce_mod_dx_splits_exact_part():
    f = v * w1 ** 2
    rem, pot = reduce_mod_dx(dx(f))
    assert rem == 0
    assert sp.expand(dx(pot) - dx(f)) == 0


def test_evolve_is_the_chain_rule():
    fv, fw = lam * w1, v1
    assert sp.expand(evolve(v, fv, fw) - fv) == 0
    assert sp.expand(evolve(w1, fv, fw) - dx(fw)) == 0
    f = v * w
    assert sp.expand(evolve(f, fv, fw) - (w * fv + v * fw)) == 0


def test_opaque_symbols():
    f = fsym(1, 0)
    d = dx(f)
    assert fsym(2, 0) in d.atoms(sp.Symbol)


def test_compile_numeric_matches_eval_numeric():
    expr = v1 ** 2 * li(2) + lam ** 2 * E / (1 - E) * w1 ** 2 - L * w
    point = {"v": sp.Rational(1, 3), "w": -sp.Rational(3, 4),
             "lam": sp.Rational(5, 2), "v1": sp.Rational(2, 7),
             "w1": sp.Rational(1, 2)}
    fn = compile_numeric(expr, digits=50)
    with mpmath.workdps(50):
        a = fn(point)
        b = eval_numeric(expr, point, digits=50)
        assert abs(a - b) < mpmath.mpf(10) ** (-45)


def test_compile_numeric_rejects_opaque_densities():
    with pytest.raises(Exception):
        compile_numeric(fsym(0, 0))(
            {"v": 1, "w": -1, "lam": 2})


_coeffs = st.integers(min_value=-4, max_value=4)


@settings(max_examples=25, deadline=None)
@given(a=_coeffs, b=_coeffs, c=_coeffs)
def test_variational_kills_image_of_dx(a, b, c):
    f = a * v * w1 + b * E * v1 + c * w * v1 * w1
    for fld in ("v", "w"):
        assert is_zero(variational(dx(f), fld))
