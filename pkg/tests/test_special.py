import mpmath
import pytest
import sympy as sp

from gwhier.scalars import gam
from gwhier.special import (PrecisionContract, bernoulli, digamma_series,
                            gauss2f1, harmonic, hyp2f1_eps, nielsen,
                            nielsen_quad, pfq_series, polylog)

X = sp.Symbol("_x")


def _close(a, b, digits):
    return abs(mpmath.mpf(a) - mpmath.mpf(b)) < mpmath.mpf(10) ** (-digits)


def test_bernoulli_and_harmonic():
    assert bernoulli(2) == sp.Rational(1, 6)
    assert bernoulli(4) == -sp.Rational(1, 30)
    assert bernoulli(3) == 0
    assert harmonic(4) == sp.Rational(25, 12)
    assert harmonic(3, 2) == sp.Rational(49, 36)


def test_polylog_closed_forms():
    assert sp.cancel(polylog(0, X) - X / (1 - X)) == 0
    assert sp.cancel(polylog(-1, X) - X / (1 - X) ** 2) == 0
    assert sp.cancel(polylog(-3, X)
                     - X * (1 + 4 * X + X ** 2) / (1 - X) ** 4) == 0


def test_polylog_numeric_dilog():
    # Li_2(1/2) = pi^2/12 - log(2)^2 / 2
    with mpmath.workdps(64):
        want = mpmath.pi ** 2 / 12 - mpmath.log(2) ** 2 / 2
        assert _close(polylog(2, sp.Rational(1, 2)), want, 60)
    with pytest.raises(ValueError):
        polylog(2, 2)


def test_nielsen_against_quadrature():
    # independent oracle: series vs integral representation
    with mpmath.workdps(40):
        for (n, p) in ((1, 2), (2, 2), (1, 3)):
            a = nielsen(n, p, sp.Rational(1, 2), digits=40)
            b = nielsen_quad(n, p, sp.Rational(1, 2), digits=40)
            assert _close(a, b, 35), (n, p)


def test_nielsen_reduces_to_polylog():
    # S_{n,1} = Li_{n+1}
    with mpmath.workdps(40):
        a = nielsen(2, 1, sp.Rational(1, 3), digits=40)
        b = polylog(3, sp.Rational(1, 3), digits=40)
        assert _close(a, b, 35)


def test_pfq_partial_sums():
    # 2F1(1, 1; 1; x) = 1/(1-x): partial sum is the geometric one
    s = pfq_series([1, 1], [1], X, 6)
    assert s == sum(X ** n for n in range(6))
    with pytest.raises(ValueError):
        pfq_series([1], [-2], X, 4)


def test_gauss2f1_against_mpmath():
    with mpmath.workdps(40):
        got = gauss2f1(sp.Rational(1, 2), sp.Rational(1, 3),
                       sp.Rational(3, 2), sp.Rational(1, 4), digits=40)
        want = mpmath.hyp2f1(mpmath.mpf(1) / 2, mpmath.mpf(1) / 3,
                             mpmath.mpf(3) / 2, mpmath.mpf(1) / 4)
        assert _close(got, want, 35)
    with pytest.raises(ValueError):
        gauss2f1(1, 1, 2, 2)


def test_hyp2f1_eps_base_point_limits():
    # eps -> 0 collapses both expansions onto the integer-parameter values
    with mpmath.workdps(40):
        z = mpmath.mpf(1) / 3
        e1 = hyp2f1_eps("E1", 1, 1, 1, z, 0, 3, digits=40)
        want = mpmath.hyp2f1(1, 1, 2, z)  # = -log(1-z)/z
        assert _close(e1, want, 35)
        e2 = hyp2f1_eps("E2", 1, 1, 1, z, 0, 2, digits=40)
        assert _close(e2, 1, 35)
    with pytest.raises(ValueError):
        hyp2f1_eps("E1", 1, 1, 1, 0.5, 0.001, 4)
    with pytest.raises(ValueError):
        hyp2f1_eps("E3", 1, 1, 1, 0.5, 0.001, 1)


def test_digamma_series_structure():
    z = sp.Symbol("z")
    s = digamma_series(3, z, 4)
    assert s.coeff(z, 0) == -gam
    assert s.coeff(z, 1) == sp.pi ** 2 / 6 * 3
    assert s.coeff(z, 2) == -sp.Symbol("zeta3") * 9


def test_precision_contract():
    pc = PrecisionContract(30)
    with mpmath.workdps(30):
        assert pc.tol < mpmath.mpf(10) ** (-30)
