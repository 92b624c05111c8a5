"""Special functions: polylogarithms, Nielsen polylogarithms, psi/Gamma
series, generalized hypergeometric series and their epsilon-expansions
around integer parameters, Bernoulli and harmonic numbers.

Numeric routines run at a stated decimal precision (default 64 digits) and
use series with explicit geometric tail bounds; quadrature is kept only as a
cross-check for the Nielsen values.
"""

import functools

import mpmath
import sympy as sp

from .scalars import gam, zeta

DIGITS = 64


class PrecisionContract:
    """Working precision plus the tail-bound policy for series truncation."""

    def __init__(self, digits=DIGITS, safety=2):
        self.digits = digits
        self.safety = safety

    @property
    def tol(self):
        return mpmath.mpf(10) ** (-(self.digits + 5))


def bernoulli(n):
    return sp.Rational(sp.bernoulli(n))


def harmonic(d, order=1):
    return sp.Rational(sp.harmonic(d, order))


def polylog(j, x, digits=DIGITS):
    """Li_j.  Non-positive j gives the exact closed rational form (in x if x
    is symbolic); j >= 1 is numeric by direct series, |x| < 1."""
    if j <= 0:
        X = sp.Symbol("_x")
        expr = X / (1 - X)
        for _ in range(-j):
            expr = sp.cancel(X * expr.diff(X))
        return sp.cancel(expr.subs(X, sp.sympify(x)))
    with mpmath.workdps(digits):
        xv = mpmath.mpf(str(x)) if not isinstance(x, mpmath.mpf) else x
        if abs(xv) >= 1:
            raise ValueError("polylog series requires |x| < 1 for j >= 1")
        pc = PrecisionContract(digits)
        total = mpmath.mpf(0)
        n = 1
        while True:
            term = xv ** n / mpmath.mpf(n) ** j
            total += term
            # geometric tail bound: |tail| <= |term| * |x| / (1 - |x|)
            if abs(term) * abs(xv) / (1 - abs(xv)) < pc.tol / pc.safety:
                return total
            n += 1


@functools.lru_cache(maxsize=None)
def _stirling1_row(m):
    """Unsigned Stirling numbers of the first kind |s(m, p)|, p = 0..m."""
    if m == 0:
        return (1,)
    prev = _stirling1_row(m - 1)
    row = [0] * (m + 1)
    for p in range(m + 1):
        row[p] = (prev[p - 1] if p >= 1 else 0) + \
                 (m - 1) * (prev[p] if p <= m - 1 else 0)
    return tuple(row)


def nielsen(n, p, z, digits=DIGITS):
    """Nielsen polylogarithm S_{n,p}(z) for |z| < 1 by the Stirling-number
    series  S_{n,p}(z) = sum_{m >= p} z^m |s(m,p)| / (m! m^n)."""
    if n < 1 or p < 1:
        raise ValueError("nielsen requires n, p >= 1")
    with mpmath.workdps(digits):
        zv = mpmath.mpf(str(z))
        if abs(zv) >= 1:
            raise ValueError("nielsen series requires |z| < 1")
        pc = PrecisionContract(digits)
        total = mpmath.mpf(0)
        fact = mpmath.mpf(sp.factorial(p))
        m = p
        while True:
            s = _stirling1_row(m)[p]
            term = zv ** m * mpmath.mpf(s) / (fact * mpmath.mpf(m) ** n)
            total += term
            # the term ratio tends to |z|; once past a burn-in the tail is
            # geometrically bounded
            if m > p + 20 and \
                    abs(term) / (1 - abs(zv)) < pc.tol / pc.safety:
                return total
            m += 1
            fact *= m


def nielsen_quad(n, p, z, digits=DIGITS):
    """Quadrature cross-check for S_{n,p}(z) from its integral form."""
    with mpmath.workdps(digits + 10):
        zv = mpmath.mpf(str(z))
        pref = mpmath.mpf((-1) ** (n + p - 1)) / \
            (mpmath.factorial(n - 1) * mpmath.factorial(p))
        val = pref * mpmath.quad(
            lambda t: mpmath.log(t) ** (n - 1) * mpmath.log(1 - zv * t) ** p / t,
            [0, 1])
        return +val


def pfq_series(num_params, den_params, arg, terms):
    """Exact partial sum of pFq.  Rational/symbolic argument gives an exact
    sympy result."""
    if terms < 1:
        raise ValueError("terms >= 1 required")
    for b in den_params:
        bb = sp.sympify(b)
        if bb.is_integer and bb <= 0:
            raise ValueError("nonpositive integer denominator parameter %s" % b)
    arg = sp.sympify(arg)
    total = sp.Integer(0)
    coeff = sp.Integer(1)
    for n in range(terms):
        total += coeff * arg ** n
        num = sp.Integer(1)
        for a in num_params:
            num *= (sp.sympify(a) + n)
        den = sp.Integer(n + 1)
        for b in den_params:
            den *= (sp.sympify(b) + n)
        coeff = sp.cancel(coeff * num / den)
    return sp.expand(total)


def gauss2f1(a, b, c, z, digits=DIGITS):
    """Direct Gauss series for 2F1 (independent numeric oracle), |z| < 1."""
    with mpmath.workdps(digits):
        av, bv, cv, zv = (mpmath.mpf(str(t)) for t in (a, b, c, z))
        if abs(zv) >= 1:
            raise ValueError("|z| < 1 required")
        total = mpmath.mpf(0)
        term = mpmath.mpf(1)
        n = 0
        tol = mpmath.mpf(10) ** (-(digits + 5))
        while True:
            total += term
            term = term * (av + n) * (bv + n) / ((cv + n) * (n + 1)) * zv
            if abs(term) / (1 - abs(zv)) < tol and n > 10:
                return total + term
            n += 1


def hyp2f1_eps(case, a1, a2, c, z, eps, order, digits=DIGITS):
    """Epsilon-expansions of 2F1 around integer parameters.

    case E1: 2F1(1 + a1 eps, 1 + a2 eps; 2 + c eps; z), expansion through
    eps^order with order <= 3.
    case E2: 2F1(a1 eps, a2 eps; 1 + c eps; z) = 1 + a1 a2 eps^2 * (inner
    expansion through eps^order), order <= 2.
    """
    with mpmath.workdps(digits):
        a1v, a2v, cv, ev = (mpmath.mpf(str(t)) for t in (a1, a2, c, eps))
        zv = mpmath.mpf(str(z))
        lg = mpmath.log(1 - zv)
        Li2 = polylog(2, zv, digits)
        Li3 = polylog(3, zv, digits)
        Li4 = polylog(4, zv, digits)
        S12 = nielsen(1, 2, zv, digits)
        if case == "E1":
            if order > 3:
                raise ValueError("E1 expansion printed through eps^3 only")
            S22 = nielsen(2, 2, zv, digits) if order >= 3 else 0
            S13 = nielsen(1, 3, zv, digits) if order >= 3 else 0
            br = [
                -lg,
                -((cv - a1v - a2v) / 2 * lg ** 2 + cv * Li2),
                (((a1v + a2v) * cv - cv ** 2 - 2 * a1v * a2v) * S12
                 + ((a1v + a2v) * cv - cv ** 2 - a1v * a2v) * lg * Li2
                 + cv ** 2 * Li3
                 - (cv - a1v - a2v) ** 2 * lg ** 3 / 6),
                -(cv * ((a1v + a2v) * cv - cv ** 2 - 2 * a1v * a2v) * S22
                  + cv * ((a1v + a2v) * cv - cv ** 2 - a1v * a2v) * lg * Li3
                  + (cv - a1v) * (cv - a2v) * (cv - a1v - a2v)
                  * (lg * S12 + lg ** 2 * Li2 / 2)
                  + (cv - a1v - a2v) ** 3 * lg ** 4 / 24
                  + cv * (cv - a1v - a2v) ** 2 * S13
                  + cv ** 3 * Li4),
            ]
            inner = sum(br[k] * ev ** k for k in range(order + 1))
            return (1 + cv * ev) / zv * inner
        if case == "E2":
            if order > 2:
                raise ValueError("E2 inner expansion printed through eps^2")
            S13 = nielsen(1, 3, zv, digits) if order >= 2 else 0
            S22 = nielsen(2, 2, zv, digits) if order >= 2 else 0
            br = [
                Li2,
                -((cv - a1v - a2v) * S12 + cv * Li3),
                (cv ** 2 * Li4
                 + (cv - a1v - a2v) ** 2 * S13
                 + (cv * (cv - a1v - a2v) + a1v * a2v) / 2 * Li2 ** 2
                 - (cv * (cv - a1v - a2v) + 2 * a1v * a2v) * S22),
            ]
            inner = sum(br[k] * ev ** k for k in range(order + 1))
            return 1 + a1v * a2v * ev ** 2 * inner
        raise ValueError("unknown case %r" % case)


def digamma_series(weight, zsym, order):
    """z-expansion of psi(1 + z*weight) through z^(order-1):
    -gam + sum_{k >= 2} (-1)^k zeta(k) (z*weight)^(k-1).  Even zeta values
    come out as pi-powers; gam stays symbolic and must cancel downstream."""
    if order > 8:
        raise ValueError("order <= 8 supported")
    expr = -gam
    for k in range(2, order + 1):
        expr += (-1) ** k * zeta(k) * (zsym * weight) ** (k - 1)
    return sp.expand(expr)
