"""Exact scalar arithmetic over the equivariant parameter field.

Scalars are rational functions in the equivariant weights lam1, lam2 (or the
single weight lam after specialization) whose coefficients are polynomial in
pi, the odd zeta symbols and, transiently, the Euler-Mascheroni symbol gam.
Even zeta values are rewritten as pi-powers eagerly so canonical forms are
unique; gam must cancel in every assembled quantity downstream and an
assertion helper is provided for that.
"""

import sympy as sp

from .jets import lam, lam1, lam2

gam = sp.Symbol("gam")  # Euler-Mascheroni; never survives normalization


def zeta(n):
    """zeta(n) with even values reduced to pi-powers, odd kept opaque."""
    if n < 2:
        raise ValueError("zeta arguments below 2 are not used")
    if n % 2 == 0:
        return sp.zeta(n)  # sympy evaluates even zeta to rational * pi^n
    return sp.Symbol("zeta%d" % n)


def canonical(x):
    return sp.cancel(sp.together(sp.expand(sp.sympify(x))))


def canonical_str(x):
    return sp.sstr(canonical(x), order="lex")


def arith(a, b, op):
    a, b = sp.sympify(a), sp.sympify(b)
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        if canonical(b) == 0:
            raise ZeroDivisionError("zero denominator")
        r = a / b
    else:
        raise ValueError("unknown op %r" % op)
    return canonical(r)


_MODES = {
    "general": {},
    "diagonal": {lam1: lam, lam2: lam},
    "antidiagonal": {lam1: lam, lam2: -lam},
}


def specialize(x, mode):
    """Substitute lam2 -> +/- lam1 (renamed lam).  Total except on genuine
    poles, which are reported by their vanishing denominator factor."""
    if mode not in _MODES:
        raise ValueError("unknown specialization mode %r" % mode)
    x = canonical(x)
    subs = _MODES[mode]
    if not subs:
        return x
    num, den = sp.fraction(x)
    den_s = sp.cancel(den.subs(subs))
    if den_s == 0:
        for fac, _ in sp.factor_list(den)[1]:
            if sp.cancel(fac.subs(subs)) == 0:
                raise ZeroDivisionError(
                    "pole on specialization: factor %s vanishes" % fac)
        raise ZeroDivisionError("pole on specialization")
    return canonical(num.subs(subs) / den_s)


def assert_gamma_free(x, context=""):
    if gam in sp.sympify(x).free_symbols:
        raise AssertionError("gam symbol survives %s" % (context or "scalar"))
    return x
