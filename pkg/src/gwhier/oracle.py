"""Independent all-genus invariants from the fixed-degree partition sum

    sum_g eps^(2g-2) N_{g,d} = (-1)^(d(k-1)) sum_rho (dim_Q rho / d!)^2
                               Q^(c_rho (1-k)),   Q = e^(i eps),

with dim_Q rho / d! = prod over boxes (2 sin(h eps / 2))^(-1).  Everything
is exact: Laurent series in eps whose coefficients are Gaussian rationals,
held as pairs of Fractions with i formal.  Conjugation rho <-> rho^t flips
the total content, so imaginary parts cancel pairwise; this is asserted,
not assumed.
"""

import functools
from fractions import Fraction
from math import factorial

import sympy as sp

_EPS = sp.Symbol("eps")


class Partition:
    def __init__(self, parts):
        parts = tuple(parts)
        if any(p <= 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
            raise ValueError("parts must be weakly decreasing positive")
        self.parts = parts
        self.d = sum(parts)

    def hooks(self):
        out = []
        cols = self.conjugate().parts
        for i, row in enumerate(self.parts):
            for j in range(row):
                out.append(row - j + cols[j] - i - 1)
        return out

    def total_content(self):
        return sum(j - i for i, row in enumerate(self.parts)
                   for j in range(row))

    def conjugate(self):
        if not self.parts:
            return Partition(())
        cols = [sum(1 for p in self.parts if p > j)
                for j in range(self.parts[0])]
        return Partition(cols)


@functools.lru_cache(maxsize=None)
def partitions(d):
    """All partitions of d, parts weakly decreasing."""
    if d == 0:
        return ((),)
    out = []

    def rec(rem, mx, acc):
        if rem == 0:
            out.append(tuple(acc))
            return
        for p in range(min(rem, mx), 0, -1):
            rec(rem - p, p, acc + [p])

    rec(d, d, [])
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _csc2_coeffs(depth):
    """Coefficients t_m of (2 sin(x/2))^(-2) = sum_{m >= -2} t_m x^m through
    x^depth (odd ones vanish), as Fractions.  Differentiating the Bernoulli
    expansion of cot gives t_{2n-2} = (-1)^(n+1) (2n-1) B_{2n} / (2n)!."""
    out = {}
    for n in range(0, depth // 2 + 2):
        b = sp.Rational(sp.bernoulli(2 * n))
        c = Fraction(int(b.p), int(b.q)) * (2 * n - 1) * (-1) ** (n + 1)
        c /= factorial(2 * n)
        if c != 0 and 2 * n - 2 <= depth:
            out[2 * n - 2] = c
    return out


def _laurent_mul(a, b, lo, hi):
    """Multiply Laurent dicts whose values are (re, im) Fraction pairs."""
    out = {}
    for ma, (ra, ia) in a.items():
        for mb, (rb, ib) in b.items():
            m = ma + mb
            if lo <= m <= hi:
                re, im = out.get(m, (0, 0))
                out[m] = (re + ra * rb - ia * ib, im + ra * ib + ia * rb)
    return out


_I_POW = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _raw_degree_sum(k, d, lo, hi):
    """Disconnected degree-d sum over partitions, as an eps-Laurent dict on
    [lo, hi] with Gaussian-rational values."""
    total = {}
    depth = hi + 2 * d
    t = _csc2_coeffs(depth)
    for parts in partitions(d):
        rho = Partition(parts)
        term = {0: (Fraction(1), Fraction(0))}
        for h in rho.hooks():
            fac = {m: (tm * Fraction(h) ** m, Fraction(0))
                   for m, tm in t.items()}
            term = _laurent_mul(term, fac, lo, hi)
        theta = rho.total_content() * (1 - k)
        if theta != 0:
            ex = {}
            for m in range(0, depth + 1):
                re, im = _I_POW[m % 4]
                c = Fraction(theta ** m, factorial(m))
                ex[m] = (re * c, im * c)
            term = _laurent_mul(term, ex, lo, hi)
        for m, (re, im) in term.items():
            tr, ti = total.get(m, (0, 0))
            total[m] = (tr + re, ti + im)
    sign = (-1) ** (d * (k - 1))
    return {m: (sign * re, sign * im) for m, (re, im) in total.items()}


@functools.lru_cache(maxsize=None)
def _connected_series(k, d_max, g_max):
    """Connected degree series F_d for every 1 <= d <= d_max in one pass.

    The sum over partitions assembles the disconnected degree series; the
    connected one is its logarithm in the degree-counting variable, taken
    here through the convolution recursion d*Z_d = sum_j j F_j Z_{d-j}.
    """
    hi = 2 * g_max - 2 + 2 * (d_max - 1)
    lo = -2 * d_max
    Z = {dd: _raw_degree_sum(k, dd, lo, hi) for dd in range(1, d_max + 1)}
    F = {}
    for dd in range(1, d_max + 1):
        acc = dict(Z[dd])
        for j in range(1, dd):
            r = Fraction(j, dd)
            for m, (re, im) in _laurent_mul(F[j], Z[dd - j], lo, hi).items():
                ar, ai = acc.get(m, (0, 0))
                acc[m] = (ar - r * re, ai - r * im)
        F[dd] = acc
    return F


def _finalize(series, g_max):
    """Check imaginary-part and odd-power cancellation, return a dict of
    exact sympy Rationals keyed by even eps power."""
    out = {}
    for m in range(-2, 2 * g_max - 1):
        re, im = series.get(m, (0, 0))
        if im != 0:
            raise AssertionError("imaginary part fails to cancel at eps^%d" % m)
        if m % 2 == 1:
            if re != 0:
                raise AssertionError("odd eps power survives")
            continue
        out[m] = sp.Rational(re.numerator, re.denominator) \
            if isinstance(re, Fraction) else sp.Integer(re)
    return out


def partition_sum(k, d, g_max=4):
    """Exact Laurent series (dict: eps power -> coefficient) of the degree-d
    connected potential sum_g eps^(2g-2) N_{g,d}, through eps^(2 g_max - 2)."""
    if d < 1:
        raise ValueError("d >= 1 required")
    if g_max > 4 + d:
        raise ValueError("g_max too large for implemented series depth")
    return _finalize(_connected_series(k, d, g_max)[d], g_max)


def invariants_table(k, d_max, g_max):
    """N_{g,d} for 0 <= g <= g_max, 1 <= d <= d_max, from the partition sum."""
    F = _connected_series(k, d_max, g_max)
    table = {}
    for d in range(1, d_max + 1):
        series = _finalize(F[d], g_max)
        for g in range(g_max + 1):
            table[(g, d)] = series[2 * g - 2]
    return table


def fg_closed_invariant(g, d):
    """Closed formula |B_2g| / (2g (2g-2)!) * d^(2g-3) for g >= 1, and the
    multi-covering value 1/d^3 at g = 0."""
    if g == 0:
        return sp.Rational(1, d ** 3)
    b = abs(sp.Rational(sp.bernoulli(2 * g)))
    return b / (2 * g * sp.factorial(2 * g - 2)) * sp.Integer(d) ** (2 * g - 3)
