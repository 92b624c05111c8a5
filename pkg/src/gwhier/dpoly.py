"""Fast exact differential-polynomial arithmetic.

Expressions are dicts {exponent-tuple: Fraction} over a fixed generator
list: the fields v, w, the Novikov exponential E = e^w, its reciprocal
companion O = 1/(1-E), L = log(1-E), lam, the exponential Pv = e^(v/lam),
polylogarithm symbols Li_2..Li_6, the jets of v and w, and the opaque
f-symbols f_{a,b}.  Everything of interest is polynomial in these: the
relation E*O = O - 1 is reduced eagerly, so monomials never mix E- and
O-powers and zero means the empty dict.  lam and Pv may carry negative
exponents.  This mirrors the sympy-facing ring in jets.py but runs one to
two orders of magnitude faster on the involutivity workloads.
"""

from fractions import Fraction

import sympy as sp

from .jets import E, L, Pv, jet, lam, li, v, w

JMAX = 8
FMAX = 20

# generator layout
IV, IW, IE, IO, IL, ILAM, IPV = range(7)
_LI_LO, _LI_HI = 2, 6
ILI = {k: 7 + (k - _LI_LO) for k in range(_LI_LO, _LI_HI + 1)}
_NLI = _LI_HI - _LI_LO + 1
IVJ = {n: 7 + _NLI + (n - 1) for n in range(1, JMAX + 1)}
IWJ = {n: 7 + _NLI + JMAX + (n - 1) for n in range(1, JMAX + 1)}
_F0 = 7 + _NLI + 2 * JMAX
IF = {(a, b): _F0 + 2 * a + b for a in range(FMAX + 1) for b in (0, 1)}
NGENS = _F0 + 2 * (FMAX + 1)

_SYMS = [None] * NGENS
_SYMS[IV], _SYMS[IW], _SYMS[IE] = v, w, E
_SYMS[IO] = 1 / (1 - E)
_SYMS[IL], _SYMS[ILAM], _SYMS[IPV] = L, lam, Pv
for k, i in ILI.items():
    _SYMS[i] = li(k)
for n in range(1, JMAX + 1):
    _SYMS[IVJ[n]] = jet("v", n)
    _SYMS[IWJ[n]] = jet("w", n)
for (a, b), i in IF.items():
    _SYMS[i] = sp.Symbol("f_%d_%d" % (a, b))

_LOOKUP = {}
for i, s in enumerate(_SYMS):
    if i != IO:
        _LOOKUP[s] = i

_ZERO = (0,) * NGENS
ONE = {_ZERO: Fraction(1)}


def _mono(idx, e=1):
    m = [0] * NGENS
    m[idx] = e
    return tuple(m)


def gen(idx, e=1):
    return {_mono(idx, e): Fraction(1)}


# ---------------------------------------------------------------------------
# E/O normal form: E*O = O - 1; monomials keep either E- or O-powers
# ---------------------------------------------------------------------------

_RED_CACHE = {}


def _red(i, j):
    """E^i O^j as {(a, b): integer}, a*b = 0."""
    if (i, j) in _RED_CACHE:
        return _RED_CACHE[(i, j)]
    if i == 0 or j == 0:
        out = {(i, j): 1}
    else:
        out = {}
        for key, c in _red(i - 1, j).items():
            out[key] = out.get(key, 0) + c
        for key, c in _red(i - 1, j - 1).items():
            out[key] = out.get(key, 0) - c
    _RED_CACHE[(i, j)] = out
    return out


def _add_term(acc, mono, coeff):
    if not coeff:
        return
    i, j = mono[IE], mono[IO]
    if i and j:
        base = list(mono)
        for (a, b), c in _red(i, j).items():
            base[IE], base[IO] = a, b
            key = tuple(base)
            nv = acc.get(key, Fraction(0)) + coeff * c
            if nv:
                acc[key] = nv
            else:
                acc.pop(key, None)
    else:
        nv = acc.get(mono, Fraction(0)) + coeff
        if nv:
            acc[mono] = nv
        else:
            acc.pop(mono, None)


def padd(d1, d2, scale=1):
    """d1 + scale*d2, into a fresh dict."""
    out = dict(d1)
    s = Fraction(scale)
    for m, c in d2.items():
        _add_term(out, m, s * c)
    return out


def pscale(d, scale):
    s = Fraction(scale)
    return {m: c * s for m, c in d.items()} if s else {}


def pmul(d1, d2):
    out = {}
    for m1, c1 in d1.items():
        for m2, c2 in d2.items():
            _add_term(out, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
    return out


def _mul_mono(d, mono, coeff):
    out = {}
    for m, c in d.items():
        _add_term(out, tuple(a + b for a, b in zip(m, mono)), c * coeff)
    return out


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

def _table_dx():
    t = {}
    t[IV] = gen(IVJ[1])
    t[IW] = gen(IWJ[1])
    wder = _table_pw()
    for idx in (IE, IO, IL):
        t[idx] = pmul(wder[idx], gen(IWJ[1]))
    t[IPV] = pmul(pmul(gen(IPV), gen(ILAM, -1)), gen(IVJ[1]))
    for k, i in ILI.items():
        t[i] = pmul(wder[i], gen(IWJ[1]))
    for n in range(1, JMAX):
        t[IVJ[n]] = gen(IVJ[n + 1])
        t[IWJ[n]] = gen(IWJ[n + 1])
    for (a, b), i in IF.items():
        if a + 2 > FMAX:
            t[i] = None  # overflow sentinel; derive() raises on use
            continue
        d = _mul_mono(gen(IF[(a + 1, b)]), _mono(IVJ[1]), 1)
        if b == 0:
            d = padd(d, pmul(gen(IF[(a, 1)]), gen(IWJ[1])))
        else:
            corr = pmul(pmul(gen(ILAM, 2), pmul(gen(IE), gen(IO))),
                        pmul(gen(IF[(a + 2, 0)]), gen(IWJ[1])))
            d = padd(d, corr, -1)
        t[i] = d
    return t


def _table_pw():
    t = {IW: dict(ONE), IE: gen(IE),
         IO: pmul(gen(IE), gen(IO, 2)),
         IL: pscale(pmul(gen(IE), gen(IO)), -1)}
    for k, i in ILI.items():
        if k - 1 >= _LI_LO:
            t[i] = gen(ILI[k - 1])
        elif k - 1 == 1:
            t[i] = pscale(gen(IL), -1)          # Li_1 = -L
        else:
            t[i] = pmul(gen(IE), gen(IO))       # Li_0 = E/(1-E)
    for (a, b), i in IF.items():
        if b == 0:
            t[i] = gen(IF[(a, 1)])
        elif a + 2 <= FMAX:
            t[i] = pscale(pmul(pmul(gen(ILAM, 2), gen(IE)),
                               pmul(gen(IO), gen(IF[(a + 2, 0)]))), -1)
        else:
            t[i] = None
    return t


def _table_pv():
    t = {IV: dict(ONE),
         IPV: pmul(gen(IPV), gen(ILAM, -1))}
    for (a, b), i in IF.items():
        if a + 1 <= FMAX:
            t[i] = gen(IF[(a + 1, b)])
        else:
            t[i] = None
    return t


_DX, _PW, _PV = None, None, None


def _tables():
    global _DX, _PW, _PV
    if _DX is None:
        _PW = _table_pw()
        _PV = _table_pv()
        _DX = _table_dx()
    return _DX, _PW, _PV


def derive(d, table):
    out = {}
    for m, c in d.items():
        for idx, e in enumerate(m):
            if not e or idx not in table:
                continue
            if table[idx] is None:
                raise OverflowError("f-symbol index range exceeded")
            lowered = list(m)
            lowered[idx] -= 1
            lowered = tuple(lowered)
            for tm, tc in table[idx].items():
                _add_term(out, tuple(a + b for a, b in zip(lowered, tm)),
                          c * e * tc)
    return out


def dx(d):
    return derive(d, _tables()[0])


def partial_w(d):
    return derive(d, _tables()[1])


def partial_v(d):
    return derive(d, _tables()[2])


def _jet_diff(d, field, n):
    idx = (IVJ if field == "v" else IWJ)[n]
    out = {}
    for m, c in d.items():
        e = m[idx]
        if e:
            low = list(m)
            low[idx] -= 1
            _add_term(out, tuple(low), c * e)
    return out


def max_jet_order(d, field=None):
    best = 0
    for m in d:
        for n in range(JMAX, best, -1):
            if field in (None, "v") and m[IVJ[n]]:
                best = max(best, n)
                break
            if field in (None, "w") and m[IWJ[n]]:
                best = max(best, n)
                break
    return best


def variational(d, field):
    """Euler operator, Horner-style: d_0 - dx(d_1 - dx(d_2 - ...))."""
    n = max_jet_order(d, field)
    acc = {}
    for k in range(n, 0, -1):
        acc = padd(_jet_diff(d, field, k), dx(acc), -1)
    base = partial_v(d) if field == "v" else partial_w(d)
    return padd(base, dx(acc), -1)


# ---------------------------------------------------------------------------
# sympy boundary
# ---------------------------------------------------------------------------

_OME = 1 - E
_EMO = -1 + E


def from_sympy(expr):
    """Expanded sympy expression -> dict form.  Denominators must be powers
    of (1-E) (or (-1+E)), lam and Pv."""
    out = {}
    for t in sp.Add.make_args(sp.expand(sp.sympify(expr))):
        m = [0] * NGENS
        coeff = Fraction(1)
        ok = True
        for b, e in t.as_powers_dict().items():
            if b.is_Rational:
                q = b ** e
                if not q.is_Rational:
                    raise ValueError("non-rational numeric factor %s" % t)
                coeff *= Fraction(int(q.p), int(q.q))
                continue
            if not e.is_Integer:
                raise ValueError("non-integer exponent in %s" % t)
            e = int(e)
            if b == _OME or b == _EMO:
                if e > 0:
                    # sp.expand distributes positive powers of sums
                    raise ValueError("unexpanded (1-E) power in %s" % t)
                if b == _EMO:
                    coeff *= (-1) ** (-e)
                m[IO] += -e
                continue
            if b in _LOOKUP:
                idx = _LOOKUP[b]
                if e < 0 and idx not in (ILAM, IPV):
                    raise ValueError("negative power of %s" % b)
                m[idx] += e
                continue
            if e < 0 and b.has(E):
                # composite denominators like 12 - 12*E
                c0, facs = sp.factor_list(b)
                if not c0.is_Rational:
                    raise ValueError("unknown generator %s in %s" % (b, t))
                q = c0 ** e
                coeff *= Fraction(int(q.p), int(q.q))
                for fb, fe in facs:
                    if fb == E:
                        m[IE] += fe * e
                    elif fb == _OME:
                        m[IO] += fe * (-e)
                    elif fb == _EMO:
                        coeff *= (-1) ** (fe * (-e))
                        m[IO] += fe * (-e)
                    elif fb in _LOOKUP and _LOOKUP[fb] in (ILAM, IPV):
                        m[_LOOKUP[fb]] += fe * e
                    else:
                        raise ValueError(
                            "unknown generator %s in %s" % (b, t))
                if m[IE] < 0:
                    raise ValueError("negative power of E in %s" % t)
                continue
            raise ValueError("unknown generator %s in %s" % (b, t))
        if ok:
            _add_term(out, tuple(m), coeff)
    return out


def to_sympy(d):
    out = sp.Integer(0)
    for m, c in d.items():
        term = sp.Rational(c.numerator, c.denominator)
        for idx, e in enumerate(m):
            if e:
                term *= _SYMS[idx] ** e
        out += term
    return out


def eval_num(d, values):
    """Numeric evaluation; 'values' maps generator index -> mpmath value."""
    total = 0
    for m, c in d.items():
        term = c.numerator / (1 * c.denominator)
        acc = None
        for idx, e in enumerate(m):
            if e:
                base = values[idx]
                acc = base ** e if acc is None else acc * base ** e
        total = total + (term if acc is None else term * acc)
    return total
