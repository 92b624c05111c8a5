"""Differential polynomial ring in two fields v, w over a transcendental
function ring.

Everything downstream (densities, flows, operator coefficients) lives in a
ring generated by

    v, w, the jet variables v1, v2, ..., w1, w2, ...,
    E   = e^w,
    L   = log(1 - E),
    Lik = Li_k(E)      (k >= 2; Li_1 = -L and Li_0 = E/(1-E) are rewritten),
    Pv  = e^(v/lam),
    f_a_b              (opaque partial derivatives of an undetermined
                        zero-jet density f, with the second index <= 1),

with coefficients rational in lam (or lam1, lam2) over Q extended by pi and
odd zeta values.  All generators are plain sympy symbols; the calculus
(total x-derivative, partials in v and w) is supplied by explicit chain-rule
tables below.  Since the generators are algebraically independent, equality
is decidable by rational normalization (sympy.cancel) -- no simplification
heuristics are ever needed for zero tests.

The opaque symbols f_a_b stand for d^a/dv^a d^b/dw^b f for a density f(v,w)
subject to the linear wave equation

    f_ww = -lam^2 * E/(1-E) * f_vv,

which is applied eagerly so that only b in {0, 1} survives.
"""

from __future__ import annotations

import functools
import re

import mpmath
import sympy as sp

lam = sp.Symbol("lam")
lam1 = sp.Symbol("lam1")
lam2 = sp.Symbol("lam2")
v = sp.Symbol("v")
w = sp.Symbol("w")
E = sp.Symbol("E")
L = sp.Symbol("L")
Pv = sp.Symbol("Pv")

JET_MAX = 16
K_MAX = 6  # largest Li_k kept as a symbol by default (configurable per call)

_VJ = [v] + [sp.Symbol("v%d" % n) for n in range(1, JET_MAX + 1)]
_WJ = [w] + [sp.Symbol("w%d" % n) for n in range(1, JET_MAX + 1)]


def jet(field, n):
    """The n-th jet of 'v' or 'w'; n = 0 gives the field itself."""
    if n > JET_MAX:
        raise ValueError("jet order %d exceeds JET_MAX" % n)
    return _VJ[n] if field == "v" else _WJ[n]


def li(k):
    """Li_k(E) as a ring element.  k >= 2 is an opaque symbol, k = 1 and
    k = 0 are rewritten, k < 0 uses the closed rational form."""
    if k >= 2:
        return sp.Symbol("Li%d" % k)
    if k == 1:
        return -L
    # Li_0 = E/(1-E); Li_{-n} = (E d/dE)^n applied to it.
    expr = E / (1 - E)
    for _ in range(-k):
        expr = sp.cancel(E * expr.diff(E))
    return expr


def fsym(a, b):
    """Opaque symbol for d_v^a d_w^b f; callers must keep b <= 1."""
    if b > 1:
        raise ValueError("opaque f-symbols are kept with at most one w index")
    return sp.Symbol("f_%d_%d" % (a, b))


_LI_RE = re.compile(r"^Li(\d+)$")
_F_RE = re.compile(r"^f_(\d+)_(\d+)$")


def _li_order(s):
    m = _LI_RE.match(s.name)
    return int(m.group(1)) if m else None


def _f_indices(s):
    m = _F_RE.match(s.name)
    return (int(m.group(1)), int(m.group(2))) if m else None


def _f_w_derivative(a, b):
    # f_{a,b+1}, with the wave-equation rewrite when b+1 would reach 2.
    if b == 0:
        return fsym(a, 1)
    return -(lam ** 2) * E / (1 - E) * fsym(a + 2, 0)


def partial_w(expr):
    """Partial derivative in w, acting through E, L, Li_k and the opaque
    f-symbols by the chain-rule table."""
    expr = sp.sympify(expr)
    res = expr.diff(w)
    for s in expr.free_symbols:
        if s == E:
            res += expr.diff(s) * E
        elif s == L:
            res += expr.diff(s) * (-E / (1 - E))
        else:
            k = _li_order(s)
            if k is not None:
                res += expr.diff(s) * li(k - 1)
                continue
            ab = _f_indices(s)
            if ab is not None:
                res += expr.diff(s) * _f_w_derivative(*ab)
    return res


def partial_v(expr):
    expr = sp.sympify(expr)
    res = expr.diff(v)
    for s in expr.free_symbols:
        if s == Pv:
            res += expr.diff(s) * Pv / lam
        else:
            ab = _f_indices(s)
            if ab is not None:
                res += expr.diff(s) * fsym(ab[0] + 1, ab[1])
    return res


def partial(expr, gen):
    """Partial derivative with respect to a single generator.  For the
    fields v, w the chain rules above apply; jets and other symbols are
    plain differentiation."""
    if gen == v:
        return partial_v(expr)
    if gen == w:
        return partial_w(expr)
    return sp.sympify(expr).diff(gen)


def max_jet_order(expr, field=None):
    expr = sp.sympify(expr)
    best = 0
    for s in expr.free_symbols:
        for fld, table in (("v", _VJ), ("w", _WJ)):
            if field is not None and fld != field:
                continue
            for n in range(1, JET_MAX + 1):
                if s == table[n]:
                    best = max(best, n)
    return best


def dx(expr):
    """Total x-derivative: chain rule through the fields plus the jet shift
    u^(n) -> u^(n+1)."""
    expr = sp.sympify(expr)
    res = partial_v(expr) * _VJ[1] + partial_w(expr) * _WJ[1]
    for s in expr.free_symbols:
        for table in (_VJ, _WJ):
            for n in range(1, JET_MAX):
                if s == table[n]:
                    res += expr.diff(s) * table[n + 1]
    return res


def variational(expr, field):
    """Euler operator sum_n (-dx)^n d/d(field^(n)).  Vanishes identically
    iff expr is a total x-derivative (for densities depending rationally on
    the jets)."""
    expr = sp.sympify(expr)
    table = _VJ if field == "v" else _WJ
    nmax = max_jet_order(expr, field)
    res = partial(expr, table[0])
    for n in range(1, nmax + 1):
        term = expr.diff(table[n])
        for _ in range(n):
            term = dx(term)
        res += (-1) ** n * term
    return res


def is_zero(expr):
    """Decidable zero test: the generators are algebraically independent,
    so rational canonicalization suffices."""
    c = sp.cancel(sp.together(sp.expand(sp.sympify(expr))))
    if c == 0:
        return True
    num, _ = sp.fraction(c)
    return sp.expand(num) == 0


def equal(a, b):
    return is_zero(sp.sympify(a) - sp.sympify(b))


def evolve(expr, flow_v, flow_w):
    """Time derivative of expr along an evolutionary flow v_t = flow_v,
    w_t = flow_w (prolonged to jets: u^(n)_t = dx^n(flow))."""
    expr = sp.sympify(expr)
    res = partial_v(expr) * flow_v + partial_w(expr) * flow_w
    dv, dw = flow_v, flow_w
    for n in range(1, max_jet_order(expr) + 1):
        dv, dw = dx(dv), dx(dw)
        res += expr.diff(_VJ[n]) * dv + expr.diff(_WJ[n]) * dw
    return res


# ---------------------------------------------------------------------------
# grading: deg u^(n) = n, everything else degree 0
# ---------------------------------------------------------------------------

_ALL_JETS = _VJ[1:] + _WJ[1:]


def _monomial_split(m):
    """Split a monomial into (coefficient-part, {jet: exponent})."""
    jets = {}
    rest = sp.Integer(1)
    for factor in sp.Mul.make_args(m):
        base, expo = factor.as_base_exp()
        if base in _ALL_JETS and expo.is_Integer and expo > 0:
            jets[base] = jets.get(base, 0) + int(expo)
        else:
            rest *= factor
    return rest, jets


def _jet_info(s):
    for n in range(1, JET_MAX + 1):
        if s == _VJ[n]:
            return ("v", n)
        if s == _WJ[n]:
            return ("w", n)
    return None


def monomial_degree(jets):
    return sum(n * e for s, e in jets.items() for f, n in [_jet_info(s)])


def graded_part(expr, k):
    """The part of expr of jet-grading degree k."""
    expr = sp.expand(sp.sympify(expr))
    out = sp.Integer(0)
    for m in sp.Add.make_args(expr):
        _, jets = _monomial_split(m)
        if monomial_degree(jets) == k:
            out += m
    return out


def is_homogeneous(expr, k):
    return is_zero(sp.expand(expr) - graded_part(expr, k))


# ---------------------------------------------------------------------------
# integration by parts / normal form modulo total derivatives
# ---------------------------------------------------------------------------

def _field_profile(jets):
    """Per-field split into (exp of order-1 jet, [(order, exp) for >= 2])."""
    prof = {"v": [0, []], "w": [0, []]}
    for s, e in jets.items():
        fld, n = _jet_info(s)
        if n == 1:
            prof[fld][0] += e
        else:
            prof[fld][1].append((n, e))
    return prof


def admissible(jets):
    """Normal-form admissibility of a jet monomial: every field carries
    either first-order jets only, or a single higher jet with exponent one
    (and then no first-order jet of the same field); a lone higher jet with
    no companion is excluded as well, being reducible by one step of
    integration by parts."""
    if not jets:
        return True
    for fld in ("v", "w"):
        first, highers = _field_profile(jets)[fld]
        if highers:
            if len(highers) > 1 or highers[0][1] != 1 or first > 0:
                return False
    njets = sum(jets.values())
    if njets == 1:
        (s, e), = jets.items()
        if _jet_info(s)[1] >= 2:
            return False
    return True


def _peel_candidate(jets):
    """Choose the higher jet to integrate by parts, or None if stuck.
    Preference: a violating field's lowest higher jet of exponent one;
    otherwise (bare-jet case) the unique higher jet."""
    prof = _field_profile(jets)
    for fld in ("w", "v"):
        first, highers = prof[fld]
        violating = len(highers) > 1 or (highers and first > 0)
        if violating:
            ok = sorted((n, e) for n, e in highers if e == 1)
            if ok:
                return jet(fld, ok[0][0])
    # bare single higher jet
    if sum(jets.values()) == 1:
        (s, e), = jets.items()
        if _jet_info(s)[1] >= 2:
            return s
    return None


def _mono_key(m):
    rest, jets = _monomial_split(m)
    if not jets:
        return (0, 0, "", str(m))
    top = max((( _jet_info(s)[1], _jet_info(s)[0]), s) for s in jets)
    return (top[0][0], 1 if top[0][1] == "w" else 0, str(top[1]), str(m))


def reduce_mod_dx(expr, max_iter=400):
    """Greedy integration by parts towards the admissible normal form.

    Returns (normal, exact) with expr = normal + dx(exact).  The reduction
    removes every monomial violating the admissibility rule whose offending
    higher jet appears linearly; a cycle guard freezes monomials that the
    greedy strategy cannot improve (they are kept in 'normal', so the
    decomposition invariant always holds).
    """
    p = sp.expand(sp.cancel(sp.together(sp.sympify(expr))))
    if p != 0:
        num, den = sp.fraction(sp.together(p))
        # keep a global denominator free of jets out of the loop if possible
        p = sp.expand(sp.cancel(p))
    exact = sp.Integer(0)
    frozen = set()
    seen = set()
    for _ in range(max_iter):
        p = sp.expand(p)
        cands = []
        for m in sp.Add.make_args(p):
            rest, jets_d = _monomial_split(m)
            if not jets_d or admissible(jets_d):
                continue
            key = _canonical_jet_part(jets_d)
            if key in frozen:
                continue
            target = _peel_candidate(jets_d)
            if target is None:
                continue
            cands.append((_mono_key(m), m, jets_d, target))
        if not cands:
            break
        cands.sort(key=lambda t: t[0], reverse=True)
        _, m, jets_d, target = cands[0]
        state = sp.srepr(sp.expand(p))
        if state in seen:
            frozen.add(_canonical_jet_part(jets_d))
            continue
        seen.add(state)
        fld, n = _jet_info(target)
        pred = jet(fld, n - 1)
        mpow = jets_d.get(pred, 0)
        cof = sp.cancel(m / (target * pred ** mpow))
        g = cof * pred ** (mpow + 1) / (mpow + 1)
        exact += g
        p = sp.expand(p - m - dx(cof) * pred ** (mpow + 1) / (mpow + 1))
    normal = sp.cancel(sp.together(p))
    return normal, exact


def _canonical_jet_part(jets_d):
    return tuple(sorted((str(s), e) for s, e in jets_d.items()))


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------

def compile_numeric(expr, digits=64):
    """Compile expr once into an mpmath callable of a point dict (same keys
    as eval_numeric).  Worth it when the same expression is evaluated at
    many points."""
    expr = sp.sympify(expr)
    for s in expr.free_symbols:
        if _f_indices(s) is not None:
            raise ValueError("cannot evaluate opaque f-symbols numerically")
    subs = {E: sp.exp(w), L: sp.log(1 - sp.exp(w)), Pv: sp.exp(v / lam)}
    for s in expr.free_symbols:
        k = _li_order(s)
        if k is not None:
            subs[s] = sp.polylog(k, sp.exp(w))
    expr = expr.subs(subs)
    syms = sorted(expr.free_symbols, key=lambda s: s.name)
    fn = sp.lambdify(syms, expr, modules="mpmath")

    def evaluate(point):
        with mpmath.workdps(digits):
            vals = []
            for s in syms:
                if s.name not in point:
                    raise KeyError("no value supplied for %s" % s.name)
                vals.append(mpmath.mpf(str(point[s.name])))
            return fn(*vals)

    return evaluate


def eval_numeric(expr, point, digits=64):
    """High-precision evaluation.  'point' assigns mpmath-convertible values
    to lam (and/or lam1, lam2), v, w and any jets present; E, L, Li_k and Pv
    are derived from them.  Requires e^w < 1 so that the logarithmic
    generators are real."""
    expr = sp.sympify(expr)
    for s in expr.free_symbols:
        if _f_indices(s) is not None:
            raise ValueError("cannot evaluate opaque f-symbols numerically")
    with mpmath.workdps(digits):
        wval = mpmath.mpf(str(point["w"])) if "w" in point else None
        subs = {}
        for s in expr.free_symbols:
            if s.name in ("lam", "lam1", "lam2", "v", "w") or _jet_info(s):
                name = s.name
                if name not in point:
                    raise KeyError("no value supplied for %s" % name)
                subs[s] = mpmath.mpf(str(point[name]))
        if wval is None and (E in expr.free_symbols or L in expr.free_symbols
                             or any(_li_order(s) for s in expr.free_symbols)):
            raise KeyError("no value supplied for w")
        if wval is not None:
            ew = mpmath.e ** wval
            if ew >= 1:
                raise ValueError("domain violation: e^w must be < 1")
            subs[E] = ew
            subs[L] = mpmath.log(1 - ew)
            for s in expr.free_symbols:
                k = _li_order(s)
                if k is not None:
                    subs[s] = mpmath.polylog(k, ew)
        if Pv in expr.free_symbols:
            lv = point.get("lam", point.get("lam1"))
            subs[Pv] = mpmath.e ** (mpmath.mpf(str(point["v"]))
                                    / mpmath.mpf(str(lv)))
        syms = sorted(expr.free_symbols, key=lambda s: s.name)
        fn = sp.lambdify(syms, expr, modules="mpmath")
        return fn(*[subs[s] for s in syms])


@functools.lru_cache(maxsize=None)
def _noop():  # pragma: no cover - placeholder keeping functools imported
    return None
