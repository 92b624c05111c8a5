"""Perturbative solution of selected dispersive flows with the topological
Cauchy datum, and the genus-1/2 consequences read off from it.

The solutions live in a truncated polynomial ring over x, the descendent
times t21 = t^{2,1} and t11 = t^{1,1}, and eps, with coefficients in the
function ring of t := t^{2,0} generated by {t, et = e^t, lt = log(1-e^t)}
and rational operations.  Each flow is integrated by Picard iteration:
substitute the current truncation into the right-hand side, integrate
term-by-term in the time variable, repeat; the iteration stabilizes one
time-order per step, so the truncation caps are raised along with it.

On top of the solver sit the small-phase extraction of the genus-1 and
genus-2 primary potentials, the string-axiom battery for the descendent
coefficients, the dilaton constraint in the t11 direction, and the
genus-one topological recursion identity in its density form.
"""

from fractions import Fraction
from functools import lru_cache

import sympy as sp

from . import dpoly as dp
from .dispersive import ETA_INV, _dvw_d, eps, f1_density
from .genus0 import (build_prepotential, closed_density, flat_basis,
                     is_zero_mod_E, principal_flow, two_point)
from .jets import L, dx, is_zero, jet, lam, partial_v, partial_w, w

X = sp.Symbol("x")
T21 = sp.Symbol("t21")
T11 = sp.Symbol("t11")
TT = sp.Symbol("t")
ET = sp.Symbol("et")    # e^t
LT = sp.Symbol("lt")    # log(1 - e^t)

_TIME = {"t21": T21, "t11": T11}


def ddt(expr):
    """d/dt in the coefficient ring {t, et = e^t, lt = log(1 - e^t)}."""
    e = sp.sympify(expr)
    return sp.cancel(e.diff(TT) + ET * e.diff(ET)
                     - ET / (1 - ET) * e.diff(LT))


# ---------------------------------------------------------------------------
# solution ring: monomial dicts over (x, t21, t11, eps, t, et, ot, lt, lam)
# with ot = 1/(1 - et) and the reduction et*ot = ot - 1
# ---------------------------------------------------------------------------

_RX, _R21, _R11, _REPS, _RT, _RET, _ROT, _RLT, _RLAM = range(9)
_RNG = 9


def _rmono(idx, e=1):
    m = [0] * _RNG
    m[idx] = e
    return tuple(m)


_ERED_CACHE = {}


def _ered(i, j):
    """et^i ot^j as {(a, b): integer} with a*b = 0."""
    if (i, j) in _ERED_CACHE:
        return _ERED_CACHE[(i, j)]
    if i == 0 or j == 0:
        out = {(i, j): 1}
    else:
        out = {}
        for key, c in _ered(i - 1, j).items():
            out[key] = out.get(key, 0) + c
        for key, c in _ered(i - 1, j - 1).items():
            out[key] = out.get(key, 0) - c
    _ERED_CACHE[(i, j)] = out
    return out


def _radd_term(acc, mono, coeff, caps=()):
    if not coeff:
        return
    for idx, n in caps:
        if mono[idx] > n:
            return
    i, j = mono[_RET], mono[_ROT]
    if i and j:
        base = list(mono)
        for (a, b), c in _ered(i, j).items():
            base[_RET], base[_ROT] = a, b
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


def _radd(d1, d2, scale=1, caps=()):
    out = dict(d1)
    s = Fraction(scale)
    for m, c in d2.items():
        _radd_term(out, m, s * c, caps)
    return out


def _rmul(d1, d2, caps=()):
    out = {}
    for m1, c1 in d1.items():
        for m2, c2 in d2.items():
            _radd_term(out, tuple(a + b for a, b in zip(m1, m2)),
                       c1 * c2, caps)
    return out


def _rdx(d):
    out = {}
    for m, c in d.items():
        e = m[_RX]
        if e:
            k = list(m)
            k[_RX] = e - 1
            _radd_term(out, tuple(k), c * e)
    return out


def _rint(d, tidx):
    """Integration in the time variable with zero constant."""
    out = {}
    for m, c in d.items():
        k = list(m)
        k[tidx] = m[tidx] + 1
        _radd_term(out, tuple(k), c / k[tidx])
    return out


def _rddt(d):
    """d/dt on the coefficient ring: d(t) = 1, d(et) = et,
    d(ot) = et ot^2, d(lt) = -et ot."""
    out = {}
    for m, c in d.items():
        if m[_RT]:
            k = list(m)
            k[_RT] -= 1
            _radd_term(out, tuple(k), c * m[_RT])
        if m[_RET]:
            _radd_term(out, m, c * m[_RET])
        if m[_ROT]:
            k = list(m)
            k[_RET] += 1
            k[_ROT] += 1
            _radd_term(out, tuple(k), c * m[_ROT])
        if m[_RLT]:
            k = list(m)
            k[_RLT] -= 1
            k[_RET] += 1
            k[_ROT] += 1
            _radd_term(out, tuple(k), -c * m[_RLT])
    return out


def _rseries(u, weights, caps):
    """1 + sum_j weights[j-1] u^j, truncated; u must have no cap-free
    part so the loop terminates."""
    acc = {_rmono(_RX, 0): Fraction(1)}
    p = dict(acc)
    for wgt in weights():
        p = _rmul(p, u, caps)
        if not p:
            break
        acc = _radd(acc, p, wgt)
    return acc


def _wexp():
    j, f = 0, 1
    while True:
        j += 1
        f *= j
        yield Fraction(1, f)


def _wgeom():
    while True:
        yield Fraction(1)


def _wlog1p():
    j = 0
    while True:
        j += 1
        yield Fraction((-1) ** (j + 1), j)


def _ring_to_sympy(d):
    syms = (X, T21, T11, eps, TT, ET, None, LT, lam)
    out = []
    for m, c in d.items():
        term = sp.Rational(c.numerator, c.denominator)
        for idx, e in enumerate(m):
            if not e:
                continue
            if idx == _ROT:
                term *= (1 - ET) ** (-e)
            else:
                term *= syms[idx] ** e
        out.append(term)
    return sp.Add(*out)


class _Substitutor:
    """Evaluates differential-polynomial dicts on a truncated solution
    (V, W): the Novikov block e^w, 1/(1-e^w), log(1-e^w) is re-expanded
    around w = t, jets become x-derivatives."""

    def __init__(self, V, W, caps):
        self.caps = caps
        one = {_rmono(_RX, 0): Fraction(1)}
        delta = _radd(W, {_rmono(_RT): Fraction(1)}, -1)
        ed = _rseries(delta, _wexp, caps)
        q = _rmul(_rmul(_radd(ed, one, -1), {_rmono(_RET): Fraction(1)},
                        caps),
                  {_rmono(_ROT): Fraction(1)}, caps)
        base = {dp.IV: V, dp.IW: W, dp.ILAM: {_rmono(_RLAM): Fraction(1)},
                dp.IE: _rmul({_rmono(_RET): Fraction(1)}, ed, caps),
                dp.IO: _rmul({_rmono(_ROT): Fraction(1)},
                             _rseries(q, _wgeom, caps), caps),
                dp.IL: _radd({_rmono(_RLT): Fraction(1)},
                             _radd(_rseries(_rmul(q, {_rmono(_RX, 0):
                                                      Fraction(-1)}),
                                            _wlog1p, caps), one, -1))}
        jv, jw = V, W
        for n in range(1, dp.JMAX + 1):
            jv, jw = _rdx(jv), _rdx(jw)
            base[dp.IVJ[n]] = jv
            base[dp.IWJ[n]] = jw
        self.base = base
        self._pow = {}

    def _power(self, idx, e):
        key = (idx, e)
        if key not in self._pow:
            if e < 0:
                if idx != dp.ILAM:
                    raise ValueError("negative power of generator %d" % idx)
                self._pow[key] = {_rmono(_RLAM, e): Fraction(1)}
            elif e == 1:
                self._pow[key] = self.base[idx]
            else:
                self._pow[key] = _rmul(self._power(idx, e - 1),
                                       self.base[idx], self.caps)
        return self._pow[key]

    def __call__(self, d):
        total = {}
        for mono, c in d.items():
            acc = {_rmono(_RX, 0): c}
            for idx, e in enumerate(mono):
                if not e:
                    continue
                if idx not in self.base:
                    raise ValueError("generator %d has no value on the "
                                     "solution ring" % idx)
                acc = _rmul(acc, self._power(idx, e), self.caps)
                if not acc:
                    break
            total = _radd(total, acc)
        return total


@lru_cache(maxsize=None)
def _antidiag():
    return build_prepotential("Xk_antidiagonal", k=1)


_FLOW_DENSITY = {"t21": ("w", 1), "t11": ("v", 1)}


def _flow_dicts(D, flow):
    """Per-eps-order differential-polynomial dicts of the dispersive flow
    (dv/dt, dw/dt) generated by the D-completion of the descendent
    density.  Everything stays in dict form: the polylogarithms in the
    density drop out under d_x, so the flows are Novikov-rational."""
    alpha, p = _FLOW_DENSITY[flow]
    h0 = dp.from_sympy(sp.expand(closed_density(_antidiag(), alpha, p)))
    dens = {0: h0}
    for k, slots in D.terms.items():
        acc = {}
        for (l, m), b in slots.items():
            acc = dp.padd(acc, dp.pmul(dp.from_sympy(sp.expand(b)),
                                       _dvw_d(h0, l, m)))
        dens[k] = acc
    mlam2 = dp.pscale(dp.gen(dp.ILAM, 2), -1)
    fv = {k: dp.pmul(mlam2, dp.dx(dp.variational(d, "w")))
          for k, d in dens.items()}
    fw = {k: dp.pmul(mlam2, dp.dx(dp.variational(d, "v")))
          for k, d in dens.items()}
    fv = {k: d for k, d in fv.items() if d}
    fw = {k: d for k, d in fw.items() if d}
    return [fv, fw]


class TimeSeriesSolution:
    """Truncated solution (v, w) of one or more descendent flows with the
    topological Cauchy datum v = x, w = t, held as solution-ring dicts."""

    def __init__(self, rv, rw, caps, eps_order):
        self._rv = rv
        self._rw = rw
        self.caps = dict(caps)
        self.eps_order = eps_order
        datum_v = _radd(rv, {_rmono(_RX): Fraction(1)}, -1)
        datum_w = _radd(rw, {_rmono(_RT): Fraction(1)}, -1)
        for d in (datum_v, datum_w):
            for m in d:
                if m[_R21] == m[_R11] == m[_REPS] == 0:
                    raise AssertionError("topological datum violated")
                if m[_REPS] % 2:
                    raise AssertionError("odd eps power in solution")

    @property
    def v(self):
        return _ring_to_sympy(self._rv)

    @property
    def w(self):
        return _ring_to_sympy(self._rw)

    def coefficient(self, field, n21=0, n11=0, keps=0):
        """Coefficient of t21^n21 t11^n11 eps^keps, a polynomial in x over
        the t-ring."""
        d = self._rv if field == "v" else self._rw
        out = {}
        for m, c in d.items():
            if (m[_R21], m[_R11], m[_REPS]) == (n21, n11, keps):
                k = list(m)
                k[_R21] = k[_R11] = k[_REPS] = 0
                _radd_term(out, tuple(k), c)
        return sp.expand(_ring_to_sympy(out))


def solve_flow(D, flow="t21", time_order=3, eps_order=4, start=None):
    """Picard solution of the named descendent flow, truncated at the
    given time order and eps order.  'start' chains flows: it supplies the
    time-zero initial condition (default: the topological datum)."""
    if flow not in _TIME:
        raise ValueError("unknown flow %r" % flow)
    ts = _TIME[flow]
    tidx = _R21 if flow == "t21" else _R11
    if start is None:
        V0 = {_rmono(_RX): Fraction(1)}
        W0 = {_rmono(_RT): Fraction(1)}
        caps = {ts: time_order, eps: eps_order}
    else:
        V0, W0 = start._rv, start._rw
        caps = dict(start.caps)
        caps[ts] = time_order
        caps[eps] = eps_order
    rcaps = tuple((({T21: _R21, T11: _R11, eps: _REPS})[s], n)
                  for s, n in caps.items())
    fdicts = _flow_dicts(D, flow)
    V, W = V0, W0
    for step in range(1, time_order + 1):
        scaps = tuple((i, step - 1) if i == tidx else (i, n)
                      for i, n in rcaps)
        cut = lambda d: {m: c for m, c in d.items()
                         if all(m[i] <= n for i, n in scaps)}
        sub = _Substitutor(cut(V), cut(W), scaps)
        V, W = V0, W0
        for fd, comp in ((fdicts[0], "v"), (fdicts[1], "w")):
            rhs = {}
            for k, d in fd.items():
                if k > eps_order:
                    continue
                rhs = _radd(rhs, _rmul(sub(d),
                                       {_rmono(_REPS, k): Fraction(1)},
                                       scaps))
            upd = {m: c for m, c in _rint(rhs, tidx).items()
                   if all(m[i] <= n for i, n in rcaps)}
            if comp == "v":
                V = _radd(V, upd)
            else:
                W = _radd(W, upd)
    return TimeSeriesSolution(V, W, caps, eps_order)


# ---------------------------------------------------------------------------
# small-phase extraction of the genus expansion
# ---------------------------------------------------------------------------

# the double descendent insertion is removed by applying the puncture
# equation twice, leaving twice the second primary derivative
PUNCTURE_FACTOR = 2


def genus_fpp(sol, g):
    """F_g'' (second t-derivative of the genus-g primary potential) from
    the eps^(2g) (t21)^2 coefficient of the solved w."""
    c = sol.coefficient("w", n21=2, keps=2 * g)
    if sp.expand(sp.diff(c, X)) != 0:
        raise AssertionError("descendent coefficient fails to be x-free")
    corr = sp.cancel(-sp.factorial(2) * c / lam ** 2)  # the sps correlator
    return sp.cancel(corr / PUNCTURE_FACTOR)


def extract_genus2(sol):
    """F_2'' as a rational function of et = e^t."""
    return genus_fpp(sol, 2)


def genus2_invariants(f2pp, d_max):
    """N_{2,d} for d = 1..d_max from the et-expansion of F_2''."""
    ser = sp.series(sp.cancel(f2pp), ET, 0, d_max + 1).removeO()
    return [sp.nsimplify(sp.expand(ser).coeff(ET, d)) / d ** 2
            for d in range(1, d_max + 1)]


def f1_small_phase():
    """Genus-1 primary potential from the one-loop density on the
    topological datum (v = x, w = t): -t/24 + Li_1(e^t)/12 with
    Li_1 = -lt."""
    f1 = f1_density()
    small = f1.subs({jet("v", 1): 1, jet("w", 1): 0})
    return sp.expand(small.subs({w: TT, L: LT}))


# ---------------------------------------------------------------------------
# string and dilaton constraints
# ---------------------------------------------------------------------------

def check_string(sol, n_max=5):
    """a''_{k,n} = C(n,k) d^k/dt^k a''_{0,n-k} for the x-coefficients of
    the t21-expansion, order by order in eps.  Exact."""
    if sol.caps.get(T21, 0) < n_max:
        raise ValueError("solution not resolved to t21 order %d" % n_max)
    coeff = {}
    for n in range(n_max + 1):
        for k in range(0, sol.eps_order + 1, 2):
            cn = sol.coefficient("w", n21=n, keps=k)
            for kx in range(n + 1):
                # a_{k,n}: coefficient of x^k t21^n, without the Taylor
                # normalization of the t21 power
                coeff[(kx, n, k)] = sp.expand(sp.factorial(n)
                                              * cn.coeff(X, kx))
    for n in range(n_max + 1):
        for kx in range(n + 1):
            for k in range(0, sol.eps_order + 1, 2):
                target = coeff[(0, n - kx, k)]
                for _ in range(kx):
                    target = ddt(target)
                target *= sp.binomial(n, kx)
                if sp.cancel(sp.together(coeff[(kx, n, k)] - target)) != 0:
                    return False
    return True


def _fg_pp_closed(g, y):
    """F_g''(y) in closed form, g = 0, 1, 2."""
    ey = sp.exp(y)
    if g == 0:
        return -sp.log(1 - ey)
    if g == 1:
        return ey / (12 * (1 - ey) ** 2)
    if g == 2:
        return ey * (1 + 4 * ey + ey ** 2) / (240 * (1 - ey) ** 4)
    raise ValueError("g <= 2 supported")


def dilaton_profile_closed(g, s, t):
    """(1 - s)^(-2g-2) F_g''(t/(1-s)), the closed t11-profile of the
    (t21)^2 descendent correlator."""
    return _fg_pp_closed(g, t / (1 - s)) / (1 - s) ** (2 * g + 2)


def check_dilaton_closed(g_max=2):
    """The closed profiles are annihilated by
    (1-s) d_s - t d_t - 2 - 2g.  Exact."""
    s, t = sp.symbols("s t_")
    for g in range(g_max + 1):
        f = dilaton_profile_closed(g, s, t)
        res = (1 - s) * f.diff(s) - t * f.diff(t) - (2 + 2 * g) * f
        if sp.simplify(res) != 0:
            return False
    return True


def _fg_pp_ring(g):
    """F_g'' in the coefficient ring, g = 0, 1, 2."""
    return (-LT,
            ET / (12 * (1 - ET) ** 2),
            ET * (1 + 4 * ET + ET ** 2) / (240 * (1 - ET) ** 4))[g]


def dilaton_profile_ring(g, order):
    """Taylor coefficients in t11 of the closed profile, computed in the
    coefficient ring: the annihilator gives the recursion
    (j+1) c_{j+1} = (t d/dt + 2 + 2g + j) c_j from c_0 = F_g''."""
    c = _fg_pp_ring(g)
    out = [c]
    for j in range(order):
        c = sp.cancel((TT * ddt(c) + (2 + 2 * g + j) * c) / (j + 1))
        out.append(c)
    return out


def check_dilaton(sol, g_max=2):
    """The solved (t21)^2 coefficients match, order by order in t11, the
    Taylor coefficients generated by the dilaton annihilator
    (1 - t11) d_{t11} - t d_t - 2 - 2g from F_g''; the closed profile
    solves the same constraint (check_dilaton_closed, exact)."""
    n11 = sol.caps.get(T11, 0)
    if n11 < 1 or sol.caps.get(T21, 0) < 2:
        raise ValueError("needs a solution of the t11 and t21 flows")
    if not check_dilaton_closed(g_max):
        return False
    for g in range(g_max + 1):
        ring = dilaton_profile_ring(g, n11)
        for j in range(n11 + 1):
            c = sol.coefficient("w", n21=2, n11=j, keps=2 * g)
            if sp.expand(sp.diff(c, X)) != 0:
                return False
            cj = sp.cancel(-sp.factorial(2) * c
                           / (lam ** 2 * PUNCTURE_FACTOR))
            if sp.cancel(sp.together(cj - ring[j])) != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# genus-one topological recursion
# ---------------------------------------------------------------------------

def trr_contraction():
    """The key contraction sum_gamma (dF1/du^gamma_x)(du^gamma/dt^{mu,0})
    eta^{mu nu}, as exact functions of the jets; the value is
    -lam^2/12 on the Novikov direction and 0 on the unit one."""
    f1 = f1_density()
    g1 = (sp.cancel(f1.diff(jet("v", 1))), sp.cancel(f1.diff(jet("w", 1))))
    flows = [(jet("v", 1), jet("w", 1)),
             principal_flow_closed("w", 0)]
    out = []
    for nu in range(2):
        val = sum(ETA_INV[mu][nu] * (g1[0] * flows[mu][0]
                                     + g1[1] * flows[mu][1])
                  for mu in range(2))
        out.append(sp.cancel(sp.together(val)))
    return tuple(out)


def principal_flow_closed(alpha, p):
    """(dv/dt, dw/dt) of the closed-form density h_{alpha,p} under the
    anti-diagonal hydrodynamic bracket."""
    h = closed_density(_antidiag(), alpha, p)
    grad = (partial_v(h), partial_w(h))
    fv = sp.cancel(ETA_INV[0][0] * dx(grad[0]) + ETA_INV[0][1] * dx(grad[1]))
    fw = sp.cancel(ETA_INV[1][0] * dx(grad[0]) + ETA_INV[1][1] * dx(grad[1]))
    return fv, fw


def check_genus1_trr(p_max=3, z_order=6, d_max=8):
    """Genus-one topological recursion in density form, p <= p_max:

    * the key contraction takes the printed value (exact);
    * the two-point normalization <<tau_{p-1} phi_a phi_nu>>_0 =
      d_nu h_{a,p-1} (series track, exact per Novikov degree);
    * the flow form of the genus-zero recursion
      du/dt^{a,p} = d_nu h_{a,p-1} eta^{mu nu} du/dt^{mu,0};
    * the resulting contraction identity
      C_{a,p} = -(lam^2/12) dx d_w h_{a,p-1}.
    """
    cv, cw = trr_contraction()
    if not (is_zero(cv) and is_zero(sp.cancel(cw + lam ** 2 / 12))):
        return False
    B = flat_basis(_antidiag(), z_order=z_order, d_max=d_max)
    part = (partial_v, partial_w)
    names = ("v", "w")
    f1 = f1_density()
    g1 = (sp.cancel(f1.diff(jet("v", 1))), sp.cancel(f1.diff(jet("w", 1))))
    flows0 = [principal_flow(B, a, 0, closed=False) for a in names]
    closed0 = ((jet("v", 1), jet("w", 1)), principal_flow_closed("w", 0))
    for ai, a in enumerate(names):
        for p in range(1, p_max + 1):
            hprev = B.density(a, p - 1)
            for nu in range(2):
                if not is_zero_mod_E(
                        sp.expand(two_point(B, a, p - 1, names[nu], 0)
                                  - part[nu](hprev)), d_max):
                    return False
            fap = principal_flow(B, a, p, closed=False)
            for comp in range(2):
                red = sum(part[nu](hprev) * ETA_INV[mu][nu]
                          * flows0[mu][comp]
                          for mu in range(2) for nu in range(2))
                if not is_zero_mod_E(sp.expand(fap[comp] - red), d_max):
                    return False
            # C_{a,p} from the chain (closed-form zeroth flows, exact),
            # against the printed contraction value
            lhs = sum(g1[comp] * ETA_INV[mu][nu] * closed0[mu][comp]
                      * dx(part[nu](hprev))
                      for comp in range(2) for mu in range(2)
                      for nu in range(2))
            rhs = -lam ** 2 / 12 * dx(partial_w(hprev))
            if sp.cancel(sp.together(lhs - rhs)) != 0:
                return False
    return True
