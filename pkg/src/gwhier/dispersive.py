"""Dispersive deformation of the hydrodynamic hierarchy.

Three pieces live here: the eps-expansion of the interpolated lattice
Hamiltonian density, the jet-order-raising D-operator that carries every
density in involution with it to its dispersive completion (printed
low-order coefficients plus a solver that determines them from the
involutivity condition by exact sparse linear algebra), and the one-loop
quasi-triviality data (the generating density K and the genus-one density).
"""

from fractions import Fraction

import sympy as sp

from . import dpoly as dp
from .jets import (E, L, Pv, compile_numeric, dx, eval_numeric, evolve, fsym,
                   is_homogeneous, is_zero, jet, lam, li, partial_v,
                   partial_w, v, variational, w, _monomial_split, _jet_info)

eps = sp.Symbol("eps")

v1, v2, v3 = jet("v", 1), jet("v", 2), jet("v", 3)
w1, w2, w3 = jet("w", 1), jet("w", 2), jet("w", 3)

# anti-diagonal flat metric, inverse, on (v, w)
ETA_INV = ((sp.Integer(0), -lam ** 2), (-lam ** 2, sp.Integer(0)))


def _eps_trunc(expr, order):
    out = []
    for t in sp.Add.make_args(sp.expand(expr)):
        if t.as_powers_dict().get(eps, 0) <= order:
            out.append(t)
    return sp.Add(*out)


# ---------------------------------------------------------------------------
# interpolated lattice Hamiltonian density
# ---------------------------------------------------------------------------

def ablowitz_ladik_density(eps_order, depth=None):
    """Even-order eps-expansion, as a dict {order: differential polynomial},
    of the interpolated lattice Hamiltonian density

        -sqrt((1 - e^a)(1 - e^abar)) cosh(v/lam),
        a = sum_{n >= 0} (i eps lam)^n w^(n) / (n+1)!,  abar = a|_{eps -> -eps},

    with the square-root branch normalized so the leading term is
    (-1 + e^w) cosh(v/lam).  Odd orders and imaginary parts cancel by the
    eps -> -eps symmetry; both are asserted.  'depth' raises the internal
    truncation order (used as a stability oracle for the coefficients)."""
    if eps_order < 0 or eps_order % 2:
        raise ValueError("eps_order must be even and nonnegative")
    if eps_order > 8:
        raise ValueError("eps_order > 8 not supported")
    if depth is None:
        depth = eps_order
    if depth < eps_order:
        raise ValueError("depth must be at least eps_order")
    s = sp.I * eps * lam
    mu = sum((s ** n * jet("w", n) / sp.factorial(n + 1)
              for n in range(1, depth + 1)), sp.Integer(0))
    emu = _eps_trunc(sum(mu ** j / sp.factorial(j)
                         for j in range(depth + 1)), depth)
    emub = _eps_trunc(emu.subs(eps, -eps), depth)
    X = _eps_trunc((1 - E * emu) * (1 - E * emub), depth)
    Yx = sp.expand(sp.cancel((X - (1 - E) ** 2) / (1 - E) ** 2))
    sq = _eps_trunc(sum(sp.binomial(sp.Rational(1, 2), j) * Yx ** j
                        for j in range(depth + 1)), eps_order)
    h = _eps_trunc(sp.expand(-(1 - E) * sq * (Pv + 1 / Pv) / 2), eps_order)
    out = {}
    for k in range(eps_order + 1):
        c = sp.expand(h.coeff(eps, k))
        if k % 2:
            if not is_zero(c):
                raise AssertionError("odd eps order %d fails to cancel" % k)
            continue
        if c.has(sp.I):
            raise AssertionError("imaginary part survives at eps^%d" % k)
        c = sp.cancel(sp.together(c))
        if k and not is_homogeneous(c, k):
            raise AssertionError("jet grading violated at eps^%d" % k)
        out[k] = c
    return out


# ---------------------------------------------------------------------------
# dispersionless involution condition and a stock of its solutions
# ---------------------------------------------------------------------------

def involution_residual(f):
    """f_ww + lam^2 e^w/(1 - e^w) f_vv; zero iff the zero-jet density f is
    in involution with every dispersionless Hamiltonian of the hierarchy."""
    return sp.expand(partial_w(partial_w(f))
                     + lam ** 2 * E / (1 - E) * partial_v(partial_v(f)))


def is_involutive(f):
    return is_zero(involution_residual(f))


def involution_stock():
    """Independent exact solutions of the involution condition."""
    stock = [
        sp.Integer(1), v, w, v * w,
        v ** 2 - 2 * lam ** 2 * li(2),
        v ** 3 - 6 * lam ** 2 * v * li(2),
        -v ** 2 * w / (2 * lam ** 2) + w * li(2) - 2 * li(3),
        -v ** 3 / (6 * lam ** 2) + v * li(2),
        (E - 1) * (Pv + 1 / Pv) / 2,
        (E - 1) * (Pv - 1 / Pv) / 2,
    ]
    for f in stock:
        if not is_involutive(f):
            raise AssertionError("stock density fails involution: %s" % f)
    return stock


def random_involutive(rng, stock=None):
    """Random rational linear combination of the stock solutions."""
    if stock is None:
        stock = involution_stock()
    return sum(sp.Rational(rng.randint(-9, 9), rng.randint(1, 7)) * f
               for f in stock)


# ---------------------------------------------------------------------------
# the D-operator
# ---------------------------------------------------------------------------

class DOperator:
    """D = 1 + sum_k eps^k sum_{l,m} b^(k)_{l,m} d_v^l d_w^m, with the
    coefficients stored as {order: {(l, m): differential polynomial}}."""

    def __init__(self, terms):
        self.terms = {int(k): dict(tbl) for k, tbl in terms.items()}

    @property
    def order(self):
        return max(self.terms) if self.terms else 0


def dop_slots(k):
    """The (l, m) derivative slots occurring at eps^k: l >= 2, m in {0, 1},
    l + m <= 3k/2."""
    top = (3 * k) // 2
    return [(l, 0) for l in range(2, top + 1)] + \
           [(l, 1) for l in range(2, top)]


def _graded_monomials(k):
    """All jet monomials of grading k (v^(n), w^(n) carrying weight n) in
    jets of order at most floor((k+1)/2); integration by parts pushes any
    higher jet below this bound."""
    top = (k + 1) // 2
    gens = [jet(f, n) for f in ("v", "w") for n in range(1, top + 1)]
    monos = set()

    def rec(i, deg, cur):
        if deg == k:
            monos.add(sp.Mul(*[g ** e for g, e in cur]))
            return
        if i == len(gens):
            return
        g = gens[i]
        n = _jet_info(g)[1]
        for e in range(0, (k - deg) // n + 1):
            rec(i + 1, deg + n * e, cur + [(g, e)])

    rec(0, 0, [])
    return sorted(monos, key=sp.default_sort_key)


# residual integration-by-parts reductions on the graded span, per grading;
# the quotient is exhausted by the monomials of the displayed low-order
# coefficients, against which these lists are validated
_BASIS_EXCLUDED = {
    2: (),
    3: (v1 * v2, w1 * w2),
    4: (v1 ** 3 * w1, v1 ** 2 * w1 ** 2, v1 * w1 ** 3, w1 ** 4),
}


def dop_basis(k, l=None, m=None):
    """Jet monomials of grading k in the total-derivative normal form;
    these carry the coefficient functions of the displayed D-operator.
    The admissible set is the same for every derivative slot (l, m); the
    optional arguments only validate the slot."""
    if k not in _BASIS_EXCLUDED:
        raise ValueError("gradings 2, 3, 4 supported")
    if (l is None) != (m is None):
        raise ValueError("give both of l, m or neither")
    if l is not None and (l, m) not in dop_slots(k):
        raise ValueError("(%s, %s) is not a derivative slot at eps^%d"
                         % (l, m, k))
    excl = set(_BASIS_EXCLUDED[k])
    return [mono for mono in _graded_monomials(k) if mono not in excl]


def apply_dop(D, f):
    """D applied to a zero-jet density f: {order: density}, order 0 being f
    itself."""
    derivs = {}

    def dvw(l, m):
        if (l, m) not in derivs:
            e = f
            for _ in range(l):
                e = partial_v(e)
            for _ in range(m):
                e = partial_w(e)
            derivs[(l, m)] = sp.expand(e)
        return derivs[(l, m)]

    out = {0: f}
    for k, slots in D.terms.items():
        out[k] = sp.expand(sum(b * dvw(l, m) for (l, m), b in slots.items()))
    return out


def apply_dop_opaque(D):
    """Same with f kept opaque (f-symbols f_{l,m})."""
    out = {0: fsym(0, 0)}
    for k, slots in D.terms.items():
        out[k] = sp.expand(sum(b * fsym(l, m)
                               for (l, m), b in slots.items()))
    return out


# ---------------------------------------------------------------------------
# printed coefficients
# ---------------------------------------------------------------------------

def printed_d2():
    """The eps^2 coefficients of the one-loop D-operator."""
    b_vv = (lam ** 4 * E * (-1 + 2 * E) * w1 ** 2 / (24 * (-1 + E) ** 2)
            + lam ** 2 * E * v1 ** 2 / (12 * (1 - E)))
    b_vvw = lam ** 4 * E * w1 ** 2 / (12 * (-1 + E)) + lam ** 2 * v1 ** 2 / 12
    b_vvv = lam ** 4 * E * w1 * v1 / (6 * (-1 + E))
    return {2: {(2, 0): b_vv, (2, 1): b_vvw, (3, 0): b_vvv}}


def printed_b4_vv():
    """The eps^4 coefficient of d_v^2."""
    return lam ** 2 / (5760 * (-1 + E) ** 4) * (
        -8 * E * (-1 + E ** 2) * v1 ** 4
        + 4 * (-1 + E) * (E * (11 + 7 * E) - 2) * lam ** 2 * w2 * v1 ** 2
        - 8 * (-1 + E) * (E * (-1 + 19 * E) + 2) * lam ** 2 * w1 * v2 * v1
        + lam ** 2 * ((4 - E * (15 * E * (-4 + E) + 19)) * lam ** 2 * w2 * w1 ** 2
                      + 8 * E * (-1 + E) * ((E * (-7 + 3 * E) + 1) * lam ** 2 * w2 ** 2
                                            + (-1 + E) * (5 + 7 * E) * v2 ** 2)))


def printed_b4_vvv():
    """The eps^4 coefficient of d_v^3.  The lam-powers of the last three
    terms are restored from the jet/lam homogeneity (lam-power equals
    order + l minus the number of v-jet factors) that the first term and
    all lower-order coefficients satisfy; log(e^w - 1) is taken on the
    branch log(1 - e^w) (the constant offset is a gauge shift)."""
    t1 = 2 * lam ** 6 * (4 * w * (-1 + E) ** 3
                         + 3 * (4 * L * (-1 + E) ** 3
                                + E * (E * (-107 + 32 * E) + 131) - 46)) \
        * w1 * v1 * w2 / (1 - E) ** 3
    t2 = (3 * (E * (-119 + 183 * E) + 46) / (-1 + E) ** 3
          - 12 * L - 4 * w) * w1 ** 2 * v2 * lam ** 6
    t3 = -144 * E * (1 + E) * w2 * v2 * lam ** 6 / (-1 + E) ** 2
    t4 = -12 * (-3 * (-5 + 9 * E) / (-1 + E) ** 2
                - 2 * L + 6 * w) * v1 ** 2 * v2 * lam ** 4
    return sp.together((t1 + t2 + t3 + t4) / 17280)


# eps^4 involutivity completion: the d_v^2 / d_v^3 slots are the
# displayed closed forms; these are the remaining slots, determined
# by dop_solve(4, seed_printed=True) and recorded here because the
# exact linear solve takes minutes.  dop_verify at order 4
# certifies the assembled operator; a slow test regenerates it.
_D4_COMPLETION = {
    (2, 1):
        "lam**2*(36*E**4*L*lam**4*w1**2*w2 - 8*E**4*L*lam**2*v1**2*w2 - "
        "16*E**4*L*lam**2*v1*v2*w1 + 12*E**4*lam**4*w*w1**2*w2 + 20*E**4*"
        "lam**4*w1**4 + 336*E**4*lam**4*w1**2*w2 + 168*E**4*lam**4*w2**2 "
        "+ 24*E**4*lam**2*v1**2*w*w2 + 40*E**4*lam**2*v1**2*w1**2 + 48*E*"
        "*4*lam**2*v1**2*w2 + 48*E**4*lam**2*v1*v2*w*w1 + 288*E**4*lam**"
        "2*v1*v2*w1 - 312*E**4*lam**2*v2**2 + 4*E**4*v1**4 - 144*E**3*L*"
        "lam**4*w1**2*w2 + 32*E**3*L*lam**2*v1**2*w2 + 64*E**3*L*lam**2*"
        "v1*v2*w1 - 48*E**3*lam**4*w*w1**2*w2 + 76*E**3*lam**4*w1**4 - "
        "1887*E**3*lam**4*w1**2*w2 - 432*E**3*lam**4*w2**2 - 96*E**3*lam*"
        "*2*v1**2*w*w2 - 168*E**3*lam**2*v1**2*w1**2 - 396*E**3*lam**2*"
        "v1**2*w2 - 192*E**3*lam**2*v1*v2*w*w1 - 504*E**3*lam**2*v1*v2*"
        "w1 + 960*E**3*lam**2*v2**2 + 32*E**3*v1**4 + 216*E**2*L*lam**4*"
        "w1**2*w2 - 48*E**2*L*lam**2*v1**2*w2 - 96*E**2*L*lam**2*v1*v2*"
        "w1 + 72*E**2*lam**4*w*w1**2*w2 + 144*E**2*lam**4*w1**4 + 2910*E*"
        "*2*lam**4*w1**2*w2 + 360*E**2*lam**4*w2**2 + 144*E**2*lam**2*v1*"
        "*2*w*w2 + 264*E**2*lam**2*v1**2*w1**2 + 708*E**2*lam**2*v1**2*"
        "w2 + 288*E**2*lam**2*v1*v2*w*w1 + 264*E**2*lam**2*v1*v2*w1 - "
        "1008*E**2*lam**2*v2**2 - 72*E**2*v1**4 - 144*E*L*lam**4*w1**2*"
        "w2 + 32*E*L*lam**2*v1**2*w2 + 64*E*L*lam**2*v1*v2*w1 - 48*E*lam*"
        "*4*w*w1**2*w2 - 68*E*lam**4*w1**4 - 1773*E*lam**4*w1**2*w2 - 96*"
        "E*lam**4*w2**2 - 96*E*lam**2*v1**2*w*w2 - 184*E*lam**2*v1**2*w1*"
        "*2 - 420*E*lam**2*v1**2*w2 - 192*E*lam**2*v1*v2*w*w1 - 168*E*"
        "lam**2*v1*v2*w1 + 384*E*lam**2*v2**2 + 32*E*v1**4 + 36*L*lam**4*"
        "w1**2*w2 - 8*L*lam**2*v1**2*w2 - 16*L*lam**2*v1*v2*w1 + 12*lam**"
        "4*w*w1**2*w2 + 8*lam**4*w1**4 + 414*lam**4*w1**2*w2 + 24*lam**2*"
        "v1**2*w*w2 + 48*lam**2*v1**2*w1**2 + 60*lam**2*v1**2*w2 + 48*"
        "lam**2*v1*v2*w*w1 + 120*lam**2*v1*v2*w1 - 24*lam**2*v2**2 + 4*"
        "v1**4)/(17280*(1 - E)**4)"
    ,
    (3, 1):
        "lam**4*v2*(-20*E**4*lam**2*w1**2 + 24*E**4*lam**2*w2 - 13*E**4*"
        "v1**2 + 30*E**3*lam**2*w1**2 - 72*E**3*lam**2*w2 + 40*E**3*v1**"
        "2 + 72*E**2*lam**2*w2 - 42*E**2*v1**2 - 10*E*lam**2*w1**2 - 24*"
        "E*lam**2*w2 + 16*E*v1**2 - v1**2)/(1440*(1 - E)**4)"
    ,
    (4, 0):
        "lam**4*(12*E**4*L*lam**4*w1**4 - 20*E**4*L*lam**2*v1**2*w1**2 + "
        "8*E**4*L*v1**4 + 4*E**4*lam**4*w*w1**4 + 108*E**4*lam**4*w1**4 +"
        " 84*E**4*lam**4*w1**2*w2 + 144*E**4*lam**4*w2**2 + 20*E**4*lam**"
        "2*v1**2*w*w1**2 - 72*E**4*lam**2*v1**2*w1**2 + 168*E**4*lam**2*"
        "v1**2*w2 - 144*E**4*lam**2*v1*v2*w1 + 144*E**4*lam**2*v2**2 - "
        "24*E**4*v1**4*w - 36*E**4*v1**4 - 36*E**3*L*lam**4*w1**4 + 72*E*"
        "*3*L*lam**2*v1**2*w1**2 - 32*E**3*L*v1**4 - 12*E**3*lam**4*w*w1*"
        "*4 - 473*E**3*lam**4*w1**4 - 348*E**3*lam**4*w1**2*w2 - 288*E**"
        "3*lam**4*w2**2 - 56*E**3*lam**2*v1**2*w*w1**2 + 285*E**3*lam**2*"
        "v1**2*w1**2 - 468*E**3*lam**2*v1**2*w2 + 72*E**3*lam**2*v1*v2*"
        "w1 - 432*E**3*lam**2*v2**2 + 96*E**3*v1**4*w + 144*E**3*v1**4 + "
        "36*E**2*L*lam**4*w1**4 - 96*E**2*L*lam**2*v1**2*w1**2 + 48*E**2*"
        "L*v1**4 + 12*E**2*lam**4*w*w1**4 + 518*E**2*lam**4*w1**4 + 264*"
        "E**2*lam**4*w1**2*w2 + 144*E**2*lam**4*w2**2 + 48*E**2*lam**2*"
        "v1**2*w*w1**2 - 462*E**2*lam**2*v1**2*w1**2 + 432*E**2*lam**2*"
        "v1**2*w2 + 288*E**2*lam**2*v1*v2*w1 + 432*E**2*lam**2*v2**2 - "
        "144*E**2*v1**4*w - 240*E**2*v1**4 - 12*E*L*lam**4*w1**4 + 56*E*"
        "L*lam**2*v1**2*w1**2 - 32*E*L*v1**4 - 4*E*lam**4*w*w1**4 - 138*"
        "E*lam**4*w1**4 - 8*E*lam**2*v1**2*w*w1**2 + 387*E*lam**2*v1**2*"
        "w1**2 - 132*E*lam**2*v1**2*w2 - 216*E*lam**2*v1*v2*w1 - 144*E*"
        "lam**2*v2**2 + 96*E*v1**4*w + 192*E*v1**4 - 12*L*lam**2*v1**2*"
        "w1**2 + 8*L*v1**4 - 4*lam**2*v1**2*w*w1**2 - 138*lam**2*v1**2*"
        "w1**2 - 24*v1**4*w - 60*v1**4)/(17280*(1 - E)**4)"
    ,
    (5, 0):
        "E*lam**6*(-21*E**3*lam**2*v1*w1**3 + 40*E**3*lam**2*v1*w1*w2 + "
        "20*E**3*lam**2*v2*w1**2 + 21*E**3*v1**3*w1 + 60*E**3*v1**2*v2 + "
        "7*E**2*lam**2*v1*w1**3 - 80*E**2*lam**2*v1*w1*w2 - 40*E**2*lam**"
        "2*v2*w1**2 - 78*E**2*v1**3*w1 - 180*E**2*v1**2*v2 + 14*E*lam**2*"
        "v1*w1**3 + 40*E*lam**2*v1*w1*w2 + 20*E*lam**2*v2*w1**2 + 93*E*"
        "v1**3*w1 + 180*E*v1**2*v2 - 36*v1**3*w1 - 60*v1**2*v2)/(4320*(1 "
        "- E)**4)"
    ,
    (6, 0):
        "E*lam**6*(-E**3*lam**4*w1**4 - 2*E**3*lam**2*v1**2*w1**2 + 3*E**"
        "3*v1**4 + E**2*lam**4*w1**4 + 4*E**2*lam**2*v1**2*w1**2 - 9*E**"
        "2*v1**4 - 2*E*lam**2*v1**2*w1**2 + 9*E*v1**4 - 3*v1**4)/(864*(1 "
        "- E)**4)"
    ,
}


def recorded_d4():
    """The certified eps^4 D-operator: displayed d_v^2 / d_v^3 slots,
    recorded involutivity completion for the rest, displayed eps^2 part."""
    ns = {"E": E, "L": L, "lam": lam, "w": w,
          "v1": v1, "v2": v2, "w1": w1, "w2": w2}
    tbl = {(2, 0): printed_b4_vv(), (3, 0): printed_b4_vvv()}
    for slot, s in _D4_COMPLETION.items():
        tbl[slot] = sp.sympify(s, locals=ns)
    return DOperator({2: printed_d2()[2], 4: tbl})


# ---------------------------------------------------------------------------
# involutivity residual and its verification
# ---------------------------------------------------------------------------

def poisson_density(g1, g2):
    """Density of {int g1, int g2} under the hydrodynamic bracket of the
    anti-diagonal flat metric."""
    d1 = (variational(g1, "v"), variational(g1, "w"))
    d2 = (variational(g2, "v"), variational(g2, "w"))
    return sp.expand(sum(d1[m] * ETA_INV[m][n] * dx(d2[n])
                         for m in (0, 1) for n in (0, 1)))


def _pois_d(d1, d2=None, grad2=None):
    """dpoly form of poisson_density; grad2 may carry the precomputed pair
    (dx var_v d2, dx var_w d2)."""
    if grad2 is None:
        grad2 = (dp.dx(dp.variational(d2, "v")),
                 dp.dx(dp.variational(d2, "w")))
    lam2 = dp.gen(dp.ILAM, 2)
    out = dp.padd(dp.pmul(dp.variational(d1, "v"), grad2[1]),
                  dp.pmul(dp.variational(d1, "w"), grad2[0]))
    return dp.pscale(dp.pmul(lam2, out), -1)


def _residual_d(D, order, hal=None):
    """dpoly residual of {int Df, int h_AL} at eps^order, f opaque."""
    if hal is None:
        hal = ablowitz_ladik_density(order)
    hal_d = {k: dp.from_sympy(t) for k, t in hal.items()}
    op = {k: dp.from_sympy(t) for k, t in apply_dop_opaque(D).items()}
    R = {}
    for i in range(0, order + 1, 2):
        j = order - i
        if i in op and j in hal_d:
            R = dp.padd(R, _pois_d(op[i], hal_d[j]))
    return R


def dop_residual(D, order, hal=None):
    """eps^order part of the density of {int Df, int h_AL} with f opaque."""
    return dp.to_sympy(_residual_d(D, order, hal=hal))


def _random_point(rng):
    point = {"lam": sp.Rational(rng.randint(2, 5), rng.randint(1, 3)),
             "v": sp.Rational(rng.randint(-4, 4), rng.randint(1, 5)),
             "w": -sp.Rational(rng.randint(2, 30), 10)}
    for fld in ("v", "w"):
        for n in range(1, dp.JMAX + 1):
            point["%s%d" % (fld, n)] = \
                sp.Rational(rng.randint(-10, 10), rng.randint(1, 10))
    return point


def _gen_values(point, digits):
    """Generator-value vector for dpoly numeric evaluation."""
    import mpmath
    with mpmath.workdps(digits):
        vals = [mpmath.mpf(0)] * dp.NGENS
        lamv = mpmath.mpf(str(point["lam"]))
        vv = mpmath.mpf(str(point["v"]))
        wv = mpmath.mpf(str(point["w"]))
        ew = mpmath.e ** wv
        vals[dp.IV], vals[dp.IW], vals[dp.IE] = vv, wv, ew
        vals[dp.IO] = 1 / (1 - ew)
        vals[dp.IL] = mpmath.log(1 - ew)
        vals[dp.ILAM] = lamv
        vals[dp.IPV] = mpmath.e ** (vv / lamv)
        for k, i in dp.ILI.items():
            vals[i] = mpmath.polylog(k, ew)
        for n in range(1, dp.JMAX + 1):
            vals[dp.IVJ[n]] = mpmath.mpf(str(point["v%d" % n]))
            vals[dp.IWJ[n]] = mpmath.mpf(str(point["w%d" % n]))
        return vals


def dop_verify(D, order, mode="exact", samples=20, seed=0, digits=64,
               tol=None, hal=None):
    """Involutivity of D with the lattice density at eps^order: the
    variational derivatives of the residual vanish identically ('exact') or,
    with random involution-compatible densities substituted for f, below tol
    at seeded sample points ('numeric')."""
    R = _residual_d(D, order, hal=hal)
    ev = dp.variational(R, "v")
    ew = dp.variational(R, "w")
    if mode == "exact":
        return not ev and not ew
    if mode != "numeric":
        raise ValueError("mode must be 'exact' or 'numeric'")
    import random as _random
    import mpmath
    rng = _random.Random(seed)
    tolm = mpmath.mpf(10) ** (-30) if tol is None else mpmath.mpf(str(tol))
    stock = involution_stock()
    needed = set()
    for d in (ev, ew):
        for m in d:
            for (a, b), i in dp.IF.items():
                if m[i]:
                    needed.add((a, b))
    worst = mpmath.mpf(0)
    with mpmath.workdps(digits):
        for _ in range(samples):
            f = random_involutive(rng, stock)
            point = _random_point(rng)
            vals = _gen_values(point, digits)
            for (a, b) in needed:
                vals[dp.IF[(a, b)]] = eval_numeric(
                    _dvw(f, a, b), point, digits=digits)
            for d in (ev, ew):
                worst = max(worst, abs(dp.eval_num(d, vals)))
    return worst < tolm


def dop_equiv(D1, D2, order, samples=10, seed=0):
    """Whether two D-operators agree at eps^order modulo total derivatives,
    probed on random involution-compatible densities (the variational
    derivatives of the difference must vanish identically)."""
    import random as _random
    rng = _random.Random(seed)
    stock = involution_stock()
    s1 = {s: dp.from_sympy(b) for s, b in D1.terms.get(order, {}).items()}
    s2 = {s: dp.from_sympy(b) for s, b in D2.terms.get(order, {}).items()}
    for _ in range(samples):
        fd = dp.from_sympy(random_involutive(rng, stock))
        delta = {}
        for sgn, tbl in ((1, s1), (-1, s2)):
            for (l, m), b in tbl.items():
                delta = dp.padd(delta, dp.pmul(b, _dvw_d(fd, l, m)), sgn)
        if dp.variational(delta, "v") or dp.variational(delta, "w"):
            return False
    return True


def _dvw(f, l, m):
    for _ in range(l):
        f = partial_v(f)
    for _ in range(m):
        f = partial_w(f)
    return f


def _dvw_d(fd, l, m):
    for _ in range(l):
        fd = dp.partial_v(fd)
    for _ in range(m):
        fd = dp.partial_w(fd)
    return fd


# ---------------------------------------------------------------------------
# solving the involutivity condition
# ---------------------------------------------------------------------------

_OME = 1 - E
_EMO = -1 + E


def _coeff_dict(expr):
    """Monomial -> coefficient dict of expr * E^A (1-E)^B, the clearing
    powers (A, B) chosen adaptively as the largest structural denominator
    powers of E and (1-E) (equivalently (-1+E)) over the terms.  Purely
    structural: no cancel calls, so it is fast on large inputs; any
    E-dependence hiding in an uncleared denominator raises."""
    pre = []
    A = B = 0
    for t in sp.Add.make_args(sp.expand(expr)):
        rest = sp.Integer(1)
        i = j = 0
        for b, e in t.as_powers_dict().items():
            if e.is_Integer and e < 0:
                ee = -int(e)
                if b == E:
                    i += ee
                    continue
                if b == _OME:
                    j += ee
                    continue
                if b == _EMO:
                    j += ee
                    rest *= sp.Integer(-1) ** ee
                    continue
                if b.has(E):
                    c0, facs = sp.factor_list(b)
                    rest *= c0 ** e
                    for fb, fe in facs:
                        if fb == E:
                            i += fe * ee
                        elif fb == _OME:
                            j += fe * ee
                        elif fb == _EMO:
                            j += fe * ee
                            rest *= sp.Integer(-1) ** (fe * ee)
                        elif fb.has(E):
                            raise AssertionError(
                                "unrecognized E-denominator %s" % b)
                        else:
                            rest *= fb ** (fe * e)
                    continue
            rest *= b ** e
        pre.append((rest, i, j))
        A = max(A, i)
        B = max(B, j)
    acc = {}
    for rest, i, j in pre:
        p = sp.expand(rest * E ** (A - i) * _OME ** (B - j))
        for mono, c in p.as_coefficients_dict().items():
            acc[mono] = acc.get(mono, sp.Integer(0)) + c
    return {m: c for m, c in acc.items() if c != 0}


def _identically_zero(expr):
    return not _coeff_dict(expr)


def _rows_into(d, tag, col, rows, rhs):
    """Distribute the monomial coefficients of the dpoly dict d into the
    sparse linear system: column 'col', or the right-hand side if col is
    None.  Rows are keyed by (monomial, tag), the tag separating the two
    variational components."""
    for mono, fr in d.items():
        key = (mono, tag)
        if col is None:
            rhs[key] = rhs.get(key, Fraction(0)) - fr
        else:
            row = rows.setdefault(key, {})
            row[col] = row.get(col, Fraction(0)) + fr


def _solve_sparse(rows, rhs):
    """Exact sparse Gaussian elimination; returns a particular solution
    (free columns set to zero) as {col: Fraction}.  Raises on an
    inconsistent system."""
    pivots = {}
    for key in sorted(rows, key=str):
        cols = dict(rows[key])
        b = rhs.get(key, Fraction(0))
        while True:
            hit = next((c for c in cols if c in pivots), None)
            if hit is None:
                break
            fac = cols.pop(hit)
            prow, pb = pivots[hit]
            for c2, a in prow.items():
                nv = cols.get(c2, Fraction(0)) - fac * a
                if nv:
                    cols[c2] = nv
                else:
                    cols.pop(c2, None)
            b -= fac * pb
        if not cols:
            if b:
                raise AssertionError("inconsistent involutivity system")
            continue
        pc = min(cols)
        inv = 1 / cols.pop(pc)
        row = {c: a * inv for c, a in cols.items()}
        b *= inv
        for opc, (orow, ob) in list(pivots.items()):
            if pc in orow:
                fac = orow.pop(pc)
                for c2, a in row.items():
                    nv = orow.get(c2, Fraction(0)) - fac * a
                    if nv:
                        orow[c2] = nv
                    else:
                        orow.pop(c2, None)
                pivots[opc] = (orow, ob - fac * b)
        pivots[pc] = (row, b)
    return {pc: b for pc, (row, b) in pivots.items()}


def _lam_power(order, l, mono):
    """lam-power of the coefficient of mono * d_v^l d_w^m from the scaling
    (v, lam) -> (s v, s lam)."""
    _, jets_d = _monomial_split(mono)
    nv = sum(e for s, e in jets_d.items() if _jet_info(s)[0] == "v")
    return order + l - nv


_NUM_DEG = 6
_DEN_POW = 4


def _ansatz_columns(order, slots, monos):
    """One column per unknown constant: coefficient candidates
    sector * E^a / (1-E)^4 per (slot, monomial), sector in {1, w, L}.
    Returns (slot, sympy coefficient, dpoly dict with the f-symbol)."""
    cols = []
    for (l, m) in slots:
        for mono in monos:
            p = _lam_power(order, l, mono)
            for sector in (sp.Integer(1), w, L):
                for a in range(_NUM_DEG + 1):
                    coeff = sector * E ** a / (1 - E) ** _DEN_POW \
                        * lam ** p * mono
                    cols.append(((l, m), coeff,
                                 dp.from_sympy(coeff * fsym(l, m))))
    return cols


def dop_solve(order, seed_printed=False, d2=None):
    """Determine the eps^order coefficients of the D-operator from the
    involutivity condition {int Df, int h_AL} = 0, as exact sparse linear
    algebra over the admissible-monomial / E-function ansatz.  At order 4
    the eps^2 part must be supplied (default: the printed one) and
    seed_printed pins the d_v^2 and d_v^3 slots to their printed values,
    solving only for the remaining slots."""
    if order not in (2, 4):
        raise ValueError("orders 2 and 4 supported")
    hal = ablowitz_ladik_density(order)
    h0d = dp.from_sympy(hal[0])
    grad0 = (dp.dx(dp.variational(h0d, "v")),
             dp.dx(dp.variational(h0d, "w")))
    f0 = dp.from_sympy(fsym(0, 0))
    known = _pois_d(f0, dp.from_sympy(hal[order]))
    if order == 4:
        if d2 is None:
            d2 = printed_d2()[2]
        op2 = dp.from_sympy(sp.expand(
            sum(b * fsym(l, m) for (l, m), b in d2.items())))
        known = dp.padd(known, _pois_d(op2, dp.from_sympy(hal[2])))
    slots = dop_slots(order)
    fixed = {}
    if seed_printed:
        if order != 4:
            raise ValueError("printed seeds exist at order 4")
        fixed = {(2, 0): printed_b4_vv(), (3, 0): printed_b4_vvv()}
        for (l, m), b in fixed.items():
            known = dp.padd(known, _pois_d(
                dp.from_sympy(sp.expand(b) * fsym(l, m)), grad2=grad0))
        slots = [s for s in slots if s not in fixed]
    # the unknowns range over the full graded span, not just the
    # display-gauge basis: the completion slots need not respect it
    monos = _graded_monomials(order)
    cols = _ansatz_columns(order, slots, monos)
    rows, rhs = {}, {}
    for idx, (_slot, _coeff, cd) in enumerate(cols):
        contrib = _pois_d(cd, grad2=grad0)
        for fld in ("v", "w"):
            _rows_into(dp.variational(contrib, fld), fld, idx, rows, rhs)
    for fld in ("v", "w"):
        _rows_into(dp.variational(known, fld), fld, None, rows, rhs)
    solution = _solve_sparse(rows, rhs)
    coeffs = {s: sp.Integer(0) for s in slots}
    for idx, (slot, coeff, _cd) in enumerate(cols):
        val = solution.get(idx, Fraction(0))
        if val:
            coeffs[slot] += sp.Rational(val.numerator,
                                        val.denominator) * coeff
    coeffs = {s: sp.together(c) for s, c in coeffs.items() if c != 0}
    coeffs.update(fixed)
    terms = {order: coeffs}
    if order == 4:
        terms[2] = dict(d2)
    return DOperator(terms)


# ---------------------------------------------------------------------------
# dispersive flows
# ---------------------------------------------------------------------------

def dispersive_flow(D, f):
    """Hamiltonian flow of int Df: (dv/dt, dw/dt) as eps-series."""
    hh = sp.expand(sum(eps ** k * t for k, t in apply_dop(D, f).items()))
    fv = sp.expand(-lam ** 2 * dx(variational(hh, "w")))
    fw = sp.expand(-lam ** 2 * dx(variational(hh, "v")))
    return fv, fw


def dispersive_wave_tt(D, f, order=2):
    """w_tt along the flow of int Df, through eps^order."""
    fv, fw = dispersive_flow(D, f)
    fv, fw = _eps_trunc(fv, order), _eps_trunc(fw, order)
    return _eps_trunc(sp.expand(evolve(fw, fv, fw)), order)


# ---------------------------------------------------------------------------
# one-loop quasi-triviality
# ---------------------------------------------------------------------------

def quasimiura_khat():
    """Density of the generating Hamiltonian of the one-loop quasi-Miura
    transformation, without its overall eps factor."""
    root = sp.sqrt(E / (-1 + E)) * lam * w1
    Fp = v1 + root
    Fm = v1 - root
    return -(Fp * sp.log(Fp) + Fm * sp.log(Fm)
             - 2 * sp.log(-1 + E) * v1) / 24


def quasimiura_K():
    return eps * quasimiura_khat()


def f1_tilde():
    """Genus-one free energy density in jet variables (x-derivative part)."""
    return sp.log(v1 ** 2 + lam ** 2 * E / (1 - E) * w1 ** 2) / 24 - L / 12


def f1_density():
    """Full genus-one density: f1_tilde plus the quasi-constant -w/24."""
    return f1_tilde() - w / 24


def _hK_bracket(h, khat):
    """{h(x), int khat dx} for a zero-jet density h."""
    dk = (variational(khat, "v"), variational(khat, "w"))
    grads = (partial_v(h), partial_w(h))
    return sum(grads[m] * ETA_INV[m][n] * dx(dk[n])
               for m in (0, 1) for n in (0, 1))


def _rational_kernel(expr):
    """Canonicalize an expression that is rational in the generators despite
    being assembled from logarithmic pieces: the log and sqrt atoms are
    algebraically independent of the rational field, so their coefficients
    must cancel atom-by-atom and a rational normal form suffices."""
    c = sp.cancel(sp.together(expr))
    bad = [a for a in c.atoms(sp.log) if a.has(jet("v", 1))]
    if bad:
        raise AssertionError("kernel failed to rationalize: %s" % bad[:1])
    return c


def quasimiura_check(samples=20, digits=64, seed=0, tol=None, d2=None):
    """Numeric verification of the one-loop quasi-triviality statements at
    seeded sample points (e^w < 1, random rational jets):

      1. for the closed densities h, the variational derivatives of
         {h, K}/eps + D^2 h vanish (the two dispersive completions agree up
         to total derivatives; the relative sign is the one induced by the
         sign of the lattice density fixed in ablowitz_ladik_density);
      2. {w, K} = -lam^2 eps d_x^2 f1_tilde pointwise;
      3. {v, K} = -lam^2 eps d_x d_t (f1_tilde + L/6): the transformation
         fails tau-symmetry by twice the jet-free part of f1_tilde, t the
         first nontrivial time.

    Returns the maximum absolute residual (an mpf)."""
    import random as _random
    import mpmath
    from .genus0 import build_prepotential, closed_density
    rng = _random.Random(seed)
    if tol is None:
        tol = mpmath.mpf(10) ** (-30)
    if d2 is None:
        d2 = printed_d2()[2]
    khat = quasimiura_khat()
    # delta khat / delta u is rational in the jets although khat is not;
    # rationalizing it once keeps the Euler operators below cheap.
    dk = (_rational_kernel(variational(khat, "v")),
          _rational_kernel(variational(khat, "w")))
    P = build_prepotential("Xk_antidiagonal", k=1)
    residuals = []
    for (alpha, p) in (("w", 0), ("v", 1), ("w", 1)):
        h = closed_density(P, alpha, p)
        grads = (partial_v(h), partial_w(h))
        # {h, K}/eps density, integrated by parts once to keep jets at
        # order two: -dx(grad h) paired with delta khat / delta u
        br = -sum(dx(grads[m]) * ETA_INV[m][n] * dk[n]
                  for m in (0, 1) for n in (0, 1))
        d2h = sum(b * _dvw(h, l, m) for (l, m), b in d2.items())
        r = br + d2h
        residuals.append(variational(r, "v"))
        residuals.append(variational(r, "w"))
    # pointwise statements
    ft = f1_tilde()
    residuals.append(-lam ** 2 * dx(dk[0]) - (-lam ** 2) * dx(dx(ft)))
    flow_v = -lam ** 2 * E / (1 - E) * w1
    flow_w = v1
    rhs_v = (-lam ** 2) * dx(evolve(ft + L / 6, flow_v, flow_w))
    residuals.append(-lam ** 2 * dx(dk[1]) - rhs_v)
    fns = [compile_numeric(expr, digits=digits) for expr in residuals]
    worst = mpmath.mpf(0)
    with mpmath.workdps(digits):
        for _ in range(samples):
            point = {"lam": sp.Rational(rng.randint(2, 5), rng.randint(1, 3)),
                     "v": sp.Rational(rng.randint(-4, 4), rng.randint(1, 5)),
                     "w": -sp.Rational(rng.randint(2, 30), 10)}
            for fld in ("v", "w"):
                for n in range(1, 6):
                    point["%s%d" % (fld, n)] = \
                        sp.Rational(rng.randint(1, 10), rng.randint(1, 10))
            for fn in fns:
                worst = max(worst, abs(mpmath.mpc(fn(point))))
    if worst >= tol:
        raise AssertionError("quasi-triviality residual %s exceeds tol" % worst)
    return worst
