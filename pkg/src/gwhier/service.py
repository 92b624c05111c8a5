"""HTTP facade over the engine: one endpoint per CLI command, JSON in and
out.  All symbolic payloads are serialized with the deterministic sympy
string printer so that identical requests yield identical bytes.
"""

import os
from typing import Dict, List, Optional

import sympy as sp
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from . import checks as chk
from . import dispersive as dsp
from . import flows as fl
from . import genus0 as g0
from . import oracle as orc
from . import special as spc

DEFAULT_DIGITS = int(os.environ.get("GWHIER_DIGITS", "64"))

app = FastAPI(title="gwhier", version=__version__)

_PREPOTENTIAL_IDS = ("conifold_general", "Xk_diagonal", "Xk_antidiagonal")


def _sstr(expr):
    return sp.sstr(sp.expand(expr))


def _bad_request(msg):
    raise HTTPException(status_code=422, detail=str(msg))


class PrepotentialRequest(BaseModel):
    id: str = "conifold_general"
    k: int = 1
    trunc: int = Field(8, gt=0)


class FlowsRequest(BaseModel):
    prepotential: str = "conifold_general"
    k: int = 1
    level: str = "2,0"  # "alpha,p" with alpha in {1, 2}


class DensitiesRequest(BaseModel):
    prepotential: str = "conifold_general"
    k: int = 1
    alpha: str = "v"
    p: int = 0
    track: str = "closed"  # closed | series
    z_order: int = Field(6, gt=0)
    d_max: int = Field(8, gt=0)


class DopRequest(BaseModel):
    order: int = 2
    solve_eps4: bool = False


class SolveRequest(BaseModel):
    flow: str = "t21"
    orders: Dict[str, int] = Field(default_factory=lambda: {"t21": 3,
                                                            "eps": 4})
    start_flow: Optional[str] = None
    start_order: int = 0


class InvariantsRequest(BaseModel):
    genus: int = Field(0, ge=0, le=2)
    dmax: int = Field(6, gt=0)


class OracleRequest(BaseModel):
    k: int = 1
    dmax: int = Field(6, gt=0)
    gmax: int = Field(3, ge=0)


class CheckRequest(BaseModel):
    suite: str = "all"
    ids: Optional[List[str]] = None
    seed: int = 0
    digits: int = Field(default=DEFAULT_DIGITS, gt=0)


class SpecialRequest(BaseModel):
    function: str
    params: List[str] = Field(default_factory=list)
    digits: int = Field(default=DEFAULT_DIGITS, gt=0)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/prepotential")
def prepotential(req: PrepotentialRequest):
    if req.id not in _PREPOTENTIAL_IDS:
        _bad_request("unknown prepotential %r" % req.id)
    P = g0.build_prepotential(req.id, k=req.k, trunc=req.trunc)
    return {
        "id": P.id,
        "mode": P.mode,
        "F0": _sstr(P.F0),
        "eta": [[_sstr(P.eta[i, j]) for j in range(2)] for i in range(2)],
        "wdvv": g0.check_wdvv(P),
    }


def _parse_level(level):
    try:
        a, p = (int(t) for t in level.split(","))
    except ValueError:
        _bad_request("level must be 'alpha,p' with integers")
    if a not in (1, 2) or p < 0:
        _bad_request("level alpha in {1, 2}, p >= 0 required")
    return ("v", "w")[a - 1], p


@app.post("/flows")
def flows(req: FlowsRequest):
    if req.prepotential not in _PREPOTENTIAL_IDS:
        _bad_request("unknown prepotential %r" % req.prepotential)
    alpha, p = _parse_level(req.level)
    P = g0.build_prepotential(req.prepotential, k=req.k)
    B = g0.flat_basis(P, z_order=max(3, p + 2), d_max=6)
    try:
        fv, fw = g0.principal_flow(B, alpha, p)
    except KeyError:
        fv, fw = g0.principal_flow(B, alpha, p, closed=False)
    return {"level": req.level, "dv_dt": _sstr(fv), "dw_dt": _sstr(fw)}


@app.post("/densities")
def densities(req: DensitiesRequest):
    if req.prepotential not in _PREPOTENTIAL_IDS:
        _bad_request("unknown prepotential %r" % req.prepotential)
    if req.alpha not in ("v", "w"):
        _bad_request("alpha must be 'v' or 'w'")
    P = g0.build_prepotential(req.prepotential, k=req.k)
    if req.track == "closed":
        try:
            h = g0.closed_density(P, req.alpha, req.p)
        except KeyError as exc:
            _bad_request(exc.args[0])
    elif req.track == "series":
        if req.p + 1 > req.z_order:
            _bad_request("p beyond z truncation order")
        B = g0.flat_basis(P, z_order=req.z_order, d_max=req.d_max)
        h = B.density(req.alpha, req.p)
    else:
        _bad_request("track must be 'closed' or 'series'")
    return {"alpha": req.alpha, "p": req.p, "track": req.track,
            "density": _sstr(h)}


@app.post("/dop")
def dop(req: DopRequest):
    if req.order not in (2, 4):
        _bad_request("order must be 2 or 4")
    if req.order == 2:
        D = dsp.dop_solve(2)
        source = "solved"
    elif req.solve_eps4:
        D = dsp.dop_solve(4, seed_printed=True)
        source = "solved"
    else:
        D = dsp.recorded_d4()
        source = "recorded"
    coeffs = {}
    for k in sorted(D.terms):
        coeffs[str(k)] = {"%d,%d" % slot: _sstr(b)
                          for slot, b in sorted(D.terms[k].items())}
    return {"order": req.order, "source": source, "coefficients": coeffs}


@app.post("/solve")
def solve(req: SolveRequest):
    if req.flow not in ("t21", "t11"):
        _bad_request("flow must be 't21' or 't11'")
    orders = dict(req.orders)
    x_cap = orders.pop("x", None)
    eps_order = orders.pop("eps", 4)
    time_order = orders.pop(req.flow, 3)
    start = None
    if req.start_flow is not None:
        if req.start_flow not in ("t21", "t11") or req.start_flow == req.flow:
            _bad_request("start_flow must be the other time variable")
        so = orders.pop(req.start_flow, req.start_order)
        start = fl.solve_flow(dsp.recorded_d4(), req.start_flow,
                              time_order=so, eps_order=eps_order)
    if orders:
        _bad_request("unknown order keys %s" % sorted(orders))
    if time_order < 1 or eps_order < 0 or eps_order % 2:
        _bad_request("orders must be positive, eps order even")
    sol = fl.solve_flow(dsp.recorded_d4(), req.flow,
                        time_order=time_order, eps_order=eps_order,
                        start=start)
    vexpr, wexpr = sol.v, sol.w
    if x_cap is not None:
        vexpr = sp.expand(vexpr + sp.O(fl.X ** (x_cap + 1))).removeO()
        wexpr = sp.expand(wexpr + sp.O(fl.X ** (x_cap + 1))).removeO()
    return {"flow": req.flow,
            "orders": {req.flow: time_order, "eps": eps_order},
            "v": _sstr(vexpr), "w": _sstr(wexpr)}


@app.post("/invariants")
def invariants(req: InvariantsRequest):
    if req.genus == 0:
        P = g0.build_prepotential("conifold_general", trunc=req.dmax)
        vals = g0.genus0_invariants(P, req.dmax)
    else:
        fpp = fl._fg_pp_ring(req.genus)
        vals = fl.genus2_invariants(fpp, req.dmax)
    return {"genus": req.genus,
            "table": {str(d): _sstr(vals[d - 1])
                      for d in range(1, req.dmax + 1)}}


@app.post("/oracle")
def oracle(req: OracleRequest):
    if req.gmax > 4 + req.dmax:
        _bad_request("gmax too large for the implemented series depth")
    table = orc.invariants_table(req.k, req.dmax, req.gmax)
    return {"k": req.k,
            "table": {"%d,%d" % (g, d): _sstr(table[(g, d)])
                      for g in range(req.gmax + 1)
                      for d in range(1, req.dmax + 1)}}


@app.post("/check")
def check(req: CheckRequest):
    if req.suite == "all" and not req.ids:
        ids = None
    elif req.ids:
        unknown = [i for i in req.ids if i not in chk.CHECKS]
        if unknown:
            _bad_request("unknown check ids %s" % unknown)
        ids = req.ids
    else:
        _bad_request("suite must be 'all' or ids must be given")
    results = chk.run_checks(ids, seed=req.seed, digits=req.digits)
    return {"seed": req.seed, "digits": req.digits,
            "passed": all(r["passed"] for r in results),
            "results": results}


@app.post("/special")
def special(req: SpecialRequest):
    try:
        if req.function == "polylog":
            j, x = int(req.params[0]), req.params[1]
            val = spc.polylog(j, sp.Rational(x) if j <= 0 else x,
                              digits=req.digits)
        elif req.function == "nielsen":
            n, p, zz = int(req.params[0]), int(req.params[1]), req.params[2]
            val = spc.nielsen(n, p, zz, digits=req.digits)
        elif req.function == "gauss2f1":
            a, b, c, zz = req.params
            val = spc.gauss2f1(a, b, c, zz, digits=req.digits)
        elif req.function == "hyp2f1_eps":
            case, a1, a2, c, zz, eps, order = req.params
            val = spc.hyp2f1_eps(case, a1, a2, c, zz, eps, int(order),
                                 digits=req.digits)
        else:
            _bad_request("unknown function %r" % req.function)
    except HTTPException:
        raise
    except (IndexError, ValueError, TypeError) as exc:
        _bad_request(exc)
    import mpmath
    with mpmath.workdps(req.digits):
        out = (_sstr(val) if isinstance(val, sp.Basic)
               else mpmath.nstr(val, req.digits))
    return {"function": req.function, "digits": req.digits, "value": out}
