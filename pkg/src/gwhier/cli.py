"""Command-line client.  Every command posts to the in-process service app
(over an ASGI transport, no sockets) and renders the JSON response as a
report in one of three formats.

Exit codes: 0 success / all checks passed, 1 check failure, 2 invalid
configuration.  The default working precision comes from GWHIER_DIGITS.
"""

import json
import os
import sys

import click
import httpx

from . import __version__

DEFAULT_DIGITS = int(os.environ.get("GWHIER_DIGITS", "64"))


async def _apost(command, payload):
    from .service import app
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://gwhier.local") as client:
        return await client.post("/" + command, json=payload)


def _post(command, payload):
    import asyncio
    resp = asyncio.run(_apost(command, payload))
    if resp.status_code == 422:
        try:
            detail = resp.json()["detail"]
        except (KeyError, ValueError):
            detail = resp.text
        click.echo("invalid configuration: %s" % detail, err=True)
        sys.exit(2)
    resp.raise_for_status()
    return {"command": command, "config": payload,
            "version": __version__, "data": resp.json()}


def _tsv_rows(command, data):
    """Flatten a data payload into (header, rows)."""
    if command in ("invariants", "oracle"):
        key = "g,d" if command == "oracle" else "d"
        header = [key, "N"]
        rows = [[k, val] for k, val in sorted(
            data["table"].items(),
            key=lambda kv: tuple(int(t) for t in kv[0].split(",")))]
    elif command == "check":
        header = ["id", "passed", "seconds", "detail"]
        rows = [[r["id"], str(r["passed"]).lower(), "%.3f" % r["seconds"],
                 r["detail"]] for r in data["results"]]
    elif command == "dop":
        header = ["eps_order", "slot", "coefficient"]
        rows = [[k, slot, expr]
                for k in sorted(data["coefficients"])
                for slot, expr in sorted(data["coefficients"][k].items())]
    else:
        header = ["key", "value"]
        rows = [[k, json.dumps(val, sort_keys=True)
                 if isinstance(val, (dict, list)) else str(val)]
                for k, val in sorted(data.items())]
    return header, rows


def _emit(report, fmt, output):
    command, data = report["command"], report["data"]
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2,
                          separators=(",", ": ")) + "\n"
    elif fmt == "tsv":
        header, rows = _tsv_rows(command, data)
        lines = ["\t".join(header)]
        lines += ["\t".join(str(c) for c in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        lines = ["# %s" % command]
        if command == "check":
            for r in data["results"]:
                lines.append("%-22s %s  (%.3fs)  %s"
                             % (r["id"],
                                "PASS" if r["passed"] else "FAIL",
                                r["seconds"], r["detail"]))
            lines.append("overall: %s"
                         % ("PASS" if data["passed"] else "FAIL"))
        else:
            header, rows = _tsv_rows(command, data)
            for row in rows:
                lines.append("  ".join(str(c) for c in row))
        text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _common(fn):
    fn = click.option("--format", "fmt",
                      type=click.Choice(["json", "tsv", "text"]),
                      default="json", show_default=True,
                      help="report format")(fn)
    fn = click.option("--output", type=click.Path(dir_okay=False),
                      default=None, help="write the report to a file")(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """Exact engine for the conifold hierarchy, its lattice deformation
    and the associated curve counts."""


@main.command()
@click.option("--id", "pid", default="conifold_general", show_default=True)
@click.option("--k", default=1, show_default=True)
@click.option("--trunc", default=8, show_default=True)
@_common
def prepotential(pid, k, trunc, fmt, output):
    """Prepotential, metric and its associativity status."""
    report = _post("prepotential", {"id": pid, "k": k, "trunc": trunc})
    _emit(report, fmt, output)


@main.command()
@click.option("--prepotential", "pid", default="conifold_general",
              show_default=True)
@click.option("--k", default=1, show_default=True)
@click.option("--level", default="2,0", show_default=True,
              help="flow label 'alpha,p'")
@_common
def flows(pid, k, level, fmt, output):
    """Hamiltonian flow pair (dv/dt, dw/dt) of one hierarchy time."""
    report = _post("flows", {"prepotential": pid, "k": k, "level": level})
    _emit(report, fmt, output)


@main.command()
@click.option("--prepotential", "pid", default="conifold_general",
              show_default=True)
@click.option("--k", default=1, show_default=True)
@click.option("--alpha", default="v", show_default=True)
@click.option("--p", default=0, show_default=True)
@click.option("--track", type=click.Choice(["closed", "series"]),
              default="closed", show_default=True)
@click.option("--z-order", default=6, show_default=True)
@click.option("--d-max", default=8, show_default=True)
@_common
def densities(pid, k, alpha, p, track, z_order, d_max, fmt, output):
    """Hamiltonian density h_{alpha,p}."""
    report = _post("densities", {
        "prepotential": pid, "k": k, "alpha": alpha, "p": p,
        "track": track, "z_order": z_order, "d_max": d_max})
    _emit(report, fmt, output)


@main.command()
@click.option("--order", type=click.Choice(["2", "4"]), default="2",
              show_default=True)
@click.option("--solve-eps4", is_flag=True,
              help="re-derive the eps^4 completion from scratch (slow)")
@_common
def dop(order, solve_eps4, fmt, output):
    """Coefficients of the jet-raising operator at eps^2 or eps^4."""
    report = _post("dop", {"order": int(order), "solve_eps4": solve_eps4})
    _emit(report, fmt, output)


def _parse_orders(text):
    out = {}
    for part in text.split(","):
        try:
            key, val = part.split(":")
            out[key.strip()] = int(val)
        except ValueError:
            click.echo("invalid configuration: orders must be "
                       "'name:int,...' (got %r)" % text, err=True)
            sys.exit(2)
    return out


@main.command()
@click.option("--flow", default="t21", show_default=True)
@click.option("--orders", default="t21:3,eps:4", show_default=True,
              help="truncation orders, e.g. 'x:3,t21:7,eps:4'")
@click.option("--start-flow", default=None,
              help="chain after solving this time first")
@_common
def solve(flow, orders, start_flow, fmt, output):
    """Perturbative solution of a descendent flow from the topological
    datum."""
    payload = {"flow": flow, "orders": _parse_orders(orders)}
    if start_flow:
        payload["start_flow"] = start_flow
    report = _post("solve", payload)
    _emit(report, fmt, output)


@main.command()
@click.option("--genus", default=0, show_default=True)
@click.option("--dmax", default=6, show_default=True)
@_common
def invariants(genus, dmax, fmt, output):
    """Degree-d curve counts at genus 0, 1 or 2 from the engine."""
    report = _post("invariants", {"genus": genus, "dmax": dmax})
    _emit(report, fmt, output)


@main.command()
@click.option("--k", default=1, show_default=True)
@click.option("--dmax", default=6, show_default=True)
@click.option("--gmax", default=3, show_default=True)
@_common
def oracle(k, dmax, gmax, fmt, output):
    """All-genus curve counts from the independent partition sum."""
    report = _post("oracle", {"k": k, "dmax": dmax, "gmax": gmax})
    _emit(report, fmt, output)


@main.command()
@click.option("--suite", default="all", show_default=True)
@click.option("--id", "ids", multiple=True,
              help="run only the named checks (repeatable)")
@click.option("--seed", default=0, show_default=True)
@click.option("--digits", default=DEFAULT_DIGITS, show_default=True)
@_common
def check(suite, ids, seed, digits, fmt, output):
    """Run the validation battery; exit 0 iff everything passes."""
    payload = {"suite": suite, "seed": seed, "digits": digits}
    if ids:
        payload["ids"] = list(ids)
    report = _post("check", payload)
    _emit(report, fmt, output)
    if not report["data"]["passed"]:
        failed = [r["id"] for r in report["data"]["results"]
                  if not r["passed"]]
        details = {r["id"]: r["detail"] for r in report["data"]["results"]
                   if not r["passed"]}
        for cid in failed:
            click.echo("FAILED %s: %s" % (cid, details[cid]), err=True)
        sys.exit(1)


@main.command()
@click.option("--function", required=True,
              type=click.Choice(["polylog", "nielsen", "gauss2f1",
                                 "hyp2f1_eps"]))
@click.option("--param", "params", multiple=True,
              help="positional parameters of the function (repeatable)")
@click.option("--digits", default=DEFAULT_DIGITS, show_default=True)
@_common
def special(function, params, digits, fmt, output):
    """Evaluate one of the special functions at stated precision."""
    report = _post("special", {"function": function,
                               "params": list(params), "digits": digits})
    _emit(report, fmt, output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn
    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
