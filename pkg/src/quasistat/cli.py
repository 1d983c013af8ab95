"""Command-line front end.

Usage::

    quasistat validate system.qstat        # axioms Q1-Q10, exit 1 on failure
    quasistat enumerate 5 3 boson          # occupation vectors
    quasistat count boson 5:3 2:4          # microstate count (product over bins)
    quasistat solve problem.qstat          # maximum-entropy occupations
    quasistat atom na                      # sodium / helium presets

Exit codes: 0 ok, 1 axiom failure, 2 input error, 3 limit exceeded,
4 infeasible, 5 Bose-Einstein pole, 6 no convergence.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import maxent, statistics
from .errors import (
    BinningIncomplete,
    Infeasible,
    LimitExceeded,
    NoConvergence,
    ParseError,
    PoleError,
    QuasistatError,
    StructureError,
)
from .particles import coarse_relation, occupations, preset_helium, preset_sodium, validate
from .qset import qc, serialize, weak_ext_equiv
from .sysfile import load, loads

EXIT_OK = 0
EXIT_AXIOM = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3
EXIT_INFEASIBLE = 4
EXIT_POLE = 5
EXIT_NO_CONVERGENCE = 6

FORMATS = click.Choice(["table", "csv", "json"])


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read(path: str):
    try:
        if path == "-":
            return loads(sys.stdin.read())
        return load(path)
    except ParseError as exc:
        _fail(f"{path}: {exc}", EXIT_INPUT)
    except OSError as exc:
        _fail(f"{path}: {exc.strerror}", EXIT_INPUT)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _g(x: float) -> str:
    return f"{x:.12g}"


@click.group()
@click.version_option(package_name="quasistat")
def cli():
    """Quasi-sets of indistinguishable particles and their statistics."""


@cli.command("validate")
@click.argument("path")
@click.option("--format", "fmt", type=FORMATS, default="table", show_default=True)
def cmd_validate(path, fmt):
    """Check axioms Q1-Q10 for the particle system in PATH ('-' for stdin)."""
    doc = _read(path)
    if doc.system is None:
        _fail(f"{path}: no particle system in input", EXIT_INPUT)
    try:
        verdicts = validate(doc.system)
    except StructureError as exc:
        _fail(f"{path}: {exc}", EXIT_INPUT)
    ok = all(v.passed for v in verdicts)
    _emit_verdicts(verdicts, fmt)
    sys.exit(EXIT_OK if ok else EXIT_AXIOM)


def _emit_verdicts(verdicts, fmt):
    rows = [[v.axiom, "pass" if v.passed else "FAIL", v.witness or ""] for v in verdicts]
    if fmt == "json":
        click.echo(_json({
            "valid": all(v.passed for v in verdicts),
            "verdicts": [{"axiom": v.axiom, "passed": v.passed, "witness": v.witness}
                         for v in verdicts],
        }))
    elif fmt == "csv":
        click.echo(_csv(["axiom", "status", "witness"], rows))
    else:
        click.echo(_table(["axiom", "status", "witness"], rows))
        failed = [v.axiom for v in verdicts if not v.passed]
        click.echo("all axioms hold" if not failed else "failed: " + ", ".join(failed))


@cli.command("enumerate")
@click.argument("nu", type=click.IntRange(min=0))
@click.argument("k", type=click.IntRange(min=1))
@click.argument("kind", type=click.Choice(statistics.KINDS))
@click.option("--format", "fmt", type=FORMATS, default="table", show_default=True)
@click.option("--limit", type=click.IntRange(min=0), default=statistics.ENUMERATION_LIMIT,
              show_default=True, help="Refuse to list more configurations than this.")
def cmd_enumerate(nu, k, kind, fmt, limit):
    """List every occupation vector of NU particles over K states."""
    try:
        rows = statistics.enumerate_occupations(nu, k, kind, limit=limit)
    except LimitExceeded as exc:
        _fail(str(exc), EXIT_LIMIT)
    header = [f"s{i}" for i in range(1, k + 1)]
    if fmt == "json":
        click.echo(_json({"states": header, "kind": kind, "rows": [list(r) for r in rows],
                          "count": len(rows)}))
    elif fmt == "csv":
        click.echo(_csv(header, [list(r) for r in rows]))
        click.echo(f"# {len(rows)}")
    else:
        click.echo(_table(header, [list(r) for r in rows]))
        click.echo(f"{len(rows)} configurations")


def _bin_spec(ctx, param, values):
    out = []
    for v in values:
        try:
            nu, k = (int(t) for t in v.split(":"))
        except ValueError:
            raise click.BadParameter(f"expected NU:K, got {v!r}") from None
        if nu < 0 or k < 1:
            raise click.BadParameter(f"need NU >= 0 and K >= 1, got {v!r}")
        out.append((nu, k))
    return out


@cli.command("count")
@click.argument("kind", type=click.Choice(statistics.KINDS))
@click.argument("bins", nargs=-1, required=True, callback=_bin_spec)
@click.option("--format", "fmt", type=FORMATS, default="table", show_default=True)
def cmd_count(kind, bins, fmt):
    """Count microstates for bins given as NU:K (product over bins)."""
    per_bin = [statistics.count(nu, k, kind).value for nu, k in bins]
    total = statistics.total_microstates(bins, kind).value
    rows = [[nu, k, str(c)] for (nu, k), c in zip(bins, per_bin)]
    if fmt == "json":
        click.echo(_json({"kind": kind,
                          "bins": [{"nu": nu, "k": k, "count": str(c)} for nu, k, c in rows],
                          "total": str(total)}))
    elif fmt == "csv":
        click.echo(_csv(["nu", "k", "count"], rows))
        click.echo(f"# {total}")
    else:
        if len(rows) > 1:
            click.echo(_table(["nu", "k", "count"], rows))
        click.echo(str(total))


@cli.command("solve")
@click.argument("path")
@click.option("--format", "fmt", type=FORMATS, default="table", show_default=True)
@click.option("--tol", type=float, default=maxent.TOL, show_default=True,
              help="Relative tolerance on the N and E constraints.")
@click.option("--max-iter", type=click.IntRange(min=1), default=maxent.MAX_ITER, show_default=True)
@click.option("--temperature", type=float, default=None,
              help="Set beta = 1/(kB*T); requires --kB.")
@click.option("--kB", "k_b", type=float, default=None,
              help="Boltzmann constant in the units of the level energies.")
def cmd_solve(path, fmt, tol, max_iter, temperature, k_b):
    """Most probable occupations for the maximum-entropy problem in PATH."""
    doc = _read(path)
    problem = doc.problem
    if problem is None:
        _fail(f"{path}: no maximum-entropy problem in input", EXIT_INPUT)
    if (temperature is None) != (k_b is None):
        _fail("--temperature and --kB go together", EXIT_INPUT)
    if temperature is not None:
        if temperature <= 0 or k_b <= 0:
            _fail("temperature and kB must be positive", EXIT_INPUT)
        problem = maxent.MaxEntProblem(problem.levels, problem.statistics, problem.N,
                                       beta=1.0 / (k_b * temperature))
    try:
        sol = maxent.solve(problem, tol=tol, max_iter=max_iter)
    except Infeasible as exc:
        _fail(f"infeasible: {exc}", EXIT_INFEASIBLE)
    except PoleError as exc:
        _fail(f"pole: {exc}", EXIT_POLE)
    except NoConvergence as exc:
        _fail(f"no convergence: {exc}", EXIT_NO_CONVERGENCE)
    report = sol.as_dict()
    if fmt == "json":
        click.echo(_json(report))
        return
    rows = [[i, b["k"], _g(b["energy"]), _g(b["nu"]), _g(b["fill"])]
            for i, b in enumerate(report["bins"])]
    if fmt == "csv":
        click.echo(_csv(["bin", "k", "energy", "nu", "fill"], rows))
        click.echo(f"# alpha={sol.alpha!r} beta={sol.beta!r} "
                   f"dN={sol.residuals[0]!r} dE={sol.residuals[1]!r} iterations={sol.iterations}")
        return
    click.echo(f"{problem.statistics} statistics, N = {_g(problem.N)}"
               + (f", E = {_g(problem.E)}" if problem.E is not None else ""))
    click.echo(f"alpha = {_g(sol.alpha)}")
    click.echo(f"beta  = {_g(sol.beta)}")
    click.echo(_table(["bin", "k", "energy", "nu", "nu/k"], rows))
    click.echo(f"residuals: dN = {sol.residuals[0]:.3g}, dE = {sol.residuals[1]:.3g}; "
               f"{sol.iterations} iterations ({sol.method})")


@cli.command("atom")
@click.argument("name", type=click.Choice(["na", "he"]))
@click.option("--format", "fmt", type=FORMATS, default="table", show_default=True)
def cmd_atom(name, fmt):
    """Show the sodium (na) or helium (he) preset."""
    if name == "na":
        system, bins = preset_sodium()
    else:
        system, bins = preset_helium(), None
    occ = occupations(system)
    verdicts = validate(system)
    coarse = coarse_relation(system, bins) if bins is not None else []
    parts = system.part_map
    owner = {s: p for p, s in system.R}
    if fmt == "json":
        obj = {
            "atom": system.name,
            "P": serialize(system.P),
            "states": [{"state": s, "part": owner.get(s), "occupation": n} for s, n in occ.items()],
            "bins": [{"states": list(c.states), "energy": c.energy, "occupation": c.occupation}
                     for c in coarse],
            "valid": all(v.passed for v in verdicts),
            "verdicts": [{"axiom": v.axiom, "passed": v.passed, "witness": v.witness}
                         for v in verdicts],
        }
        if name == "he":
            obj["p1_equiv_p2"] = weak_ext_equiv(parts["p1"], parts["p2"])
        click.echo(_json(obj))
        return
    rows = [[s, owner.get(s, ""), serialize(parts[owner[s]]) if s in owner else "[]", n]
            for s, n in occ.items()]
    if fmt == "csv":
        click.echo(_csv(["state", "part", "qset", "occupation"], rows))
        return
    click.echo(f"{system.name}: P = {serialize(system.P)}, qc(P) = {qc(system.P)}")
    click.echo(_table(["state", "part", "qset", "occupation"], rows))
    if coarse:
        click.echo("bins:")
        click.echo(_table(["states", "energy", "occupation"],
                          [[",".join(c.states), _g(c.energy), c.occupation] for c in coarse]))
        click.echo("coarse occupations: " + ",".join(str(c.occupation) for c in coarse))
    if name == "he":
        same = weak_ext_equiv(parts["p1"], parts["p2"])
        click.echo(f"p1 and p2 indistinguishable: {'yes' if same else 'no'}")
    failed = [v.axiom for v in verdicts if not v.passed]
    click.echo("Q1-Q10: all pass" if not failed else "failed: " + ", ".join(failed))


def main():
    try:
        cli(standalone_mode=True)
    except (BinningIncomplete, StructureError) as exc:
        _fail(str(exc), EXIT_INPUT)
    except QuasistatError as exc:
        _fail(str(exc), EXIT_INPUT)


if __name__ == "__main__":
    main()
